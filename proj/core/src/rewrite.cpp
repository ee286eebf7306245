#include "fluxq/rewrite.hpp"

#include "fluxq/error.hpp"

namespace fluxq {

Rewriter::Rewriter(const Schema& schema, RewriteOptions options)
    : schema_(schema), options_(options) {
  elements_[kRootVar] = Schema::kDocument;
}

const ContentModel* Rewriter::model_of(const std::string& var) const {
  auto it = elements_.find(var);
  if (it == elements_.end()) return nullptr;
  return schema_.find(it->second);
}

// Ord_{$var}(b, a); vacuously true when the element is unknown (dead code).
bool Rewriter::ord(const std::string& var, const std::string& b, const std::string& a) const {
  const ContentModel* m = model_of(var);
  return m == nullptr || m->ord.holds(b, a);
}

FPtr Rewriter::rewrite_query(const XPtr& normalized) {
  if (!is_normal_form(*normalized)) throw NotNormalForm("rewrite expects a normalized query");
  return rewrite(kRootVar, {}, normalized);
}

namespace {

std::set<std::string> unite(std::set<std::string> a, const std::set<std::string>& b) {
  a.insert(b.begin(), b.end());
  return a;
}

const std::vector<Handler>& handlers_of(const FPtr& f, const std::string& x) {
  if (f->kind != FluxExpr::Kind::Ps || f->var != x || !f->prefix.empty() || !f->suffix.empty()) {
    throw std::logic_error("rewrite of a sequence member did not yield a stream block over " + x);
  }
  return f->handlers;
}

}  // namespace

FPtr Rewriter::rewrite(const std::string& x, const std::set<std::string>& handled, const XPtr& beta) {
  if (outputs_var(*beta, x)) {
    if (is_simple(*beta) && dependencies(x, *beta).empty()) return FluxExpr::make_simple(beta);
    return FluxExpr::ps(x, {Handler::on_first_all(beta)});
  }
  if (beta->kind == XQuery::Kind::Seq) {
    XPtr head = beta->items.front();
    XPtr rest = XQuery::seq(std::vector<XPtr>(beta->items.begin() + 1, beta->items.end()));
    FPtr first = rewrite(x, handled, head);
    std::vector<Handler> zeta = handlers_of(first, x);
    FPtr second = rewrite(x, unite(handled, hsymb(zeta)), rest);
    const auto& zeta2 = handlers_of(second, x);
    zeta.insert(zeta.end(), zeta2.begin(), zeta2.end());
    return FluxExpr::ps(x, std::move(zeta));
  }
  if (is_simple(*beta)) {
    return FluxExpr::ps(x, {Handler::on_first(unite(dependencies(x, *beta), handled), beta)});
  }
  if (beta->kind == XQuery::Kind::For) return rewrite_for(x, handled, beta);
  throw std::logic_error("rewrite: unexpected expression " + to_string(*beta));
}

FPtr Rewriter::rewrite_for(const std::string& x, const std::set<std::string>& handled,
                           const XPtr& beta) {
  const std::string& a = beta->path.front();
  const std::string& y = beta->var;
  auto deps = dependencies(x, *beta->body);
  auto candidates = unite(deps, handled);
  if (beta->source != x) {
    // `a` is not a child of $x here, so an order test against it says
    // nothing; the loop must wait for everything it reads below $x.
    return FluxExpr::ps(x, {Handler::on_first(candidates, beta)});
  }
  const ContentModel* m = model_of(x);
  if (m != nullptr && !m->symbols().count(a)) {
    std::string msg = "for-loop over " + x + "/" + a + ": element '" + elements_.at(x) +
                      "' has no child '" + a + "'";
    if (!options_.allow_dead_loops) throw ElementNotInSchema(msg);
    warnings_.push_back(msg + " (loop never runs)");
  }
  std::set<std::string> xs;
  for (const auto& b : candidates) {
    // the a-child being read is never complete, whatever Ord says
    if (!ord(x, b, a) || (b == a && deps.count(b))) xs.insert(b);
  }
  if (!xs.empty()) {
    xs.insert(a);
    return FluxExpr::ps(x, {Handler::on_first(xs, beta)});
  }
  elements_[y] = a;
  FPtr inner = rewrite(y, {}, beta->body);
  return FluxExpr::ps(x, {Handler::on(a, y, inner)});
}

Compilation compile(const XPtr& query, const Schema& schema, const RewriteOptions& options) {
  Compilation c;
  c.query = query;
  for (const auto& v : free_vars(*query)) {
    if (v != kRootVar) throw ParseError("free variable " + v + " in query", 0);
  }
  auto n = normalize(query);
  c.normal_form = n.expr;
  c.report = n.report;
  Rewriter r(schema, options);
  c.flux = r.rewrite_query(n.expr);
  c.warnings = r.warnings();
  auto violations = check_safety(*c.flux, schema, options.allow_dead_loops);
  if (!violations.empty()) {
    std::string msg = "rewritten query is not safe:";
    for (const auto& v : violations) {
      msg += std::string("\n  ") + to_string(v.kind) + " at " + v.location + ": " + v.detail;
    }
    throw SafetyError(msg);
  }
  return c;
}

Compilation compile(const std::string& query_text, const Schema& schema,
                    const RewriteOptions& options) {
  return compile(parse_xquery(query_text), schema, options);
}

}  // namespace fluxq

#include "fluxq/flux.hpp"

#include <functional>
#include <optional>

#include "fluxq/error.hpp"

namespace fluxq {

Handler Handler::on_first(std::set<std::string> past, XPtr body) {
  Handler h;
  h.kind = Kind::OnFirst;
  h.past = std::move(past);
  h.body = std::move(body);
  return h;
}

Handler Handler::on_first_all(XPtr body) {
  Handler h;
  h.kind = Kind::OnFirst;
  h.past_all = true;
  h.body = std::move(body);
  return h;
}

Handler Handler::on(std::string symbol, std::string var, FPtr flux) {
  Handler h;
  h.kind = Kind::On;
  h.symbol = std::move(symbol);
  h.var = std::move(var);
  h.flux = std::move(flux);
  return h;
}

FPtr FluxExpr::make_simple(XPtr e) {
  auto f = std::make_shared<FluxExpr>();
  f->kind = Kind::Simple;
  f->simple = std::move(e);
  return f;
}

FPtr FluxExpr::ps(std::string var, std::vector<Handler> handlers, std::string prefix,
                  std::string suffix) {
  auto f = std::make_shared<FluxExpr>();
  f->kind = Kind::Ps;
  f->var = std::move(var);
  f->handlers = std::move(handlers);
  f->prefix = std::move(prefix);
  f->suffix = std::move(suffix);
  return f;
}

bool is_simple(const XQuery& e) {
  using K = XQuery::Kind;
  std::vector<XPtr> items;
  if (e.kind == K::Seq) {
    items = e.items;
  } else if (e.kind != K::Empty) {
    items.push_back(std::make_shared<const XQuery>(e));
  }
  int beta = -1;
  for (std::size_t i = 0; i < items.size(); ++i) {
    const XQuery& it = *items[i];
    const XQuery& core = it.kind == K::If ? *it.body : it;
    if (core.kind == K::Str) continue;
    if (core.kind != K::VarOut || beta >= 0) return false;
    beta = static_cast<int>(i);
  }
  if (beta < 0) return true;
  const std::string& u = items[beta]->kind == K::If ? items[beta]->body->var : items[beta]->var;
  for (int i = 0; i <= beta; ++i) {
    if (items[i]->kind == K::If && condition_vars(*items[i]->cond).count(u)) return false;
  }
  return true;
}

namespace {

void collect_maximal(const FluxExpr& q, const std::string& ps_var, std::vector<std::string>& hvars,
                     const std::string& loc, MaximalSubexpr::Holder holder,
                     std::vector<MaximalSubexpr>& out) {
  if (q.kind == FluxExpr::Kind::Simple) {
    out.push_back({q.simple, ps_var, hvars, loc, holder});
    return;
  }
  std::string base = (loc.empty() ? "" : loc + "/") + "ps " + q.var;
  for (std::size_t i = 0; i < q.handlers.size(); ++i) {
    const Handler& h = q.handlers[i];
    if (h.kind == Handler::Kind::OnFirst) {
      out.push_back({h.body, q.var, hvars, base + "/on-first#" + std::to_string(i + 1),
                     MaximalSubexpr::Holder::OnFirst});
    } else {
      hvars.push_back(h.var);
      collect_maximal(*h.flux, q.var, hvars, base + "/on " + h.symbol,
                      MaximalSubexpr::Holder::OnBody, out);
      hvars.pop_back();
    }
  }
}

}  // namespace

std::vector<MaximalSubexpr> maximal_xquery_subexprs(const FluxExpr& q) {
  std::vector<MaximalSubexpr> out;
  std::vector<std::string> hvars;
  collect_maximal(q, kRootVar, hvars, "", MaximalSubexpr::Holder::Query, out);
  return out;
}

std::set<std::string> hsymb(const std::vector<Handler>& handlers) {
  std::set<std::string> out;
  for (const auto& h : handlers) {
    if (h.kind == Handler::Kind::On) {
      out.insert(h.symbol);
    } else {
      out.insert(h.past.begin(), h.past.end());
    }
  }
  return out;
}

std::set<std::string> free_vars(const FluxExpr& q) {
  if (q.kind == FluxExpr::Kind::Simple) return free_vars(*q.simple);
  std::set<std::string> out{q.var};
  for (const auto& h : q.handlers) {
    std::set<std::string> f;
    if (h.kind == Handler::Kind::OnFirst) {
      f = free_vars(*h.body);
    } else {
      f = free_vars(*h.flux);
      f.erase(h.var);
    }
    out.insert(f.begin(), f.end());
  }
  return out;
}

std::set<std::string> effective_past(const Handler& h, const std::set<std::string>& var_symbols) {
  return h.past_all ? var_symbols : h.past;
}

const char* to_string(SafetyViolation::Kind k) {
  switch (k) {
    case SafetyViolation::Kind::DependencyNotPast:
      return "dependency-not-past";
    case SafetyViolation::Kind::SubtreeOutputUnsafe:
      return "subtree-output-unsafe";
    case SafetyViolation::Kind::OnHandlerOrder:
      return "on-handler-order";
    case SafetyViolation::Kind::OnHandlerForeignVar:
      return "on-handler-foreign-var";
  }
  return "?";
}

namespace {

// Variables output as `{$z}` or `{$z/pi}` somewhere in e.
void output_vars(const XQuery& e, std::set<std::string>& out) {
  if (e.kind == XQuery::Kind::VarOut || e.kind == XQuery::Kind::PathOut) out.insert(e.var);
  for (const auto& it : e.items) output_vars(*it, out);
  if (e.body) output_vars(*e.body, out);
}

void var_outs(const XQuery& e, std::set<std::string>& out) {
  if (e.kind == XQuery::Kind::VarOut) out.insert(e.var);
  for (const auto& it : e.items) var_outs(*it, out);
  if (e.body) var_outs(*e.body, out);
}

class SafetyChecker {
 public:
  SafetyChecker(const Schema& schema, bool allow_dead) : schema_(schema), allow_dead_(allow_dead) {}

  void check(const FluxExpr& q, std::map<std::string, std::string>& env, const std::string& loc) {
    if (q.kind == FluxExpr::Kind::Simple) return;
    auto it = env.find(q.var);
    if (it == env.end()) {
      throw UnknownElement("cannot determine the element bound to " + q.var +
                           " (process-stream over a variable not bound by an on-handler)");
    }
    const ContentModel& model = schema_.model(it->second);
    const auto& symb = model.symbols();
    std::string base = (loc.empty() ? "" : loc + "/") + "ps " + q.var;

    auto past_covers = [&](const std::set<std::string>& s, const std::string& b) {
      if (s.count(b)) return true;
      for (const auto& a : s) {
        if (model.ord.holds(b, a)) return true;
      }
      return false;
    };

    for (std::size_t i = 0; i < q.handlers.size(); ++i) {
      const Handler& h = q.handlers[i];
      if (h.kind == Handler::Kind::OnFirst) {
        std::string hl = base + "/on-first#" + std::to_string(i + 1);
        std::set<std::string> s = effective_past(h, symb);
        for (const auto& b : dependencies(q.var, *h.body)) {
          if (!past_covers(s, b)) {
            out_.push_back({SafetyViolation::Kind::DependencyNotPast, hl,
                            b + " may still occur under " + q.var});
          }
        }
        std::set<std::string> outs;
        output_vars(*h.body, outs);
        auto free = free_vars(*h.body);
        for (const auto& z : outs) {
          if (!free.count(z)) continue;
          if (z != q.var) {
            out_.push_back({SafetyViolation::Kind::SubtreeOutputUnsafe, hl,
                            "outputs " + z + " inside process-stream " + q.var});
            continue;
          }
          for (const auto& b : symb) {
            if (!past_covers(s, b)) {
              out_.push_back({SafetyViolation::Kind::SubtreeOutputUnsafe, hl,
                              "outputs " + z + " before " + b + " is past"});
            }
          }
        }
      } else {
        std::string hl = base + "/on " + h.symbol;
        if (!symb.count(h.symbol)) {
          if (allow_dead_) continue;
          throw UnknownElement("on-handler symbol '" + h.symbol + "' is not a child of '" +
                               it->second + "'");
        }
        for (const auto& m : maximal_xquery_subexprs(*h.flux)) {
          for (const auto& b : dependencies(q.var, *m.expr)) {
            if (b == h.symbol) {
              out_.push_back({SafetyViolation::Kind::OnHandlerOrder, hl,
                              "reads the " + b + " child of " + q.var + " while it is open"});
            } else if (!model.ord.holds(b, h.symbol)) {
              out_.push_back({SafetyViolation::Kind::OnHandlerOrder, hl,
                              b + " may follow " + h.symbol + " under " + q.var});
            }
          }
        }
        if (h.flux->kind == FluxExpr::Kind::Simple) {
          std::set<std::string> vs;
          var_outs(*h.flux->simple, vs);
          for (const auto& u : vs) {
            if (u != h.var) {
              out_.push_back({SafetyViolation::Kind::OnHandlerForeignVar, hl,
                              "outputs " + u + " instead of " + h.var});
            }
          }
        }
        auto saved = env.find(h.var) == env.end() ? std::optional<std::string>{}
                                                  : std::optional<std::string>{env[h.var]};
        env[h.var] = h.symbol;
        check(*h.flux, env, hl);
        if (saved) {
          env[h.var] = *saved;
        } else {
          env.erase(h.var);
        }
      }
    }
  }

  std::vector<SafetyViolation> out_;

 private:
  const Schema& schema_;
  bool allow_dead_;
};

void collect_elements(const FluxExpr& q, std::map<std::string, std::string>& out) {
  if (q.kind != FluxExpr::Kind::Ps) return;
  for (const auto& h : q.handlers) {
    if (h.kind != Handler::Kind::On) continue;
    out[h.var] = h.symbol;
    collect_elements(*h.flux, out);
  }
}

}  // namespace

std::vector<SafetyViolation> check_safety(const FluxExpr& q, const Schema& schema,
                                          bool allow_dead_handlers) {
  SafetyChecker c(schema, allow_dead_handlers);
  std::map<std::string, std::string> env{{kRootVar, Schema::kDocument}};
  c.check(q, env, "");
  return c.out_;
}

std::map<std::string, std::string> handler_var_elements(const FluxExpr& q) {
  std::map<std::string, std::string> out{{kRootVar, Schema::kDocument}};
  collect_elements(q, out);
  return out;
}

bool equal(const FluxExpr& a, const FluxExpr& b) {
  if (a.kind != b.kind) return false;
  if (a.kind == FluxExpr::Kind::Simple) return equal(*a.simple, *b.simple);
  if (a.var != b.var || a.prefix != b.prefix || a.suffix != b.suffix ||
      a.handlers.size() != b.handlers.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.handlers.size(); ++i) {
    const Handler& x = a.handlers[i];
    const Handler& y = b.handlers[i];
    if (x.kind != y.kind) return false;
    if (x.kind == Handler::Kind::OnFirst) {
      if (x.past_all != y.past_all || x.past != y.past || !equal(*x.body, *y.body)) return false;
    } else {
      if (x.symbol != y.symbol || x.var != y.var || !equal(*x.flux, *y.flux)) return false;
    }
  }
  return true;
}

namespace {

FPtr canon(const FPtr& q, const std::map<std::string, std::string>& env, int& counter) {
  auto rn = [&](const std::string& v) {
    auto it = env.find(v);
    return it == env.end() ? v : it->second;
  };
  if (q->kind == FluxExpr::Kind::Simple) {
    return FluxExpr::make_simple(alpha_canonical(q->simple, env, counter));
  }
  std::vector<Handler> hs;
  for (const auto& h : q->handlers) {
    Handler c = h;
    if (h.kind == Handler::Kind::OnFirst) {
      c.body = alpha_canonical(h.body, env, counter);
    } else {
      auto inner = env;
      c.var = "$v" + std::to_string(++counter);
      inner[h.var] = c.var;
      c.flux = canon(h.flux, inner, counter);
    }
    hs.push_back(std::move(c));
  }
  return FluxExpr::ps(rn(q->var), std::move(hs), q->prefix, q->suffix);
}

}  // namespace

FPtr alpha_canonical(const FPtr& q) {
  int counter = 0;
  return canon(q, {}, counter);
}

bool alpha_equal(const FPtr& a, const FPtr& b) {
  return equal(*alpha_canonical(a), *alpha_canonical(b));
}

}  // namespace fluxq

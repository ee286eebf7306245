#include "fluxq/normalize.hpp"

#include <map>
#include <set>

namespace fluxq {

namespace {

using K = XQuery::Kind;

class Normalizer {
 public:
  Normalizer(const XPtr& input, NormalizeStrategy strategy) : strategy_(strategy) {
    collect_names(*input);
    user_ = used_;
  }

  XPtr run(const XPtr& e) {
    XPtr out = strategy_ == NormalizeStrategy::OutermostFirst ? outer(e) : inner(e);
    return number_fresh(out);
  }

  NormalizationReport report;

 private:
  void collect_names(const XQuery& e) {
    if (!e.var.empty()) used_.insert(e.var);
    if (!e.source.empty()) used_.insert(e.source);
    for (const auto& it : e.items) collect_names(*it);
    if (e.body) collect_names(*e.body);
  }

  std::string fresh() {
    std::string v;
    do {
      v = "$_t" + std::to_string(++counter_);
    } while (used_.count(v));
    used_.insert(v);
    temps_.insert(v);
    return v;
  }

  // Generated variables are named $_g1, $_g2, ... in top-down, left-to-right
  // binding order of the result, independent of the order the rules fired.
  XPtr number_fresh(const XPtr& e) {
    std::map<std::string, std::string> names;
    int n = 0;
    visit_binders(*e, [&](const std::string& v) {
      if (!temps_.count(v) || names.count(v)) return;
      std::string g;
      do {
        g = "$_g" + std::to_string(++n);
      } while (user_.count(g));
      names[v] = g;
      report.fresh_vars.push_back(g);
    });
    return rename(e, names);
  }

  template <typename F>
  static void visit_binders(const XQuery& e, const F& f) {
    if (e.kind == K::For || e.kind == K::ForWhere) f(e.var);
    for (const auto& it : e.items) visit_binders(*it, f);
    if (e.body) visit_binders(*e.body, f);
  }

  static XPtr rename(const XPtr& e, const std::map<std::string, std::string>& m) {
    auto rn = [&](const std::string& v) {
      auto it = m.find(v);
      return it == m.end() ? v : it->second;
    };
    switch (e->kind) {
      case K::Seq: {
        std::vector<XPtr> items;
        for (const auto& it : e->items) items.push_back(rename(it, m));
        return XQuery::seq(std::move(items));
      }
      case K::For:
        return XQuery::for_(rn(e->var), rn(e->source), e->path, rename(e->body, m));
      case K::ForWhere:
        return XQuery::for_where(rn(e->var), rn(e->source), e->path, rename_vars(e->cond, m),
                                 rename(e->body, m));
      case K::PathOut:
        return XQuery::path_out(rn(e->var), e->path);
      case K::VarOut:
        return XQuery::var_out(rn(e->var));
      case K::If:
        return XQuery::if_(rename_vars(e->cond, m), rename(e->body, m));
      default:
        return e;
    }
  }

  void count(int rule) {
    ++report.rule_applications;
    ++report.per_rule[rule];
  }

  // One rule application at the root of e, or nullptr.
  XPtr step(const XPtr& e) {
    switch (e->kind) {
      case K::ForWhere:
        count(0);
        return XQuery::for_(e->var, e->source, e->path, XQuery::if_(e->cond, e->body));
      case K::PathOut: {
        count(1);
        std::string x = fresh();
        return XQuery::for_(x, e->var, e->path, XQuery::var_out(x));
      }
      case K::For:
        if (e->path.size() > 1) {
          count(2);
          std::string x0 = fresh();
          std::vector<std::string> rest(e->path.begin() + 1, e->path.end());
          return XQuery::for_(x0, e->source, {e->path.front()},
                              XQuery::for_(e->var, x0, std::move(rest), e->body));
        }
        return nullptr;
      case K::If: {
        const XPtr& b = e->body;
        if (b->kind == K::For) {
          count(3);
          return XQuery::for_(b->var, b->source, b->path, XQuery::if_(e->cond, b->body));
        }
        if (b->kind == K::Seq) {
          count(4);
          std::vector<XPtr> rest(b->items.begin() + 1, b->items.end());
          return XQuery::seq({XQuery::if_(e->cond, b->items.front()),
                              XQuery::if_(e->cond, XQuery::seq(std::move(rest)))});
        }
        if (b->kind == K::If) {
          count(5);
          return XQuery::if_(Condition::conj(e->cond, b->cond), b->body);
        }
        if (b->kind == K::Empty) {
          count(6);
          return XQuery::empty();
        }
        return nullptr;
      }
      default:
        return nullptr;
    }
  }

  XPtr rebuild(const XPtr& e, const std::vector<XPtr>& items, const XPtr& body) {
    switch (e->kind) {
      case K::Seq:
        return XQuery::seq(items);
      case K::For:
        return XQuery::for_(e->var, e->source, e->path, body);
      case K::ForWhere:
        return XQuery::for_where(e->var, e->source, e->path, e->cond, body);
      case K::If:
        return XQuery::if_(e->cond, body);
      default:
        return e;
    }
  }

  XPtr outer(XPtr e) {
    for (;;) {
      while (XPtr n = step(e)) e = n;
      std::vector<XPtr> items;
      bool changed = false;
      for (const auto& it : e->items) {
        items.push_back(outer(it));
        changed = changed || items.back() != it;
      }
      XPtr body;
      if (e->body) {
        body = outer(e->body);
        changed = changed || body != e->body;
      }
      if (!changed) return e;
      e = rebuild(e, items, body);
    }
  }

  XPtr inner(XPtr e) {
    std::vector<XPtr> items;
    for (const auto& it : e->items) items.push_back(inner(it));
    XPtr body = e->body ? inner(e->body) : nullptr;
    e = rebuild(e, items, body);
    if (XPtr n = step(e)) return inner(n);
    return e;
  }

  NormalizeStrategy strategy_;
  std::set<std::string> used_;
  std::set<std::string> user_;
  std::set<std::string> temps_;
  int counter_ = 0;
};

}  // namespace

NormalizeResult normalize(const XPtr& e, NormalizeStrategy strategy) {
  Normalizer n(e, strategy);
  XPtr out = n.run(e);
  return {out, n.report};
}

bool is_normal_form(const XQuery& e) {
  switch (e.kind) {
    case K::Empty:
    case K::Str:
    case K::VarOut:
      return true;
    case K::Seq:
      for (const auto& it : e.items) {
        if (!is_normal_form(*it)) return false;
      }
      return true;
    case K::For:
      return e.path.size() == 1 && is_normal_form(*e.body);
    case K::ForWhere:
    case K::PathOut:
      return false;
    case K::If:
      return e.body->kind == K::Str || e.body->kind == K::VarOut;
  }
  return false;
}

}  // namespace fluxq

#include "fluxq/xquery.hpp"

#include <functional>
#include <map>

namespace fluxq {

const char* to_string(RelOp op) {
  switch (op) {
    case RelOp::Eq:
      return "=";
    case RelOp::Lt:
      return "<";
    case RelOp::Le:
      return "<=";
    case RelOp::Gt:
      return ">";
    case RelOp::Ge:
      return ">=";
  }
  return "?";
}

// ---- condition factories ---------------------------------------------------

namespace {

CondPtr make_cond(Condition c) { return std::make_shared<const Condition>(std::move(c)); }

CondPtr binary(Condition::Kind k, CondPtr a, CondPtr b) {
  Condition c;
  c.kind = k;
  for (auto* x : {&a, &b}) {
    if ((*x)->kind == k) {
      c.children.insert(c.children.end(), (*x)->children.begin(), (*x)->children.end());
    } else {
      c.children.push_back(*x);
    }
  }
  return make_cond(std::move(c));
}

}  // namespace

CondPtr Condition::truth() { return make_cond(Condition{}); }
CondPtr Condition::conj(CondPtr a, CondPtr b) { return binary(Kind::And, std::move(a), std::move(b)); }
CondPtr Condition::disj(CondPtr a, CondPtr b) { return binary(Kind::Or, std::move(a), std::move(b)); }

CondPtr Condition::negate(CondPtr a) {
  Condition c;
  c.kind = Kind::Not;
  c.children.push_back(std::move(a));
  return make_cond(std::move(c));
}

CondPtr Condition::compare(VarPath p, RelOp op, std::string literal) {
  Condition c;
  c.kind = Kind::Compare;
  c.lhs = std::move(p);
  c.op = op;
  c.literal = std::move(literal);
  return make_cond(std::move(c));
}

CondPtr Condition::exists(VarPath p) {
  Condition c;
  c.kind = Kind::Exists;
  c.lhs = std::move(p);
  return make_cond(std::move(c));
}

CondPtr Condition::join(VarPath l, RelOp op, VarPath r) {
  Condition c;
  c.kind = Kind::Join;
  c.lhs = std::move(l);
  c.op = op;
  c.rhs = std::move(r);
  return make_cond(std::move(c));
}

// ---- expression factories --------------------------------------------------

namespace {

XPtr make(XQuery x) { return std::make_shared<const XQuery>(std::move(x)); }

}  // namespace

XPtr XQuery::empty() {
  static const XPtr e = make(XQuery{});
  return e;
}

XPtr XQuery::str(std::string text) {
  if (text.empty()) return empty();
  XQuery x;
  x.kind = Kind::Str;
  x.text = std::move(text);
  return make(std::move(x));
}

XPtr XQuery::seq(std::vector<XPtr> items) {
  std::vector<XPtr> flat;
  for (auto& it : items) {
    if (!it || it->kind == Kind::Empty) continue;
    if (it->kind == Kind::Seq) {
      flat.insert(flat.end(), it->items.begin(), it->items.end());
    } else {
      flat.push_back(std::move(it));
    }
  }
  if (flat.empty()) return empty();
  if (flat.size() == 1) return flat.front();
  XQuery x;
  x.kind = Kind::Seq;
  x.items = std::move(flat);
  return make(std::move(x));
}

XPtr XQuery::for_(std::string var, std::string source, std::vector<std::string> path, XPtr body) {
  XQuery x;
  x.kind = Kind::For;
  x.var = std::move(var);
  x.source = std::move(source);
  x.path = std::move(path);
  x.body = std::move(body);
  return make(std::move(x));
}

XPtr XQuery::for_where(std::string var, std::string source, std::vector<std::string> path,
                       CondPtr cond, XPtr body) {
  XQuery x;
  x.kind = Kind::ForWhere;
  x.var = std::move(var);
  x.source = std::move(source);
  x.path = std::move(path);
  x.cond = std::move(cond);
  x.body = std::move(body);
  return make(std::move(x));
}

XPtr XQuery::path_out(std::string var, std::vector<std::string> path) {
  if (path.empty()) return var_out(std::move(var));
  XQuery x;
  x.kind = Kind::PathOut;
  x.var = std::move(var);
  x.path = std::move(path);
  return make(std::move(x));
}

XPtr XQuery::var_out(std::string var) {
  XQuery x;
  x.kind = Kind::VarOut;
  x.var = std::move(var);
  return make(std::move(x));
}

XPtr XQuery::if_(CondPtr cond, XPtr body) {
  XQuery x;
  x.kind = Kind::If;
  x.cond = std::move(cond);
  x.body = std::move(body);
  return make(std::move(x));
}

// ---- equality --------------------------------------------------------------

bool equal(const Condition& a, const Condition& b) {
  if (&a == &b) return true;
  if (a.kind != b.kind || a.op != b.op || a.lhs != b.lhs || a.rhs != b.rhs ||
      a.literal != b.literal || a.children.size() != b.children.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.children.size(); ++i) {
    if (!equal(*a.children[i], *b.children[i])) return false;
  }
  return true;
}

bool equal(const XQuery& a, const XQuery& b) {
  if (&a == &b) return true;
  if (a.kind != b.kind || a.text != b.text || a.var != b.var || a.source != b.source ||
      a.path != b.path || a.items.size() != b.items.size()) {
    return false;
  }
  if (static_cast<bool>(a.cond) != static_cast<bool>(b.cond)) return false;
  if (a.cond && !equal(*a.cond, *b.cond)) return false;
  if (static_cast<bool>(a.body) != static_cast<bool>(b.body)) return false;
  if (a.body && !equal(*a.body, *b.body)) return false;
  for (std::size_t i = 0; i < a.items.size(); ++i) {
    if (!equal(*a.items[i], *b.items[i])) return false;
  }
  return true;
}

namespace {

using Renaming = std::map<std::string, std::string>;

std::string rn(const Renaming& m, const std::string& v) {
  auto it = m.find(v);
  return it == m.end() ? v : it->second;
}

CondPtr rename_cond(const CondPtr& c, const Renaming& m) {
  Condition out = *c;
  out.lhs.var = rn(m, c->lhs.var);
  out.rhs.var = rn(m, c->rhs.var);
  for (auto& ch : out.children) ch = rename_cond(ch, m);
  return make_cond(std::move(out));
}

XPtr canon(const XPtr& e, Renaming m, int& counter) {
  using K = XQuery::Kind;
  switch (e->kind) {
    case K::Empty:
    case K::Str:
      return e;
    case K::Seq: {
      std::vector<XPtr> items;
      for (const auto& it : e->items) items.push_back(canon(it, m, counter));
      return XQuery::seq(std::move(items));
    }
    case K::For:
    case K::ForWhere: {
      std::string src = rn(m, e->source);
      std::string fresh = "$v" + std::to_string(++counter);
      m[e->var] = fresh;
      XPtr body = canon(e->body, m, counter);
      if (e->kind == K::For) return XQuery::for_(fresh, src, e->path, body);
      return XQuery::for_where(fresh, src, e->path, rename_cond(e->cond, m), body);
    }
    case K::PathOut:
      return XQuery::path_out(rn(m, e->var), e->path);
    case K::VarOut:
      return XQuery::var_out(rn(m, e->var));
    case K::If:
      return XQuery::if_(rename_cond(e->cond, m), canon(e->body, m, counter));
  }
  return e;
}

}  // namespace

XPtr alpha_canonical(const XPtr& e) {
  int counter = 0;
  return canon(e, {}, counter);
}

XPtr alpha_canonical(const XPtr& e, const std::map<std::string, std::string>& env, int& counter) {
  return canon(e, env, counter);
}

CondPtr rename_vars(const CondPtr& c, const std::map<std::string, std::string>& env) {
  return rename_cond(c, env);
}

bool alpha_equal(const XPtr& a, const XPtr& b) {
  return equal(*alpha_canonical(a), *alpha_canonical(b));
}

std::vector<XPtr> seq_items(const XPtr& e) {
  if (e->kind == XQuery::Kind::Empty) return {};
  if (e->kind == XQuery::Kind::Seq) return e->items;
  return {e};
}

// ---- analyses --------------------------------------------------------------

void collect_condition_paths(const Condition& c, std::set<VarPath>& out) {
  using K = Condition::Kind;
  switch (c.kind) {
    case K::Compare:
    case K::Exists:
      out.insert(c.lhs);
      break;
    case K::Join:
      out.insert(c.lhs);
      out.insert(c.rhs);
      break;
    default:
      for (const auto& ch : c.children) collect_condition_paths(*ch, out);
  }
}

std::set<std::string> condition_vars(const Condition& c) {
  std::set<VarPath> paths;
  collect_condition_paths(c, paths);
  std::set<std::string> out;
  for (const auto& p : paths) out.insert(p.var);
  return out;
}

std::set<std::string> free_vars(const XQuery& e) {
  using K = XQuery::Kind;
  std::set<std::string> out;
  switch (e.kind) {
    case K::Empty:
    case K::Str:
      break;
    case K::Seq:
      for (const auto& it : e.items) {
        auto f = free_vars(*it);
        out.insert(f.begin(), f.end());
      }
      break;
    case K::For:
    case K::ForWhere: {
      out = free_vars(*e.body);
      if (e.cond) {
        auto c = condition_vars(*e.cond);
        out.insert(c.begin(), c.end());
      }
      out.erase(e.var);
      out.insert(e.source);
      break;
    }
    case K::PathOut:
    case K::VarOut:
      out.insert(e.var);
      break;
    case K::If:
      out = free_vars(*e.body);
      for (const auto& v : condition_vars(*e.cond)) out.insert(v);
      break;
  }
  return out;
}

namespace {

template <typename F>
void visit(const XQuery& e, const F& f) {
  f(e);
  for (const auto& it : e.items) visit(*it, f);
  if (e.body) visit(*e.body, f);
}

}  // namespace

std::set<VarPath> condition_paths(const XQuery& e) {
  std::set<VarPath> out;
  visit(e, [&](const XQuery& n) {
    if (n.cond) collect_condition_paths(*n.cond, out);
  });
  return out;
}

std::set<std::string> dependencies(const std::string& y, const XQuery& e) {
  std::set<std::string> out;
  for (const auto& p : condition_paths(e)) {
    if (p.var == y && !p.steps.empty()) out.insert(p.steps.front());
  }
  visit(e, [&](const XQuery& n) {
    if ((n.kind == XQuery::Kind::For || n.kind == XQuery::Kind::ForWhere) && n.source == y) {
      out.insert(n.path.front());
    }
  });
  return out;
}

bool outputs_var(const XQuery& e, const std::string& x) {
  bool found = false;
  visit(e, [&](const XQuery& n) {
    if (n.kind == XQuery::Kind::VarOut && n.var == x) found = true;
  });
  return found;
}

namespace {

bool find_parent(const XPtr& sub, const XPtr& node, const std::string& current,
                 std::string& result) {
  if (node.get() == sub.get()) {
    result = current;
    return true;
  }
  for (const auto& it : node->items) {
    if (find_parent(sub, it, current, result)) return true;
  }
  if (node->body) {
    bool binds = node->kind == XQuery::Kind::For || node->kind == XQuery::Kind::ForWhere;
    if (find_parent(sub, node->body, binds ? node->var : current, result)) return true;
  }
  return false;
}

}  // namespace

std::optional<std::string> parent_var(const XPtr& sub, const XPtr& q) {
  std::string result;
  if (find_parent(sub, q, kRootVar, result)) return result;
  return std::nullopt;
}

namespace {

std::size_t cond_size(const Condition& c) {
  std::size_t n = 1;
  for (const auto& ch : c.children) n += cond_size(*ch);
  return n;
}

}  // namespace

std::size_t size(const XQuery& e) {
  std::size_t n = 0;
  visit(e, [&](const XQuery& x) {
    n += 1;
    if (x.cond) n += cond_size(*x.cond);
  });
  return n;
}

std::vector<std::string> binders(const XQuery& e) {
  std::vector<std::string> out;
  visit(e, [&](const XQuery& n) {
    if (n.kind == XQuery::Kind::For || n.kind == XQuery::Kind::ForWhere) out.push_back(n.var);
  });
  return out;
}

}  // namespace fluxq

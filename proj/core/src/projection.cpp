#include "fluxq/projection.hpp"

#include <functional>
#include <sstream>

namespace fluxq {

const char* to_string(PathKind k) {
  switch (k) {
    case PathKind::Structural: return "structural";
    case PathKind::OutputSubtree: return "output";
    case PathKind::JoinOperand: return "join";
  }
  return "?";
}

std::string to_string(const BufferPath& p) {
  std::string s = p.var;
  for (const auto& st : p.steps) s += "/" + st;
  return s + " (" + to_string(p.kind) + ")";
}

namespace {

void join_operands(const Condition& c, const std::string& r, std::set<BufferPath>& out) {
  switch (c.kind) {
    case Condition::Kind::Join:
      if (c.lhs.var == r) out.insert({r, c.lhs.steps, PathKind::JoinOperand});
      if (c.rhs.var == r) out.insert({r, c.rhs.steps, PathKind::JoinOperand});
      return;
    case Condition::Kind::And:
    case Condition::Kind::Or:
    case Condition::Kind::Not:
      for (const auto& ch : c.children) join_operands(*ch, r, out);
      return;
    default:
      return;
  }
}

void paths(const std::string& r, const XQuery& e, bool stream_outputs, std::set<BufferPath>& out);

// Pi(r, for $x in $y/steps return body), the loop path unfolded one step
// at a time.
void for_paths(const std::string& r, const std::string& x, const std::string& y,
               const std::vector<std::string>& steps, const XQuery& body, bool stream_outputs,
               std::set<BufferPath>& out) {
  paths(r, body, stream_outputs, out);
  if (y != r) return;
  std::set<BufferPath> inner;
  paths(x, body, stream_outputs, inner);
  if (inner.empty()) {
    out.insert({r, steps, PathKind::Structural});
    return;
  }
  for (const auto& p : inner) {
    BufferPath q{r, steps, p.kind};
    q.steps.insert(q.steps.end(), p.steps.begin(), p.steps.end());
    out.insert(std::move(q));
  }
}

void paths(const std::string& r, const XQuery& e, bool stream_outputs, std::set<BufferPath>& out) {
  using K = XQuery::Kind;
  switch (e.kind) {
    case K::Empty:
    case K::Str:
      return;
    case K::VarOut:
      if (e.var == r && !stream_outputs) out.insert({r, {}, PathKind::OutputSubtree});
      return;
    case K::PathOut:
      if (e.var == r) out.insert({r, e.path, PathKind::OutputSubtree});
      return;
    case K::Seq:
      for (const auto& it : e.items) paths(r, *it, stream_outputs, out);
      return;
    case K::For:
      for_paths(r, e.var, e.source, e.path, *e.body, stream_outputs, out);
      return;
    case K::ForWhere: {
      auto guarded = XQuery::if_(e.cond, e.body);
      for_paths(r, e.var, e.source, e.path, *guarded, stream_outputs, out);
      return;
    }
    case K::If:
      paths(r, *e.body, stream_outputs, out);
      join_operands(*e.cond, r, out);
      return;
  }
}

}  // namespace

std::set<BufferPath> buffer_paths(const std::string& r, const XQuery& alpha) {
  std::set<BufferPath> out;
  paths(r, alpha, false, out);
  return out;
}

std::set<BufferPath> buffer_paths(const std::string& r, const FluxExpr& q) {
  std::set<BufferPath> out;
  for (const auto& m : maximal_xquery_subexprs(q)) {
    bool streamed = m.holder != MaximalSubexpr::Holder::OnFirst;
    paths(r, *m.expr, streamed, out);
  }
  return out;
}

std::set<std::string> buffered_vars(const FluxExpr& q) {
  std::set<std::string> out;
  for (const auto& m : maximal_xquery_subexprs(q)) {
    auto f = free_vars(*m.expr);
    out.insert(f.begin(), f.end());
  }
  return out;
}

int BufferTree::child(int parent, const std::string& tag) const {
  const auto& ch = nodes_[parent].children;
  auto it = ch.find(tag);
  return it == ch.end() ? -1 : it->second;
}

int BufferTree::find(const std::vector<std::string>& steps) const {
  int cur = 0;
  for (const auto& s : steps) {
    if (nodes_[cur].marked) return cur;
    cur = child(cur, s);
    if (cur < 0) return -1;
  }
  return cur;
}

bool BufferTree::covered(int i) const {
  for (; i >= 0; i = nodes_[i].parent) {
    if (nodes_[i].marked) return true;
  }
  return false;
}

std::vector<std::string> BufferTree::path_of(int i) const {
  std::vector<std::string> out;
  for (; i > 0; i = nodes_[i].parent) out.insert(out.begin(), nodes_[i].tag);
  return out;
}

int BufferTree::add_child(int parent, const std::string& tag) {
  int c = child(parent, tag);
  if (c >= 0) return c;
  Node n;
  n.tag = tag;
  n.parent = parent;
  nodes_.push_back(std::move(n));
  c = static_cast<int>(nodes_.size()) - 1;
  nodes_[parent].children[tag] = c;
  return c;
}

std::string BufferTree::dump() const {
  std::ostringstream os;
  std::function<void(int, int)> rec = [&](int i, int depth) {
    const Node& n = nodes_[i];
    os << std::string(2 * depth, ' ') << (i == 0 ? var_ : n.tag) << (n.marked ? " *" : "")
       << "\n";
    for (const auto& [tag, c] : n.children) rec(c, depth + 1);
  };
  rec(0, 0);
  return os.str();
}

BufferTree build_buffer_tree(const std::string& r, const std::set<BufferPath>& paths) {
  // merge and mark
  BufferTree full(r);
  for (const auto& p : paths) {
    int cur = 0;
    for (const auto& s : p.steps) cur = full.add_child(cur, s);
    if (p.kind != PathKind::Structural) full.nodes_[cur].marked = true;
  }
  // prune below the topmost marked nodes
  BufferTree out(r);
  std::function<void(int, int)> copy = [&](int from, int to) {
    out.nodes_[to].marked = full.nodes_[from].marked;
    if (full.nodes_[from].marked) return;
    for (const auto& [tag, c] : full.nodes_[from].children) copy(c, out.add_child(to, tag));
  };
  copy(0, 0);
  return out;
}

std::map<std::string, BufferTree> buffer_trees(const FluxExpr& q) {
  std::map<std::string, BufferTree> out;
  for (const auto& v : buffered_vars(q)) {
    auto ps = buffer_paths(v, q);
    if (!ps.empty()) out.emplace(v, build_buffer_tree(v, ps));
  }
  return out;
}

}  // namespace fluxq

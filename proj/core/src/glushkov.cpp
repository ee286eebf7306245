#include "fluxq/glushkov.hpp"

#include <algorithm>
#include <deque>

#include "fluxq/error.hpp"

namespace fluxq {

namespace {

struct PositionSets {
  bool nullable = false;
  std::vector<int> first;
  std::vector<int> last;
};

void merge_into(std::vector<int>& dst, const std::vector<int>& src) {
  for (int p : src) {
    if (std::find(dst.begin(), dst.end(), p) == dst.end()) dst.push_back(p);
  }
}

class FollowBuilder {
 public:
  explicit FollowBuilder(int atoms) : follow_(atoms + 1), symbol_(atoms + 1) {}

  PositionSets visit(const RegExpr& r) {
    using K = RegExpr::Kind;
    switch (r.kind) {
      case K::Epsilon:
        return {true, {}, {}};
      case K::Atom:
        symbol_[r.position] = r.symbol;
        return {false, {r.position}, {r.position}};
      case K::Seq: {
        PositionSets acc = visit(r.children.front());
        for (std::size_t i = 1; i < r.children.size(); ++i) {
          PositionSets next = visit(r.children[i]);
          for (int p : acc.last) merge_into(follow_[p], next.first);
          if (acc.nullable) merge_into(acc.first, next.first);
          if (next.nullable) merge_into(next.last, acc.last);
          acc.last = std::move(next.last);
          acc.nullable = acc.nullable && next.nullable;
        }
        return acc;
      }
      case K::Alt: {
        PositionSets acc;
        for (const auto& c : r.children) {
          PositionSets s = visit(c);
          acc.nullable = acc.nullable || s.nullable;
          merge_into(acc.first, s.first);
          merge_into(acc.last, s.last);
        }
        return acc;
      }
      case K::Star:
      case K::Plus:
      case K::Opt: {
        PositionSets s = visit(r.children.front());
        if (r.kind != K::Opt) {
          for (int p : s.last) merge_into(follow_[p], s.first);
        }
        if (r.kind != K::Plus) s.nullable = true;
        return s;
      }
    }
    return {};
  }

  std::vector<std::vector<int>>& follow() { return follow_; }
  std::vector<std::string>& symbols() { return symbol_; }

 private:
  std::vector<std::vector<int>> follow_;
  std::vector<std::string> symbol_;
};

}  // namespace

GlushkovAutomaton GlushkovAutomaton::build(const RegExpr& r) {
  GlushkovAutomaton g = build_lenient(r);
  if (!g.deterministic()) throw NotOneUnambiguous(g.ambiguity());
  return g;
}

GlushkovAutomaton GlushkovAutomaton::build_lenient(const RegExpr& r) {
  MarkedRegExpr marked = mark(r);
  FollowBuilder fb(marked.atoms);
  PositionSets top = fb.visit(marked.expr);

  GlushkovAutomaton g;
  const int n = marked.atoms;
  g.symbol_of_ = std::move(fb.symbols());
  g.final_.assign(n + 1, false);
  g.final_[0] = top.nullable;
  for (int p : top.last) g.final_[p] = true;

  for (int q = 1; q <= n; ++q) {
    g.symbols_.insert(g.symbol_of_[q]);
    g.symbol_ids_.emplace(g.symbol_of_[q], static_cast<int>(g.symbol_ids_.size()));
  }
  g.delta_.assign(n + 1, std::vector<State>(g.symbol_ids_.size(), -1));
  g.succ_.assign(n + 1, {});

  auto add_edges = [&](State from, std::vector<int> targets) {
    std::sort(targets.begin(), targets.end());
    g.succ_[from] = targets;
    for (int p : targets) {
      int sid = g.symbol_ids_.at(g.symbol_of_[p]);
      State& slot = g.delta_[from][sid];
      if (slot != -1 && slot != p) {
        if (g.ambiguity_.empty()) {
          g.ambiguity_ = "content model " + to_string(r) + " is not one-unambiguous: '" +
                         g.symbol_of_[p] + "' at positions " + std::to_string(slot) + " and " +
                         std::to_string(p) + " compete for the same transition";
        }
        continue;
      }
      slot = p;
    }
  };
  add_edges(0, top.first);
  for (int q = 1; q <= n; ++q) add_edges(q, fb.follow()[q]);

  // Strict reachability: BFS seeded with direct successors.
  g.reach_.assign(n + 1, std::vector<bool>(n + 1, false));
  for (int q = 0; q <= n; ++q) {
    std::deque<State> work;
    for (State t : g.succ_[q]) {
      if (!g.reach_[q][t]) {
        g.reach_[q][t] = true;
        work.push_back(t);
      }
    }
    while (!work.empty()) {
      State s = work.front();
      work.pop_front();
      for (State t : g.succ_[s]) {
        if (!g.reach_[q][t]) {
          g.reach_[q][t] = true;
          work.push_back(t);
        }
      }
    }
  }
  return g;
}

std::optional<State> GlushkovAutomaton::next(State q, const std::string& symbol) const {
  auto it = symbol_ids_.find(symbol);
  if (it == symbol_ids_.end()) return std::nullopt;
  State t = delta_[q][it->second];
  if (t < 0) return std::nullopt;
  return t;
}

std::vector<std::pair<std::string, State>> GlushkovAutomaton::transitions(State q) const {
  std::vector<std::pair<std::string, State>> out;
  for (State t : succ_[q]) out.emplace_back(symbol_of_[t], t);
  return out;
}

bool GlushkovAutomaton::accepts(std::span<const std::string> word) const {
  std::vector<State> cur{0};
  for (const auto& s : word) {
    std::vector<State> nxt;
    for (State q : cur) {
      for (State t : succ_[q]) {
        if (symbol_of_[t] == s && std::find(nxt.begin(), nxt.end(), t) == nxt.end()) nxt.push_back(t);
      }
    }
    if (nxt.empty()) return false;
    cur = std::move(nxt);
  }
  for (State q : cur) {
    if (final_[q]) return true;
  }
  return false;
}

PastRelation::PastRelation(const GlushkovAutomaton& g) : symbols_(g.symbols()) {
  const auto n = g.state_count();
  reachable_symbols_.resize(n);
  for (State q = 0; q < static_cast<State>(n); ++q) {
    const auto& reach = g.strictly_reachable(q);
    for (State p = 1; p < static_cast<State>(n); ++p) {
      if (reach[p]) reachable_symbols_[q].insert(g.symbol_of(p));
    }
  }
}

bool PastRelation::holds(State q, const std::string& a) const {
  return reachable_symbols_[q].count(a) == 0;
}

std::vector<std::pair<State, std::string>> PastRelation::pairs() const {
  std::vector<std::pair<State, std::string>> out;
  for (State q = 0; q < static_cast<State>(reachable_symbols_.size()); ++q) {
    for (const auto& a : symbols_) {
      if (holds(q, a)) out.emplace_back(q, a);
    }
  }
  return out;
}

OrdRelation::OrdRelation(const GlushkovAutomaton& g) : symbols_(g.symbols()) {
  PastRelation past(g);
  // Ord(a, b) iff every b-state is past a.
  for (const auto& a : symbols_) {
    for (const auto& b : symbols_) {
      bool ok = true;
      for (State q = 1; q < static_cast<State>(g.state_count()) && ok; ++q) {
        if (g.symbol_of(q) == b && !past.holds(q, a)) ok = false;
      }
      if (ok) pairs_.emplace(a, b);
    }
  }
}

bool OrdRelation::holds(const std::string& a, const std::string& b) const {
  if (!symbols_.count(a) || !symbols_.count(b)) return true;
  return pairs_.count({a, b}) > 0;
}

PastRelation past_relation(const GlushkovAutomaton& g) { return PastRelation(g); }
OrdRelation ord_relation(const GlushkovAutomaton& g) { return OrdRelation(g); }

PastTable make_past_table(const GlushkovAutomaton& g, const std::set<std::string>& set) {
  PastRelation past(g);
  PastTable t;
  t.set = set;
  t.table.assign(g.state_count(), true);
  for (State q = 0; q < static_cast<State>(g.state_count()); ++q) {
    for (const auto& a : set) {
      if (!past.holds(q, a)) {
        t.table[q] = false;
        break;
      }
    }
  }
  return t;
}

ValidatorState validator_start(const GlushkovAutomaton&, std::span<const PastTable> tables,
                               std::vector<int>& fired_now) {
  ValidatorState v;
  v.fired.assign(tables.size(), false);
  for (std::size_t i = 0; i < tables.size(); ++i) {
    if (tables[i](0)) {
      v.fired[i] = true;
      fired_now.push_back(static_cast<int>(i));
    }
  }
  return v;
}

std::vector<int> validator_step(ValidatorState& v, const GlushkovAutomaton& g,
                                std::span<const PastTable> tables, const std::string& symbol) {
  auto t = g.next(v.current, symbol);
  if (!t) {
    throw ValidationError("unexpected child <" + symbol + ">" +
                          (v.current == 0 ? std::string(" at first position")
                                          : " after <" + g.symbol_of(v.current) + ">"));
  }
  State old = v.current;
  v.current = *t;
  std::vector<int> fired_now;
  for (std::size_t i = 0; i < tables.size(); ++i) {
    if (!v.fired[i] && tables[i](v.current) && !tables[i](old)) {
      v.fired[i] = true;
      fired_now.push_back(static_cast<int>(i));
    }
  }
  return fired_now;
}

void validator_finish(const ValidatorState& v, const GlushkovAutomaton& g) {
  if (!g.is_final(v.current)) {
    throw ValidationError(v.current == 0 ? std::string("element content ended before any required child")
                                         : "element content may not end after <" +
                                               g.symbol_of(v.current) + ">");
  }
}

}  // namespace fluxq

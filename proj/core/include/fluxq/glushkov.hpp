#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "fluxq/regex.hpp"

namespace fluxq {

/// Automaton state. 0 is the initial state; state i > 0 is the i-th marked
/// atom of the source expression.
using State = int;

/// Glushkov (position) automaton. Deterministic for one-unambiguous
/// expressions; `build_lenient` also accepts ambiguous ones, for analysis.
class GlushkovAutomaton {
 public:
  /// Throws NotOneUnambiguous when two positions with the same symbol
  /// compete for a transition from one state.
  static GlushkovAutomaton build(const RegExpr& r);
  /// Never throws. `deterministic()` tells whether build() would succeed;
  /// next() and the validator require a deterministic automaton.
  static GlushkovAutomaton build_lenient(const RegExpr& r);

  bool deterministic() const { return ambiguity_.empty(); }
  /// Description of the first conflict found, empty when deterministic.
  const std::string& ambiguity() const { return ambiguity_; }

  std::size_t state_count() const { return symbol_of_.size(); }
  /// `#`: the tag name read on entering `q`. Empty for the initial state.
  const std::string& symbol_of(State q) const { return symbol_of_[q]; }
  bool is_final(State q) const { return final_[q]; }
  const std::set<std::string>& symbols() const { return symbols_; }

  std::optional<State> next(State q, const std::string& symbol) const;
  /// Successor states of q, in position order.
  const std::vector<State>& successors(State q) const { return succ_[q]; }
  /// Outgoing transitions of q as (symbol, target) pairs, in position order.
  std::vector<std::pair<std::string, State>> transitions(State q) const;

  /// Accepts iff the word is in L(r).
  bool accepts(std::span<const std::string> word) const;

  /// States reachable from q by a path of at least one transition.
  const std::vector<bool>& strictly_reachable(State q) const { return reach_[q]; }

 private:
  std::vector<std::string> symbol_of_;
  std::vector<bool> final_;
  std::unordered_map<std::string, int> symbol_ids_;
  // delta_[q][symbol id] = target or -1
  std::vector<std::vector<State>> delta_;
  std::vector<std::vector<State>> succ_;
  std::string ambiguity_;
  std::vector<std::vector<bool>> reach_;
  std::set<std::string> symbols_;
};

/// Past(q, a): no `a`-labelled state is reachable from q by a non-empty path,
/// i.e. once the automaton is in q no further `a` can be read.
class PastRelation {
 public:
  explicit PastRelation(const GlushkovAutomaton& g);

  bool holds(State q, const std::string& a) const;
  /// All (q, a) pairs with a in symb.
  std::vector<std::pair<State, std::string>> pairs() const;

 private:
  std::vector<std::set<std::string>> reachable_symbols_;
  std::set<std::string> symbols_;
};

/// Ord(a, b): in no accepted word does a `b` precede an `a`. Symbols outside
/// symb are vacuously ordered.
class OrdRelation {
 public:
  OrdRelation() = default;
  explicit OrdRelation(const GlushkovAutomaton& g);

  bool holds(const std::string& a, const std::string& b) const;
  /// All (a, b) pairs over symb x symb that hold, sorted.
  const std::set<std::pair<std::string, std::string>>& pairs() const { return pairs_; }

 private:
  std::set<std::pair<std::string, std::string>> pairs_;
  std::set<std::string> symbols_;
};

PastRelation past_relation(const GlushkovAutomaton& g);
OrdRelation ord_relation(const GlushkovAutomaton& g);

/// PastTable(q) = Past(q, a) for every a in S.
struct PastTable {
  std::set<std::string> set;
  std::vector<bool> table;

  bool operator()(State q) const { return table[q]; }
};

PastTable make_past_table(const GlushkovAutomaton& g, const std::set<std::string>& set);

/// Per-element validation state with first-past bookkeeping.
struct ValidatorState {
  State current = 0;
  std::vector<bool> fired;
};

/// Starts a run. `fired_now` receives the indices of tables already true in
/// the initial state (first-past of the empty prefix).
ValidatorState validator_start(const GlushkovAutomaton& g, std::span<const PastTable> tables,
                               std::vector<int>& fired_now);

/// Reads one child tag. Returns the indices of tables whose first-past
/// became true on this transition, in registration order. Throws
/// ValidationError when the automaton has no transition.
std::vector<int> validator_step(ValidatorState& v, const GlushkovAutomaton& g,
                                std::span<const PastTable> tables, const std::string& symbol);

/// Throws ValidationError unless the current state is final.
void validator_finish(const ValidatorState& v, const GlushkovAutomaton& g);

}  // namespace fluxq

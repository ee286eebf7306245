#pragma once

#include <set>
#include <string>
#include <vector>

namespace fluxq {

/// Content-model regular expression over tag names.
///
/// Seq and Alt always carry at least two children; the factory functions
/// collapse singletons. Atoms carry a 1-based `position` once the expression
/// has been marked, 0 otherwise.
struct RegExpr {
  enum class Kind { Epsilon, Atom, Seq, Alt, Star, Plus, Opt };

  Kind kind = Kind::Epsilon;
  std::string symbol;
  int position = 0;
  std::vector<RegExpr> children;

  static RegExpr epsilon();
  static RegExpr atom(std::string symbol);
  static RegExpr seq(std::vector<RegExpr> items);
  static RegExpr alt(std::vector<RegExpr> items);
  static RegExpr star(RegExpr child);
  static RegExpr plus(RegExpr child);
  static RegExpr opt(RegExpr child);

  bool operator==(const RegExpr&) const = default;
};

/// symb(r): the atomic symbols occurring in r.
std::set<std::string> symbols(const RegExpr& r);

std::size_t atom_count(const RegExpr& r);

/// DTD-style rendering, e.g. `(a*,b,(c|d)+)`.
std::string to_string(const RegExpr& r);

/// Regex-style rendering used by the analyzer: `(a*.b.c*.d|e*).a*`.
/// Marked atoms render as `a1`, `b2`, ...
std::string to_dotted_string(const RegExpr& r);

/// Parses the dotted notation (`.` sequence, `|` alternation, postfix
/// `* + ?`, `()` grouping, identifiers as atoms, `()` alone as epsilon).
RegExpr parse_dotted_regex(const std::string& text);

/// A RegExpr whose atoms are numbered 1..k from left to right.
struct MarkedRegExpr {
  RegExpr expr;
  int atoms = 0;
};

MarkedRegExpr mark(const RegExpr& r);

/// The `#` operation: drops position indices.
RegExpr unmark(const MarkedRegExpr& m);

}  // namespace fluxq

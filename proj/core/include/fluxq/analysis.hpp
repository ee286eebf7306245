#pragma once

#include <set>
#include <string>
#include <utility>
#include <vector>

#include "fluxq/dtd.hpp"
#include "fluxq/glushkov.hpp"

namespace fluxq {

/// Order constraints and Past summary of one production. Works on
/// nondeterministic content models too; those are flagged.
struct ProductionReport {
  std::string element;
  std::string model;  // dotted notation
  bool text_only = false;
  bool deterministic = true;
  std::string ambiguity;
  std::size_t states = 0;
  /// Ord(a, b) over symb x symb, a != b.
  std::vector<std::pair<std::string, std::string>> ord;
  std::vector<std::pair<std::string, std::string>> not_ord;
  /// Per state: its symbol and the symbols a with Past(q, a).
  struct StatePast {
    State state;
    std::string symbol;
    std::set<std::string> past;
  };
  std::vector<StatePast> past;

  bool has_ord(const std::string& a, const std::string& b) const;
};

/// All productions in declaration order, or only `element` when given.
/// Throws UnknownElement for an undeclared element.
std::vector<ProductionReport> analyze(const Dtd& dtd, const std::string& element = {});

std::string to_string(const ProductionReport& r);

}  // namespace fluxq

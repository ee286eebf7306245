#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "fluxq/xquery.hpp"

namespace fluxq {

struct NormalizationReport {
  std::size_t rule_applications = 0;
  std::vector<std::string> fresh_vars;
  /// Applications per rule, index 0..6 (the six rewrite rules plus
  /// dropping `{if X then}` with an empty body).
  std::size_t per_rule[7] = {};
};

enum class NormalizeStrategy { OutermostFirst, InnermostFirst };

struct NormalizeResult {
  XPtr expr;
  NormalizationReport report;
};

/// Rewrites to normal form: single-step for-loops, no where clauses, no
/// path outputs, and every `if` guarding a string or `{$x}`. Fresh
/// variables are named `$_g1, $_g2, ...` (skipping names already used).
NormalizeResult normalize(const XPtr& e, NormalizeStrategy strategy = NormalizeStrategy::OutermostFirst);

bool is_normal_form(const XQuery& e);

}  // namespace fluxq

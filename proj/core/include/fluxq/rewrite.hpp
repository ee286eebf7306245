#pragma once

#include <set>
#include <string>
#include <vector>

#include "fluxq/flux.hpp"
#include "fluxq/normalize.hpp"
#include "fluxq/schema.hpp"
#include "fluxq/xquery.hpp"

namespace fluxq {

struct RewriteOptions {
  /// A for-loop over a child the schema never allows is an error unless
  /// this is set; then it becomes an on-handler that never fires and a
  /// warning is recorded.
  bool allow_dead_loops = false;
};

/// Turns a normalized query into FluX, scheduling each for-loop as an `on`
/// handler when the schema's order constraints make that safe and as an
/// `on-first` handler otherwise.
class Rewriter {
 public:
  explicit Rewriter(const Schema& schema, RewriteOptions options = {});

  /// The whole query: rewrite($ROOT, {}, q).
  FPtr rewrite_query(const XPtr& normalized);

  /// One step of the recursion. `parent` must already have a known element
  /// (it is $ROOT or was bound by an enclosing rewrite).
  FPtr rewrite(const std::string& parent, const std::set<std::string>& handled, const XPtr& beta);

  const std::vector<std::string>& warnings() const { return warnings_; }

 private:
  const ContentModel* model_of(const std::string& var) const;
  bool ord(const std::string& var, const std::string& b, const std::string& a) const;
  FPtr rewrite_for(const std::string& x, const std::set<std::string>& handled, const XPtr& beta);

  const Schema& schema_;
  RewriteOptions options_;
  std::map<std::string, std::string> elements_;
  std::vector<std::string> warnings_;
};

struct Compilation {
  XPtr query;
  XPtr normal_form;
  NormalizationReport report;
  FPtr flux;
  std::vector<std::string> warnings;
};

/// parse, normalize, rewrite, and check safety. Throws ParseError,
/// ElementNotInSchema, UnknownElement, or SafetyError.
Compilation compile(const std::string& query_text, const Schema& schema,
                    const RewriteOptions& options = {});
Compilation compile(const XPtr& query, const Schema& schema, const RewriteOptions& options = {});

}  // namespace fluxq

#pragma once

#include <map>
#include <memory>
#include <set>
#include <string>

#include "fluxq/dtd.hpp"
#include "fluxq/glushkov.hpp"

namespace fluxq {

/// Compiled production of one element: automaton plus order constraints.
struct ContentModel {
  std::string element;
  RegExpr expr;
  bool text_only = false;
  GlushkovAutomaton automaton;
  OrdRelation ord;

  const std::set<std::string>& symbols() const { return automaton.symbols(); }
};

/// A DTD with every production compiled. Immutable and shareable.
///
/// Besides the declared elements it carries a synthetic production for the
/// document node, `(root)`, so that `$ROOT` can be treated like any other
/// variable.
class Schema {
 public:
  static constexpr const char* kDocument = "#document";

  explicit Schema(Dtd dtd);

  const Dtd& dtd() const { return dtd_; }
  const std::string& root() const { return dtd_.root; }

  /// Throws UnknownElement for undeclared names.
  const ContentModel& model(const std::string& element) const;
  const ContentModel* find(const std::string& element) const;
  const ContentModel& document() const { return *document_; }

 private:
  Dtd dtd_;
  std::map<std::string, std::shared_ptr<const ContentModel>> models_;
  std::shared_ptr<const ContentModel> document_;
};

/// Convenience: parse + compile.
Schema load_schema(const std::string& dtd_text, const DtdOptions& options = {});

}  // namespace fluxq

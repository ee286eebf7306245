#pragma once

#include <map>
#include <string>
#include <vector>

#include "fluxq/regex.hpp"

namespace fluxq {

struct ElementDecl {
  std::string name;
  RegExpr model;
  /// Declared `(#PCDATA)`: children are character data only.
  bool text_only = false;
};

/// A local tree grammar: one content model per element name.
struct Dtd {
  std::string root;
  std::map<std::string, ElementDecl> elements;
  /// Element names in declaration order.
  std::vector<std::string> order;
  /// Non-fatal diagnostics (undeclared references in non-strict mode).
  std::vector<std::string> warnings;

  const ElementDecl* find(const std::string& name) const;
  bool declares(const std::string& name) const { return find(name) != nullptr; }
};

struct DtdOptions {
  /// Reject references to undeclared elements. When false they are declared
  /// EMPTY and a warning is recorded.
  bool strict = true;
  /// Overrides the root element; defaults to the first declaration.
  std::string root;
};

/// Parses `<!ELEMENT name model>` declarations. Comments are skipped.
/// ATTLIST/ENTITY declarations, ANY, and mixed content are rejected.
Dtd parse_dtd(const std::string& text, const DtdOptions& options = {});

/// Renders declarations back in DTD syntax, in declaration order.
std::string to_string(const Dtd& dtd);

}  // namespace fluxq

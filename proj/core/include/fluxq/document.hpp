#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "fluxq/flux.hpp"
#include "fluxq/schema.hpp"
#include "fluxq/xml.hpp"
#include "fluxq/xquery.hpp"

namespace fluxq {

/// Materialized document. The node for `$ROOT` has tag "#document" and
/// the root element as its only element child.
struct XNode {
  std::string tag;   // empty for text nodes
  std::string text;  // text nodes only
  std::vector<std::unique_ptr<XNode>> children;

  bool is_text() const { return tag.empty(); }
};

std::unique_ptr<XNode> build_document(EventSource& events);
std::unique_ptr<XNode> parse_document(std::string_view xml);

/// Concatenated character data below the node.
std::string string_value(const XNode& n);
/// Markup of the node (the document node contributes no tags of its own).
void serialize(const XNode& n, std::string& out);

/// Comparison used by every evaluator: numeric when both sides, trimmed,
/// parse as decimal numbers, otherwise byte-wise on the trimmed strings.
bool compare_values(std::string_view lhs, RelOp op, std::string_view rhs);

/// Evaluates an XQuery- query over the whole document.
std::string reference_eval(const XQuery& q, const XNode& document);
std::string reference_eval(const XQuery& q, std::string_view xml);

/// Evaluates FluX by the literal n+2-scan definition over a materialized
/// tree: for each process-stream node, scan the handler list at every
/// child position 0..n+1.
std::string nscan_eval(const FluxExpr& q, const Schema& schema, const XNode& document);

}  // namespace fluxq

#pragma once

// Shared recursive-descent machinery for the XQuery- and FluX parsers.

#include <map>
#include <set>
#include <string>
#include <vector>

#include "fluxq/xquery.hpp"

namespace fluxq::detail {

bool is_name_start(char c);
bool is_name_char(char c);

class QueryParser {
 public:
  QueryParser(const std::string& text, bool rename_apart, bool check_scope)
      : text_(text), rename_apart_(rename_apart), check_scope_(check_scope) {}

  XPtr parse_query();
  CondPtr parse_condition_only();

 protected:
  // -- lexing
  [[noreturn]] void fail(const std::string& what) const;
  [[noreturn]] void fail_at(const std::string& what, std::size_t at) const;
  void skip_ws();
  bool at_end() const { return pos_ >= text_.size(); }
  char peek(std::size_t ahead = 0) const;
  bool lookahead(const char* s) const;
  /// Consumes keyword `kw` if it is next and followed by a non-name char.
  bool keyword(const char* kw);
  bool next_is_keyword(const char* kw) const;
  void expect(char c);
  void expect_keyword(const char* kw);
  std::string name();
  /// `$name`; returns it with the dollar.
  std::string variable_token();

  // -- scope
  std::string resolve(const std::string& var, std::size_t at) const;
  std::string bind(const std::string& var);
  void unbind();
  void push_scope_var(const std::string& var) { scope_.push_back({var, var}); }

  // -- grammar
  /// Literal run. Stops before an unescaped `{`, `}`, `$`, end of input or,
  /// when `stop_semicolon`, `;`. Returns the trimmed, unescaped text.
  std::string literal(bool stop_semicolon);
  /// Mixed content until `}` (not consumed) or end of input.
  XPtr mixed(bool stop_semicolon);
  /// At `{`: a braced expression or group.
  XPtr brace();
  XPtr for_expr();
  XPtr if_expr();
  /// `$x/a/b` or `/a/b`; `allow_bare` permits a plain variable.
  VarPath path(bool allow_bare);
  std::vector<std::string> steps();
  CondPtr condition();
  CondPtr cond_or();
  CondPtr cond_and();
  CondPtr cond_unary();
  CondPtr cond_atom();
  std::string cond_literal();
  bool rel_op(RelOp& op);

  const std::string& text_;
  std::size_t pos_ = 0;
  bool rename_apart_;
  bool check_scope_;
  // (source name, resolved name), innermost last
  std::vector<std::pair<std::string, std::string>> scope_{{kRootVar, kRootVar}};
  std::set<std::string> used_;
  // An unescaped word `else` in the last literal / the last mixed content.
  bool literal_saw_else_ = false;
  bool mixed_saw_else_ = false;
};

std::string escape_text(const std::string& s, bool flux);
/// Mixed-content rendering of a sequence of items.
std::string render_mixed(const XQuery& e, bool flux);

}  // namespace fluxq::detail

#include <cctype>

#include "fluxq/error.hpp"
#include "fluxq/xquery.hpp"
#include "syntax.hpp"

namespace fluxq {

namespace detail {

bool is_name_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }

bool is_name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
}

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

bool is_var_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

}  // namespace

void QueryParser::fail(const std::string& what) const { fail_at(what, pos_); }

void QueryParser::fail_at(const std::string& what, std::size_t at) const {
  throw ParseError(what, at);
}

void QueryParser::skip_ws() {
  while (pos_ < text_.size()) {
    if (is_space(text_[pos_])) {
      ++pos_;
    } else if (lookahead("(:")) {
      auto end = text_.find(":)", pos_ + 2);
      if (end == std::string::npos) fail("unterminated comment");
      pos_ = end + 2;
    } else {
      break;
    }
  }
}

char QueryParser::peek(std::size_t ahead) const {
  return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0';
}

bool QueryParser::lookahead(const char* s) const {
  return text_.compare(pos_, std::char_traits<char>::length(s), s) == 0;
}

bool QueryParser::next_is_keyword(const char* kw) const {
  std::size_t n = std::char_traits<char>::length(kw);
  if (text_.compare(pos_, n, kw) != 0) return false;
  return pos_ + n >= text_.size() || !is_name_char(text_[pos_ + n]);
}

bool QueryParser::keyword(const char* kw) {
  skip_ws();
  if (!next_is_keyword(kw)) return false;
  pos_ += std::char_traits<char>::length(kw);
  return true;
}

void QueryParser::expect(char c) {
  skip_ws();
  if (peek() != c) fail(std::string("expected '") + c + "'");
  ++pos_;
}

void QueryParser::expect_keyword(const char* kw) {
  if (!keyword(kw)) fail(std::string("expected '") + kw + "'");
}

std::string QueryParser::name() {
  skip_ws();
  if (!is_name_start(peek())) fail("expected a name");
  std::size_t start = pos_;
  while (is_name_char(peek())) ++pos_;
  return text_.substr(start, pos_ - start);
}

std::string QueryParser::variable_token() {
  skip_ws();
  if (peek() != '$') fail("expected a variable");
  std::size_t start = pos_++;
  if (!is_name_start(peek())) fail("malformed variable name");
  while (is_var_char(peek())) ++pos_;
  return text_.substr(start, pos_ - start);
}

std::string QueryParser::resolve(const std::string& var, std::size_t at) const {
  for (auto it = scope_.rbegin(); it != scope_.rend(); ++it) {
    if (it->first == var) return it->second;
  }
  if (check_scope_) fail_at("variable " + var + " is not in scope", at);
  return var;
}

std::string QueryParser::bind(const std::string& var) {
  if (var == kRootVar) fail("$ROOT cannot be rebound");
  std::string resolved = var;
  if (rename_apart_) {
    for (int n = 2; used_.count(resolved); ++n) resolved = var + "_" + std::to_string(n);
  }
  used_.insert(resolved);
  scope_.emplace_back(var, resolved);
  return resolved;
}

void QueryParser::unbind() { scope_.pop_back(); }

std::string QueryParser::literal(bool stop_semicolon) {
  std::vector<std::pair<char, bool>> chars;
  while (pos_ < text_.size()) {
    char c = text_[pos_];
    if (c == '\\' && pos_ + 1 < text_.size()) {
      chars.emplace_back(text_[pos_ + 1], true);
      pos_ += 2;
      continue;
    }
    if (c == '{' || c == '}' || c == '$' || (stop_semicolon && c == ';')) break;
    chars.emplace_back(c, false);
    ++pos_;
  }
  std::size_t b = 0;
  std::size_t e = chars.size();
  while (b < e && !chars[b].second && is_space(chars[b].first)) ++b;
  while (e > b && !chars[e - 1].second && is_space(chars[e - 1].first)) --e;
  std::string out;
  for (std::size_t i = b; i < e; ++i) out += chars[i].first;
  auto plain = [&](std::size_t i, char c) { return !chars[i].second && chars[i].first == c; };
  auto boundary = [&](std::size_t i) { return i < b || i >= e || is_space(chars[i].first); };
  for (std::size_t i = b; i + 4 <= e; ++i) {
    if (plain(i, 'e') && plain(i + 1, 'l') && plain(i + 2, 's') && plain(i + 3, 'e') &&
        (i == b || boundary(i - 1)) && boundary(i + 4)) {
      literal_saw_else_ = true;
    }
  }
  return out;
}

XPtr QueryParser::mixed(bool stop_semicolon) {
  std::vector<XPtr> items;
  bool saw_else = false;
  for (;;) {
    literal_saw_else_ = false;
    std::string lit = literal(stop_semicolon);
    saw_else = saw_else || literal_saw_else_;
    if (!lit.empty()) items.push_back(XQuery::str(std::move(lit)));
    if (at_end() || peek() == '}' || (stop_semicolon && peek() == ';')) break;
    if (peek() == '{') {
      items.push_back(brace());
    } else {
      VarPath p = path(true);
      items.push_back(XQuery::path_out(p.var, p.steps));
    }
  }
  mixed_saw_else_ = saw_else;
  return XQuery::seq(std::move(items));
}

XPtr QueryParser::brace() {
  expect('{');
  skip_ws();
  if (keyword("for")) return for_expr();
  if (keyword("if")) return if_expr();
  for (const char* kw : {"let", "order", "some", "every", "typeswitch"}) {
    if (next_is_keyword(kw)) fail(std::string("'") + kw + "' expressions are not supported");
  }
  if (is_name_start(peek())) {
    std::size_t save = pos_;
    name();
    if (peek() == '(') fail_at("function calls are not supported", save);
    pos_ = save;
  }
  std::vector<XPtr> items;
  if (peek() == '/' && is_name_start(peek(1))) {
    VarPath p = path(false);
    items.push_back(XQuery::path_out(p.var, p.steps));
  }
  items.push_back(mixed(false));
  expect('}');
  return XQuery::seq(std::move(items));
}

XPtr QueryParser::for_expr() {
  std::size_t at = pos_;
  std::string var = variable_token();
  expect_keyword("in");
  VarPath src = path(false);
  std::string bound = bind(var);
  CondPtr cond;
  if (keyword("where")) cond = condition();
  if (!keyword("return")) fail_at("expected 'return' in for-expression", at);
  XPtr body = mixed(false);
  expect('}');
  unbind();
  if (cond) return XQuery::for_where(bound, src.var, src.steps, cond, body);
  return XQuery::for_(bound, src.var, src.steps, body);
}

XPtr QueryParser::if_expr() {
  CondPtr cond = condition();
  expect_keyword("then");
  std::size_t at = pos_;
  XPtr body = mixed(false);
  skip_ws();
  if (next_is_keyword("else")) fail("'else' branches are not supported");
  if (mixed_saw_else_) fail_at("'else' branches are not supported (write literal text as \\else)", at);
  expect('}');
  return XQuery::if_(cond, body);
}

std::vector<std::string> QueryParser::steps() {
  std::vector<std::string> out;
  while (peek() == '/') {
    if (peek(1) == '/') fail("the descendant axis '//' is not supported");
    ++pos_;
    if (peek() == '@') fail("attributes are not supported");
    if (peek() == '*') fail("wildcard steps are not supported");
    std::string n = name();
    if (peek() == '(') fail("step functions such as text() are not supported");
    out.push_back(std::move(n));
  }
  if (peek() == '[') fail("predicates are not supported");
  return out;
}

VarPath QueryParser::path(bool allow_bare) {
  skip_ws();
  std::size_t at = pos_;
  VarPath p;
  if (peek() == '/') {
    p.var = kRootVar;
  } else {
    p.var = resolve(variable_token(), at);
  }
  p.steps = steps();
  if (p.steps.empty() && !allow_bare) fail_at("expected a path with at least one step", at);
  return p;
}

CondPtr QueryParser::condition() { return cond_or(); }

CondPtr QueryParser::cond_or() {
  CondPtr c = cond_and();
  while (keyword("or")) c = Condition::disj(c, cond_and());
  return c;
}

CondPtr QueryParser::cond_and() {
  CondPtr c = cond_unary();
  while (keyword("and")) c = Condition::conj(c, cond_unary());
  return c;
}

CondPtr QueryParser::cond_unary() {
  if (keyword("not")) return Condition::negate(cond_unary());
  return cond_atom();
}

bool QueryParser::rel_op(RelOp& op) {
  skip_ws();
  if (lookahead("!=")) fail("'!=' is not supported");
  if (lookahead("<=")) {
    op = RelOp::Le;
    pos_ += 2;
  } else if (lookahead(">=")) {
    op = RelOp::Ge;
    pos_ += 2;
  } else if (peek() == '=') {
    op = RelOp::Eq;
    ++pos_;
  } else if (peek() == '<') {
    op = RelOp::Lt;
    ++pos_;
  } else if (peek() == '>') {
    op = RelOp::Gt;
    ++pos_;
  } else {
    return false;
  }
  return true;
}

std::string QueryParser::cond_literal() {
  skip_ws();
  char q = peek();
  if (q == '"' || q == '\'') {
    std::size_t at = pos_++;
    std::string out;
    for (;;) {
      if (at_end()) fail_at("unterminated string literal", at);
      char c = text_[pos_++];
      if (c == q) {
        if (peek() == q) {
          out += q;
          ++pos_;
          continue;
        }
        break;
      }
      out += c;
    }
    return out;
  }
  std::size_t start = pos_;
  if (peek() == '-' || peek() == '+') ++pos_;
  bool digits = false;
  while (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '.') {
    digits = true;
    ++pos_;
  }
  if (!digits) {
    if (peek() == '(') fail("arithmetic expressions are not supported");
    fail_at("expected a string or number literal", start);
  }
  return text_.substr(start, pos_ - start);
}

namespace {

RelOp flip(RelOp op) {
  switch (op) {
    case RelOp::Lt:
      return RelOp::Gt;
    case RelOp::Le:
      return RelOp::Ge;
    case RelOp::Gt:
      return RelOp::Lt;
    case RelOp::Ge:
      return RelOp::Le;
    default:
      return op;
  }
}

}  // namespace

CondPtr QueryParser::cond_atom() {
  skip_ws();
  if (peek() == '(') {
    ++pos_;
    CondPtr c = condition();
    expect(')');
    return c;
  }
  if (keyword("true")) {
    skip_ws();
    if (peek() == '(') {
      ++pos_;
      expect(')');
    }
    return Condition::truth();
  }
  if (keyword("exists") || keyword("empty")) {
    bool negated = text_.compare(pos_ - 5, 5, "empty") == 0;
    skip_ws();
    bool paren = peek() == '(';
    if (paren) ++pos_;
    VarPath p = path(false);
    if (paren) expect(')');
    CondPtr c = Condition::exists(std::move(p));
    return negated ? Condition::negate(c) : c;
  }
  auto check_no_arith = [&] {
    skip_ws();
    if (peek() == '*' || peek() == '+' || (peek() == '-' && !is_name_char(peek(1))) ||
        next_is_keyword("div") || next_is_keyword("mod")) {
      fail("arithmetic expressions are not supported");
    }
  };
  if (peek() == '$' || peek() == '/') {
    VarPath lhs = path(false);
    check_no_arith();
    RelOp op;
    if (!rel_op(op)) fail("expected a comparison operator");
    skip_ws();
    if (peek() == '$' || peek() == '/') {
      VarPath rhs = path(false);
      check_no_arith();
      return Condition::join(std::move(lhs), op, std::move(rhs));
    }
    std::string lit = cond_literal();
    check_no_arith();
    return Condition::compare(std::move(lhs), op, std::move(lit));
  }
  if (peek() == '"' || peek() == '\'' || std::isdigit(static_cast<unsigned char>(peek())) ||
      peek() == '-') {
    std::string lit = cond_literal();
    check_no_arith();
    RelOp op;
    if (!rel_op(op)) fail("expected a comparison operator");
    VarPath rhs = path(false);
    check_no_arith();
    return Condition::compare(std::move(rhs), flip(op), std::move(lit));
  }
  if (is_name_start(peek())) {
    std::size_t save = pos_;
    name();
    if (peek() == '(') fail_at("function calls are not supported in conditions", save);
    pos_ = save;
  }
  fail("expected a condition");
}

XPtr QueryParser::parse_query() {
  XPtr e = mixed(false);
  if (!at_end()) fail("unbalanced '}'");
  return e;
}

CondPtr QueryParser::parse_condition_only() {
  CondPtr c = condition();
  skip_ws();
  if (!at_end()) fail("trailing input after condition");
  return c;
}

// ---- rendering -------------------------------------------------------------

std::string escape_text(const std::string& s, bool flux) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    char c = s[i];
    bool special = c == '\\' || c == '{' || c == '}' || c == '$' || (flux && c == ';');
    bool edge_space = is_space(c) && (i == 0 || i + 1 == s.size());
    bool else_word = s.compare(i, 4, "else") == 0 && (i == 0 || is_space(s[i - 1])) &&
                     (i + 4 == s.size() || is_space(s[i + 4]));
    if (special || edge_space || else_word) out += '\\';
    out += c;
  }
  return out;
}

namespace {

std::string render_item(const XQuery& e, bool flux) {
  using K = XQuery::Kind;
  switch (e.kind) {
    case K::Empty:
      return "{}";
    case K::Str:
      return escape_text(e.text, flux);
    case K::Seq:
      return render_mixed(e, flux);
    case K::For:
    case K::ForWhere: {
      std::string out = "{for " + e.var + " in " + to_string(VarPath{e.source, e.path});
      if (e.kind == K::ForWhere) out += " where " + to_string(*e.cond);
      std::string body = render_mixed(*e.body, flux);
      out += " return";
      if (!body.empty()) out += " " + body;
      return out + "}";
    }
    case K::PathOut:
      return "{" + to_string(VarPath{e.var, e.path}) + "}";
    case K::VarOut:
      return "{" + e.var + "}";
    case K::If: {
      std::string body = render_mixed(*e.body, flux);
      std::string out = "{if " + to_string(*e.cond) + " then";
      if (!body.empty()) out += " " + body;
      return out + "}";
    }
  }
  return "";
}

}  // namespace

std::string render_mixed(const XQuery& e, bool flux) {
  if (e.kind == XQuery::Kind::Empty) return "";
  if (e.kind != XQuery::Kind::Seq) return render_item(e, flux);
  std::string out;
  const XQuery* prev = nullptr;
  for (const auto& it : e.items) {
    if (prev) {
      out += ' ';
      if (prev->kind == XQuery::Kind::Str && it->kind == XQuery::Kind::Str) out += "{} ";
    }
    out += render_item(*it, flux);
    prev = it.get();
  }
  return out;
}

}  // namespace detail

XPtr parse_xquery(const std::string& text, bool closed) {
  return detail::QueryParser(text, true, closed).parse_query();
}

CondPtr parse_condition(const std::string& text) {
  return detail::QueryParser(text, false, false).parse_condition_only();
}

std::string escape_literal_text(const std::string& s) { return detail::escape_text(s, false); }

std::string to_string(const VarPath& p) {
  std::string out = p.var;
  for (const auto& s : p.steps) out += "/" + s;
  return out;
}

namespace {

int precedence(const Condition& c) {
  switch (c.kind) {
    case Condition::Kind::Or:
      return 1;
    case Condition::Kind::And:
      return 2;
    case Condition::Kind::Not:
      return 3;
    default:
      return 4;
  }
}

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string render_cond(const Condition& c, int min_prec) {
  using K = Condition::Kind;
  std::string out;
  switch (c.kind) {
    case K::True:
      out = "true()";
      break;
    case K::And:
    case K::Or: {
      const char* sep = c.kind == K::And ? " and " : " or ";
      int p = precedence(c);
      for (std::size_t i = 0; i < c.children.size(); ++i) {
        if (i) out += sep;
        out += render_cond(*c.children[i], p + 1);
      }
      break;
    }
    case K::Not:
      out = "not " + render_cond(*c.children.front(), 3);
      break;
    case K::Compare:
      out = to_string(c.lhs) + " " + to_string(c.op) + " " + quote(c.literal);
      break;
    case K::Exists:
      out = "exists " + to_string(c.lhs);
      break;
    case K::Join:
      out = to_string(c.lhs) + " " + to_string(c.op) + " " + to_string(c.rhs);
      break;
  }
  if (precedence(c) < min_prec) return "(" + out + ")";
  return out;
}

}  // namespace

std::string to_string(const Condition& c) { return render_cond(c, 0); }

std::string to_string(const XQuery& e) { return detail::render_mixed(e, false); }

}  // namespace fluxq

#include "fluxq/regex.hpp"

#include <cctype>

#include "fluxq/error.hpp"

namespace fluxq {

namespace {

RegExpr make_nary(RegExpr::Kind kind, std::vector<RegExpr> items) {
  std::vector<RegExpr> flat;
  for (auto& item : items) {
    if (item.kind == kind) {
      for (auto& c : item.children) flat.push_back(std::move(c));
    } else if (kind == RegExpr::Kind::Seq && item.kind == RegExpr::Kind::Epsilon) {
      continue;
    } else {
      flat.push_back(std::move(item));
    }
  }
  if (flat.empty()) return RegExpr::epsilon();
  if (flat.size() == 1) return std::move(flat.front());
  RegExpr r;
  r.kind = kind;
  r.children = std::move(flat);
  return r;
}

RegExpr make_unary(RegExpr::Kind kind, RegExpr child) {
  if (child.kind == RegExpr::Kind::Epsilon) return child;
  RegExpr r;
  r.kind = kind;
  r.children.push_back(std::move(child));
  return r;
}

void collect_symbols(const RegExpr& r, std::set<std::string>& out) {
  if (r.kind == RegExpr::Kind::Atom) out.insert(r.symbol);
  for (const auto& c : r.children) collect_symbols(c, out);
}

void number_atoms(RegExpr& r, int& next) {
  if (r.kind == RegExpr::Kind::Atom) {
    r.position = next++;
    return;
  }
  for (auto& c : r.children) number_atoms(c, next);
}

void strip_positions(RegExpr& r) {
  r.position = 0;
  for (auto& c : r.children) strip_positions(c);
}

char postfix_char(RegExpr::Kind k) {
  switch (k) {
    case RegExpr::Kind::Star: return '*';
    case RegExpr::Kind::Plus: return '+';
    case RegExpr::Kind::Opt: return '?';
    default: return 0;
  }
}

std::string render(const RegExpr& r, bool dotted, bool top) {
  switch (r.kind) {
    case RegExpr::Kind::Epsilon:
      return dotted ? "()" : "EMPTY";
    case RegExpr::Kind::Atom:
      return r.position > 0 ? r.symbol + std::to_string(r.position) : r.symbol;
    case RegExpr::Kind::Seq:
    case RegExpr::Kind::Alt: {
      const char* sep = r.kind == RegExpr::Kind::Alt ? "|" : (dotted ? "." : ",");
      std::string s;
      for (std::size_t i = 0; i < r.children.size(); ++i) {
        if (i) s += sep;
        const auto& c = r.children[i];
        // In dotted form a sequence binds tighter than alternation, so only
        // an Alt inside a Seq needs parentheses.
        bool paren = dotted ? (r.kind == RegExpr::Kind::Seq && c.kind == RegExpr::Kind::Alt)
                            : (c.kind == RegExpr::Kind::Seq || c.kind == RegExpr::Kind::Alt);
        s += paren ? "(" + render(c, dotted, true) + ")" : render(c, dotted, false);
      }
      if (!dotted && top) return "(" + s + ")";
      return s;
    }
    case RegExpr::Kind::Star:
    case RegExpr::Kind::Plus:
    case RegExpr::Kind::Opt: {
      const auto& c = r.children.front();
      std::string inner;
      if (c.kind == RegExpr::Kind::Atom) {
        inner = render(c, dotted, false);
      } else if (c.kind == RegExpr::Kind::Seq || c.kind == RegExpr::Kind::Alt) {
        // DTD rendering of a top-level group already carries its parentheses.
        inner = dotted ? "(" + render(c, true, true) + ")" : render(c, false, true);
      } else {
        inner = "(" + render(c, dotted, false) + ")";
      }
      return inner + postfix_char(r.kind);
    }
  }
  return {};
}

class DottedParser {
 public:
  explicit DottedParser(const std::string& text) : text_(text) {}

  RegExpr parse() {
    RegExpr r = parse_alt();
    skip_ws();
    if (pos_ != text_.size()) throw ParseError("unexpected character in regular expression", pos_);
    return r;
  }

 private:
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  RegExpr parse_alt() {
    std::vector<RegExpr> items{parse_seq()};
    while (accept('|')) items.push_back(parse_seq());
    return RegExpr::alt(std::move(items));
  }

  RegExpr parse_seq() {
    std::vector<RegExpr> items{parse_postfix()};
    while (accept('.') || accept(',')) items.push_back(parse_postfix());
    return RegExpr::seq(std::move(items));
  }

  RegExpr parse_postfix() {
    RegExpr r = parse_primary();
    for (;;) {
      if (accept('*')) r = RegExpr::star(std::move(r));
      else if (accept('+')) r = RegExpr::plus(std::move(r));
      else if (accept('?')) r = RegExpr::opt(std::move(r));
      else return r;
    }
  }

  RegExpr parse_primary() {
    skip_ws();
    if (accept('(')) {
      if (accept(')')) return RegExpr::epsilon();
      RegExpr r = parse_alt();
      if (!accept(')')) throw ParseError("expected ')'", pos_);
      return r;
    }
    std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_' ||
            text_[pos_] == '-')) {
      ++pos_;
    }
    if (start == pos_) throw ParseError("expected symbol", pos_);
    return RegExpr::atom(text_.substr(start, pos_ - start));
  }

  const std::string& text_;
  std::size_t pos_ = 0;
};

}  // namespace

RegExpr RegExpr::epsilon() { return RegExpr{}; }

RegExpr RegExpr::atom(std::string symbol) {
  RegExpr r;
  r.kind = Kind::Atom;
  r.symbol = std::move(symbol);
  return r;
}

RegExpr RegExpr::seq(std::vector<RegExpr> items) { return make_nary(Kind::Seq, std::move(items)); }
RegExpr RegExpr::alt(std::vector<RegExpr> items) {
  if (items.empty()) return epsilon();
  return make_nary(Kind::Alt, std::move(items));
}
RegExpr RegExpr::star(RegExpr child) { return make_unary(Kind::Star, std::move(child)); }
RegExpr RegExpr::plus(RegExpr child) { return make_unary(Kind::Plus, std::move(child)); }
RegExpr RegExpr::opt(RegExpr child) { return make_unary(Kind::Opt, std::move(child)); }

std::set<std::string> symbols(const RegExpr& r) {
  std::set<std::string> out;
  collect_symbols(r, out);
  return out;
}

std::size_t atom_count(const RegExpr& r) {
  if (r.kind == RegExpr::Kind::Atom) return 1;
  std::size_t n = 0;
  for (const auto& c : r.children) n += atom_count(c);
  return n;
}

std::string to_string(const RegExpr& r) {
  if (r.kind == RegExpr::Kind::Atom) return "(" + render(r, false, false) + ")";
  return render(r, false, true);
}

std::string to_dotted_string(const RegExpr& r) { return render(r, true, true); }

RegExpr parse_dotted_regex(const std::string& text) { return DottedParser(text).parse(); }

MarkedRegExpr mark(const RegExpr& r) {
  MarkedRegExpr m{r, 0};
  int next = 1;
  number_atoms(m.expr, next);
  m.atoms = next - 1;
  return m;
}

RegExpr unmark(const MarkedRegExpr& m) {
  RegExpr r = m.expr;
  strip_positions(r);
  return r;
}

}  // namespace fluxq

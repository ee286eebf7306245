#include "fluxq/dtd.hpp"

#include <cctype>

#include "fluxq/error.hpp"

namespace fluxq {

namespace {

bool is_name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.' ||
         c == ':';
}

class DtdParser {
 public:
  explicit DtdParser(const std::string& text) : text_(text) {}

  Dtd parse(const DtdOptions& options) {
    Dtd dtd;
    for (;;) {
      skip_ws_and_comments();
      if (pos_ >= text_.size()) break;
      if (starts_with("<!ELEMENT")) {
        pos_ += 9;
        parse_element(dtd);
      } else if (starts_with("<!ATTLIST") || starts_with("<!ENTITY") ||
                 starts_with("<!NOTATION")) {
        throw ParseError("only ELEMENT declarations are supported (attributes and entities are "
                         "outside the data model)",
                         pos_);
      } else if (starts_with("<?")) {
        auto end = text_.find("?>", pos_);
        if (end == std::string::npos) throw ParseError("unterminated processing instruction", pos_);
        pos_ = end + 2;
      } else {
        throw ParseError("expected <!ELEMENT declaration", pos_);
      }
    }
    if (dtd.order.empty()) throw ParseError("DTD declares no elements", pos_);
    dtd.root = options.root.empty() ? dtd.order.front() : options.root;
    if (!dtd.declares(dtd.root)) throw Error("root element '" + dtd.root + "' is not declared");

    // Undeclared references.
    std::vector<std::string> missing;
    for (const auto& name : dtd.order) {
      for (const auto& sym : symbols(dtd.elements.at(name).model)) {
        if (!dtd.declares(sym)) missing.push_back(sym);
      }
    }
    for (const auto& sym : missing) {
      if (dtd.declares(sym)) continue;
      if (options.strict) {
        throw Error("content model references undeclared element '" + sym + "'");
      }
      dtd.warnings.push_back("undeclared element '" + sym + "' treated as EMPTY");
      dtd.elements[sym] = ElementDecl{sym, RegExpr::epsilon(), false};
      dtd.order.push_back(sym);
    }
    return dtd;
  }

 private:
  bool starts_with(const char* s) const { return text_.compare(pos_, std::char_traits<char>::length(s), s) == 0; }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  void skip_ws_and_comments() {
    for (;;) {
      skip_ws();
      if (!starts_with("<!--")) return;
      auto end = text_.find("-->", pos_ + 4);
      if (end == std::string::npos) throw ParseError("unterminated comment", pos_);
      pos_ = end + 3;
    }
  }

  std::string name() {
    skip_ws_and_comments();
    std::size_t start = pos_;
    while (pos_ < text_.size() && is_name_char(text_[pos_])) ++pos_;
    if (start == pos_) throw ParseError("expected element name", pos_);
    return text_.substr(start, pos_ - start);
  }

  bool accept(char c) {
    skip_ws_and_comments();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) throw ParseError(std::string("expected '") + c + "'", pos_);
  }

  void parse_element(Dtd& dtd) {
    std::size_t decl_at = pos_;
    ElementDecl decl;
    decl.name = name();
    skip_ws_and_comments();
    if (starts_with("EMPTY")) {
      pos_ += 5;
      decl.model = RegExpr::epsilon();
    } else if (starts_with("ANY")) {
      throw ParseError("ANY content is not supported", pos_);
    } else {
      std::size_t open = pos_;
      expect('(');
      skip_ws_and_comments();
      if (starts_with("#PCDATA")) {
        pos_ += 7;
        if (accept('|')) throw ParseError("mixed content is not supported", pos_);
        expect(')');
        accept('*');
        decl.model = RegExpr::epsilon();
        decl.text_only = true;
      } else {
        pos_ = open;
        decl.model = parse_postfix();
      }
    }
    expect('>');
    if (dtd.declares(decl.name)) {
      throw ParseError("duplicate declaration of element '" + decl.name + "'", decl_at);
    }
    dtd.order.push_back(decl.name);
    dtd.elements.emplace(decl.name, std::move(decl));
  }

  // cp ::= (name | '(' choice-or-seq ')') ('?' | '*' | '+')?
  RegExpr parse_postfix() {
    RegExpr r;
    if (accept('(')) {
      std::vector<RegExpr> items{parse_postfix()};
      char sep = 0;
      for (;;) {
        if (accept(')')) break;
        char c = accept('|') ? '|' : accept(',') ? ',' : 0;
        if (!c) throw ParseError("expected ',', '|' or ')' in content model", pos_);
        if (sep && c != sep) throw ParseError("cannot mix ',' and '|' in one group", pos_);
        sep = c;
        items.push_back(parse_postfix());
      }
      r = sep == '|' ? RegExpr::alt(std::move(items)) : RegExpr::seq(std::move(items));
    } else {
      r = RegExpr::atom(name());
    }
    if (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == '*') { ++pos_; return RegExpr::star(std::move(r)); }
      if (c == '+') { ++pos_; return RegExpr::plus(std::move(r)); }
      if (c == '?') { ++pos_; return RegExpr::opt(std::move(r)); }
    }
    return r;
  }

  const std::string& text_;
  std::size_t pos_ = 0;
};

}  // namespace

const ElementDecl* Dtd::find(const std::string& name) const {
  auto it = elements.find(name);
  return it == elements.end() ? nullptr : &it->second;
}

Dtd parse_dtd(const std::string& text, const DtdOptions& options) {
  return DtdParser(text).parse(options);
}

std::string to_string(const Dtd& dtd) {
  std::string out;
  for (const auto& name : dtd.order) {
    const auto& decl = dtd.elements.at(name);
    out += "<!ELEMENT " + name + " ";
    if (decl.text_only) out += "(#PCDATA)";
    else out += to_string(decl.model);
    out += ">\n";
  }
  return out;
}

}  // namespace fluxq

#include "fluxq/error.hpp"
#include "fluxq/flux.hpp"
#include "syntax.hpp"

namespace fluxq {

namespace {

class FluxParser : public detail::QueryParser {
 public:
  explicit FluxParser(const std::string& text) : QueryParser(text, false, true) {}

  FPtr parse() {
    FPtr q = content(false);
    if (!at_end()) fail("unbalanced '}'");
    return q;
  }

 private:
  bool at_ps() {
    std::size_t save = pos_;
    ++pos_;
    bool yes = keyword("ps") || keyword("process-stream");
    pos_ = save;
    return yes;
  }

  // Mixed content that may contain one process-stream block, optionally
  // surrounded by literal text.
  FPtr content(bool stop_semicolon) {
    std::vector<XPtr> before;
    std::vector<XPtr> after;
    FPtr ps;
    std::size_t ps_at = 0;
    for (;;) {
      std::string lit = literal(stop_semicolon);
      if (!lit.empty()) (ps ? after : before).push_back(XQuery::str(std::move(lit)));
      if (at_end() || peek() == '}' || (stop_semicolon && peek() == ';')) break;
      if (peek() == '{' && at_ps()) {
        if (ps) fail("at most one process-stream block per expression");
        ps_at = pos_;
        ps = process_stream();
      } else if (peek() == '{') {
        (ps ? after : before).push_back(brace());
      } else {
        VarPath p = path(true);
        (ps ? after : before).push_back(XQuery::path_out(p.var, p.steps));
      }
    }
    if (!ps) {
      XPtr e = XQuery::seq(std::move(before));
      if (!is_simple(*e)) fail("FluX bodies outside process-stream must be simple: " + to_string(*e));
      return FluxExpr::make_simple(e);
    }
    auto text_of = [&](const std::vector<XPtr>& items) {
      if (items.empty()) return std::string();
      if (items.size() > 1 || items.front()->kind != XQuery::Kind::Str) {
        fail_at("only literal text may surround a process-stream block", ps_at);
      }
      return items.front()->text;
    };
    std::string prefix = text_of(before);
    std::string suffix = text_of(after);
    return FluxExpr::ps(ps->var, ps->handlers, prefix, suffix);
  }

  FPtr process_stream() {
    expect('{');
    if (!keyword("ps")) expect_keyword("process-stream");
    std::size_t at = pos_;
    std::string var = resolve(variable_token(), at);
    expect(':');
    std::vector<Handler> hs;
    for (;;) {
      if (keyword("on-first")) {
        expect_keyword("past");
        expect('(');
        skip_ws();
        bool all = false;
        std::set<std::string> past;
        if (peek() == '*') {
          ++pos_;
          all = true;
        } else {
          skip_ws();
          if (peek() != ')') {
            past.insert(name());
            for (skip_ws(); peek() == ','; skip_ws()) {
              ++pos_;
              past.insert(name());
            }
          }
        }
        expect(')');
        expect_keyword("return");
        XPtr body = mixed(true);
        hs.push_back(all ? Handler::on_first_all(body) : Handler::on_first(std::move(past), body));
      } else if (keyword("on")) {
        std::string sym = name();
        expect_keyword("as");
        std::string v = variable_token();
        expect_keyword("return");
        push_scope_var(v);
        FPtr body = content(true);
        unbind();
        hs.push_back(Handler::on(std::move(sym), std::move(v), body));
      } else {
        fail("expected 'on-first' or 'on' handler");
      }
      skip_ws();
      if (peek() != ';') break;
      ++pos_;
    }
    expect('}');
    return FluxExpr::ps(var, std::move(hs));
  }
};

std::string render(const FluxExpr& q) {
  if (q.kind == FluxExpr::Kind::Simple) return detail::render_mixed(*q.simple, true);
  std::string out;
  if (!q.prefix.empty()) out += detail::escape_text(q.prefix, true) + " ";
  out += "{ps " + q.var + ": ";
  for (std::size_t i = 0; i < q.handlers.size(); ++i) {
    const Handler& h = q.handlers[i];
    if (i) out += "; ";
    if (h.kind == Handler::Kind::OnFirst) {
      out += "on-first past(";
      if (h.past_all) {
        out += "*";
      } else {
        bool first = true;
        for (const auto& s : h.past) {
          if (!first) out += ",";
          out += s;
          first = false;
        }
      }
      out += ") return";
      std::string body = detail::render_mixed(*h.body, true);
      if (!body.empty()) out += " " + body;
    } else {
      out += "on " + h.symbol + " as " + h.var + " return";
      std::string body = render(*h.flux);
      if (!body.empty()) out += " " + body;
    }
  }
  out += "}";
  if (!q.suffix.empty()) out += " " + detail::escape_text(q.suffix, true);
  return out;
}

}  // namespace

std::string to_string(const FluxExpr& q) { return render(q); }

FPtr parse_flux(const std::string& text) { return FluxParser(text).parse(); }

}  // namespace fluxq

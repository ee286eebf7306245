#include "fluxq/document.hpp"

#include <charconv>
#include <map>

#include "fluxq/error.hpp"

namespace fluxq {

std::unique_ptr<XNode> build_document(EventSource& events) {
  auto doc = std::make_unique<XNode>();
  doc->tag = Schema::kDocument;
  std::vector<XNode*> stack{doc.get()};
  Event e;
  while (events.next(e)) {
    switch (e.kind) {
      case Event::Kind::Start: {
        auto n = std::make_unique<XNode>();
        n->tag = e.name;
        XNode* raw = n.get();
        stack.back()->children.push_back(std::move(n));
        stack.push_back(raw);
        break;
      }
      case Event::Kind::End:
        stack.pop_back();
        break;
      case Event::Kind::Text: {
        auto n = std::make_unique<XNode>();
        n->text = e.name;
        stack.back()->children.push_back(std::move(n));
        break;
      }
      case Event::Kind::FirstPast:
        break;
    }
  }
  return doc;
}

std::unique_ptr<XNode> parse_document(std::string_view xml) {
  XmlReader r(xml);
  return build_document(r);
}

namespace {

void collect_text(const XNode& n, std::string& out) {
  if (n.is_text()) {
    out += n.text;
    return;
  }
  for (const auto& c : n.children) collect_text(*c, out);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\n' || s.front() == '\r')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\n' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

bool is_decimal(std::string_view s) {
  std::size_t i = 0;
  if (i < s.size() && (s[i] == '+' || s[i] == '-')) ++i;
  bool digits = false;
  while (i < s.size() && s[i] >= '0' && s[i] <= '9') {
    ++i;
    digits = true;
  }
  if (i < s.size() && s[i] == '.') {
    ++i;
    while (i < s.size() && s[i] >= '0' && s[i] <= '9') {
      ++i;
      digits = true;
    }
  }
  return digits && i == s.size();
}

double to_double(std::string_view s) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0;
  std::from_chars(s.data(), s.data() + s.size(), v);
  return v;
}

template <typename T>
bool apply(const T& a, RelOp op, const T& b) {
  switch (op) {
    case RelOp::Eq: return a == b;
    case RelOp::Lt: return a < b;
    case RelOp::Le: return a <= b;
    case RelOp::Gt: return a > b;
    case RelOp::Ge: return a >= b;
  }
  return false;
}

}  // namespace

std::string string_value(const XNode& n) {
  std::string out;
  collect_text(n, out);
  return out;
}

void serialize(const XNode& n, std::string& out) {
  if (n.is_text()) {
    append_escaped(out, n.text);
    return;
  }
  bool doc = n.tag == Schema::kDocument;
  if (!doc) out += "<" + n.tag + ">";
  for (const auto& c : n.children) serialize(*c, out);
  if (!doc) out += "</" + n.tag + ">";
}

bool compare_values(std::string_view lhs, RelOp op, std::string_view rhs) {
  lhs = trim(lhs);
  rhs = trim(rhs);
  if (is_decimal(lhs) && is_decimal(rhs)) return apply(to_double(lhs), op, to_double(rhs));
  return apply(lhs, op, rhs);
}

// ---- reference evaluation ----------------------------------------------------

namespace {

using Env = std::map<std::string, const XNode*>;

void select(const XNode& from, const std::vector<std::string>& steps, std::size_t i,
            std::vector<const XNode*>& out) {
  if (i == steps.size()) {
    out.push_back(&from);
    return;
  }
  for (const auto& c : from.children) {
    if (!c->is_text() && c->tag == steps[i]) select(*c, steps, i + 1, out);
  }
}

std::vector<const XNode*> select(const Env& env, const VarPath& p) {
  std::vector<const XNode*> out;
  auto it = env.find(p.var);
  if (it == env.end()) throw std::logic_error("unbound variable " + p.var);
  select(*it->second, p.steps, 0, out);
  return out;
}

bool holds(const Condition& c, const Env& env) {
  switch (c.kind) {
    case Condition::Kind::True: return true;
    case Condition::Kind::And:
      for (const auto& ch : c.children) {
        if (!holds(*ch, env)) return false;
      }
      return true;
    case Condition::Kind::Or:
      for (const auto& ch : c.children) {
        if (holds(*ch, env)) return true;
      }
      return false;
    case Condition::Kind::Not: return !holds(*c.children[0], env);
    case Condition::Kind::Exists: return !select(env, c.lhs).empty();
    case Condition::Kind::Compare:
      for (const XNode* n : select(env, c.lhs)) {
        if (compare_values(string_value(*n), c.op, c.literal)) return true;
      }
      return false;
    case Condition::Kind::Join: {
      auto left = select(env, c.lhs);
      auto right = select(env, c.rhs);
      std::vector<std::string> rv;
      for (const XNode* r : right) rv.push_back(string_value(*r));
      for (const XNode* l : left) {
        std::string lv = string_value(*l);
        for (const auto& r : rv) {
          if (compare_values(lv, c.op, r)) return true;
        }
      }
      return false;
    }
  }
  return false;
}

void eval(const XQuery& e, Env& env, std::string& out) {
  using K = XQuery::Kind;
  switch (e.kind) {
    case K::Empty: return;
    case K::Str: out += e.text; return;
    case K::Seq:
      for (const auto& it : e.items) eval(*it, env, out);
      return;
    case K::VarOut: {
      auto it = env.find(e.var);
      if (it == env.end()) throw std::logic_error("unbound variable " + e.var);
      serialize(*it->second, out);
      return;
    }
    case K::PathOut:
      for (const XNode* n : select(env, VarPath{e.var, e.path})) serialize(*n, out);
      return;
    case K::For:
    case K::ForWhere: {
      auto nodes = select(env, VarPath{e.source, e.path});
      auto saved = env.find(e.var) == env.end() ? nullptr : env[e.var];
      for (const XNode* n : nodes) {
        env[e.var] = n;
        if (e.kind == K::ForWhere && !holds(*e.cond, env)) continue;
        eval(*e.body, env, out);
      }
      if (saved) env[e.var] = saved; else env.erase(e.var);
      return;
    }
    case K::If:
      if (holds(*e.cond, env)) eval(*e.body, env, out);
      return;
  }
}

}  // namespace

std::string reference_eval(const XQuery& q, const XNode& document) {
  Env env{{kRootVar, &document}};
  std::string out;
  eval(q, env, out);
  return out;
}

std::string reference_eval(const XQuery& q, std::string_view xml) {
  auto doc = parse_document(xml);
  return reference_eval(q, *doc);
}

// ---- direct n+2-scan interpretation ------------------------------------------

namespace {

class NScan {
 public:
  explicit NScan(const Schema& schema) : schema_(schema) {}

  void run(const FluxExpr& f, Env& env, std::string& out) {
    if (f.kind == FluxExpr::Kind::Simple) {
      eval(*f.simple, env, out);
      return;
    }
    auto it = env.find(f.var);
    if (it == env.end()) throw std::logic_error("unbound variable " + f.var);
    const XNode& v = *it->second;
    const ContentModel& model = v.tag == Schema::kDocument ? schema_.document() : schema_.model(v.tag);
    const auto& g = model.automaton;

    std::vector<const XNode*> kids;
    for (const auto& c : v.children) {
      if (!c->is_text()) kids.push_back(c.get());
    }
    std::vector<PastTable> tables(f.handlers.size());
    for (std::size_t j = 0; j < f.handlers.size(); ++j) {
      const Handler& h = f.handlers[j];
      if (h.kind == Handler::Kind::OnFirst) {
        tables[j] = make_past_table(g, effective_past(h, model.symbols()));
      }
    }
    std::vector<bool> fired(f.handlers.size(), false);
    out += f.prefix;
    State prev = 0;
    State cur = 0;
    const std::size_t n = kids.size();
    for (std::size_t i = 0; i <= n + 1; ++i) {
      if (i >= 1 && i <= n) {
        prev = cur;
        auto next = g.next(cur, kids[i - 1]->tag);
        if (!next) throw ValidationError("unexpected child <" + kids[i - 1]->tag + ">");
        cur = *next;
      }
      for (std::size_t j = 0; j < f.handlers.size(); ++j) {
        const Handler& h = f.handlers[j];
        if (h.kind == Handler::Kind::On) {
          if (i >= 1 && i <= n && kids[i - 1]->tag == h.symbol) {
            auto saved = env.find(h.var) == env.end() ? nullptr : env[h.var];
            env[h.var] = kids[i - 1];
            run(*h.flux, env, out);
            if (saved) env[h.var] = saved; else env.erase(h.var);
          }
          continue;
        }
        if (fired[j]) continue;
        bool first_past = i <= n && tables[j](cur) && (i == 0 || !tables[j](prev));
        if (first_past || i == n + 1) {
          fired[j] = true;
          eval(*h.body, env, out);
        }
      }
    }
    out += f.suffix;
  }

 private:
  const Schema& schema_;
};

}  // namespace

std::string nscan_eval(const FluxExpr& q, const Schema& schema, const XNode& document) {
  Env env{{kRootVar, &document}};
  std::string out;
  NScan(schema).run(q, env, out);
  return out;
}

}  // namespace fluxq

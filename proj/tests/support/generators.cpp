#include "generators.hpp"

#include <algorithm>
#include <functional>
#include <stdexcept>

#include "fluxq/error.hpp"
#include "oracles.hpp"

namespace fluxq::testing {

namespace {

int uniform(std::mt19937_64& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

bool chance(std::mt19937_64& rng, double p) { return std::bernoulli_distribution(p)(rng); }

template <typename T>
const T& pick(std::mt19937_64& rng, const std::vector<T>& v) {
  return v[uniform(rng, 0, static_cast<int>(v.size()) - 1)];
}

const std::vector<std::string> kNames = {"r", "a", "b", "c", "d", "e", "f", "g", "h"};
const std::vector<std::string> kValues = {"1", "2", "10", "x", "y"};

}  // namespace

std::string random_dtd(std::mt19937_64& rng, const DtdGenOptions& opts) {
  int n = uniform(rng, opts.min_elements, std::min<int>(opts.max_elements, kNames.size()));
  std::string out;
  for (int i = 0; i < n; ++i) {
    std::vector<std::string> later(kNames.begin() + i + 1, kNames.begin() + n);
    int k = later.empty() ? 0 : uniform(rng, i == 0 ? 1 : 0, std::min<int>(opts.max_children, later.size()));
    std::shuffle(later.begin(), later.end(), rng);
    later.resize(k);
    if (later.empty()) {
      out += "<!ELEMENT " + kNames[i] + " (#PCDATA)>\n";
      continue;
    }
    for (;;) {
      RegExpr r = random_regex(rng, later, opts.max_atoms);
      if (symbols(r).empty()) continue;
      if (!GlushkovAutomaton::build_lenient(r).deterministic()) continue;
      std::string text = to_string(r);
      if (text.empty() || text.front() != '(') text = "(" + text + ")";
      out += "<!ELEMENT " + kNames[i] + " " + text + ">\n";
      break;
    }
  }
  return out;
}

namespace {

struct Scope {
  std::string var;
  std::string element;
};

class QueryGen {
 public:
  QueryGen(std::mt19937_64& rng, const Dtd& dtd, const QueryGenOptions& opts)
      : rng_(rng), dtd_(dtd), opts_(opts) {}

  XPtr query() {
    std::vector<Scope> scope{{kRootVar, "#document"}};
    return seq(scope, 0);
  }

 private:
  std::vector<std::string> children(const std::string& element) const {
    if (element == "#document") return {dtd_.root};
    const ElementDecl* d = dtd_.find(element);
    if (!d) return {};
    auto s = symbols(d->model);
    return {s.begin(), s.end()};
  }

  // Random downward path of 1..max_len steps, or empty if none exists.
  std::vector<std::string> path_from(const std::string& element, int max_len,
                                     std::string* end_element = nullptr) {
    std::vector<std::string> steps;
    std::string cur = element;
    int len = uniform(rng_, 1, max_len);
    while (static_cast<int>(steps.size()) < len) {
      auto ch = children(cur);
      if (ch.empty()) break;
      cur = pick(rng_, ch);
      steps.push_back(cur);
    }
    if (end_element) *end_element = cur;
    return steps;
  }

  std::string fresh() { return "$v" + std::to_string(++counter_); }

  VarPath cond_path(const std::vector<Scope>& scope) {
    for (int tries = 0; tries < 8; ++tries) {
      const Scope& s = pick(rng_, scope);
      auto steps = path_from(s.element, 2);
      if (!steps.empty()) return {s.var, steps};
    }
    return {};
  }

  CondPtr atom(const std::vector<Scope>& scope) {
    int kind = uniform(rng_, 0, 9);
    if (kind == 0) return Condition::truth();
    VarPath p = cond_path(scope);
    if (p.steps.empty()) return Condition::truth();
    auto op = static_cast<RelOp>(uniform(rng_, 0, 4));
    if (kind <= 2) return Condition::exists(p);
    if (kind <= 6 || !opts_.allow_joins) return Condition::compare(p, op, pick(rng_, kValues));
    VarPath q = cond_path(scope);
    if (q.steps.empty()) return Condition::exists(p);
    return Condition::join(p, op, q);
  }

  CondPtr cond(const std::vector<Scope>& scope, int depth) {
    int k = depth > 1 ? 0 : uniform(rng_, 0, 5);
    if (k == 3) return Condition::conj(cond(scope, depth + 1), cond(scope, depth + 1));
    if (k == 4) return Condition::disj(cond(scope, depth + 1), cond(scope, depth + 1));
    if (k == 5) return Condition::negate(cond(scope, depth + 1));
    return atom(scope);
  }

  std::string text() {
    static const std::vector<std::string> texts = {"<x>", "</x>", "<y/>", "t", "<z>", "</z>"};
    return pick(rng_, texts);
  }

  XPtr seq(std::vector<Scope>& scope, int depth) {
    int n = uniform(rng_, 1, opts_.max_seq);
    std::vector<XPtr> items;
    for (int i = 0; i < n; ++i) items.push_back(item(scope, depth));
    return XQuery::seq(std::move(items));
  }

  XPtr item(std::vector<Scope>& scope, int depth) {
    int k = uniform(rng_, 0, depth >= opts_.max_depth ? 2 : 6);
    switch (k) {
      case 0:
        return XQuery::str(text());
      case 1: {
        std::vector<Scope> outs;
        for (const auto& s : scope) {
          if (s.var != kRootVar || opts_.allow_root_out) outs.push_back(s);
        }
        if (outs.empty()) return XQuery::str(text());
        return XQuery::var_out(pick(rng_, outs).var);
      }
      case 2: {
        if (!opts_.allow_path_out) return XQuery::str(text());
        const Scope& s = pick(rng_, scope);
        auto steps = path_from(s.element, 2);
        if (steps.empty() || (s.var == kRootVar && !opts_.allow_root_out && steps.size() < 2)) {
          return XQuery::str(text());
        }
        return XQuery::path_out(s.var, steps);
      }
      case 3:
      case 4:
      case 5: {
        const Scope& s = pick(rng_, scope);
        std::string end;
        auto steps = path_from(s.element, 2, &end);
        if (steps.empty()) return XQuery::str(text());
        std::string var = fresh();
        std::string src = s.var;
        scope.push_back({var, end});
        CondPtr c;
        if (opts_.allow_where && chance(rng_, 0.3)) c = cond(scope, 0);
        XPtr body = seq(scope, depth + 1);
        scope.pop_back();
        if (c) return XQuery::for_where(var, src, steps, c, body);
        return XQuery::for_(var, src, steps, body);
      }
      default:
        return XQuery::if_(cond(scope, 0), seq(scope, depth + 1));
    }
  }

  std::mt19937_64& rng_;
  const Dtd& dtd_;
  QueryGenOptions opts_;
  int counter_ = 0;
};

class DocGen {
 public:
  DocGen(std::mt19937_64& rng, const Schema& schema, int budget)
      : rng_(rng), schema_(schema), budget_(budget) {}

  bool element(const std::string& name, std::string& out) {
    if (--budget_ < 0) return false;
    out += "<" + name + ">";
    const ContentModel& m = schema_.model(name);
    if (m.text_only) {
      out += pick(rng_, kValues);
    } else {
      auto word = random_word(m.expr, rng_, 6);
      if (!word) throw std::runtime_error("empty content model for " + name);
      for (const auto& c : *word) {
        if (!element(c, out)) return false;
      }
    }
    out += "</" + name + ">";
    return true;
  }

 private:
  std::mt19937_64& rng_;
  const Schema& schema_;
  int budget_;
};

}  // namespace

XPtr random_query(std::mt19937_64& rng, const Dtd& dtd, const QueryGenOptions& opts) {
  return QueryGen(rng, dtd, opts).query();
}

std::string random_document(std::mt19937_64& rng, const Schema& schema, int max_elements) {
  for (int attempt = 0; attempt < 1000; ++attempt) {
    std::string out;
    DocGen g(rng, schema, max_elements);
    if (g.element(schema.root(), out)) return out;
  }
  throw std::runtime_error("could not generate a document within the element budget");
}

}  // namespace fluxq::testing

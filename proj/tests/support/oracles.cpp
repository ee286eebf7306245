#include "oracles.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <memory>

namespace fluxq::testing {

namespace {

using Word = std::vector<std::string>;

// ---- brute force -----------------------------------------------------------

// End positions reachable by matching r starting at `from`.
std::set<std::size_t> ends(const RegExpr& r, const Word& w, std::size_t from) {
  using K = RegExpr::Kind;
  switch (r.kind) {
    case K::Epsilon:
      return {from};
    case K::Atom:
      if (from < w.size() && w[from] == r.symbol) return {from + 1};
      return {};
    case K::Seq: {
      std::set<std::size_t> cur{from};
      for (const auto& c : r.children) {
        std::set<std::size_t> nxt;
        for (auto p : cur) {
          auto e = ends(c, w, p);
          nxt.insert(e.begin(), e.end());
        }
        cur = std::move(nxt);
        if (cur.empty()) break;
      }
      return cur;
    }
    case K::Alt: {
      std::set<std::size_t> out;
      for (const auto& c : r.children) {
        auto e = ends(c, w, from);
        out.insert(e.begin(), e.end());
      }
      return out;
    }
    case K::Opt: {
      auto e = ends(r.children.front(), w, from);
      e.insert(from);
      return e;
    }
    case K::Star:
    case K::Plus: {
      std::set<std::size_t> out;
      if (r.kind == K::Star) out.insert(from);
      std::deque<std::size_t> work{from};
      std::set<std::size_t> seen{from};
      while (!work.empty()) {
        auto p = work.front();
        work.pop_front();
        for (auto e : ends(r.children.front(), w, p)) {
          out.insert(e);
          if (e != p && seen.insert(e).second) work.push_back(e);
        }
      }
      return out;
    }
  }
  return {};
}

// ---- derivatives -----------------------------------------------------------

struct D;
using DP = std::shared_ptr<const D>;

struct D {
  enum K { Empty, Eps, Sym, Cat, Or, Star } k;
  std::string sym;
  std::vector<DP> kids;
  std::string key;
  bool nullable = false;
  bool empty_lang = false;
};

DP mk(D::K k, std::string sym, std::vector<DP> kids) {
  auto d = std::make_shared<D>();
  d->k = k;
  d->sym = std::move(sym);
  d->kids = std::move(kids);
  switch (k) {
    case D::Empty:
      d->key = "0";
      d->empty_lang = true;
      break;
    case D::Eps:
      d->key = "1";
      d->nullable = true;
      break;
    case D::Sym:
      d->key = d->sym;
      break;
    case D::Cat:
      d->key = "(" + d->kids[0]->key + "." + d->kids[1]->key + ")";
      d->nullable = d->kids[0]->nullable && d->kids[1]->nullable;
      d->empty_lang = d->kids[0]->empty_lang || d->kids[1]->empty_lang;
      break;
    case D::Or: {
      d->key = "(";
      d->empty_lang = true;
      for (std::size_t i = 0; i < d->kids.size(); ++i) {
        if (i) d->key += "|";
        d->key += d->kids[i]->key;
        d->nullable = d->nullable || d->kids[i]->nullable;
        d->empty_lang = d->empty_lang && d->kids[i]->empty_lang;
      }
      d->key += ")";
      break;
    }
    case D::Star:
      d->key = "(" + d->kids[0]->key + ")*";
      d->nullable = true;
      break;
  }
  return d;
}

DP empty() { return mk(D::Empty, "", {}); }
DP eps() { return mk(D::Eps, "", {}); }

DP cat(DP a, DP b) {
  if (a->empty_lang || b->empty_lang) return empty();
  if (a->k == D::Eps) return b;
  if (b->k == D::Eps) return a;
  // right-associate so keys are canonical
  if (a->k == D::Cat) return cat(a->kids[0], cat(a->kids[1], b));
  return mk(D::Cat, "", {a, b});
}

DP alt(std::vector<DP> xs) {
  std::map<std::string, DP> uniq;
  for (auto& x : xs) {
    if (x->empty_lang) continue;
    if (x->k == D::Or) {
      for (auto& y : x->kids) uniq.emplace(y->key, y);
    } else {
      uniq.emplace(x->key, x);
    }
  }
  if (uniq.empty()) return empty();
  if (uniq.size() == 1) return uniq.begin()->second;
  std::vector<DP> kids;
  for (auto& [k, v] : uniq) kids.push_back(v);
  return mk(D::Or, "", std::move(kids));
}

DP star(DP a) {
  if (a->empty_lang || a->k == D::Eps) return eps();
  if (a->k == D::Star) return a;
  return mk(D::Star, "", {a});
}

DP from_regex(const RegExpr& r) {
  using K = RegExpr::Kind;
  switch (r.kind) {
    case K::Epsilon:
      return eps();
    case K::Atom:
      return mk(D::Sym, r.symbol, {});
    case K::Seq: {
      DP acc = eps();
      for (auto it = r.children.rbegin(); it != r.children.rend(); ++it) acc = cat(from_regex(*it), acc);
      return acc;
    }
    case K::Alt: {
      std::vector<DP> xs;
      for (const auto& c : r.children) xs.push_back(from_regex(c));
      return alt(std::move(xs));
    }
    case K::Star:
      return star(from_regex(r.children.front()));
    case K::Plus: {
      DP x = from_regex(r.children.front());
      return cat(x, star(x));
    }
    case K::Opt:
      return alt({eps(), from_regex(r.children.front())});
  }
  return empty();
}

DP deriv(const DP& d, const std::string& a) {
  switch (d->k) {
    case D::Empty:
    case D::Eps:
      return empty();
    case D::Sym:
      return d->sym == a ? eps() : empty();
    case D::Cat: {
      DP left = cat(deriv(d->kids[0], a), d->kids[1]);
      if (!d->kids[0]->nullable) return left;
      return alt({left, deriv(d->kids[1], a)});
    }
    case D::Or: {
      std::vector<DP> xs;
      for (const auto& k : d->kids) xs.push_back(deriv(k, a));
      return alt(std::move(xs));
    }
    case D::Star:
      return cat(deriv(d->kids[0], a), d);
  }
  return empty();
}

// Whether some word of L(d) contains a symbol of `set`.
bool may_contain(const DP& d, const std::set<std::string>& set, const std::set<std::string>& alphabet) {
  std::deque<DP> work{d};
  std::set<std::string> seen{d->key};
  while (!work.empty()) {
    DP cur = work.front();
    work.pop_front();
    for (const auto& a : alphabet) {
      DP n = deriv(cur, a);
      if (n->empty_lang) continue;
      if (set.count(a)) return true;
      if (seen.insert(n->key).second) work.push_back(n);
    }
  }
  return false;
}

}  // namespace

bool brute_match(const RegExpr& r, const std::vector<std::string>& word) {
  return ends(r, word, 0).count(word.size()) > 0;
}

std::vector<std::vector<std::string>> all_words(const std::vector<std::string>& alphabet,
                                                std::size_t max_len) {
  std::vector<Word> out{{}};
  std::size_t begin = 0;
  for (std::size_t len = 1; len <= max_len; ++len) {
    std::size_t end = out.size();
    for (std::size_t i = begin; i < end; ++i) {
      for (const auto& a : alphabet) {
        Word w = out[i];
        w.push_back(a);
        out.push_back(std::move(w));
      }
    }
    begin = end;
  }
  return out;
}

bool ord_oracle(const RegExpr& r, const std::string& a, const std::string& b, std::size_t bound) {
  const auto alphabet = symbols(r);
  // phase 0: no b yet; 1: seen b; 2: seen a after a b (violation pending acceptance)
  struct Node {
    DP d;
    int phase;
  };
  std::deque<std::pair<Node, std::size_t>> work;
  std::set<std::pair<std::string, int>> seen;
  DP start = from_regex(r);
  work.push_back({{start, 0}, 0});
  seen.insert({start->key, 0});
  while (!work.empty()) {
    auto [n, depth] = work.front();
    work.pop_front();
    if (n.phase == 2 && n.d->nullable) return false;
    if (depth == bound) continue;
    for (const auto& s : alphabet) {
      DP nd = deriv(n.d, s);
      if (nd->empty_lang) continue;
      int phase = n.phase;
      if (phase == 1 && s == a) phase = 2;
      if (phase == 0 && s == b) phase = 1;
      if (seen.insert({nd->key, phase}).second) work.push_back({{nd, phase}, depth + 1});
    }
  }
  return true;
}

bool past_oracle(const RegExpr& r, const std::vector<std::string>& u,
                 const std::set<std::string>& set) {
  DP d = from_regex(r);
  for (const auto& s : u) d = deriv(d, s);
  return !may_contain(d, set, symbols(r));
}

std::optional<std::size_t> first_past_oracle(const RegExpr& r, const std::vector<std::string>& w,
                                             const std::set<std::string>& set) {
  const auto alphabet = symbols(r);
  DP d = from_regex(r);
  for (std::size_t i = 0;; ++i) {
    if (!may_contain(d, set, alphabet)) return i;
    if (i == w.size()) return std::nullopt;
    d = deriv(d, w[i]);
  }
}

std::optional<std::vector<std::string>> random_word(const RegExpr& r, std::mt19937_64& rng,
                                                    std::size_t max_len) {
  const auto sym = symbols(r);
  const std::vector<std::string> alphabet(sym.begin(), sym.end());
  DP d = from_regex(r);
  Word w;
  while (true) {
    std::vector<std::pair<std::string, DP>> moves;
    for (const auto& a : alphabet) {
      DP n = deriv(d, a);
      if (!n->empty_lang) moves.emplace_back(a, n);
    }
    bool stop = d->nullable && (moves.empty() || w.size() >= max_len || rng() % 4 == 0);
    if (stop) return w;
    if (moves.empty() || w.size() >= 4 * max_len) return std::nullopt;
    auto& m = moves[rng() % moves.size()];
    w.push_back(m.first);
    d = m.second;
  }
}

namespace {

RegExpr gen(std::mt19937_64& rng, const std::vector<std::string>& alphabet, int atoms) {
  if (atoms <= 1) {
    RegExpr a = RegExpr::atom(alphabet[rng() % alphabet.size()]);
    switch (rng() % 6) {
      case 0:
        return RegExpr::star(a);
      case 1:
        return RegExpr::plus(a);
      case 2:
        return RegExpr::opt(a);
      default:
        return a;
    }
  }
  int left = 1 + static_cast<int>(rng() % (atoms - 1));
  RegExpr l = gen(rng, alphabet, left);
  RegExpr r = gen(rng, alphabet, atoms - left);
  RegExpr node = (rng() % 2) ? RegExpr::seq({l, r}) : RegExpr::alt({l, r});
  switch (rng() % 7) {
    case 0:
      return RegExpr::star(node);
    case 1:
      return RegExpr::plus(node);
    case 2:
      return RegExpr::opt(node);
    default:
      return node;
  }
}

}  // namespace

RegExpr random_regex(std::mt19937_64& rng, const std::vector<std::string>& alphabet,
                     int max_atoms) {
  int atoms = 1 + static_cast<int>(rng() % max_atoms);
  return gen(rng, alphabet, atoms);
}

}  // namespace fluxq::testing

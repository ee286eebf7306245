#include "fluxq/analysis.hpp"

#include <algorithm>

#include "fluxq/error.hpp"

namespace fluxq {

bool ProductionReport::has_ord(const std::string& a, const std::string& b) const {
  return std::find(ord.begin(), ord.end(), std::make_pair(a, b)) != ord.end();
}

namespace {

ProductionReport analyze_one(const ElementDecl& decl) {
  ProductionReport r;
  r.element = decl.name;
  r.text_only = decl.text_only;
  r.model = decl.text_only ? "#PCDATA" : to_dotted_string(decl.model);
  auto g = GlushkovAutomaton::build_lenient(decl.model);
  r.deterministic = g.deterministic();
  r.ambiguity = g.ambiguity();
  r.states = g.state_count();
  auto ord = ord_relation(g);
  const auto& symb = g.symbols();
  for (const auto& a : symb) {
    for (const auto& b : symb) {
      if (a == b) continue;
      (ord.holds(a, b) ? r.ord : r.not_ord).emplace_back(a, b);
    }
  }
  auto past = past_relation(g);
  for (State q = 0; q < static_cast<State>(g.state_count()); ++q) {
    ProductionReport::StatePast sp{q, g.symbol_of(q), {}};
    for (const auto& a : symb) {
      if (past.holds(q, a)) sp.past.insert(a);
    }
    r.past.push_back(std::move(sp));
  }
  return r;
}

std::string set_text(const std::set<std::string>& s) {
  std::string out = "{";
  for (const auto& x : s) out += (out.size() > 1 ? ", " : "") + x;
  return out + "}";
}

}  // namespace

std::vector<ProductionReport> analyze(const Dtd& dtd, const std::string& element) {
  std::vector<ProductionReport> out;
  if (!element.empty()) {
    const ElementDecl* d = dtd.find(element);
    if (!d) throw UnknownElement("element '" + element + "' is not declared");
    out.push_back(analyze_one(*d));
    return out;
  }
  for (const auto& name : dtd.order) out.push_back(analyze_one(dtd.elements.at(name)));
  return out;
}

std::string to_string(const ProductionReport& r) {
  std::string s = r.element + " := " + r.model + "\n";
  s += "  states: " + std::to_string(r.states);
  if (!r.deterministic) s += " (not one-unambiguous: " + r.ambiguity + ")";
  s += "\n";
  for (const auto& [a, b] : r.ord) s += "  Ord(" + a + ", " + b + ")\n";
  for (const auto& [a, b] : r.not_ord) s += "  not Ord(" + a + ", " + b + ")\n";
  for (const auto& p : r.past) {
    s += "  Past q" + std::to_string(p.state) + (p.symbol.empty() ? "" : " [" + p.symbol + "]") +
         ": " + set_text(p.past) + "\n";
  }
  return s;
}

}  // namespace fluxq

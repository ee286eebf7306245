#include "fluxq/datagen.hpp"

#include <array>
#include <random>

#include "fluxq/error.hpp"

namespace fluxq {

namespace {

const std::string kBibDtd = R"(<!ELEMENT bib (book)*>
<!ELEMENT book (title,(author+|editor+),publisher,price)>
<!ELEMENT title (#PCDATA)>
<!ELEMENT author (#PCDATA)>
<!ELEMENT editor (#PCDATA)>
<!ELEMENT publisher (#PCDATA)>
<!ELEMENT price (#PCDATA)>
)";

// XMark-like auction site without attributes: ids and references are
// child elements.
const std::string kAuctionDtd = R"(<!ELEMENT site (regions,people,open_auctions,closed_auctions)>
<!ELEMENT regions (africa,asia,australia,europe,namerica,samerica)>
<!ELEMENT africa (item*)>
<!ELEMENT asia (item*)>
<!ELEMENT australia (item*)>
<!ELEMENT europe (item*)>
<!ELEMENT namerica (item*)>
<!ELEMENT samerica (item*)>
<!ELEMENT item (item_id,location,quantity,name,payment,description,shipping)>
<!ELEMENT people (person*)>
<!ELEMENT person (person_id,name,emailaddress,phone?,address?,homepage?,creditcard?,profile?)>
<!ELEMENT address (street,city,country,zipcode)>
<!ELEMENT profile (interest*,education?,gender?,business,age?,profile_income?)>
<!ELEMENT open_auctions (open_auction*)>
<!ELEMENT open_auction (open_auction_id,initial,reserve?,bidder*,current,itemref,seller,interval)>
<!ELEMENT bidder (date,time,personref,increase)>
<!ELEMENT interval (start,end)>
<!ELEMENT closed_auctions (closed_auction*)>
<!ELEMENT closed_auction (seller,buyer,itemref,price,date,quantity,type)>
<!ELEMENT buyer (buyer_person)>
<!ELEMENT item_id (#PCDATA)>
<!ELEMENT location (#PCDATA)>
<!ELEMENT quantity (#PCDATA)>
<!ELEMENT name (#PCDATA)>
<!ELEMENT payment (#PCDATA)>
<!ELEMENT description (#PCDATA)>
<!ELEMENT shipping (#PCDATA)>
<!ELEMENT person_id (#PCDATA)>
<!ELEMENT emailaddress (#PCDATA)>
<!ELEMENT phone (#PCDATA)>
<!ELEMENT street (#PCDATA)>
<!ELEMENT city (#PCDATA)>
<!ELEMENT country (#PCDATA)>
<!ELEMENT zipcode (#PCDATA)>
<!ELEMENT homepage (#PCDATA)>
<!ELEMENT creditcard (#PCDATA)>
<!ELEMENT interest (#PCDATA)>
<!ELEMENT education (#PCDATA)>
<!ELEMENT gender (#PCDATA)>
<!ELEMENT business (#PCDATA)>
<!ELEMENT age (#PCDATA)>
<!ELEMENT profile_income (#PCDATA)>
<!ELEMENT open_auction_id (#PCDATA)>
<!ELEMENT initial (#PCDATA)>
<!ELEMENT reserve (#PCDATA)>
<!ELEMENT date (#PCDATA)>
<!ELEMENT time (#PCDATA)>
<!ELEMENT personref (#PCDATA)>
<!ELEMENT increase (#PCDATA)>
<!ELEMENT current (#PCDATA)>
<!ELEMENT itemref (#PCDATA)>
<!ELEMENT seller (#PCDATA)>
<!ELEMENT start (#PCDATA)>
<!ELEMENT end (#PCDATA)>
<!ELEMENT buyer_person (#PCDATA)>
<!ELEMENT price (#PCDATA)>
<!ELEMENT type (#PCDATA)>
)";

constexpr std::array kFirst{"Ada", "Bert", "Chen", "Dana", "Emil", "Fatima", "Goran", "Hana",
                            "Ivo", "Jun", "Kofi", "Lena", "Mateo", "Nia", "Omar", "Petra"};
constexpr std::array kLast{"Abel", "Brandt", "Castro", "Dube", "Eriksen", "Fontaine", "Gupta",
                           "Hale", "Ito", "Jovanovic", "Kim", "Lindqvist", "Moreau", "Novak"};
constexpr std::array kWords{"stream", "query", "schema", "order", "buffer", "event", "tree",
                            "path", "join", "index", "model", "data", "system", "theory",
                            "practice", "engine", "language", "logic", "graph", "cache"};
constexpr std::array kPublishers{"Addison-Wesley", "Morgan Kaufmann", "Springer", "MIT Press",
                                 "Kluwer", "Prentice Hall"};
constexpr std::array kCountries{"Austria", "Brazil", "Canada", "Denmark", "Egypt", "France",
                                "Japan", "Kenya", "Peru", "Sweden"};

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  std::size_t pick(std::size_t n) { return static_cast<std::size_t>(rng_() % n); }
  bool chance(int percent) { return static_cast<int>(rng_() % 100) < percent; }
  template <typename A>
  const char* one(const A& a) {
    return a[pick(a.size())];
  }
  std::string person_name() { return std::string(one(kFirst)) + " " + one(kLast); }
  std::string words(std::size_t lo, std::size_t hi) {
    std::size_t n = lo + pick(hi - lo + 1);
    std::string s;
    for (std::size_t i = 0; i < n; ++i) s += (i ? " " : "") + std::string(one(kWords));
    return s;
  }
  std::string number(int lo, int hi) { return std::to_string(lo + static_cast<int>(pick(hi - lo + 1))); }
  std::string money(int lo, int hi) { return number(lo, hi) + "." + number(10, 99); }

  void leaf(std::string& out, const char* tag, const std::string& text) {
    out += "<";
    out += tag;
    out += ">";
    out += text;
    out += "</";
    out += tag;
    out += ">";
  }

 private:
  std::mt19937_64 rng_;
};

std::string book(Gen& g) {
  std::string s = "<book>";
  g.leaf(s, "title", g.words(2, 5));
  if (g.chance(80)) {
    std::size_t n = 1 + g.pick(4);
    for (std::size_t i = 0; i < n; ++i) g.leaf(s, "author", g.person_name());
  } else {
    std::size_t n = 1 + g.pick(2);
    for (std::size_t i = 0; i < n; ++i) g.leaf(s, "editor", g.person_name());
  }
  g.leaf(s, "publisher", g.one(kPublishers));
  g.leaf(s, "price", g.money(10, 150));
  return s + "</book>";
}

std::string generate_bib(const DataSpec& spec) {
  Gen g(spec.seed);
  std::string out = "<bib>";
  const std::string close = "</bib>";
  while (true) {
    std::string b = book(g);
    if (out.size() + b.size() + close.size() > spec.size) break;
    out += b;
  }
  return out + close;
}

std::string item(Gen& g, std::size_t id) {
  std::string s = "<item>";
  g.leaf(s, "item_id", "item" + std::to_string(id));
  g.leaf(s, "location", g.one(kCountries));
  g.leaf(s, "quantity", g.number(1, 5));
  g.leaf(s, "name", g.words(1, 3));
  g.leaf(s, "payment", g.chance(50) ? "Creditcard" : "Money order");
  g.leaf(s, "description", g.words(4, 20));
  g.leaf(s, "shipping", g.chance(50) ? "Will ship internationally" : "Buyer pays fixed shipping");
  return s + "</item>";
}

std::string person(Gen& g, std::size_t id) {
  std::string s = "<person>";
  std::string name = g.person_name();
  g.leaf(s, "person_id", "person" + std::to_string(id));
  g.leaf(s, "name", name);
  g.leaf(s, "emailaddress", "mailto:p" + std::to_string(id) + "@example.org");
  if (g.chance(50)) g.leaf(s, "phone", "+" + g.number(1, 99) + " " + g.number(100000, 999999));
  if (g.chance(40)) {
    s += "<address>";
    g.leaf(s, "street", g.number(1, 99) + " " + g.one(kLast) + " St");
    g.leaf(s, "city", g.one(kLast));
    g.leaf(s, "country", g.one(kCountries));
    g.leaf(s, "zipcode", g.number(10000, 99999));
    s += "</address>";
  }
  if (g.chance(30)) g.leaf(s, "homepage", "http://www.example.org/~p" + std::to_string(id));
  if (g.chance(30)) g.leaf(s, "creditcard", g.number(1000, 9999) + " " + g.number(1000, 9999));
  if (g.chance(60)) {
    s += "<profile>";
    std::size_t n = g.pick(5);
    for (std::size_t i = 0; i < n; ++i) g.leaf(s, "interest", "category" + g.number(0, 99));
    if (g.chance(50)) g.leaf(s, "education", g.chance(50) ? "College" : "Graduate School");
    if (g.chance(50)) g.leaf(s, "gender", g.chance(50) ? "female" : "male");
    g.leaf(s, "business", g.chance(50) ? "Yes" : "No");
    if (g.chance(50)) g.leaf(s, "age", g.number(18, 80));
    if (g.chance(50)) g.leaf(s, "profile_income", g.money(9000, 120000));
    s += "</profile>";
  }
  return s + "</person>";
}

std::string open_auction(Gen& g, std::size_t id, std::size_t people, std::size_t items) {
  std::string s = "<open_auction>";
  g.leaf(s, "open_auction_id", "open_auction" + std::to_string(id));
  g.leaf(s, "initial", g.money(1, 200));
  if (g.chance(40)) g.leaf(s, "reserve", g.money(50, 500));
  std::size_t n = g.pick(6);
  for (std::size_t i = 0; i < n; ++i) {
    s += "<bidder>";
    g.leaf(s, "date", "2001-" + g.number(10, 12) + "-" + g.number(10, 28));
    g.leaf(s, "time", g.number(10, 23) + ":" + g.number(10, 59));
    g.leaf(s, "personref", "person" + std::to_string(g.pick(people)));
    g.leaf(s, "increase", g.money(1, 50));
    s += "</bidder>";
  }
  g.leaf(s, "current", g.money(1, 900));
  g.leaf(s, "itemref", "item" + std::to_string(g.pick(items)));
  g.leaf(s, "seller", "person" + std::to_string(g.pick(people)));
  s += "<interval>";
  g.leaf(s, "start", "2001-0" + g.number(1, 9) + "-" + g.number(10, 28));
  g.leaf(s, "end", "2002-0" + g.number(1, 9) + "-" + g.number(10, 28));
  return s + "</interval></open_auction>";
}

std::string closed_auction(Gen& g, std::size_t people, std::size_t items) {
  std::string s = "<closed_auction>";
  g.leaf(s, "seller", "person" + std::to_string(g.pick(people)));
  s += "<buyer>";
  g.leaf(s, "buyer_person", "person" + std::to_string(g.pick(people)));
  s += "</buyer>";
  g.leaf(s, "itemref", "item" + std::to_string(g.pick(items)));
  g.leaf(s, "price", g.money(5, 900));
  g.leaf(s, "date", "2000-" + g.number(10, 12) + "-" + g.number(10, 28));
  g.leaf(s, "quantity", g.number(1, 3));
  g.leaf(s, "type", g.chance(70) ? "Regular" : "Featured");
  return s + "</closed_auction>";
}

// Appends units produced by `unit(i)` while the section stays within budget.
template <typename F>
std::size_t fill(std::string& out, std::size_t budget, F&& unit) {
  std::size_t used = 0;
  std::size_t i = 0;
  while (true) {
    std::string u = unit(i);
    if (used + u.size() > budget) break;
    out += u;
    used += u.size();
    ++i;
  }
  return i;
}

std::string generate_auction(const DataSpec& spec) {
  Gen g(spec.seed);
  static const char* kRegions[] = {"africa", "asia", "australia", "europe", "namerica", "samerica"};
  const std::size_t fixed = 200;  // section tags
  std::size_t body = spec.size > fixed ? spec.size - fixed : 0;
  // rough proportions of an XMark document
  std::size_t region_budget = body * 30 / 100 / 6;
  std::size_t people_budget = body * 30 / 100;
  std::size_t open_budget = body * 25 / 100;
  std::size_t closed_budget = body - 6 * region_budget - people_budget - open_budget;

  std::string out = "<site><regions>";
  std::size_t items = 0;
  for (const char* r : kRegions) {
    out += "<" + std::string(r) + ">";
    items += fill(out, region_budget, [&](std::size_t) { return item(g, items); });
    out += "</" + std::string(r) + ">";
  }
  out += "</regions><people>";
  std::size_t people = fill(out, people_budget, [&](std::size_t i) { return person(g, i); });
  out += "</people><open_auctions>";
  std::size_t np = people ? people : 1;
  std::size_t ni = items ? items : 1;
  fill(out, open_budget, [&](std::size_t i) { return open_auction(g, i, np, ni); });
  out += "</open_auctions><closed_auctions>";
  fill(out, closed_budget, [&](std::size_t) { return closed_auction(g, np, ni); });
  out += "</closed_auctions></site>";
  return out;
}

}  // namespace

bool is_builtin_dtd(const std::string& name) { return name == "bib" || name == "auction"; }

const std::string& builtin_dtd(const std::string& name) {
  if (name == "bib") return kBibDtd;
  if (name == "auction") return kAuctionDtd;
  throw Error("unknown built-in schema '" + name + "' (expected bib or auction)");
}

std::string generate_data(const DataSpec& spec) {
  if (spec.schema == "bib") return generate_bib(spec);
  if (spec.schema == "auction") return generate_auction(spec);
  throw Error("unknown built-in schema '" + spec.schema + "' (expected bib or auction)");
}

}  // namespace fluxq

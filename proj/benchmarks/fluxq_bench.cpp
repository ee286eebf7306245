#include <benchmark/benchmark.h>

#include <map>
#include <sstream>
#include <string>

#include "fluxq/analysis.hpp"
#include "fluxq/datagen.hpp"
#include "fluxq/document.hpp"
#include "fluxq/engine.hpp"
#include "fluxq/glushkov.hpp"
#include "fluxq/rewrite.hpp"
#include "fluxq/xml.hpp"

namespace {

using namespace fluxq;

constexpr const char* kTitlesAuthors =
    "<results>{ for $b in /bib/book return <result> {$b/title} {$b/author} </result> }</results>";
constexpr const char* kPersonById =
    "<query1>{ for $b in /site/people/person where $b/person_id = 'person0' "
    "return <result> {$b/name} </result> }</query1>";
constexpr const char* kPeopleWithoutIncome =
    "<query20>{ for $p in /site/people/person where empty($p/profile/profile_income) "
    "return {$p} }</query20>";

const std::string& auction_doc(std::size_t mb) {
  static std::map<std::size_t, std::string> cache;
  auto& doc = cache[mb];
  if (doc.empty()) doc = generate_data({"auction", mb << 20, 1});
  return doc;
}

void BM_GlushkovBook(benchmark::State& state) {
  RegExpr r = parse_dotted_regex("title.(author+|editor+).publisher.price");
  for (auto _ : state) {
    auto g = GlushkovAutomaton::build(r);
    OrdRelation ord(g);
    benchmark::DoNotOptimize(ord.holds("title", "author"));
  }
}
BENCHMARK(BM_GlushkovBook);

void BM_AnalyzeAuction(benchmark::State& state) {
  Dtd d = parse_dtd(builtin_dtd("auction"));
  for (auto _ : state) benchmark::DoNotOptimize(analyze(d).size());
}
BENCHMARK(BM_AnalyzeAuction);

void BM_CompileTitlesAuthors(benchmark::State& state) {
  Schema s = load_schema(builtin_dtd("bib"));
  for (auto _ : state) benchmark::DoNotOptimize(compile(std::string(kTitlesAuthors), s).flux);
}
BENCHMARK(BM_CompileTitlesAuthors);

void BM_Tokenize(benchmark::State& state) {
  const std::string& doc = auction_doc(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    XmlReader r(doc);
    Event e;
    std::size_t n = 0;
    while (r.next(e)) ++n;
    benchmark::DoNotOptimize(n);
  }
  state.SetBytesProcessed(static_cast<int64_t>(state.iterations() * doc.size()));
}
BENCHMARK(BM_Tokenize)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

void stream_query(benchmark::State& state, const char* query) {
  Schema s = load_schema(builtin_dtd("auction"));
  ExecutionPlan plan(compile(std::string(query), s).flux, s);
  const std::string& doc = auction_doc(static_cast<std::size_t>(state.range(0)));
  RunStats st;
  for (auto _ : state) {
    std::istringstream in(doc);
    std::ostringstream out;
    st = run(plan, in, out);
  }
  state.SetBytesProcessed(static_cast<int64_t>(state.iterations() * doc.size()));
  state.counters["buffer_events_hwm"] = static_cast<double>(st.total_events_hwm);
}

void BM_StreamPersonById(benchmark::State& state) { stream_query(state, kPersonById); }
BENCHMARK(BM_StreamPersonById)->Arg(1)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_StreamPeopleWithoutIncome(benchmark::State& state) {
  stream_query(state, kPeopleWithoutIncome);
}
BENCHMARK(BM_StreamPeopleWithoutIncome)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

// The in-memory evaluator on the same input, for comparison.
void BM_ReferencePersonById(benchmark::State& state) {
  XPtr q = parse_xquery(kPersonById);
  const std::string& doc = auction_doc(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(reference_eval(*q, doc));
  state.SetBytesProcessed(static_cast<int64_t>(state.iterations() * doc.size()));
}
BENCHMARK(BM_ReferencePersonById)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

#include <chrono>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "fluxq/analysis.hpp"
#include "fluxq/datagen.hpp"
#include "fluxq/document.hpp"
#include "fluxq/engine.hpp"
#include "fluxq/error.hpp"
#include "fluxq/rewrite.hpp"
#include "fluxq/schema.hpp"

namespace {

enum Exit { kOk = 0, kUsage = 1, kInput = 2, kSafety = 3, kMismatch = 4 };

struct Config {
  std::string dtd;
  std::string root;
  std::string element;
  std::string query;
  std::string input;
  std::string stats_file;
  std::string schema = "bib";
  std::size_t size = 10000;
  std::uint64_t seed = 0;
  bool stats = false;
  bool oracle = false;
  bool dump_normal_form = false;
  bool dump_buffer_trees = false;
  bool allow_dead_loops = false;
  bool flux = false;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// A built-in name ("bib", "auction") or a file path.
std::string dtd_text(const std::string& arg) {
  if (fluxq::is_builtin_dtd(arg)) return fluxq::builtin_dtd(arg);
  return read_file(arg);
}

fluxq::DtdOptions dtd_options(const Config& c) {
  fluxq::DtdOptions o;
  o.root = c.root;
  return o;
}

// A file path, or the query text itself when no such file exists.
std::string query_text(const std::string& arg) {
  std::ifstream in(arg, std::ios::binary);
  if (!in) return arg;
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// With --flux the query is already FluX; only safety is checked (by the
// execution plan) and there is no source query for the oracle.
fluxq::Compilation compile_query(const Config& c, const fluxq::Schema& schema) {
  if (c.flux) {
    fluxq::Compilation comp;
    comp.flux = fluxq::parse_flux(query_text(c.query));
    return comp;
  }
  fluxq::RewriteOptions ro;
  ro.allow_dead_loops = c.allow_dead_loops;
  auto comp = fluxq::compile(query_text(c.query), schema, ro);
  for (const auto& w : comp.warnings) std::cerr << "warning: " << w << "\n";
  return comp;
}

int cmd_analyze(const Config& c) {
  fluxq::Dtd dtd = fluxq::parse_dtd(dtd_text(c.dtd), dtd_options(c));
  for (const auto& r : fluxq::analyze(dtd, c.element)) std::cout << fluxq::to_string(r) << "\n";
  return kOk;
}

int cmd_compile(const Config& c) {
  fluxq::Schema schema = fluxq::load_schema(dtd_text(c.dtd), dtd_options(c));
  auto comp = compile_query(c, schema);
  if (c.dump_normal_form && comp.normal_form) {
    std::cout << "# normal form\n" << fluxq::to_string(*comp.normal_form) << "\n# flux\n";
  }
  fluxq::EngineOptions eo;
  eo.allow_dead_handlers = c.allow_dead_loops;
  fluxq::ExecutionPlan plan(comp.flux, schema, eo);
  std::cout << fluxq::to_string(*comp.flux) << "\n";
  if (c.dump_buffer_trees) {
    std::string trees = plan.dump();
    std::cout << "# buffer trees\n" << (trees.empty() ? "(none)\n" : trees);
  }
  return kOk;
}

void write_stats(const Config& c, const fluxq::RunStats& st) {
  if (!c.stats_file.empty()) {
    std::ofstream out(c.stats_file, std::ios::binary);
    if (!out) throw UsageError("cannot write " + c.stats_file);
    out << st.to_json_lines();
  } else if (c.stats) {
    std::cerr << st.to_json_lines();
  }
}

int cmd_run(const Config& c) {
  fluxq::Schema schema = fluxq::load_schema(dtd_text(c.dtd), dtd_options(c));
  auto comp = compile_query(c, schema);
  fluxq::EngineOptions eo;
  eo.allow_dead_handlers = c.allow_dead_loops;
  fluxq::ExecutionPlan plan(comp.flux, schema, eo);

  std::ifstream file;
  std::istream* in = &std::cin;
  if (c.input != "-") {
    file.open(c.input, std::ios::binary);
    if (!file) throw UsageError("cannot open " + c.input);
    in = &file;
  }
  std::ios::sync_with_stdio(false);

  if (!c.oracle) {
    fluxq::RunStats st = fluxq::run(plan, *in, std::cout);
    std::cout.flush();
    write_stats(c, st);
    return kOk;
  }

  // The oracle needs the input twice, so it is read up front.
  std::string xml{std::istreambuf_iterator<char>(*in), std::istreambuf_iterator<char>()};
  fluxq::RunStats st;
  std::string streamed = fluxq::run_to_string(plan, xml, &st);
  std::cout << streamed;
  std::cout.flush();
  write_stats(c, st);
  auto doc = fluxq::parse_document(xml);
  std::string expected = comp.query ? fluxq::reference_eval(*comp.query, *doc)
                                    : fluxq::nscan_eval(*comp.flux, schema, *doc);
  if (streamed != expected) {
    std::cerr << "MISMATCH\nexpected: " << expected << "\n";
    return kMismatch;
  }
  std::cerr << "MATCH\n";
  return kOk;
}

int cmd_gen(const Config& c) {
  if (!fluxq::is_builtin_dtd(c.schema)) throw UsageError("unknown schema " + c.schema);
  std::string xml = fluxq::generate_data({c.schema, c.size, c.seed});
  std::cout << xml << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  Config c;
  CLI::App app{"Schema-aware streaming XQuery evaluation"};
  app.require_subcommand(1);

  auto* analyze = app.add_subcommand("analyze", "Order constraints and Past summary of a DTD");
  analyze->add_option("--dtd", c.dtd, "DTD file or built-in name (bib, auction)")->required();
  analyze->add_option("--element", c.element, "Only this production");
  analyze->add_option("--root", c.root, "Root element override");

  auto* compile = app.add_subcommand("compile", "Compile a query to FluX");
  compile->add_option("--dtd", c.dtd, "DTD file or built-in name")->required();
  compile->add_option("--query", c.query, "Query file or inline text")->required();
  compile->add_option("--root", c.root, "Root element override");
  compile->add_flag("--flux", c.flux, "The query is FluX; check its safety");
  compile->add_flag("--dump-normal-form", c.dump_normal_form, "Print the normalized query");
  compile->add_flag("--dump-buffer-trees", c.dump_buffer_trees, "Print buffer trees");
  compile->add_flag("--allow-dead-loops", c.allow_dead_loops, "Accept loops over impossible children");

  auto* run = app.add_subcommand("run", "Evaluate a query over an XML stream");
  run->add_option("--dtd", c.dtd, "DTD file or built-in name")->required();
  run->add_option("--query", c.query, "Query file or inline text")->required();
  run->add_option("--input", c.input, "XML file, or - for standard input")->required();
  run->add_option("--root", c.root, "Root element override");
  run->add_flag("--stats", c.stats, "Buffer statistics on standard error");
  run->add_option("--stats-file", c.stats_file, "Write statistics to this file instead");
  run->add_flag("--flux", c.flux, "The query is FluX");
  run->add_flag("--oracle", c.oracle, "Compare with the in-memory evaluator");
  run->add_flag("--allow-dead-loops", c.allow_dead_loops, "Accept loops over impossible children");

  auto* gen = app.add_subcommand("gen", "Generate a document for a built-in DTD");
  gen->add_option("--schema", c.schema, "bib or auction")->required();
  gen->add_option("--size", c.size, "Target size in bytes")->required();
  gen->add_option("--seed", c.seed, "Random seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*analyze) return cmd_analyze(c);
    if (*compile) return cmd_compile(c);
    if (*run) return cmd_run(c);
    if (*gen) return cmd_gen(c);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const fluxq::SafetyError& e) {
    std::cerr << "safety: " << e.what() << "\n";
    return kSafety;
  } catch (const fluxq::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInput;
  }
  return kUsage;
}

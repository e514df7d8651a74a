// rdfidx: generate, ingest, index, query and benchmark triple data.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "rdfidx/bench.hpp"
#include "rdfidx/data_io.hpp"
#include "rdfidx/index.hpp"
#include "rdfidx/query.hpp"

using namespace rdfidx;

namespace {

struct Globals {
  std::uint64_t seed = 42;
  std::uint32_t block_size = kDefaultBlockSize;
  std::uint32_t atom_width = 0;
  bool metered = true;
  bool all_orders = false;
  std::size_t max_atom_len = 400;
};

class UsageError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_ntriples(std::ostream& os, const Graph& g) {
  for (const auto& t : g) os << '<' << t.s.bytes() << "> <" << t.p.bytes() << "> <" << t.o.bytes() << "> .\n";
}

std::vector<Family> parse_families(const std::vector<std::string>& names) {
  std::vector<Family> out;
  for (const auto& n : names) out.push_back(parse_family(n));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Paged triple indexes: TripleT, MAP and HexTree"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--seed", g.seed, "random seed");
  app.add_option("--block-size", g.block_size, "page size in bytes")->check(CLI::Range(512u, 1u << 20));
  app.add_option("--atom-width", g.atom_width, "fixed atom field width (0: longest atom)");
  auto* metered = app.add_flag("--metered", "count every block read (default)");
  auto* unmetered = app.add_flag("--unmetered", "serve repeated reads from an LRU cache");
  metered->excludes(unmetered);
  app.add_flag("--all-orders", g.all_orders, "materialize all six orders");
  app.add_option("--max-atom-len", g.max_atom_len, "truncation budget for ingested atoms")->check(CLI::PositiveNumber);

  // gen
  auto* gen = app.add_subcommand("gen", "write a synthetic graph");
  std::uint64_t gen_n = 0;
  int gen_variant = 1;
  std::string gen_out;
  bool gen_nt = false;
  gen->add_option("-n,--triples", gen_n, "distinct triples")->required()->check(CLI::PositiveNumber);
  gen->add_option("--variant", gen_variant, "1: repetitions allowed, 2: pairwise distinct")->check(CLI::IsMember({1, 2}));
  gen->add_option("-o,--output", gen_out, "output file")->required();
  gen->add_flag("--ntriples", gen_nt, "write N-Triples instead of a run file");

  // ingest
  auto* ing = app.add_subcommand("ingest", "N-Triples to a canonical run file");
  std::string ing_in, ing_out;
  std::size_t ing_sample = 0;
  ing->add_option("input", ing_in, "N-Triples file")->required();
  ing->add_option("-o,--output", ing_out, "run file")->required();
  ing->add_option("--sample", ing_sample, "keep a uniform sample of this many triples");

  // stats
  auto* st = app.add_subcommand("stats", "role-set statistics of a graph");
  std::string st_in;
  st->add_option("input", st_in, "run file or N-Triples")->required();

  // build
  auto* bld = app.add_subcommand("build", "build an index file");
  std::string bld_family = "triplet", bld_in, bld_out;
  bld->add_option("--family", bld_family, "triplet | map | hex");
  bld->add_option("input", bld_in, "run file or N-Triples")->required();
  bld->add_option("-o,--output", bld_out, "index file")->required();

  // query
  auto* qry = app.add_subcommand("query", "evaluate a SELECT/WHERE query");
  std::string q_index, q_file;
  bool q_explain = false, q_json = false;
  qry->add_option("index", q_index, "index file")->required();
  qry->add_option("query", q_file, "query file")->required();
  qry->add_flag("--explain", q_explain, "print the plan with per-step reads to stderr");
  qry->add_flag("--json", q_json, "render the plan as JSON");

  // bench
  auto* bench = app.add_subcommand("bench", "experiments as CSV");
  std::string b_kind, b_data, b_out;
  std::vector<std::uint64_t> b_sizes;
  std::vector<int> b_variants;
  std::vector<std::string> b_families;
  std::size_t b_trials = 10;
  bench->add_option("experiment", b_kind, "size | k0 | k1")->required()->check(CLI::IsMember({"size", "k0", "k1"}));
  bench->add_option("--data", b_data, "run file or N-Triples instead of synthetic data");
  bench->add_option("--sizes", b_sizes, "ascending |G| checkpoints")->delimiter(',');
  bench->add_option("--variants", b_variants, "synthetic variants")->delimiter(',')->check(CLI::IsMember({1, 2}));
  bench->add_option("--families", b_families, "index families")->delimiter(',');
  bench->add_option("--trials", b_trials, "trials per measurement")->check(CLI::PositiveNumber);
  bench->add_option("-o,--output", b_out, "CSV file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  g.metered = !(*unmetered);

  IngestConfig ingest_cfg;
  ingest_cfg.max_atom_len = g.max_atom_len;
  ingest_cfg.seed = g.seed;
  IndexOptions index_opts{g.atom_width, g.all_orders};

  try {
    if (*gen) {
      Graph graph = gen_synthetic({gen_n, gen_variant, g.seed});
      if (gen_nt) {
        std::ofstream out(gen_out, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + gen_out);
        write_ntriples(out, graph);
      } else {
        write_run(gen_out, graph, g.atom_width);
      }
      std::cerr << "wrote " << graph.size() << " triples to " << gen_out << '\n';
    } else if (*ing) {
      std::ifstream in(ing_in, std::ios::binary);
      if (!in) throw std::runtime_error("cannot open " + ing_in);
      if (ing_sample > 0) ingest_cfg.sample_size = ing_sample;
      IngestResult r = ingest(in, ingest_cfg);
      write_run(ing_out, r.cleaned.graph, g.atom_width);
      std::cerr << "input " << r.cleaned.report.input << ", skipped " << r.skipped << ", truncated atoms "
                << r.cleaned.report.truncated << ", output " << r.cleaned.report.output << '\n';
    } else if (*st) {
      const Graph graph = load_graph(st_in, ingest_cfg);
      const GraphStats s = role_sets(graph);
      std::cout << "|G|=" << s.triples << '\n'
                << "|S|=" << s.subjects << '\n'
                << "|P|=" << s.predicates << '\n'
                << "|O|=" << s.objects << '\n'
                << "|A|=" << s.atoms << '\n'
                << "|S&O|=" << s.subject_object << '\n'
                << "|S&P|=" << s.subject_predicate << '\n'
                << "|P&O|=" << s.predicate_object << '\n'
                << "mean_atom_len=" << s.mean_atom_len << '\n';
    } else if (*bld) {
      const Family family = parse_family(bld_family);
      const Graph graph = load_graph(bld_in, ingest_cfg);
      auto index = build_index(family, graph, PageStore::create(bld_out, g.block_size), index_opts);
      index->store().flush();
      std::cerr << "built " << to_string(family) << " over " << graph.size() << " triples: "
                << index->store().stats().allocated << " blocks\n";
    } else if (*qry) {
      const ParsedQuery q = parse_bgp(read_text(q_file));
      auto index = open_index(PageStore::open(q_index));
      index->store().set_metered(g.metered);
      index->store().reset_read_counter();
      const QueryResult r = eval_bgp(*index, q.bgp, q.select);
      for (const auto& row : r.bindings.rows()) {
        for (std::size_t i = 0; i < row.size(); ++i) std::cout << (i ? "," : "") << csv_field(row[i].bytes());
        std::cout << '\n';
      }
      if (q_explain) std::cerr << (q_json ? r.plan.to_json() + "\n" : r.plan.to_text());
    } else if (*bench) {
      ExperimentConfig cfg;
      cfg.seed = g.seed;
      cfg.block_size = g.block_size;
      cfg.metered = g.metered;
      cfg.index = index_opts;
      cfg.trials = b_trials;
      if (!b_sizes.empty()) cfg.sizes = b_sizes;
      if (!b_variants.empty()) cfg.variants = b_variants;
      if (!b_families.empty()) cfg.families = parse_families(b_families);
      if (!b_data.empty()) {
        cfg.graph = load_graph(b_data, ingest_cfg);
        cfg.dataset_name = std::filesystem::path(b_data).stem().string();
      }
      cfg.validate();

      std::ofstream file;
      if (!b_out.empty()) {
        file.open(b_out, std::ios::binary | std::ios::trunc);
        if (!file) throw std::runtime_error("cannot write " + b_out);
      }
      std::ostream& out = b_out.empty() ? std::cout : file;
      out << kCsvHeader << '\n';
      const RowSink sink = [&](const ResultRow& row) { out << to_csv(row) << '\n' << std::flush; };
      if (b_kind == "size") {
        run_size_experiment(cfg, sink);
      } else if (b_kind == "k0") {
        run_k0(cfg, sink);
      } else {
        run_k1(cfg, sink);
      }
    }
  } catch (const QuerySyntaxError& e) {
    std::cerr << "query syntax error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

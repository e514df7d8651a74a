// Acceptance suite: one PASS/FAIL line per criterion, details underneath.
// Exit status is non-zero when any criterion fails.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "rdfidx/baselines.hpp"
#include "rdfidx/bench.hpp"
#include "rdfidx/btree.hpp"
#include "rdfidx/data_io.hpp"
#include "rdfidx/query.hpp"
#include "rdfidx/triplet.hpp"
#include "support.hpp"

using namespace rdfidx;
namespace t = rdfidx::testing;

namespace {

constexpr std::uint32_t kAtomWidth = 64;

struct Outcome {
  bool pass = true;
  std::vector<std::string> notes;

  void check(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      notes.push_back("violated: " + what);
    }
  }
  void note(const std::string& s) { notes.push_back(s); }
};

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", x);
  return buf;
}

// ---- AC1 ----

Graph edge_case_graph(Rng& rng, std::size_t n, int kind) {
  switch (kind) {
    case 0:  // one atom everywhere
      return Graph({make_triple("a", "a", "a")});
    case 1: {  // long atoms sharing prefixes, multi-byte text
      std::vector<Triple> ts;
      const std::vector<std::string> stems = {std::string(60, 'p'), std::string(59, 'p') + "q", "\xC3\xA9t\xC3\xA9",
                                              "x", "x y", "26.10.08"};
      for (std::size_t i = 0; i < n; ++i) {
        auto pick = [&] { return Atom(stems[rng.uniform_index(stems.size())] + std::to_string(rng.uniform_index(4))); };
        ts.push_back(Triple{pick(), pick(), pick()});
      }
      return Graph(std::move(ts));
    }
    case 2: {  // hub atom with a large multi-block payload
      std::vector<Triple> ts;
      for (std::size_t i = 0; i < n; ++i) {
        const std::string other = "n" + std::to_string(rng.uniform_index(n + 1));
        switch (rng.uniform_index(3)) {
          case 0: ts.push_back(make_triple("hub", "p" + std::to_string(i % 7), other)); break;
          case 1: ts.push_back(make_triple(other, "hub", "o" + std::to_string(i % 5))); break;
          default: ts.push_back(make_triple(other, "p" + std::to_string(i % 3), "hub")); break;
        }
      }
      return Graph(std::move(ts));
    }
    default:  // tiny pool, heavy repetition across roles
      return t::random_graph(rng, n, 2 + rng.uniform_index(4));
  }
}

Outcome ac1() {
  Outcome out;
  Rng rng(20240101);
  std::size_t queries = 0, mismatches = 0;
  for (int gi = 0; gi < 200; ++gi) {
    const std::size_t n = 1 + rng.uniform_index(5000);
    Graph g;
    const int kind = static_cast<int>(rng.uniform_index(3));
    if (kind == 2) {
      g = edge_case_graph(rng, n, static_cast<int>(rng.uniform_index(4)));
    } else {
      const int variant = kind + 1;
      const std::uint64_t space = synthetic_space(synthetic_pool_size(n, variant), variant);
      g = gen_synthetic({space >= n ? n : space, variant, rng.next()});
    }
    std::vector<std::unique_ptr<TripleIndex>> indexes;
    for (Family f : kFamilies) indexes.push_back(build_index(f, g, PageStore::in_memory(), {}));
    for (int q = 0; q < 20; ++q) {
      const Bgp bgp = t::random_bgp(rng, g, 3, 3);
      const auto select = t::random_select(rng, bgp);
      const BindingSet expected = oracle_eval(g, bgp, select);
      for (auto& idx : indexes) {
        ++queries;
        if (eval_bgp(*idx, bgp, select).bindings != expected) {
          ++mismatches;
          if (mismatches <= 3) {
            out.note(std::string(to_string(idx->family())) + " differs on graph " + std::to_string(gi) + ":\n" +
                     render_bgp(bgp, select));
          }
        }
      }
    }
  }
  out.check(mismatches == 0, std::to_string(mismatches) + " mismatching evaluations");
  out.note(std::to_string(queries) + " evaluations over 200 graphs compared with the oracle");
  return out;
}

// ---- AC2 ----

Outcome ac2() {
  Outcome out;
  const Graph g = t::doc_graph();
  auto idx = TripletIndex::build(g, PageStore::in_memory());
  const auto p = idx.payload(Atom("doc1"));
  const std::vector<AtomPair> s_expected = {{Atom("4/5"), Atom("rating")}, {Atom("PDF"), Atom("type")}};
  const std::vector<AtomPair> o_expected = {{Atom("Yamada"), Atom("authored")}};
  out.check(p.has_value(), "payload(doc1) present");
  if (p) {
    out.check(p->o_bucket == o_expected, "object bucket <(Yamada, authored)>");
    out.check(p->s_bucket == s_expected, "subject bucket <(4/5, rating), (PDF, type)>");
    out.check(p->p_bucket.empty(), "predicate bucket empty");
  }

  const ParsedQuery q = parse_bgp(t::doc_query());
  BindingSet expected({"date", "type"});
  expected.insert(std::vector<Atom>{Atom("26.10.08"), Atom("MP3")});
  for (Family f : kFamilies) {
    auto index = build_index(f, g, PageStore::in_memory(), {});
    const auto r = eval_bgp(*index, q.bgp, q.select);
    out.check(r.bindings == expected, std::string(to_string(f)) + " returns exactly (26.10.08, MP3)");
  }
  BindingSet doc({"doc"});
  doc.insert(std::vector<Atom>{Atom("doc3")});
  out.check(oracle_eval(g, q.bgp, {"doc"}) == doc, "oracle binds ?doc to doc3");
  out.note("payload(doc1) and the document query checked on all three families");
  return out;
}

// ---- AC3 ----

Outcome ac3() {
  Outcome out;
  ExperimentConfig cfg;
  cfg.sizes = {10000, 50000, 100000};
  cfg.variants = {1};
  cfg.index.atom_width = kAtomWidth;
  const auto rows = run_size_experiment(cfg);
  std::map<std::uint64_t, std::map<std::string, double>> blocks;
  for (const auto& r : rows) blocks[r.n][r.family] = r.mean;
  for (auto n : cfg.sizes) {
    if (!synthetic_feasible(n, 1)) out.note("n=" + std::to_string(n) + ": variant 1 pool cannot hold n triples");
    out.check(blocks.count(n) == 1, "n=" + std::to_string(n) + " measured");
  }
  for (const auto& [n, b] : blocks) {
    const double tt = b.at("triplet"), hx = b.at("hex"), mp = b.at("map");
    out.note("n=" + std::to_string(n) + " blocks: triplet=" + fmt(tt) + " hex=" + fmt(hx) + " map=" + fmt(mp));
    out.check(tt < hx, "n=" + std::to_string(n) + " triplet < hex");
    out.check(hx < mp, "n=" + std::to_string(n) + " hex < map");
    out.check(tt <= mp / 2, "n=" + std::to_string(n) + " triplet <= map/2");
  }
  return out;
}

// ---- AC4 / AC5 ----

std::map<std::string, std::map<std::string, double>> by_cell(const std::vector<ResultRow>& rows) {
  std::map<std::string, std::map<std::string, double>> out;
  for (const auto& r : rows) {
    out[r.dataset + " n=" + std::to_string(r.n) + (r.scenario == "-" ? "" : " scenario " + r.scenario)][r.family] =
        r.mean;
  }
  return out;
}

Outcome ac4() {
  Outcome out;
  ExperimentConfig cfg;
  cfg.sizes = {10000, 100000};
  cfg.trials = 10;
  cfg.index.atom_width = kAtomWidth;
  const auto cells = by_cell(run_k0(cfg));
  for (auto n : cfg.sizes) {
    for (int v : cfg.variants) {
      const std::string cell = "synthetic-v" + std::to_string(v) + " n=" + std::to_string(n);
      if (!synthetic_feasible(n, v)) out.note(cell + ": pool cannot hold n triples");
      out.check(cells.count(cell) == 1, cell + " measured");
    }
  }
  for (const auto& [cell, m] : cells) {
    const double tt = m.at("triplet"), hx = m.at("hex"), mp = m.at("map");
    out.note(cell + " mean reads: triplet=" + fmt(tt) + " hex=" + fmt(hx) + " map=" + fmt(mp));
    out.check(tt <= mp && tt <= hx, cell + " triplet <= map and <= hex");
  }
  return out;
}

Outcome ac5() {
  Outcome out;
  ExperimentConfig cfg;
  cfg.sizes = {100000};
  cfg.trials = 10;
  cfg.index.atom_width = kAtomWidth;
  const auto rows = run_k1(cfg);
  std::set<std::string> scenarios;
  for (const auto& r : rows) scenarios.insert(r.dataset + "/" + r.scenario);
  for (int v : cfg.variants) {
    if (!synthetic_feasible(100000, v)) out.note("synthetic-v" + std::to_string(v) + ": pool cannot hold 1e5 triples");
  }
  out.check(scenarios.size() == 12, "all four scenarios produced on both variants and their average (" +
                                        std::to_string(scenarios.size()) + " of 12)");
  for (const auto& [cell, m] : by_cell(rows)) {
    const double tt = m.at("triplet"), hx = m.at("hex"), mp = m.at("map");
    out.note(cell + " mean reads: triplet=" + fmt(tt) + " hex=" + fmt(hx) + " map=" + fmt(mp));
    out.check(tt < mp && tt < hx, cell + " triplet < map and < hex");
  }
  return out;
}

// ---- AC6 ----

Outcome ac6() {
  Outcome out;
  {
    Rng rng(66);
    auto store = PageStore::in_memory(kDefaultBlockSize);
    auto tree = BTree::create(store, {"random", 16, 8});
    std::set<std::string> keys;
    while (keys.size() < 100000) {
      char buf[17];
      std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(rng.next()));
      if (keys.insert(buf).second) tree.insert(buf, std::string(8, 'v'));
    }
    const TreeCheck c = tree.verify();
    out.check(c.uniform_depth, "uniform leaf depth over 1e5 random inserts");
    out.check(c.sorted && c.leaf_chain_ok && c.separators_consistent, "sorted leaves and consistent separators");
    out.check(c.entries == keys.size(), "entry count");
    std::vector<std::string> scanned;
    for (const auto& e : tree.prefix_scan("")) scanned.push_back(e.key);
    out.check(scanned == std::vector<std::string>(keys.begin(), keys.end()), "in-order scan equals sorted key set");
    out.note("random-insert tree: height " + std::to_string(c.height) + ", " + std::to_string(c.leaves) + " leaves");
  }
  {
    Rng rng(67);
    std::size_t bad = 0;
    for (int i = 0; i < 50; ++i) {
      const Graph g = t::random_graph(rng, 1 + rng.uniform_index(2000), 2 + rng.uniform_index(60));
      auto idx = TripletIndex::build(g, PageStore::in_memory());
      if (idx.tree().size() != g.atoms().size()) ++bad;
      for (Role r : kRoles) {
        std::vector<Triple> rebuilt;
        for (const auto& k : g.atoms()) {
          const auto p = idx.payload(k);
          if (!p) {
            ++bad;
            continue;
          }
          for (auto& tr : p->triples(k, r)) rebuilt.push_back(tr);
        }
        if (rebuilt.size() != g.size() || Graph(rebuilt) != g) ++bad;
      }
    }
    out.check(bad == 0, "TripleT buckets reconstruct G on 50 random graphs");
  }
  {
    const Graph g = gen_synthetic({20000, 2, 68});
    auto hex = HexIndex::build(g, PageStore::in_memory());
    std::size_t differ = 0;
    for (const auto& tr : g) {
      if (hex.payload_ref("SO", tr.s, tr.o) != hex.payload_ref("OS", tr.o, tr.s)) ++differ;
    }
    out.check(differ == 0, "HexTree SO/OS keys share payload references");
  }
  {
    const Graph g = gen_synthetic({97336, 1, 69});
    const IndexOptions opts{kAtomWidth, false};
    auto tt = TripletIndex::build(g, PageStore::in_memory(), opts);
    auto hx = HexIndex::build(g, PageStore::in_memory(), opts);
    auto mp = MapIndex::build(g, PageStore::in_memory(), opts);
    const std::uint32_t bs = kDefaultBlockSize;
    const auto ft = tt.tree().config().fanout(bs);
    const auto fh = hx.tree("SO").config().fanout(bs);
    const auto fm = mp.tree("SOP").config().fanout(bs);
    out.note("fan-out triplet=" + std::to_string(ft) + " hex=" + std::to_string(fh) + " map=" + std::to_string(fm));
    out.check(ft >= fh && fh >= fm, "fan-out triplet >= hex >= map");
    std::uint32_t hh = 0, hm = 0;
    for (const auto& n : hx.tree_names()) hh = std::max(hh, hx.tree(n).height());
    for (const auto& n : mp.tree_names()) hm = std::max(hm, mp.tree(n).height());
    out.note("height triplet=" + std::to_string(tt.tree().height()) + " hex=" + std::to_string(hh) +
             " map=" + std::to_string(hm));
    out.check(tt.tree().height() <= hh && hh <= hm, "depth triplet <= hex <= map");
  }
  return out;
}

// ---- AC7 ----

std::string file_bytes(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Outcome ac7() {
  Outcome out;
  out.check(synthetic_pool_size(1000000, 1) == 100, "variant 1 pool at n=1e6 is 100");
  t::TempDir tmp;
  {
    const Graph g = gen_synthetic({1000000, 1, 7});
    out.check(g.size() == 1000000, "variant 1 n=1e6 has 1e6 distinct triples");
    out.check(g.atoms().size() == 100, "variant 1 n=1e6 draws from exactly 100 atoms");
    write_run(tmp / "v1a.run", g);
  }
  write_run(tmp / "v1b.run", gen_synthetic({1000000, 1, 7}));
  out.check(file_bytes(tmp / "v1a.run") == file_bytes(tmp / "v1b.run"), "variant 1 run files byte-identical");
  {
    const Graph g = gen_synthetic({100000, 2, 7});
    bool distinct = g.size() == 100000;
    for (const auto& tr : g) distinct = distinct && tr.s != tr.p && tr.s != tr.o && tr.p != tr.o;
    out.check(distinct, "variant 2 triples have pairwise-distinct atoms");
    out.check(g.atoms().size() <= synthetic_pool_size(100000, 2), "variant 2 pool bound");
    write_run(tmp / "v2a.run", g);
  }
  write_run(tmp / "v2b.run", gen_synthetic({100000, 2, 7}));
  out.check(file_bytes(tmp / "v2a.run") == file_bytes(tmp / "v2b.run"), "variant 2 run files byte-identical");
  return out;
}

// ---- AC8 ----

// Height of a bulk-built tree from leaf capacity and fan-out alone.
std::uint32_t height_from_geometry(std::uint64_t keys, std::uint32_t bs, std::uint32_t kw, std::uint32_t vw) {
  const std::uint64_t leaf_cap = (bs - 7) / (kw + vw);
  const std::uint64_t fanout = (bs - 7) / (kw + 4);
  std::uint64_t nodes = std::max<std::uint64_t>(1, (keys + leaf_cap - 1) / leaf_cap);
  std::uint32_t h = 1;
  for (; nodes > 1; ++h) nodes = (nodes + fanout - 1) / fanout;
  return h;
}

Outcome ac8() {
  Outcome out;
  Rng rng(88);
  const std::uint32_t bs = kDefaultBlockSize;
  for (std::size_t pool : {60u, 6000u, 60000u}) {
    const Graph g = t::random_graph(rng, pool * 2, pool);
    std::map<Atom, std::uint64_t> occurrences;
    for (const auto& tr : g) {
      for (Role r : kRoles) ++occurrences[tr.at(r)];
    }
    auto idx = TripletIndex::build(g, PageStore::in_memory(bs), IndexOptions{kAtomWidth, false});
    const std::uint32_t depth = height_from_geometry(occurrences.size(), bs, kAtomWidth, 8);
    std::size_t wrong = 0;
    for (int i = 0; i < 20; ++i) {
      const Triple& tr = g.triples()[rng.uniform_index(g.size())];
      const Sap sap = sap_of(tr);
      const Atom& key = sap.at(*TripletIndex::preferred_key_role(sap)).constant();
      // Three bucket counts plus two atom fields per occurrence of the key.
      const std::uint64_t bytes = 12 + occurrences.at(key) * 2 * kAtomWidth;
      const std::uint64_t predicted = depth + (bytes + bs - 1) / bs;
      idx.store().reset_read_counter();
      const auto r = eval_bgp(idx, Bgp({sap}), {});
      if (r.cost.reads != predicted || r.bindings.size() != 1) ++wrong;
    }
    out.note("|A|=" + std::to_string(occurrences.size()) + " predicted depth " + std::to_string(depth) +
             ", built height " + std::to_string(idx.tree().height()));
    out.check(wrong == 0, std::to_string(wrong) + " of 20 lookups off prediction at |A|=" +
                              std::to_string(occurrences.size()));
  }
  return out;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"AC1 oracle equivalence", ac1},      {"AC2 worked example fidelity", ac2},
      {"AC3 index size ordering", ac3},     {"AC4 k=0 dominance", ac4},
      {"AC5 k=1 dominance", ac5},           {"AC6 structural invariants", ac6},
      {"AC7 generator conformance", ac7},   {"AC8 metering exactness", ac8},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o.check(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << " (" << fmt(secs) << " s)\n";
    for (const auto& n : o.notes) std::cout << "    " << n << '\n';
    std::cout.flush();
    failed += o.pass ? 0 : 1;
  }
  std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size() << " criteria passed\n";
  return failed == 0 ? 0 : 1;
}

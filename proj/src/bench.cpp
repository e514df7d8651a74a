#include "rdfidx/bench.hpp"

#include <algorithm>
#include <cstdio>
#include <iostream>

#include "rdfidx/data_io.hpp"
#include "rdfidx/query.hpp"

namespace rdfidx {

namespace {

std::uint64_t mix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::uint64_t cell_seed(std::uint64_t seed, std::uint64_t n, int variant, std::uint64_t salt) {
  return mix(mix(mix(seed) ^ n) ^ static_cast<std::uint64_t>(variant)) ^ salt;
}

struct Dataset {
  std::string name;
  int variant;  // 0 for ingested data
  Graph graph;
};

// Every dataset at checkpoint n: each synthetic variant, or the ingested graph.
std::vector<Dataset> datasets_at(const ExperimentConfig& cfg, std::uint64_t n) {
  std::vector<Dataset> out;
  if (cfg.graph) {
    Graph g = sample(cfg.graph->triples(), n, cell_seed(cfg.seed, n, 0, 0));
    if (!g.empty()) out.push_back({cfg.dataset_name, 0, std::move(g)});
    return out;
  }
  for (int v : cfg.variants) {
    if (!synthetic_feasible(n, v)) {
      std::cerr << "synthetic-v" << v << " cannot hold " << n << " distinct triples; cell skipped\n";
      continue;
    }
    out.push_back({"synthetic-v" + std::to_string(v), v, gen_synthetic({n, v, cell_seed(cfg.seed, n, v, 0)})});
  }
  return out;
}

// Emits per-dataset rows plus, with two or more synthetic variants, their mean.
class Collector {
 public:
  Collector(const ExperimentConfig& cfg, const RowSink& sink) : cfg_(cfg), sink_(sink) {}

  void add(ResultRow row) {
    if (sink_) sink_(row);
    pending_.push_back(row);
    rows_.push_back(std::move(row));
  }

  // Called after all datasets of one checkpoint.
  void close_checkpoint() {
    if (!cfg_.graph && cfg_.variants.size() >= 2) {
      std::vector<ResultRow> avg;
      std::vector<std::size_t> seen;
      for (const auto& r : pending_) {
        auto it = std::find_if(avg.begin(), avg.end(), [&](const ResultRow& a) {
          return a.family == r.family && a.experiment == r.experiment && a.scenario == r.scenario;
        });
        if (it == avg.end()) {
          avg.push_back(r);
          avg.back().dataset = "synthetic-avg";
          avg.back().mean = 0.0;
          seen.push_back(0);
          it = avg.end() - 1;
        }
        it->mean += r.mean;
        ++seen[static_cast<std::size_t>(it - avg.begin())];
      }
      for (std::size_t i = 0; i < avg.size(); ++i) {
        // Only cells every variant produced.
        if (seen[i] != cfg_.variants.size()) continue;
        avg[i].mean /= static_cast<double>(seen[i]);
        if (sink_) sink_(avg[i]);
        rows_.push_back(avg[i]);
      }
    }
    pending_.clear();
  }

  std::vector<ResultRow> take() { return std::move(rows_); }

 private:
  const ExperimentConfig& cfg_;
  const RowSink& sink_;
  std::vector<ResultRow> pending_;
  std::vector<ResultRow> rows_;
};

double mean_of(const std::vector<std::uint64_t>& xs) {
  double sum = 0.0;
  for (auto x : xs) sum += static_cast<double>(x);
  return xs.empty() ? 0.0 : sum / static_cast<double>(xs.size());
}

std::size_t shared_atoms(const Triple& a, const Triple& b) {
  std::vector<Atom> common;
  for (Role ra : kRoles) {
    for (Role rb : kRoles) {
      if (a.at(ra) == b.at(rb) && std::find(common.begin(), common.end(), a.at(ra)) == common.end()) {
        common.push_back(a.at(ra));
      }
    }
  }
  return common.size();
}

Sap with_variable(const Triple& t, Role r, const std::string& var) {
  Sap s = sap_of(t);
  switch (r) {
    case Role::Subject: s.s = Term::var(var); break;
    case Role::Predicate: s.p = Term::var(var); break;
    default: s.o = Term::var(var); break;
  }
  return s;
}

// Positions of t not holding atom a, or nothing when a is absent from t.
std::vector<Role> positions_without(const Triple& t, const Atom& a) {
  std::vector<Role> out;
  for (Role r : kRoles) {
    if (t.at(r) != a) out.push_back(r);
  }
  return out;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (trials < 1) throw std::invalid_argument("trials must be at least 1");
  if (!std::is_sorted(sizes.begin(), sizes.end())) throw std::invalid_argument("sizes must be ascending");
  if (families.empty()) throw std::invalid_argument("no index family selected");
  if (!graph && variants.empty()) throw std::invalid_argument("no dataset selected");
}

std::string to_csv(const ResultRow& row) {
  char mean[64];
  std::snprintf(mean, sizeof mean, "%.3f", row.mean);
  return row.dataset + "," + std::to_string(row.n) + "," + row.family + "," + row.experiment + "," +
         row.scenario + "," + mean + "," + std::to_string(row.trials);
}

std::unique_ptr<TripleIndex> build_in_memory(Family family, const Graph& g, const ExperimentConfig& cfg) {
  auto index = build_index(family, g, PageStore::in_memory(cfg.block_size), cfg.index);
  index->store().set_metered(cfg.metered);
  return index;
}

PairSampler::PairSampler(const Graph& g) : g_(g) {
  const auto& ts = g.triples();
  for (std::size_t i = 0; i < ts.size(); ++i) {
    for (Role r : kRoles) {
      auto& list = occurrences_[ts[i].at(r)];
      if (list.empty() || list.back() != i) list.push_back(i);
    }
  }
}

std::optional<SapPair> PairSampler::draw(int scenario, Rng& rng) const {
  const auto& ts = g_.triples();
  if (ts.size() < 2) return std::nullopt;
  for (std::size_t attempt = 0; attempt < kMaxAttempts; ++attempt) {
    const Triple& t1 = ts[rng.uniform_index(ts.size())];
    std::optional<SapPair> pair;
    if (scenario == 3) {
      const Triple& t2 = ts[rng.uniform_index(ts.size())];
      if (shared_atoms(t1, t2) != 0) continue;
      const Role r1 = kRoles[rng.uniform_index(3)];
      const Role r2 = kRoles[rng.uniform_index(3)];
      pair = SapPair{with_variable(t1, r1, "x"), with_variable(t2, r2, "x")};
    } else {
      const Atom& a = t1.at(kRoles[rng.uniform_index(3)]);
      const auto& candidates = occurrences_.at(a);
      const Triple& t2 = ts[candidates[rng.uniform_index(candidates.size())]];
      if (t2 == t1 || shared_atoms(t1, t2) != 1) continue;
      if (scenario == 1) {
        pair = SapPair{sap_of(t1), sap_of(t2)};
      } else {
        const auto free2 = positions_without(t2, a);
        if (free2.empty()) continue;
        const Role r2 = free2[rng.uniform_index(free2.size())];
        if (scenario == 2) {
          pair = SapPair{sap_of(t1), with_variable(t2, r2, "x")};
        } else {
          const auto free1 = positions_without(t1, a);
          if (free1.empty()) continue;
          const Role r1 = free1[rng.uniform_index(free1.size())];
          pair = SapPair{with_variable(t1, r1, "x"), with_variable(t2, r2, "x")};
        }
      }
    }
    if (conforms_k1(scenario, pair->a, pair->b)) return pair;
  }
  return std::nullopt;
}

std::vector<ResultRow> run_size_experiment(const ExperimentConfig& cfg, const RowSink& sink) {
  cfg.validate();
  Collector out(cfg, sink);
  for (std::uint64_t n : cfg.sizes) {
    for (const auto& ds : datasets_at(cfg, n)) {
      for (Family f : cfg.families) {
        auto index = build_in_memory(f, ds.graph, cfg);
        const double blocks = static_cast<double>(index->store().stats().allocated);
        out.add({ds.name, ds.graph.size(), std::string(to_string(f)), "size", "-", blocks, 1});
      }
    }
    out.close_checkpoint();
  }
  return out.take();
}

std::vector<ResultRow> run_k0(const ExperimentConfig& cfg, const RowSink& sink) {
  cfg.validate();
  Collector out(cfg, sink);
  for (std::uint64_t n : cfg.sizes) {
    for (const auto& ds : datasets_at(cfg, n)) {
      Rng rng(cell_seed(cfg.seed, n, ds.variant, 0x6B30));
      std::vector<Triple> picks;
      for (std::size_t i = 0; i < cfg.trials; ++i) {
        picks.push_back(ds.graph.triples()[rng.uniform_index(ds.graph.size())]);
      }
      for (Family f : cfg.families) {
        auto index = build_in_memory(f, ds.graph, cfg);
        std::vector<std::uint64_t> reads;
        for (const auto& t : picks) {
          index->store().reset_read_counter();
          reads.push_back(eval_bgp(*index, Bgp({sap_of(t)}), {}).cost.reads);
        }
        out.add({ds.name, ds.graph.size(), std::string(to_string(f)), "k0", "-", mean_of(reads), reads.size()});
      }
    }
    out.close_checkpoint();
  }
  return out.take();
}

std::vector<ResultRow> run_k1(const ExperimentConfig& cfg, const RowSink& sink) {
  cfg.validate();
  Collector out(cfg, sink);
  for (std::uint64_t n : cfg.sizes) {
    for (const auto& ds : datasets_at(cfg, n)) {
      const PairSampler sampler(ds.graph);
      std::vector<std::vector<SapPair>> pairs(5);
      for (int scenario = 1; scenario <= 4; ++scenario) {
        Rng rng(cell_seed(cfg.seed, n, ds.variant, 0x6B31 + static_cast<std::uint64_t>(scenario)));
        for (std::size_t i = 0; i < cfg.trials; ++i) {
          auto p = sampler.draw(scenario, rng);
          if (!p) break;
          pairs[static_cast<std::size_t>(scenario)].push_back(std::move(*p));
        }
        if (pairs[static_cast<std::size_t>(scenario)].size() < cfg.trials) {
          std::cerr << "k1 scenario " << scenario << " unsatisfiable on " << ds.name << " n=" << ds.graph.size()
                    << "; row skipped\n";
          pairs[static_cast<std::size_t>(scenario)].clear();
        }
      }
      for (Family f : cfg.families) {
        auto index = build_in_memory(f, ds.graph, cfg);
        for (int scenario = 1; scenario <= 4; ++scenario) {
          const auto& list = pairs[static_cast<std::size_t>(scenario)];
          if (list.empty()) continue;
          std::vector<std::uint64_t> reads;
          for (const auto& p : list) {
            index->store().reset_read_counter();
            reads.push_back(eval_k1(*index, scenario, p.a, p.b).cost.reads);
          }
          out.add({ds.name, ds.graph.size(), std::string(to_string(f)), "k1", std::to_string(scenario),
                   mean_of(reads), reads.size()});
        }
      }
    }
    out.close_checkpoint();
  }
  return out.take();
}

}  // namespace rdfidx

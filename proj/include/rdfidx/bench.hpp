#pragma once

// Experiment harness: index sizes, fully-bound lookups (k=0) and the four
// two-SAP join scenarios (k=1), emitted as CSV rows.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "rdfidx/core.hpp"
#include "rdfidx/index.hpp"
#include "rdfidx/pager.hpp"
#include "rdfidx/rng.hpp"

namespace rdfidx {

struct ExperimentConfig {
  std::vector<std::uint64_t> sizes = {10000, 32500, 55000, 77500, 100000};
  std::size_t trials = 10;
  std::uint64_t seed = 42;
  std::vector<Family> families = {Family::TripleT, Family::Map, Family::Hex};
  std::vector<int> variants = {1, 2};  // synthetic generators, used when graph is unset
  std::optional<Graph> graph;          // ingested data, sampled down to each size
  std::string dataset_name = "file";
  std::uint32_t block_size = kDefaultBlockSize;
  IndexOptions index;
  bool metered = true;

  void validate() const;
};

struct ResultRow {
  std::string dataset;
  std::uint64_t n = 0;
  std::string family;
  std::string experiment;  // size | k0 | k1
  std::string scenario;    // "-" or 1..4
  double mean = 0.0;
  std::size_t trials = 0;
};

using RowSink = std::function<void(const ResultRow&)>;

inline constexpr const char* kCsvHeader =
    "dataset,n,family,experiment,scenario,mean_reads_or_blocks,trials";

std::string to_csv(const ResultRow& row);

std::vector<ResultRow> run_size_experiment(const ExperimentConfig& cfg, const RowSink& sink = {});
std::vector<ResultRow> run_k0(const ExperimentConfig& cfg, const RowSink& sink = {});
std::vector<ResultRow> run_k1(const ExperimentConfig& cfg, const RowSink& sink = {});

/// Builds `family` over `g` in an in-memory store configured from `cfg`.
std::unique_ptr<TripleIndex> build_in_memory(Family family, const Graph& g, const ExperimentConfig& cfg);

struct SapPair {
  Sap a;
  Sap b;
};

/// Draws SAP pairs of a k=1 scenario shape from the triples of a graph:
///   1  t1, then t2 sharing exactly one atom with it
///   2  as 1, one non-shared position of t2 becomes ?x
///   3  t1, t2 sharing no atom, one position of each becomes ?x
///   4  as 1, one non-shared position of each becomes ?x
class PairSampler {
 public:
  static constexpr std::size_t kMaxAttempts = 1000;

  explicit PairSampler(const Graph& g);
  /// Nothing when kMaxAttempts draws produced no conforming pair.
  std::optional<SapPair> draw(int scenario, Rng& rng) const;

 private:
  const Graph& g_;
  std::map<Atom, std::vector<std::size_t>> occurrences_;
};

}  // namespace rdfidx

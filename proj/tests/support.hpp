#pragma once

// Fixtures and seeded generators shared by the unit and acceptance tests.

#include <filesystem>
#include <string>
#include <vector>

#include "rdfidx/core.hpp"
#include "rdfidx/rng.hpp"

namespace rdfidx::testing {

Graph doc_graph();
std::string doc_query();
std::filesystem::path data_path(const std::string& name);

/// Fresh path under the system temp directory; removed by ~TempDir.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  std::filesystem::path operator/(const std::string& name) const { return dir_ / name; }
  const std::filesystem::path& path() const { return dir_; }

 private:
  std::filesystem::path dir_;
};

/// n triples over a pool of `pool` short atoms (may contain fewer after dedup).
Graph random_graph(Rng& rng, std::size_t n, std::size_t pool);

/// 1..max_saps SAPs with at most max_vars distinct variables; positions come
/// mostly from triples of g so results are often non-empty. g must be non-empty.
Bgp random_bgp(Rng& rng, const Graph& g, std::size_t max_saps = 3, std::size_t max_vars = 3);

/// Random subset of the BGP's variables.
std::vector<std::string> random_select(Rng& rng, const Bgp& bgp);

}  // namespace rdfidx::testing

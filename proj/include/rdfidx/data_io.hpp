#pragma once

// Synthetic graph generators, N-Triples ingestion (parse, sample, clean),
// the canonical sorted-run file, and the small SELECT/WHERE query reader.

#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rdfidx/core.hpp"

namespace rdfidx {

struct GenSpec {
  std::uint64_t n = 1;
  int variant = 1;  // 1: repetitions allowed, 2: pairwise-distinct atoms
  std::uint64_t seed = 0;
};

/// Atom pool size used by gen_synthetic for `spec`.
std::uint64_t synthetic_pool_size(std::uint64_t n, int variant);
// Distinct triples a pool can supply: pool^3, or pool(pool-1)(pool-2) for variant 2.
std::uint64_t synthetic_space(std::uint64_t pool, int variant);
// False when round/ceil pool sizing leaves fewer than n distinct triples.
bool synthetic_feasible(std::uint64_t n, int variant);

/// Exactly spec.n distinct triples. Throws std::invalid_argument when the pool
/// cannot supply n distinct triples.
Graph gen_synthetic(const GenSpec& spec);

struct ParseResult {
  std::vector<Triple> triples;
  std::size_t skipped = 0;  // malformed lines
};

/// Line-oriented N-Triples. IRIs lose their angle brackets, literals their
/// quotes (escapes decoded); a @lang or ^^<datatype> suffix stays in the atom
/// text as @lang or ^^datatype. Blank nodes are kept verbatim ("_:b0").
ParseResult parse_ntriples(std::istream& in);

struct IngestConfig {
  std::size_t max_atom_len = 400;
  std::optional<std::size_t> sample_size;
  std::uint64_t seed = 0;
};

struct CleanReport {
  std::size_t input = 0;
  std::size_t output = 0;
  std::size_t truncated = 0;  // atom occurrences shortened
};

struct CleanResult {
  Graph graph;
  CleanReport report;
};

/// Truncates atoms to max_atom_len bytes on a code-point boundary, replaces
/// 0x00 by 0x01 and removes duplicates.
CleanResult clean(const std::vector<Triple>& triples, const IngestConfig& cfg);

/// Truncation used by clean().
std::string truncate_utf8(std::string_view bytes, std::size_t max_len);

/// Uniform reservoir sample of min(k, |triples|) triples.
Graph sample(const std::vector<Triple>& triples, std::size_t k, std::uint64_t seed);

struct IngestResult {
  CleanResult cleaned;
  std::size_t skipped = 0;
};

/// parse_ntriples, then sample (when configured), then clean.
IngestResult ingest(std::istream& in, const IngestConfig& cfg);

// Canonical run file: "RDFRUN01", u32 atom width, u64 count, then count
// triples in SPO order, each 3 zero-padded atom fields. All little-endian.
void write_run(const std::filesystem::path& path, const Graph& g, std::uint32_t atom_width = 0);
Graph read_run(const std::filesystem::path& path, std::uint32_t* atom_width = nullptr);
bool is_run_file(const std::filesystem::path& path);

/// Run file or N-Triples (ingested with `cfg`).
Graph load_graph(const std::filesystem::path& path, const IngestConfig& cfg = {});

class QuerySyntaxError : public std::runtime_error {
 public:
  QuerySyntaxError(const std::string& what, std::size_t line, std::size_t column);
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

struct ParsedQuery {
  Bgp bgp;
  std::vector<std::string> select;  // variable names without '?'
};

/// SELECT ?a ?b WHERE { s p o . s p o }. Terms are ?vars, <iri>, "literal"
/// or bare tokens. SELECT * selects every variable of the pattern.
ParsedQuery parse_bgp(std::string_view text);

std::string render_bgp(const Bgp& bgp, const std::vector<std::string>& select);

}  // namespace rdfidx

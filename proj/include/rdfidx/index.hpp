#pragma once

// Common surface of the three index families.

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "rdfidx/core.hpp"
#include "rdfidx/pager.hpp"
#include "rdfidx/plan.hpp"

namespace rdfidx {

enum class Family { TripleT, Map, Hex };

std::string_view to_string(Family f) noexcept;
Family parse_family(std::string_view name);
inline constexpr Family kFamilies[] = {Family::TripleT, Family::Map, Family::Hex};

struct IndexOptions {
  /// Fixed atom field width in bytes; 0 means the longest atom of the graph.
  std::uint32_t atom_width = 0;
  /// Materialize all six orders (TripleT buckets, MAP trees, HexTree trees)
  /// instead of the default three.
  bool all_orders = false;
};

class TripleIndex {
 public:
  virtual ~TripleIndex() = default;

  virtual Family family() const noexcept = 0;
  virtual PageStore& store() noexcept = 0;
  virtual std::uint32_t atom_width() const noexcept = 0;

  /// Bindings of one SAP through the family's access path (metered).
  BindingSet eval_sap(const Sap& sap);

  /// One relation per SAP of the pattern, in order, recording the access
  /// steps taken into `plan`. Families may share lookups between SAPs.
  virtual std::vector<Relation> access(const Bgp& bgp, QueryPlan& plan);

 protected:
  /// Candidate triples for `sap` via the family's access path; every
  /// candidate must be re-checked with matches().
  virtual std::vector<Triple> candidates(const Sap& sap, PlanStep& step) = 0;
};

std::unique_ptr<TripleIndex> build_index(Family family, const Graph& g, PageStore store,
                                         const IndexOptions& options = {});
/// Opens a page file and detects its family from the tree directory.
std::unique_ptr<TripleIndex> open_index(PageStore store);

/// Width actually used for `g` under `options` (validated against the graph).
std::uint32_t resolve_atom_width(const Graph& g, const IndexOptions& options);

}  // namespace rdfidx

#pragma once

// BGP evaluation over any index family, the brute-force oracle, and the
// two-SAP (k=1) benchmark scenarios.

#include <string>
#include <vector>

#include "rdfidx/core.hpp"
#include "rdfidx/index.hpp"
#include "rdfidx/plan.hpp"

namespace rdfidx {

struct QueryResult {
  BindingSet bindings;
  IoStats cost;  // deltas observed during evaluation
  QueryPlan plan;
};

/// Left-deep evaluation in SAP order: index access for every SAP (TripleT
/// serves SAPs sharing an atom from one payload fetch), then in-memory merge
/// joins, projection and duplicate elimination. Intermediates are unmetered.
QueryResult eval_bgp(TripleIndex& index, const Bgp& bgp, const std::vector<std::string>& select);

/// Exhaustive evaluation straight from the graph: every triple against every
/// SAP, nested-loop natural join, projection. No index, no metering.
BindingSet oracle_eval(const Graph& g, const Bgp& bgp, const std::vector<std::string>& select);

/// The four two-SAP join shapes:
///   1  both variable-free, one atom in common
///   2  one atom in common, one SAP with a single variable, the other variable-free
///   3  no atom in common, each with a single variable, which they share
///   4  one atom in common, each with a single variable, which they share
bool conforms_k1(int scenario, const Sap& a, const Sap& b);

/// Evaluates the pair as a BGP after checking its shape; throws
/// std::invalid_argument when the pair does not conform.
QueryResult eval_k1(TripleIndex& index, int scenario, const Sap& a, const Sap& b);

}  // namespace rdfidx

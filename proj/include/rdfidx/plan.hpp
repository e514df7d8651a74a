#pragma once

// Intermediate relations and the evaluation trace rendered by --explain.

#include <cstdint>
#include <string>
#include <vector>

#include "rdfidx/core.hpp"

namespace rdfidx {

/// Binding rows over an ordered variable list; rows align with vars.
struct Relation {
  std::vector<std::string> vars;
  std::vector<std::vector<Atom>> rows;

  /// Bindings of every triple in `candidates` that satisfies `sap`.
  static Relation from_matches(const Sap& sap, const std::vector<Triple>& candidates);
  BindingSet to_binding_set() const;
};

/// Natural join on the shared variables (cross product when none). Both
/// inputs are sorted in memory on the join columns and merged.
Relation merge_join(Relation left, Relation right);

/// Projection onto `select` with duplicate elimination.
BindingSet project(const Relation& rel, const std::vector<std::string>& select);

enum class StepKind { SapLookup, SelfJoin, Scan, MergeJoin };

std::string_view to_string(StepKind k) noexcept;

struct PlanStep {
  StepKind kind = StepKind::SapLookup;
  std::vector<std::size_t> saps;       // SAP positions (0-based) this step serves
  std::string access;                  // e.g. "tree=PSO prefix=P" or "key=doc3 buckets=S,O"
  std::vector<std::string> join_vars;  // MergeJoin only
  std::uint32_t descents = 0;          // root-to-leaf tree descents performed
  std::uint64_t reads = 0;
  std::uint64_t rows = 0;
  bool full_scan = false;
};

struct QueryPlan {
  std::string family;
  std::vector<PlanStep> steps;

  std::uint64_t total_reads() const;
  std::string to_text() const;
  std::string to_json() const;
};

}  // namespace rdfidx

#pragma once

// TripleT: one B+tree keyed on every atom of A(G), regardless of role. The
// payload of atom k holds three buckets of companion pairs:
//
//   subject bucket    (o, p) for every (k, p, o)   sorted OP
//   predicate bucket  (s, o) for every (s, k, o)   sorted SO
//   object bucket     (s, p) for every (s, p, k)   sorted SP
//
// Payload image: three regions, each u32 pair count followed by the pairs as
// two zero-padded atom fields of the index's atom width. With all_orders set,
// three more regions follow holding the symmetric orders (PO, OS, PS).

#include <memory>
#include <optional>
#include <vector>

#include "rdfidx/btree.hpp"
#include "rdfidx/index.hpp"
#include "rdfidx/payload.hpp"

namespace rdfidx {

struct Payload {
  std::vector<AtomPair> s_bucket;
  std::vector<AtomPair> p_bucket;
  std::vector<AtomPair> o_bucket;

  const std::vector<AtomPair>& bucket(Role r) const noexcept;
  /// Role whose atom is the first component of the pairs stored for `r`.
  static Role leading_role(Role r) noexcept;
  /// Rebuilds the triples recorded in bucket `r` of atom `key`.
  std::vector<Triple> triples(const Atom& key, Role r) const;
  std::size_t pair_count() const noexcept { return s_bucket.size() + p_bucket.size() + o_bucket.size(); }

  friend bool operator==(const Payload&, const Payload&) = default;
};

class TripletIndex final : public TripleIndex {
 public:
  static constexpr const char* kTreeName = "triplet";

  static TripletIndex build(const Graph& g, PageStore store, const IndexOptions& options = {});
  static TripletIndex open(PageStore store);

  Family family() const noexcept override { return Family::TripleT; }
  PageStore& store() noexcept override { return *store_; }
  std::uint32_t atom_width() const noexcept override { return width_; }
  BTree& tree() noexcept { return *tree_; }

  /// Full payload of `k`: tree depth + ceil(payload bytes / block size) reads.
  std::optional<Payload> payload(const Atom& k);
  /// Reference stored under `k` (tree descent only).
  std::optional<PayloadRef> payload_ref(const Atom& k);

  /// Join of two SAPs that share the constant `k`, where k sits in different
  /// roles in the two SAPs, answered from a single lookup of k.
  BindingSet self_join(const Atom& k, const Sap& a, const Sap& b);

  std::vector<Relation> access(const Bgp& bgp, QueryPlan& plan) override;

  /// Lookup role the planner picks for `sap` when no other SAP shares its atoms.
  static std::optional<Role> preferred_key_role(const Sap& sap);

 protected:
  std::vector<Triple> candidates(const Sap& sap, PlanStep& step) override;

 private:
  TripletIndex(std::unique_ptr<PageStore> store, BTree tree);

  std::vector<Triple> full_scan(PlanStep& step);
  static std::vector<Triple> bucket_candidates(const Payload& p, const Atom& key, Role r, const Sap& sap);

  std::unique_ptr<PageStore> store_;
  std::unique_ptr<BTree> tree_;
  std::uint32_t width_;
};

Payload decode_payload(std::span<const std::uint8_t> bytes, std::uint32_t atom_width);

}  // namespace rdfidx

#pragma once

// The two competitor families built on the same pager/B+tree substrate.
//
// MAP: one B+tree per materialized role permutation, key = the whole triple
// as three zero-padded atom fields in that order, empty value. Default trees
// are SOP, PSO and OSP.
//
// HexTree: one B+tree per materialized role pair, key = two zero-padded atom
// fields, value = reference to an out-of-line payload listing the third-role
// atoms in sorted order (u32 count, then fixed-width atoms). Symmetric orders
// share one payload. Default trees are SO, PS and OS; SO and OS share.

#include <array>
#include <memory>
#include <string>
#include <vector>

#include "rdfidx/btree.hpp"
#include "rdfidx/index.hpp"
#include "rdfidx/payload.hpp"

namespace rdfidx {

class MapIndex final : public TripleIndex {
 public:
  using Order = std::array<Role, 3>;

  static MapIndex build(const Graph& g, PageStore store, const IndexOptions& options = {});
  static MapIndex open(PageStore store);

  Family family() const noexcept override { return Family::Map; }
  PageStore& store() noexcept override { return *store_; }
  std::uint32_t atom_width() const noexcept override { return width_; }

  std::vector<std::string> tree_names() const;
  BTree& tree(std::string_view name);

  /// Materialized tree whose key prefix covers the most roles bound in `sap`,
  /// and the covered prefix length.
  std::pair<std::size_t, std::size_t> choose_tree(const Sap& sap) const;

 protected:
  std::vector<Triple> candidates(const Sap& sap, PlanStep& step) override;

 private:
  struct Slot {
    Order order;
    std::unique_ptr<BTree> tree;
  };
  MapIndex(std::unique_ptr<PageStore> store, std::vector<Slot> trees, std::uint32_t width);

  Triple decode_key(const Order& order, std::string_view key) const;

  std::unique_ptr<PageStore> store_;
  std::vector<Slot> trees_;
  std::uint32_t width_;
};

class HexIndex final : public TripleIndex {
 public:
  using Order = std::array<Role, 2>;

  static HexIndex build(const Graph& g, PageStore store, const IndexOptions& options = {});
  static HexIndex open(PageStore store);

  Family family() const noexcept override { return Family::Hex; }
  PageStore& store() noexcept override { return *store_; }
  std::uint32_t atom_width() const noexcept override { return width_; }

  std::vector<std::string> tree_names() const;
  BTree& tree(std::string_view name);

  /// Payload reference stored under the two-atom key of tree `name`.
  std::optional<PayloadRef> payload_ref(std::string_view name, const Atom& first, const Atom& second);
  /// Sorted third-role atoms under that key.
  std::optional<std::vector<Atom>> payload(std::string_view name, const Atom& first, const Atom& second);

  std::pair<std::size_t, std::size_t> choose_tree(const Sap& sap) const;

 protected:
  std::vector<Triple> candidates(const Sap& sap, PlanStep& step) override;

 private:
  struct Slot {
    Order order;
    std::unique_ptr<BTree> tree;
  };
  HexIndex(std::unique_ptr<PageStore> store, std::vector<Slot> trees, std::uint32_t width);

  std::vector<Atom> read_list(const PayloadRef& ref);

  std::unique_ptr<PageStore> store_;
  std::vector<Slot> trees_;
  std::uint32_t width_;
};

}  // namespace rdfidx

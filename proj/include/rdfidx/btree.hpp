#pragma once

// B+tree over fixed-width byte keys stored in a PageStore.
//
// Node layout (little-endian):
//   0  u8   node type (1 = leaf, 2 = interior)
//   1  u16  entry count
//   3  u32  right sibling PageId (leaves; 0 on interior nodes and the last leaf)
//   7  entries packed contiguously:
//        leaf:     key[key_width] value[value_width]
//        interior: key[key_width] child u32   (key = smallest key under child)

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rdfidx/core.hpp"
#include "rdfidx/pager.hpp"

namespace rdfidx {

struct TreeConfig {
  static constexpr std::uint32_t kNodeHeader = 7;

  std::string name;
  std::uint32_t key_width = 0;
  std::uint32_t value_width = 0;

  /// Children per interior node: floor((block_size - header) / (key_width + 4)).
  std::uint32_t fanout(std::uint32_t block_size) const noexcept {
    return (block_size - kNodeHeader) / (key_width + 4);
  }
  /// Entries per leaf: floor((block_size - header) / (key_width + value_width)).
  std::uint32_t leaf_capacity(std::uint32_t block_size) const noexcept {
    return (block_size - kNodeHeader) / (key_width + value_width);
  }
  /// Throws std::invalid_argument unless the geometry is usable at this block size.
  void validate(std::uint32_t block_size) const;
};

/// Height (root-to-leaf path length, in nodes) of a bulk-loaded tree holding
/// `entries` keys, from node fan-out arithmetic alone.
std::uint32_t predicted_height(const TreeConfig& cfg, std::uint32_t block_size,
                               std::uint64_t entries);

/// Right-pads `bytes` with 0x00 to `width`. Throws if it does not fit.
std::string pad_key(std::string_view bytes, std::size_t width);

/// Concatenates atoms, each zero-padded to `field_width`.
std::string composite_key(std::initializer_list<const Atom*> fields, std::size_t field_width);

/// Splits a fixed-width key back into its zero-padded fields, stripping padding.
std::vector<std::string> split_key(std::string_view key, std::size_t field_width);

struct TreeEntry {
  std::string key;
  std::string value;
  friend bool operator==(const TreeEntry&, const TreeEntry&) = default;
};

struct TreeCheck {
  bool sorted = true;
  bool uniform_depth = true;
  bool separators_consistent = true;
  bool leaf_chain_ok = true;
  bool min_fill_ok = true;  // every non-root node at least half full
  std::uint32_t height = 0;
  std::uint64_t entries = 0;
  std::uint64_t leaves = 0;
  std::uint64_t interior_nodes = 0;
  std::uint32_t max_interior_children = 0;

  bool ok() const noexcept {
    return sorted && uniform_depth && separators_consistent && leaf_chain_ok;
  }
};

class BTree {
 public:
  /// Empty tree: a single root leaf.
  static BTree create(PageStore& store, const TreeConfig& cfg);
  static BTree open(PageStore& store, const std::string& name);

  /// Builds leaves at 100% fill from ascending unique keys; the last two
  /// nodes of each level are rebalanced so no non-root node is under half full.
  class BulkLoader {
   public:
    BulkLoader(PageStore& store, TreeConfig cfg);
    void add(std::string_view key, std::string_view value);
    BTree finish();

   private:
    struct Pending {
      PageId page;
      std::vector<TreeEntry> entries;
    };
    void write_leaf(const Pending& leaf, PageId sibling);

    PageStore* store_;
    TreeConfig cfg_;
    std::uint32_t capacity_;
    std::optional<Pending> previous_;
    Pending current_;
    std::vector<std::pair<std::string, PageId>> level_;  // (first key, page) per leaf
    std::string last_key_;
    std::uint64_t count_ = 0;
  };

  void insert(std::string_view key, std::string_view value);
  /// Reads exactly height() blocks.
  std::optional<std::string> lookup(std::string_view key);
  /// All entries whose key starts with `prefix`, in key order. Reads the path
  /// to the first candidate leaf plus one block per additional leaf touched.
  std::vector<TreeEntry> prefix_scan(std::string_view prefix);
  /// Streaming form; stop early by returning false.
  void scan(std::string_view prefix, const std::function<bool(std::string_view key, std::string_view value)>& fn);

  /// Full structural walk (reads every node).
  TreeCheck verify();

  const TreeMeta& meta() const noexcept { return meta_; }
  const TreeConfig& config() const noexcept { return cfg_; }
  std::uint32_t height() const noexcept { return meta_.height; }
  std::uint64_t size() const noexcept { return meta_.entries; }
  PageStore& store() const noexcept { return *store_; }

 private:
  BTree(PageStore& store, TreeConfig cfg, TreeMeta meta);

  struct Split {
    std::string key;
    PageId page;
  };
  std::optional<Split> insert_into(PageId page, std::string_view key, std::string_view value);
  PageId descend_to_leaf(std::string_view target, Block& leaf);
  void check_key(std::string_view key) const;
  void save_meta();

  PageStore* store_;
  TreeConfig cfg_;
  TreeMeta meta_;
};

}  // namespace rdfidx

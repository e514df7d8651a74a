#include "rdfidx/btree.hpp"

#include <algorithm>

#include "rdfidx/bytes.hpp"

namespace rdfidx {

namespace {

constexpr std::uint8_t kLeaf = 1;
constexpr std::uint8_t kInterior = 2;

struct NodeHeader {
  std::uint8_t type;
  std::uint16_t count;
  PageId sibling;
};

NodeHeader header_of(const Block& b) {
  return {b[0], bytes::get_u16(b, 1), PageId{bytes::get_u32(b, 3)}};
}

void put_header(Block& b, std::uint8_t type, std::size_t count, PageId sibling) {
  b[0] = type;
  bytes::put_u16(b, 1, static_cast<std::uint16_t>(count));
  bytes::put_u32(b, 3, sibling.value);
}

std::string_view key_at(const Block& b, std::size_t slot, std::size_t i) {
  return {reinterpret_cast<const char*>(b.data()) + TreeConfig::kNodeHeader + i * slot,
          slot};  // caller trims to key width
}

// Entries of one node decoded for modification.
struct Decoded {
  std::uint8_t type = kLeaf;
  PageId sibling;
  std::vector<std::string> keys;
  std::vector<std::string> values;  // leaf values
  std::vector<PageId> children;     // interior children
};

Decoded decode(const Block& b, const TreeConfig& cfg) {
  Decoded d;
  const auto h = header_of(b);
  d.type = h.type;
  d.sibling = h.sibling;
  const std::size_t kw = cfg.key_width;
  const std::size_t slot = kw + (h.type == kLeaf ? cfg.value_width : 4);
  const char* base = reinterpret_cast<const char*>(b.data()) + TreeConfig::kNodeHeader;
  for (std::size_t i = 0; i < h.count; ++i) {
    const char* e = base + i * slot;
    d.keys.emplace_back(e, kw);
    if (h.type == kLeaf) {
      d.values.emplace_back(e + kw, cfg.value_width);
    } else {
      d.children.push_back(PageId{bytes::get_u32(b, TreeConfig::kNodeHeader + i * slot + kw)});
    }
  }
  return d;
}

Block encode(const Decoded& d, const TreeConfig& cfg, std::uint32_t block_size) {
  Block b(block_size, 0);
  const std::size_t kw = cfg.key_width;
  const std::size_t slot = kw + (d.type == kLeaf ? cfg.value_width : 4);
  put_header(b, d.type, d.keys.size(), d.sibling);
  for (std::size_t i = 0; i < d.keys.size(); ++i) {
    const std::size_t at = TreeConfig::kNodeHeader + i * slot;
    std::copy(d.keys[i].begin(), d.keys[i].end(), b.begin() + static_cast<std::ptrdiff_t>(at));
    if (d.type == kLeaf) {
      std::copy(d.values[i].begin(), d.values[i].end(),
                b.begin() + static_cast<std::ptrdiff_t>(at + kw));
    } else {
      bytes::put_u32(b, at + kw, d.children[i].value);
    }
  }
  return b;
}

// Index of the last entry whose key is <= target, or 0 when target precedes all.
std::size_t child_slot(const Block& b, const TreeConfig& cfg, std::string_view target) {
  const auto count = header_of(b).count;
  const std::size_t slot = cfg.key_width + 4;
  std::size_t lo = 0, hi = count;  // first key > target lies in [lo, hi]
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    if (key_at(b, slot, mid).substr(0, cfg.key_width) <= target) {
      lo = mid + 1;
    } else {
      hi = mid;
    }
  }
  return lo == 0 ? 0 : lo - 1;
}

PageId child_at(const Block& b, const TreeConfig& cfg, std::size_t i) {
  return PageId{bytes::get_u32(b, TreeConfig::kNodeHeader + i * (cfg.key_width + 4) + cfg.key_width)};
}

// First leaf slot whose key is >= target.
std::size_t leaf_lower_bound(const Block& b, const TreeConfig& cfg, std::string_view target) {
  const auto count = header_of(b).count;
  const std::size_t slot = cfg.key_width + cfg.value_width;
  std::size_t lo = 0, hi = count;
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    if (key_at(b, slot, mid).substr(0, cfg.key_width) < target) {
      lo = mid + 1;
    } else {
      hi = mid;
    }
  }
  return lo;
}

// Sizes of ceil(n / cap) groups, full except that the last group borrows from
// its predecessor until it is at least half full.
std::vector<std::size_t> group_sizes(std::size_t n, std::size_t cap) {
  std::vector<std::size_t> sizes;
  if (n == 0) return sizes;
  const std::size_t groups = (n + cap - 1) / cap;
  sizes.assign(groups, cap);
  sizes.back() = n - (groups - 1) * cap;
  const std::size_t half = (cap + 1) / 2;
  if (groups >= 2 && sizes.back() < half) {
    const std::size_t pair = sizes[groups - 2] + sizes.back();
    sizes.back() = half;
    sizes[groups - 2] = pair - half;
  }
  return sizes;
}

}  // namespace

void TreeConfig::validate(std::uint32_t block_size) const {
  if (key_width < 1) throw std::invalid_argument("key_width must be >= 1");
  if (name.empty() || name.size() > PageStore::kMaxTreeName) {
    throw std::invalid_argument("tree name must be 1..32 bytes");
  }
  if (fanout(block_size) < 3) {
    throw std::invalid_argument("key_width " + std::to_string(key_width) +
                                " leaves fewer than 3 children per node at block size " +
                                std::to_string(block_size));
  }
  if (leaf_capacity(block_size) < 2) {
    throw std::invalid_argument("leaf holds fewer than 2 entries");
  }
}

std::uint32_t predicted_height(const TreeConfig& cfg, std::uint32_t block_size,
                               std::uint64_t entries) {
  const std::uint64_t cap = cfg.leaf_capacity(block_size);
  const std::uint64_t fan = cfg.fanout(block_size);
  std::uint64_t nodes = entries == 0 ? 1 : (entries + cap - 1) / cap;
  std::uint32_t height = 1;
  while (nodes > 1) {
    nodes = (nodes + fan - 1) / fan;
    ++height;
  }
  return height;
}

std::string pad_key(std::string_view bytes, std::size_t width) {
  if (bytes.size() > width) {
    throw std::invalid_argument("key field of " + std::to_string(bytes.size()) +
                                " bytes exceeds width " + std::to_string(width));
  }
  std::string out(bytes);
  out.resize(width, '\0');
  return out;
}

std::string composite_key(std::initializer_list<const Atom*> fields, std::size_t field_width) {
  std::string out;
  out.reserve(fields.size() * field_width);
  for (const Atom* a : fields) out += pad_key(a->view(), field_width);
  return out;
}

std::vector<std::string> split_key(std::string_view key, std::size_t field_width) {
  std::vector<std::string> out;
  for (std::size_t at = 0; at + field_width <= key.size(); at += field_width) {
    auto field = key.substr(at, field_width);
    const auto end = field.find('\0');
    out.emplace_back(end == std::string_view::npos ? field : field.substr(0, end));
  }
  return out;
}

BTree::BTree(PageStore& store, TreeConfig cfg, TreeMeta meta)
    : store_(&store), cfg_(std::move(cfg)), meta_(std::move(meta)) {}

BTree BTree::create(PageStore& store, const TreeConfig& cfg) {
  BulkLoader loader(store, cfg);
  return loader.finish();
}

BTree BTree::open(PageStore& store, const std::string& name) {
  auto meta = store.tree(name);
  if (!meta) throw StorageError("no tree named '" + name + "' in page file");
  TreeConfig cfg{name, meta->key_width, meta->value_width};
  return BTree(store, std::move(cfg), *meta);
}

void BTree::save_meta() { store_->put_tree(meta_); }

void BTree::check_key(std::string_view key) const {
  if (key.size() != cfg_.key_width) {
    throw std::invalid_argument("key must be exactly " + std::to_string(cfg_.key_width) + " bytes");
  }
}

BTree::BulkLoader::BulkLoader(PageStore& store, TreeConfig cfg)
    : store_(&store), cfg_(std::move(cfg)) {
  cfg_.validate(store.block_size());
  capacity_ = cfg_.leaf_capacity(store.block_size());
  current_.page = store.alloc();
}

void BTree::BulkLoader::write_leaf(const Pending& leaf, PageId sibling) {
  Decoded d;
  d.type = kLeaf;
  d.sibling = sibling;
  for (const auto& e : leaf.entries) {
    d.keys.push_back(e.key);
    d.values.push_back(e.value);
  }
  store_->write(leaf.page, encode(d, cfg_, store_->block_size()));
  level_.emplace_back(leaf.entries.empty() ? std::string(cfg_.key_width, '\0') : leaf.entries.front().key,
                      leaf.page);
}

void BTree::BulkLoader::add(std::string_view key, std::string_view value) {
  if (key.size() != cfg_.key_width) {
    throw std::invalid_argument("key must be exactly " + std::to_string(cfg_.key_width) + " bytes");
  }
  if (value.size() != cfg_.value_width) {
    throw std::invalid_argument("value must be exactly " + std::to_string(cfg_.value_width) + " bytes");
  }
  if (count_ > 0 && key <= last_key_) {
    throw std::invalid_argument("bulk load keys must be strictly ascending");
  }
  if (current_.entries.size() == capacity_) {
    Pending next{store_->alloc(), {}};
    if (previous_) write_leaf(*previous_, current_.page);
    previous_ = std::move(current_);
    current_ = std::move(next);
  }
  current_.entries.push_back({std::string(key), std::string(value)});
  last_key_ = key;
  ++count_;
}

BTree BTree::BulkLoader::finish() {
  if (previous_) {
    const std::size_t half = (capacity_ + 1) / 2;
    auto& prev = previous_->entries;
    if (current_.entries.size() < half) {
      const std::size_t move = half - current_.entries.size();
      current_.entries.insert(current_.entries.begin(),
                              std::make_move_iterator(prev.end() - static_cast<std::ptrdiff_t>(move)),
                              std::make_move_iterator(prev.end()));
      prev.resize(prev.size() - move);
    }
    write_leaf(*previous_, current_.page);
  }
  write_leaf(current_, kNullPage);

  TreeMeta meta;
  meta.name = cfg_.name;
  meta.key_width = cfg_.key_width;
  meta.value_width = cfg_.value_width;
  meta.entries = count_;
  meta.leaves = static_cast<std::uint32_t>(level_.size());
  meta.height = 1;

  const std::size_t fan = cfg_.fanout(store_->block_size());
  auto nodes = std::move(level_);
  while (nodes.size() > 1) {
    std::vector<std::pair<std::string, PageId>> parents;
    std::size_t at = 0;
    for (std::size_t size : group_sizes(nodes.size(), fan)) {
      Decoded d;
      d.type = kInterior;
      for (std::size_t i = at; i < at + size; ++i) {
        d.keys.push_back(nodes[i].first);
        d.children.push_back(nodes[i].second);
      }
      const PageId page = store_->alloc();
      store_->write(page, encode(d, cfg_, store_->block_size()));
      parents.emplace_back(nodes[at].first, page);
      at += size;
    }
    nodes = std::move(parents);
    ++meta.height;
  }
  meta.root = nodes.front().second;
  store_->put_tree(meta);
  return BTree(*store_, cfg_, meta);
}

std::optional<BTree::Split> BTree::insert_into(PageId page, std::string_view key,
                                               std::string_view value) {
  const auto bs = store_->block_size();
  Decoded d = decode(store_->read(page), cfg_);
  if (d.type == kLeaf) {
    auto it = std::lower_bound(d.keys.begin(), d.keys.end(), key);
    if (it != d.keys.end() && *it == key) throw std::invalid_argument("duplicate key");
    const auto pos = it - d.keys.begin();
    d.keys.insert(it, std::string(key));
    d.values.insert(d.values.begin() + pos, std::string(value));
    if (d.keys.size() <= cfg_.leaf_capacity(bs)) {
      store_->write(page, encode(d, cfg_, bs));
      return std::nullopt;
    }
    const std::size_t keep = d.keys.size() / 2;
    Decoded right;
    right.type = kLeaf;
    right.sibling = d.sibling;
    right.keys.assign(d.keys.begin() + static_cast<std::ptrdiff_t>(keep), d.keys.end());
    right.values.assign(d.values.begin() + static_cast<std::ptrdiff_t>(keep), d.values.end());
    d.keys.resize(keep);
    d.values.resize(keep);
    const PageId right_page = store_->alloc();
    d.sibling = right_page;
    store_->write(right_page, encode(right, cfg_, bs));
    store_->write(page, encode(d, cfg_, bs));
    ++meta_.leaves;
    return Split{right.keys.front(), right_page};
  }

  std::size_t idx = 0;
  while (idx + 1 < d.keys.size() && d.keys[idx + 1] <= key) ++idx;
  bool dirty = false;
  if (key < d.keys[0]) {
    d.keys[0] = key;
    dirty = true;
  }
  auto split = insert_into(d.children[idx], key, value);
  if (!split) {
    if (dirty) store_->write(page, encode(d, cfg_, bs));
    return std::nullopt;
  }
  d.keys.insert(d.keys.begin() + static_cast<std::ptrdiff_t>(idx + 1), split->key);
  d.children.insert(d.children.begin() + static_cast<std::ptrdiff_t>(idx + 1), split->page);
  if (d.keys.size() <= cfg_.fanout(bs)) {
    store_->write(page, encode(d, cfg_, bs));
    return std::nullopt;
  }
  const std::size_t keep = d.keys.size() / 2;
  Decoded right;
  right.type = kInterior;
  right.keys.assign(d.keys.begin() + static_cast<std::ptrdiff_t>(keep), d.keys.end());
  right.children.assign(d.children.begin() + static_cast<std::ptrdiff_t>(keep), d.children.end());
  d.keys.resize(keep);
  d.children.resize(keep);
  const PageId right_page = store_->alloc();
  store_->write(right_page, encode(right, cfg_, bs));
  store_->write(page, encode(d, cfg_, bs));
  return Split{right.keys.front(), right_page};
}

void BTree::insert(std::string_view key, std::string_view value) {
  check_key(key);
  if (value.size() != cfg_.value_width) {
    throw std::invalid_argument("value must be exactly " + std::to_string(cfg_.value_width) + " bytes");
  }
  auto split = insert_into(meta_.root, key, value);
  if (split) {
    // Smallest key under the old root: walk its leftmost path.
    Block node = store_->read(meta_.root);
    std::string first_key;
    {
      const auto h = header_of(node);
      const std::size_t slot = cfg_.key_width + (h.type == kLeaf ? cfg_.value_width : 4);
      first_key = std::string(key_at(node, slot, 0).substr(0, cfg_.key_width));
    }
    Decoded root;
    root.type = kInterior;
    root.keys = {first_key, split->key};
    root.children = {meta_.root, split->page};
    const PageId page = store_->alloc();
    store_->write(page, encode(root, cfg_, store_->block_size()));
    meta_.root = page;
    ++meta_.height;
  }
  ++meta_.entries;
  save_meta();
}

PageId BTree::descend_to_leaf(std::string_view target, Block& leaf) {
  PageId page = meta_.root;
  leaf = store_->read(page);
  while (header_of(leaf).type == kInterior) {
    page = child_at(leaf, cfg_, child_slot(leaf, cfg_, target));
    leaf = store_->read(page);
  }
  return page;
}

std::optional<std::string> BTree::lookup(std::string_view key) {
  check_key(key);
  Block leaf;
  descend_to_leaf(key, leaf);
  const std::size_t i = leaf_lower_bound(leaf, cfg_, key);
  const std::size_t slot = cfg_.key_width + cfg_.value_width;
  if (i < header_of(leaf).count && key_at(leaf, slot, i).substr(0, cfg_.key_width) == key) {
    return std::string(key_at(leaf, slot, i).substr(cfg_.key_width, cfg_.value_width));
  }
  return std::nullopt;
}

void BTree::scan(std::string_view prefix,
                 const std::function<bool(std::string_view, std::string_view)>& fn) {
  if (prefix.size() > cfg_.key_width) throw std::invalid_argument("prefix longer than key width");
  const std::string target = pad_key(prefix, cfg_.key_width);
  Block leaf;
  descend_to_leaf(target, leaf);
  std::size_t i = leaf_lower_bound(leaf, cfg_, target);
  const std::size_t slot = cfg_.key_width + cfg_.value_width;
  for (;;) {
    const auto h = header_of(leaf);
    for (; i < h.count; ++i) {
      const auto entry = key_at(leaf, slot, i);
      const auto key = entry.substr(0, cfg_.key_width);
      if (key.substr(0, prefix.size()) != prefix) return;
      if (!fn(key, entry.substr(cfg_.key_width, cfg_.value_width))) return;
    }
    if (!h.sibling.valid()) return;
    leaf = store_->read(h.sibling);
    i = 0;
  }
}

std::vector<TreeEntry> BTree::prefix_scan(std::string_view prefix) {
  std::vector<TreeEntry> out;
  scan(prefix, [&](std::string_view k, std::string_view v) {
    out.push_back({std::string(k), std::string(v)});
    return true;
  });
  return out;
}

TreeCheck BTree::verify() {
  TreeCheck check;
  const auto bs = store_->block_size();
  std::vector<PageId> dfs_leaves;
  std::optional<std::string> previous_key;
  std::optional<std::uint32_t> leaf_depth;

  // Returns the smallest key under `page`, or nullopt for an empty leaf.
  std::function<std::optional<std::string>(PageId, std::uint32_t, bool)> walk =
      [&](PageId page, std::uint32_t depth, bool is_root) -> std::optional<std::string> {
    const Decoded d = decode(store_->read(page), cfg_);
    if (d.type == kLeaf) {
      ++check.leaves;
      check.entries += d.keys.size();
      dfs_leaves.push_back(page);
      if (leaf_depth && *leaf_depth != depth) check.uniform_depth = false;
      leaf_depth = depth;
      if (!is_root && d.keys.size() * 2 < cfg_.leaf_capacity(bs)) check.min_fill_ok = false;
      for (const auto& k : d.keys) {
        if (previous_key && !(*previous_key < k)) check.sorted = false;
        previous_key = k;
      }
      if (d.keys.empty()) return std::nullopt;
      return d.keys.front();
    }
    ++check.interior_nodes;
    check.max_interior_children =
        std::max<std::uint32_t>(check.max_interior_children, static_cast<std::uint32_t>(d.keys.size()));
    if (!is_root && d.keys.size() * 2 < cfg_.fanout(bs)) check.min_fill_ok = false;
    if (d.keys.empty()) check.separators_consistent = false;
    for (std::size_t i = 0; i < d.keys.size(); ++i) {
      auto first = walk(d.children[i], depth + 1, false);
      if (!first || *first != d.keys[i]) check.separators_consistent = false;
    }
    if (d.keys.empty()) return std::nullopt;
    return d.keys.front();
  };
  walk(meta_.root, 1, true);
  check.height = leaf_depth.value_or(0);
  if (check.height != meta_.height || check.entries != meta_.entries) check.uniform_depth = false;

  // Sibling chain must visit the leaves in DFS order.
  if (!dfs_leaves.empty()) {
    PageId page = dfs_leaves.front();
    std::size_t i = 0;
    while (page.valid() && i < dfs_leaves.size()) {
      if (page != dfs_leaves[i]) check.leaf_chain_ok = false;
      page = header_of(store_->read(page)).sibling;
      ++i;
    }
    if (page.valid() || i != dfs_leaves.size()) check.leaf_chain_ok = false;
  }
  return check;
}

}  // namespace rdfidx

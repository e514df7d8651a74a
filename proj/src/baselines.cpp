#include "rdfidx/baselines.hpp"

#include <algorithm>
#include <map>

namespace rdfidx {

namespace {

template <std::size_t N>
std::string order_name(const std::array<Role, N>& order) {
  std::string s;
  for (Role r : order) s += role_letter(r);
  return s;
}

Role role_from_letter(char c) {
  switch (c) {
    case 'S': return Role::Subject;
    case 'P': return Role::Predicate;
    case 'O': return Role::Object;
    default: throw StorageError(std::string("bad role letter in tree name: ") + c);
  }
}

Role third_role(Role a, Role b) noexcept {
  return static_cast<Role>(3 - static_cast<int>(a) - static_cast<int>(b));
}

int role_priority(Role r) noexcept {
  switch (r) {
    case Role::Subject: return 3;
    case Role::Object: return 2;
    default: return 1;
  }
}

Triple place(Role r1, Atom a1, Role r2, Atom a2, Role r3, Atom a3) {
  std::optional<Atom> slot[3];
  slot[static_cast<int>(r1)] = std::move(a1);
  slot[static_cast<int>(r2)] = std::move(a2);
  slot[static_cast<int>(r3)] = std::move(a3);
  return Triple{std::move(*slot[0]), std::move(*slot[1]), std::move(*slot[2])};
}

Atom field_atom(std::string_view key, std::size_t index, std::size_t width) {
  auto field = key.substr(index * width, width);
  return Atom(field.substr(0, field.find('\0')));
}

constexpr std::array<std::array<Role, 3>, 6> kMapPreference = {{
    {Role::Predicate, Role::Subject, Role::Object},
    {Role::Subject, Role::Object, Role::Predicate},
    {Role::Object, Role::Subject, Role::Predicate},
    {Role::Subject, Role::Predicate, Role::Object},
    {Role::Predicate, Role::Object, Role::Subject},
    {Role::Object, Role::Predicate, Role::Subject},
}};

std::size_t preference_rank(const std::array<Role, 3>& order) {
  return static_cast<std::size_t>(
      std::find(kMapPreference.begin(), kMapPreference.end(), order) - kMapPreference.begin());
}

template <std::size_t N>
std::size_t covered_prefix(const std::array<Role, N>& order, const Sap& sap) {
  std::size_t n = 0;
  while (n < N && sap.at(order[n]).is_constant()) ++n;
  return n;
}

}  // namespace

// ---------------------------------------------------------------------------
// MAP

MapIndex::MapIndex(std::unique_ptr<PageStore> store, std::vector<Slot> trees, std::uint32_t width)
    : store_(std::move(store)), trees_(std::move(trees)), width_(width) {}

MapIndex MapIndex::build(const Graph& g, PageStore store, const IndexOptions& options) {
  const std::uint32_t width = resolve_atom_width(g, options);
  auto owned = std::make_unique<PageStore>(std::move(store));
  std::vector<Order> orders = {kMapPreference[1], kMapPreference[0], kMapPreference[2]};
  if (options.all_orders) {
    orders.insert(orders.end(), kMapPreference.begin() + 3, kMapPreference.end());
  }
  std::vector<Slot> slots;
  for (const Order& order : orders) {
    std::vector<std::string> keys;
    keys.reserve(g.size());
    for (const auto& t : g) {
      keys.push_back(composite_key({&t.at(order[0]), &t.at(order[1]), &t.at(order[2])}, width));
    }
    std::sort(keys.begin(), keys.end());
    BTree::BulkLoader loader(*owned, TreeConfig{order_name(order), 3 * width, 0});
    for (const auto& k : keys) loader.add(k, {});
    slots.push_back({order, std::make_unique<BTree>(loader.finish())});
  }
  owned->flush();
  return MapIndex(std::move(owned), std::move(slots), width);
}

MapIndex MapIndex::open(PageStore store) {
  auto owned = std::make_unique<PageStore>(std::move(store));
  std::vector<Slot> slots;
  std::uint32_t width = 0;
  for (const auto& meta : owned->trees()) {
    if (meta.name.size() != 3) continue;
    Order order{role_from_letter(meta.name[0]), role_from_letter(meta.name[1]),
                role_from_letter(meta.name[2])};
    width = meta.key_width / 3;
    slots.push_back({order, std::make_unique<BTree>(BTree::open(*owned, meta.name))});
  }
  if (slots.empty()) throw StorageError("page file holds no MAP trees");
  return MapIndex(std::move(owned), std::move(slots), width);
}

std::vector<std::string> MapIndex::tree_names() const {
  std::vector<std::string> out;
  for (const auto& s : trees_) out.push_back(order_name(s.order));
  return out;
}

BTree& MapIndex::tree(std::string_view name) {
  for (auto& s : trees_) {
    if (order_name(s.order) == name) return *s.tree;
  }
  throw std::out_of_range("no MAP tree named " + std::string(name));
}

std::pair<std::size_t, std::size_t> MapIndex::choose_tree(const Sap& sap) const {
  std::size_t best = 0;
  std::size_t best_cover = 0;
  for (std::size_t i = 0; i < trees_.size(); ++i) {
    const std::size_t cover = covered_prefix(trees_[i].order, sap);
    bool better = i == 0 || cover > best_cover;
    if (!better && cover == best_cover) {
      const auto li = trees_[i].tree->meta().leaves;
      const auto lb = trees_[best].tree->meta().leaves;
      if (cover == 0 && li != lb) {
        better = li < lb;
      } else {
        better = preference_rank(trees_[i].order) < preference_rank(trees_[best].order);
      }
    }
    if (better) {
      best = i;
      best_cover = cover;
    }
  }
  return {best, best_cover};
}

Triple MapIndex::decode_key(const Order& order, std::string_view key) const {
  return place(order[0], field_atom(key, 0, width_), order[1], field_atom(key, 1, width_), order[2],
               field_atom(key, 2, width_));
}

std::vector<Triple> MapIndex::candidates(const Sap& sap, PlanStep& step) {
  for (Role r : sap.bound_roles()) {
    if (sap.at(r).constant().size() > width_) return {};  // cannot be in any key
  }
  const auto [index, cover] = choose_tree(sap);
  Slot& slot = trees_[index];
  step.descents = 1;
  std::vector<Triple> out;
  if (cover == 3) {
    const std::string key = composite_key({&sap.at(slot.order[0]).constant(), &sap.at(slot.order[1]).constant(),
                                           &sap.at(slot.order[2]).constant()},
                                          width_);
    step.access = "tree=" + order_name(slot.order) + " lookup";
    if (slot.tree->lookup(key)) out.push_back(decode_key(slot.order, key));
    return out;
  }
  std::string prefix;
  for (std::size_t i = 0; i < cover; ++i) prefix += pad_key(sap.at(slot.order[i]).constant().view(), width_);
  step.access = "tree=" + order_name(slot.order) + " prefix=" + order_name(slot.order).substr(0, cover);
  if (cover == 0) {
    step.kind = StepKind::Scan;
    step.full_scan = true;
  }
  slot.tree->scan(prefix, [&](std::string_view key, std::string_view) {
    out.push_back(decode_key(slot.order, key));
    return true;
  });
  return out;
}

// ---------------------------------------------------------------------------
// HexTree

HexIndex::HexIndex(std::unique_ptr<PageStore> store, std::vector<Slot> trees, std::uint32_t width)
    : store_(std::move(store)), trees_(std::move(trees)), width_(width) {}

HexIndex HexIndex::build(const Graph& g, PageStore store, const IndexOptions& options) {
  const std::uint32_t width = resolve_atom_width(g, options);
  auto owned = std::make_unique<PageStore>(std::move(store));
  std::vector<Order> orders = {Order{Role::Subject, Role::Object}, Order{Role::Predicate, Role::Subject},
                               Order{Role::Object, Role::Subject}};
  if (options.all_orders) {
    orders.push_back({Role::Subject, Role::Predicate});
    orders.push_back({Role::Object, Role::Predicate});
    orders.push_back({Role::Predicate, Role::Object});
  }

  // One payload per unordered role pair, shared by both orders of that pair.
  using PairKey = std::pair<Atom, Atom>;
  std::map<std::pair<Role, Role>, std::map<PairKey, PayloadRef>> shared;
  for (const Order& order : orders) {
    const Role lo = std::min(order[0], order[1]);
    const Role hi = std::max(order[0], order[1]);
    if (shared.contains({lo, hi})) continue;
    const Role third = third_role(lo, hi);
    std::map<PairKey, std::vector<Atom>> lists;
    for (const auto& t : g) lists[{t.at(lo), t.at(hi)}].push_back(t.at(third));
    auto& refs = shared[{lo, hi}];
    for (auto& [key, atoms] : lists) {
      std::sort(atoms.begin(), atoms.end());
      PayloadWriter writer(width);
      writer.u32(static_cast<std::uint32_t>(atoms.size()));
      for (const auto& a : atoms) writer.atom(a);
      refs.emplace(key, write_payload(*owned, writer.bytes()));
    }
  }

  std::vector<Slot> slots;
  for (const Order& order : orders) {
    const Role lo = std::min(order[0], order[1]);
    const Role hi = std::max(order[0], order[1]);
    const bool swapped = order[0] != lo;
    std::vector<std::pair<std::string, PayloadRef>> entries;
    for (const auto& [key, ref] : shared.at({lo, hi})) {
      const Atom& first = swapped ? key.second : key.first;
      const Atom& second = swapped ? key.first : key.second;
      entries.emplace_back(composite_key({&first, &second}, width), ref);
    }
    std::sort(entries.begin(), entries.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    BTree::BulkLoader loader(*owned, TreeConfig{order_name(order), 2 * width, PayloadRef::kEncodedSize});
    for (const auto& [key, ref] : entries) loader.add(key, ref.encode());
    slots.push_back({order, std::make_unique<BTree>(loader.finish())});
  }
  owned->flush();
  return HexIndex(std::move(owned), std::move(slots), width);
}

HexIndex HexIndex::open(PageStore store) {
  auto owned = std::make_unique<PageStore>(std::move(store));
  std::vector<Slot> slots;
  std::uint32_t width = 0;
  for (const auto& meta : owned->trees()) {
    if (meta.name.size() != 2) continue;
    Order order{role_from_letter(meta.name[0]), role_from_letter(meta.name[1])};
    width = meta.key_width / 2;
    slots.push_back({order, std::make_unique<BTree>(BTree::open(*owned, meta.name))});
  }
  if (slots.empty()) throw StorageError("page file holds no HexTree trees");
  return HexIndex(std::move(owned), std::move(slots), width);
}

std::vector<std::string> HexIndex::tree_names() const {
  std::vector<std::string> out;
  for (const auto& s : trees_) out.push_back(order_name(s.order));
  return out;
}

BTree& HexIndex::tree(std::string_view name) {
  for (auto& s : trees_) {
    if (order_name(s.order) == name) return *s.tree;
  }
  throw std::out_of_range("no HexTree tree named " + std::string(name));
}

std::vector<Atom> HexIndex::read_list(const PayloadRef& ref) {
  const auto bytes = read_payload(*store_, ref);
  PayloadReader reader(bytes, width_);
  const auto n = reader.u32();
  std::vector<Atom> out;
  out.reserve(n);
  for (std::uint32_t i = 0; i < n; ++i) out.push_back(reader.atom());
  return out;
}

std::optional<PayloadRef> HexIndex::payload_ref(std::string_view name, const Atom& first, const Atom& second) {
  if (first.size() > width_ || second.size() > width_) return std::nullopt;
  auto value = tree(name).lookup(composite_key({&first, &second}, width_));
  if (!value) return std::nullopt;
  return PayloadRef::decode(*value);
}

std::optional<std::vector<Atom>> HexIndex::payload(std::string_view name, const Atom& first,
                                                   const Atom& second) {
  auto ref = payload_ref(name, first, second);
  if (!ref) return std::nullopt;
  return read_list(*ref);
}

std::pair<std::size_t, std::size_t> HexIndex::choose_tree(const Sap& sap) const {
  std::size_t best = 0;
  std::size_t best_cover = 0;
  auto rank = [&](std::size_t i) {
    const auto& o = trees_[i].order;
    return std::pair(role_priority(o[0]), role_priority(o[1]));
  };
  for (std::size_t i = 0; i < trees_.size(); ++i) {
    const std::size_t cover = covered_prefix(trees_[i].order, sap);
    bool better = i == 0 || cover > best_cover;
    if (!better && cover == best_cover) {
      const auto li = trees_[i].tree->meta().leaves;
      const auto lb = trees_[best].tree->meta().leaves;
      if (cover == 0 && li != lb) {
        better = li < lb;
      } else {
        better = rank(i) > rank(best);
      }
    }
    if (better) {
      best = i;
      best_cover = cover;
    }
  }
  return {best, best_cover};
}

std::vector<Triple> HexIndex::candidates(const Sap& sap, PlanStep& step) {
  for (Role r : sap.bound_roles()) {
    if (sap.at(r).constant().size() > width_) return {};
  }
  const auto [index, cover] = choose_tree(sap);
  Slot& slot = trees_[index];
  const Role r1 = slot.order[0];
  const Role r2 = slot.order[1];
  const Role r3 = third_role(r1, r2);
  step.descents = 1;
  std::vector<Triple> out;
  if (cover == 2) {
    step.access = "tree=" + order_name(slot.order) + " lookup+payload";
    const Atom& a1 = sap.at(r1).constant();
    const Atom& a2 = sap.at(r2).constant();
    auto value = slot.tree->lookup(composite_key({&a1, &a2}, width_));
    if (!value) return out;
    for (auto& a3 : read_list(PayloadRef::decode(*value))) out.push_back(place(r1, a1, r2, a2, r3, std::move(a3)));
    return out;
  }
  std::string prefix;
  if (cover == 1) prefix = pad_key(sap.at(r1).constant().view(), width_);
  step.access = "tree=" + order_name(slot.order) + " prefix=" + order_name(slot.order).substr(0, cover) + " +payloads";
  if (cover == 0) {
    step.kind = StepKind::Scan;
    step.full_scan = true;
  }
  std::vector<std::pair<std::string, PayloadRef>> hits;
  slot.tree->scan(prefix, [&](std::string_view key, std::string_view value) {
    hits.emplace_back(std::string(key), PayloadRef::decode(value));
    return true;
  });
  for (const auto& [key, ref] : hits) {
    const Atom a1 = field_atom(key, 0, width_);
    const Atom a2 = field_atom(key, 1, width_);
    for (auto& a3 : read_list(ref)) out.push_back(place(r1, a1, r2, a2, r3, std::move(a3)));
  }
  return out;
}

}  // namespace rdfidx

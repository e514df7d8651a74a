#include "rdfidx/index.hpp"

#include "rdfidx/baselines.hpp"
#include "rdfidx/triplet.hpp"

namespace rdfidx {

std::string_view to_string(Family f) noexcept {
  switch (f) {
    case Family::TripleT: return "triplet";
    case Family::Map: return "map";
    default: return "hex";
  }
}

Family parse_family(std::string_view name) {
  if (name == "triplet" || name == "TripleT") return Family::TripleT;
  if (name == "map" || name == "MAP") return Family::Map;
  if (name == "hex" || name == "hextree" || name == "HexTree") return Family::Hex;
  throw std::invalid_argument("unknown index family '" + std::string(name) + "'");
}

std::uint32_t resolve_atom_width(const Graph& g, const IndexOptions& options) {
  const std::size_t longest = g.max_atom_len();
  for (const auto& t : g) {
    for (Role r : kRoles) {
      if (t.at(r).view().find('\0') != std::string_view::npos) {
        throw std::invalid_argument("atoms must not contain 0x00 (clean the data first)");
      }
    }
  }
  if (options.atom_width == 0) return static_cast<std::uint32_t>(std::max<std::size_t>(longest, 1));
  if (longest > options.atom_width) {
    throw std::invalid_argument("atom of " + std::to_string(longest) + " bytes exceeds atom width " +
                                std::to_string(options.atom_width) + " (truncate during ingest)");
  }
  return options.atom_width;
}

BindingSet TripleIndex::eval_sap(const Sap& sap) {
  QueryPlan plan;
  auto rels = access(Bgp({sap}), plan);
  return rels.front().to_binding_set();
}

std::vector<Relation> TripleIndex::access(const Bgp& bgp, QueryPlan& plan) {
  std::vector<Relation> out;
  for (std::size_t i = 0; i < bgp.size(); ++i) {
    PlanStep step;
    step.saps = {i};
    const auto before = store().stats().reads;
    out.push_back(Relation::from_matches(bgp[i], candidates(bgp[i], step)));
    step.reads = store().stats().reads - before;
    step.rows = out.back().rows.size();
    plan.steps.push_back(std::move(step));
  }
  return out;
}

std::unique_ptr<TripleIndex> build_index(Family family, const Graph& g, PageStore store,
                                         const IndexOptions& options) {
  switch (family) {
    case Family::TripleT:
      return std::make_unique<TripletIndex>(TripletIndex::build(g, std::move(store), options));
    case Family::Map:
      return std::make_unique<MapIndex>(MapIndex::build(g, std::move(store), options));
    default:
      return std::make_unique<HexIndex>(HexIndex::build(g, std::move(store), options));
  }
}

std::unique_ptr<TripleIndex> open_index(PageStore store) {
  if (store.tree(TripletIndex::kTreeName)) {
    return std::make_unique<TripletIndex>(TripletIndex::open(std::move(store)));
  }
  for (const auto& meta : store.trees()) {
    if (meta.name.size() == 3) return std::make_unique<MapIndex>(MapIndex::open(std::move(store)));
    if (meta.name.size() == 2) return std::make_unique<HexIndex>(HexIndex::open(std::move(store)));
  }
  throw StorageError("page file holds no recognizable index");
}

}  // namespace rdfidx

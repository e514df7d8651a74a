#include "rdfidx/triplet.hpp"

#include <algorithm>
#include <map>
#include <tuple>

namespace rdfidx {

namespace {

// Companion roles stored in each bucket, in stored sort order.
std::pair<Role, Role> bucket_roles(Role r) noexcept {
  switch (r) {
    case Role::Subject: return {Role::Object, Role::Predicate};
    case Role::Predicate: return {Role::Subject, Role::Object};
    default: return {Role::Subject, Role::Predicate};
  }
}

int role_priority(Role r) noexcept {
  switch (r) {
    case Role::Subject: return 3;
    case Role::Object: return 2;
    default: return 1;
  }
}

Triple assemble(const Atom& key, Role r, const AtomPair& pair) {
  switch (r) {
    case Role::Subject: return Triple{key, pair.second, pair.first};
    case Role::Predicate: return Triple{pair.first, key, pair.second};
    default: return Triple{pair.first, pair.second, key};
  }
}

std::string role_list(const std::vector<Role>& roles) {
  std::string out;
  for (Role r : roles) {
    if (!out.empty()) out += ',';
    out += role_letter(r);
  }
  return out;
}

void write_bucket(PayloadWriter& w, const std::vector<AtomPair>& bucket) {
  w.u32(static_cast<std::uint32_t>(bucket.size()));
  for (const auto& [a, b] : bucket) {
    w.atom(a);
    w.atom(b);
  }
}

std::vector<AtomPair> read_bucket(PayloadReader& r) {
  const auto n = r.u32();
  std::vector<AtomPair> out;
  out.reserve(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    Atom a = r.atom();
    out.emplace_back(std::move(a), r.atom());
  }
  return out;
}

std::vector<AtomPair> swapped_sorted(const std::vector<AtomPair>& bucket) {
  std::vector<AtomPair> out;
  out.reserve(bucket.size());
  for (const auto& [a, b] : bucket) out.emplace_back(b, a);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

const std::vector<AtomPair>& Payload::bucket(Role r) const noexcept {
  switch (r) {
    case Role::Subject: return s_bucket;
    case Role::Predicate: return p_bucket;
    default: return o_bucket;
  }
}

Role Payload::leading_role(Role r) noexcept { return bucket_roles(r).first; }

std::vector<Triple> Payload::triples(const Atom& key, Role r) const {
  std::vector<Triple> out;
  out.reserve(bucket(r).size());
  for (const auto& pair : bucket(r)) out.push_back(assemble(key, r, pair));
  return out;
}

Payload decode_payload(std::span<const std::uint8_t> bytes, std::uint32_t atom_width) {
  PayloadReader reader(bytes, atom_width);
  Payload p;
  p.s_bucket = read_bucket(reader);
  p.p_bucket = read_bucket(reader);
  p.o_bucket = read_bucket(reader);
  // Symmetric orders, when materialized, follow; queries resort in memory
  // at no metered cost, so they are not needed for decoding.
  return p;
}

TripletIndex::TripletIndex(std::unique_ptr<PageStore> store, BTree tree)
    : store_(std::move(store)),
      tree_(std::make_unique<BTree>(std::move(tree))),
      width_(tree_->config().key_width) {}

TripletIndex TripletIndex::build(const Graph& g, PageStore store, const IndexOptions& options) {
  const std::uint32_t width = resolve_atom_width(g, options);
  auto owned = std::make_unique<PageStore>(std::move(store));

  // Three role-major views of the graph, each in the order its bucket is stored.
  std::vector<const Triple*> by_s, by_p, by_o;
  by_s.reserve(g.size());
  for (const auto& t : g) by_s.push_back(&t);
  by_p = by_s;
  by_o = by_s;
  std::sort(by_s.begin(), by_s.end(), [](const Triple* a, const Triple* b) {
    return std::tie(a->s, a->o, a->p) < std::tie(b->s, b->o, b->p);
  });
  std::sort(by_p.begin(), by_p.end(), [](const Triple* a, const Triple* b) {
    return std::tie(a->p, a->s, a->o) < std::tie(b->p, b->s, b->o);
  });
  std::sort(by_o.begin(), by_o.end(), [](const Triple* a, const Triple* b) {
    return std::tie(a->o, a->s, a->p) < std::tie(b->o, b->s, b->p);
  });

  BTree::BulkLoader loader(*owned, TreeConfig{kTreeName, width, PayloadRef::kEncodedSize});
  std::size_t is = 0, ip = 0, io = 0;
  for (const Atom& k : g.atoms()) {
    Payload payload;
    for (; is < by_s.size() && by_s[is]->s == k; ++is) payload.s_bucket.emplace_back(by_s[is]->o, by_s[is]->p);
    for (; ip < by_p.size() && by_p[ip]->p == k; ++ip) payload.p_bucket.emplace_back(by_p[ip]->s, by_p[ip]->o);
    for (; io < by_o.size() && by_o[io]->o == k; ++io) payload.o_bucket.emplace_back(by_o[io]->s, by_o[io]->p);

    PayloadWriter writer(width);
    write_bucket(writer, payload.s_bucket);
    write_bucket(writer, payload.p_bucket);
    write_bucket(writer, payload.o_bucket);
    if (options.all_orders) {
      write_bucket(writer, swapped_sorted(payload.s_bucket));
      write_bucket(writer, swapped_sorted(payload.p_bucket));
      write_bucket(writer, swapped_sorted(payload.o_bucket));
    }
    const PayloadRef ref = write_payload(*owned, writer.bytes());
    loader.add(pad_key(k.view(), width), ref.encode());
  }
  BTree tree = loader.finish();
  owned->flush();
  return TripletIndex(std::move(owned), std::move(tree));
}

TripletIndex TripletIndex::open(PageStore store) {
  auto owned = std::make_unique<PageStore>(std::move(store));
  BTree tree = BTree::open(*owned, kTreeName);
  return TripletIndex(std::move(owned), std::move(tree));
}

std::optional<PayloadRef> TripletIndex::payload_ref(const Atom& k) {
  if (k.size() > width_) return std::nullopt;
  auto value = tree_->lookup(pad_key(k.view(), width_));
  if (!value) return std::nullopt;
  return PayloadRef::decode(*value);
}

std::optional<Payload> TripletIndex::payload(const Atom& k) {
  auto ref = payload_ref(k);
  if (!ref) return std::nullopt;
  return decode_payload(read_payload(*store_, *ref), width_);
}

std::optional<Role> TripletIndex::preferred_key_role(const Sap& sap) {
  std::optional<Role> best;
  auto score = [&](Role r) {
    const bool boundable = sap.at(Payload::leading_role(r)).is_constant();
    return std::pair(boundable ? 1 : 0, role_priority(r));
  };
  for (Role r : sap.bound_roles()) {
    if (!best || score(r) > score(*best)) best = r;
  }
  return best;
}

std::vector<Triple> TripletIndex::bucket_candidates(const Payload& p, const Atom& key, Role r,
                                                    const Sap& sap) {
  const auto& bucket = p.bucket(r);
  const Term& lead = sap.at(Payload::leading_role(r));
  auto first = bucket.begin();
  auto last = bucket.end();
  if (lead.is_constant()) {
    // Stored order lets the bound companion narrow the bucket by binary search.
    const Atom& a = lead.constant();
    first = std::lower_bound(bucket.begin(), bucket.end(), a,
                             [](const AtomPair& pr, const Atom& x) { return pr.first < x; });
    last = std::upper_bound(first, bucket.end(), a,
                            [](const Atom& x, const AtomPair& pr) { return x < pr.first; });
  }
  std::vector<Triple> out;
  out.reserve(static_cast<std::size_t>(last - first));
  for (auto it = first; it != last; ++it) out.push_back(assemble(key, r, *it));
  return out;
}

std::vector<Triple> TripletIndex::full_scan(PlanStep& step) {
  step.kind = StepKind::Scan;
  step.full_scan = true;
  step.descents = 1;
  step.access = "key=* buckets=S";
  std::vector<std::pair<Atom, PayloadRef>> refs;
  tree_->scan("", [&](std::string_view key, std::string_view value) {
    refs.emplace_back(Atom(key.substr(0, key.find('\0'))), PayloadRef::decode(value));
    return true;
  });
  std::vector<Triple> out;
  for (const auto& [key, ref] : refs) {
    const Payload p = decode_payload(read_payload(*store_, ref), width_);
    auto ts = p.triples(key, Role::Subject);
    out.insert(out.end(), std::make_move_iterator(ts.begin()), std::make_move_iterator(ts.end()));
  }
  return out;
}

std::vector<Triple> TripletIndex::candidates(const Sap& sap, PlanStep& step) {
  const auto role = preferred_key_role(sap);
  if (!role) return full_scan(step);
  const Atom& key = sap.at(*role).constant();
  step.access = "key=" + key.bytes() + " buckets=" + role_letter(*role);
  step.descents = 1;
  auto p = payload(key);
  if (!p) return {};
  return bucket_candidates(*p, key, *role, sap);
}

std::vector<Relation> TripletIndex::access(const Bgp& bgp, QueryPlan& plan) {
  const auto& saps = bgp.saps();
  // How many SAPs mention each constant atom.
  std::map<Atom, std::size_t> shared;
  for (const auto& sap : saps) {
    std::vector<Atom> seen;
    for (Role r : sap.bound_roles()) {
      const Atom& a = sap.at(r).constant();
      if (std::find(seen.begin(), seen.end(), a) == seen.end()) seen.push_back(a);
    }
    for (auto& a : seen) ++shared[a];
  }

  // Key atom + bucket role per SAP: atoms shared with other SAPs first, so an
  // atom-induced join is served by one payload fetch.
  std::vector<std::optional<Role>> key_role(saps.size());
  for (std::size_t i = 0; i < saps.size(); ++i) {
    const Sap& sap = saps[i];
    std::optional<Role> best;
    for (Role r : sap.bound_roles()) {
      auto rank = [&](Role x) {
        const bool boundable = sap.at(Payload::leading_role(x)).is_constant();
        return std::tuple(shared[sap.at(x).constant()], boundable ? 1 : 0, role_priority(x));
      };
      if (!best || rank(r) > rank(*best)) best = r;
    }
    key_role[i] = best;
  }

  std::vector<Relation> out(saps.size());
  std::vector<bool> done(saps.size(), false);
  for (std::size_t i = 0; i < saps.size(); ++i) {
    if (done[i]) continue;
    PlanStep step;
    const auto before = store_->stats().reads;
    if (!key_role[i]) {
      step.saps = {i};
      out[i] = Relation::from_matches(saps[i], full_scan(step));
      done[i] = true;
    } else {
      const Atom key = saps[i].at(*key_role[i]).constant();
      std::vector<std::size_t> group;
      std::vector<Role> roles;
      for (std::size_t j = i; j < saps.size(); ++j) {
        if (!done[j] && key_role[j] && saps[j].at(*key_role[j]).constant() == key) {
          group.push_back(j);
          roles.push_back(*key_role[j]);
        }
      }
      step.kind = group.size() > 1 ? StepKind::SelfJoin : StepKind::SapLookup;
      step.saps = group;
      step.descents = 1;
      step.access = "key=" + key.bytes() + " buckets=" + role_list(roles);
      const auto p = payload(key);
      for (std::size_t g = 0; g < group.size(); ++g) {
        const Sap& sap = saps[group[g]];
        out[group[g]] = Relation::from_matches(
            sap, p ? bucket_candidates(*p, key, roles[g], sap) : std::vector<Triple>{});
        done[group[g]] = true;
      }
    }
    step.reads = store_->stats().reads - before;
    for (std::size_t j : step.saps) step.rows += out[j].rows.size();
    plan.steps.push_back(std::move(step));
  }
  return out;
}

BindingSet TripletIndex::self_join(const Atom& k, const Sap& a, const Sap& b) {
  auto role_of = [&](const Sap& sap) -> std::optional<Role> {
    for (Role r : kRoles) {
      if (sap.at(r).is_constant() && sap.at(r).constant() == k) return r;
    }
    return std::nullopt;
  };
  const auto r1 = role_of(a);
  const auto r2 = role_of(b);
  if (!r1 || !r2) throw std::invalid_argument("self_join atom must be a constant of both SAPs");
  if (*r1 == *r2) throw std::invalid_argument("self_join requires the atom in different roles");

  Relation left{a.variables(), {}};
  Relation right{b.variables(), {}};
  if (auto p = payload(k)) {
    left = Relation::from_matches(a, bucket_candidates(*p, k, *r1, a));
    right = Relation::from_matches(b, bucket_candidates(*p, k, *r2, b));
  }
  Relation joined = merge_join(std::move(left), std::move(right));
  return joined.to_binding_set();
}

}  // namespace rdfidx

#include "rdfidx/core.hpp"

#include <algorithm>
#include <numeric>

namespace rdfidx {

Atom::Atom(std::string bytes, std::size_t max_len) : bytes_(std::move(bytes)) {
  if (bytes_.empty()) throw std::invalid_argument("atom must be non-empty");
  if (bytes_.size() > max_len) {
    throw std::invalid_argument("atom of " + std::to_string(bytes_.size()) +
                                " bytes exceeds max_atom_len " + std::to_string(max_len));
  }
}

char role_letter(Role r) noexcept {
  switch (r) {
    case Role::Subject: return 'S';
    case Role::Predicate: return 'P';
    default: return 'O';
  }
}

Triple make_triple(std::string_view s, std::string_view p, std::string_view o) {
  return Triple{Atom(s), Atom(p), Atom(o)};
}

Graph::Graph(std::vector<Triple> triples) : triples_(std::move(triples)) {
  std::sort(triples_.begin(), triples_.end());
  triples_.erase(std::unique(triples_.begin(), triples_.end()), triples_.end());
}

bool Graph::insert(Triple t) {
  auto it = std::lower_bound(triples_.begin(), triples_.end(), t);
  if (it != triples_.end() && *it == t) return false;
  triples_.insert(it, std::move(t));
  return true;
}

bool Graph::contains(const Triple& t) const {
  return std::binary_search(triples_.begin(), triples_.end(), t);
}

std::vector<Atom> Graph::atoms() const {
  std::vector<Atom> out;
  out.reserve(triples_.size());
  for (const auto& t : triples_) {
    out.push_back(t.s);
    out.push_back(t.p);
    out.push_back(t.o);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::size_t Graph::max_atom_len() const {
  std::size_t m = 0;
  for (const auto& t : triples_) m = std::max({m, t.s.size(), t.p.size(), t.o.size()});
  return m;
}

Term::Term(Variable v) : value_(std::move(v)) {
  if (std::get<Variable>(value_).name.empty()) {
    throw std::invalid_argument("variable name must be non-empty");
  }
}

Term term(std::string_view text) {
  if (!text.empty() && text.front() == '?') return Term::var(std::string(text.substr(1)));
  return Term(Atom(text));
}

std::size_t Sap::variable_count() const noexcept {
  return static_cast<std::size_t>(s.is_variable()) + p.is_variable() + o.is_variable();
}

std::vector<std::string> Sap::variables() const {
  std::vector<std::string> out;
  for (Role r : kRoles) {
    const Term& t = at(r);
    if (t.is_variable() && std::find(out.begin(), out.end(), t.var_name()) == out.end()) {
      out.push_back(t.var_name());
    }
  }
  return out;
}

std::vector<Role> Sap::bound_roles() const {
  std::vector<Role> out;
  for (Role r : kRoles) {
    if (at(r).is_constant()) out.push_back(r);
  }
  return out;
}

Sap make_sap(std::string_view s, std::string_view p, std::string_view o) {
  return Sap{term(s), term(p), term(o)};
}

Sap sap_of(const Triple& t) { return Sap{t.s, t.p, t.o}; }

Bgp::Bgp(std::vector<Sap> saps) : saps_(std::move(saps)) {
  if (saps_.empty()) throw std::invalid_argument("a BGP needs at least one SAP");
}

std::vector<std::string> Bgp::variables() const {
  std::vector<std::string> out;
  for (const auto& sap : saps_) {
    for (auto& v : sap.variables()) {
      if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(std::move(v));
    }
  }
  return out;
}

JoinType join_type_of(Role a, Role b) noexcept {
  const auto lo = std::min(a, b);
  const auto hi = std::max(a, b);
  if (lo == Role::Subject) {
    if (hi == Role::Subject) return JoinType::SS;
    return hi == Role::Predicate ? JoinType::SP : JoinType::SO;
  }
  if (lo == Role::Predicate) return hi == Role::Predicate ? JoinType::PP : JoinType::PO;
  return JoinType::OO;
}

std::string_view to_string(JoinType j) noexcept {
  switch (j) {
    case JoinType::SS: return "SS";
    case JoinType::SP: return "SP";
    case JoinType::SO: return "SO";
    case JoinType::PP: return "PP";
    case JoinType::PO: return "PO";
    default: return "OO";
  }
}

std::vector<JoinEdge> join_types(const Sap& a, const Sap& b) {
  std::vector<JoinEdge> out;
  for (Role ra : kRoles) {
    for (Role rb : kRoles) {
      const Term& ta = a.at(ra);
      const Term& tb = b.at(rb);
      if (ta.is_variable() && tb.is_variable() && ta.var_name() == tb.var_name()) {
        out.push_back({join_type_of(ra, rb), JoinCause::Variable, ta.var_name(), ra, rb});
      } else if (ta.is_constant() && tb.is_constant() && ta.constant() == tb.constant()) {
        out.push_back({join_type_of(ra, rb), JoinCause::Atom, ta.constant().bytes(), ra, rb});
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::optional<BindingRow> matches(const Triple& t, const Sap& sap) {
  BindingRow row;
  for (Role r : kRoles) {
    const Term& term = sap.at(r);
    const Atom& value = t.at(r);
    if (term.is_constant()) {
      if (term.constant() != value) return std::nullopt;
      continue;
    }
    auto [it, fresh] = row.try_emplace(term.var_name(), value);
    if (!fresh && it->second != value) return std::nullopt;
  }
  return row;
}

BindingSet::BindingSet(std::vector<std::string> variables) : variables_(std::move(variables)) {}

void BindingSet::insert(std::vector<Atom> row) {
  if (row.size() != variables_.size()) {
    throw std::invalid_argument("binding row width does not match variable domain");
  }
  rows_.insert(std::move(row));
}

void BindingSet::insert(const BindingRow& row) {
  if (row.size() != variables_.size()) {
    throw std::invalid_argument("binding row must bind exactly the variable domain");
  }
  std::vector<Atom> aligned;
  aligned.reserve(variables_.size());
  for (const auto& v : variables_) aligned.push_back(row.at(v));
  rows_.insert(std::move(aligned));
}

bool BindingSet::contains(const BindingRow& row) const {
  if (row.size() != variables_.size()) return false;
  std::vector<Atom> aligned;
  for (const auto& v : variables_) {
    auto it = row.find(v);
    if (it == row.end()) return false;
    aligned.push_back(it->second);
  }
  return rows_.contains(aligned);
}

std::vector<BindingRow> BindingSet::to_rows() const {
  std::vector<BindingRow> out;
  out.reserve(rows_.size());
  for (const auto& r : rows_) {
    BindingRow row;
    for (std::size_t i = 0; i < variables_.size(); ++i) row.emplace(variables_[i], r[i]);
    out.push_back(std::move(row));
  }
  return out;
}

bool operator==(const BindingSet& a, const BindingSet& b) {
  if (a.rows_.size() != b.rows_.size()) return false;
  auto va = a.variables_;
  auto vb = b.variables_;
  std::sort(va.begin(), va.end());
  std::sort(vb.begin(), vb.end());
  if (va != vb) return false;
  if (a.variables_ == b.variables_) return a.rows_ == b.rows_;
  for (const auto& row : b.to_rows()) {
    if (!a.contains(row)) return false;
  }
  return true;
}

GraphStats role_sets(const Graph& g) {
  std::set<Atom> subjects, predicates, objects;
  for (const auto& t : g) {
    subjects.insert(t.s);
    predicates.insert(t.p);
    objects.insert(t.o);
  }
  auto intersection_size = [](const std::set<Atom>& x, const std::set<Atom>& y) {
    std::size_t n = 0;
    for (const auto& a : x) n += y.contains(a);
    return n;
  };
  std::set<Atom> all = subjects;
  all.insert(predicates.begin(), predicates.end());
  all.insert(objects.begin(), objects.end());

  GraphStats st;
  st.triples = g.size();
  st.subjects = subjects.size();
  st.predicates = predicates.size();
  st.objects = objects.size();
  st.atoms = all.size();
  st.subject_object = intersection_size(subjects, objects);
  st.subject_predicate = intersection_size(subjects, predicates);
  st.predicate_object = intersection_size(predicates, objects);
  if (!all.empty()) {
    const auto total = std::accumulate(all.begin(), all.end(), std::size_t{0},
                                       [](std::size_t acc, const Atom& a) { return acc + a.size(); });
    st.mean_atom_len = static_cast<double>(total) / static_cast<double>(all.size());
  }
  return st;
}

}  // namespace rdfidx

#include "rdfidx/query.hpp"

#include <algorithm>

namespace rdfidx {

namespace {

std::size_t shared_atom_count(const Sap& a, const Sap& b) {
  std::vector<Atom> common;
  for (Role ra : a.bound_roles()) {
    const Atom& x = a.at(ra).constant();
    for (Role rb : b.bound_roles()) {
      if (b.at(rb).constant() == x && std::find(common.begin(), common.end(), x) == common.end()) {
        common.push_back(x);
      }
    }
  }
  return common.size();
}

void check_select(const Bgp& bgp, const std::vector<std::string>& select) {
  const auto vars = bgp.variables();
  for (const auto& v : select) {
    if (std::find(vars.begin(), vars.end(), v) == vars.end()) {
      throw std::invalid_argument("selected variable ?" + v + " does not occur in the pattern");
    }
  }
}

}  // namespace

QueryResult eval_bgp(TripleIndex& index, const Bgp& bgp, const std::vector<std::string>& select) {
  check_select(bgp, select);
  QueryResult result;
  result.plan.family = std::string(to_string(index.family()));
  const IoStats before = index.store().stats();

  std::vector<Relation> inputs = index.access(bgp, result.plan);
  Relation acc = std::move(inputs.front());
  for (std::size_t i = 1; i < inputs.size(); ++i) {
    PlanStep step;
    step.kind = StepKind::MergeJoin;
    for (std::size_t j = 0; j <= i; ++j) step.saps.push_back(j);
    for (const auto& v : inputs[i].vars) {
      if (std::find(acc.vars.begin(), acc.vars.end(), v) != acc.vars.end()) step.join_vars.push_back(v);
    }
    acc = merge_join(std::move(acc), std::move(inputs[i]));
    step.rows = acc.rows.size();
    result.plan.steps.push_back(std::move(step));
  }
  result.bindings = project(acc, select);

  const IoStats after = index.store().stats();
  result.cost.reads = after.reads - before.reads;
  result.cost.writes = after.writes - before.writes;
  result.cost.allocated = after.allocated;
  return result;
}

BindingSet oracle_eval(const Graph& g, const Bgp& bgp, const std::vector<std::string>& select) {
  check_select(bgp, select);
  std::vector<BindingRow> acc(1);
  for (const auto& sap : bgp.saps()) {
    std::vector<BindingRow> hits;
    for (const auto& t : g) {
      if (auto m = matches(t, sap)) hits.push_back(std::move(*m));
    }
    std::vector<BindingRow> next;
    for (const auto& row : acc) {
      for (const auto& hit : hits) {
        bool compatible = true;
        for (const auto& [var, value] : hit) {
          auto it = row.find(var);
          if (it != row.end() && it->second != value) {
            compatible = false;
            break;
          }
        }
        if (!compatible) continue;
        BindingRow merged = row;
        merged.insert(hit.begin(), hit.end());
        next.push_back(std::move(merged));
      }
    }
    acc = std::move(next);
    if (acc.empty()) break;
  }
  BindingSet out(select);
  for (const auto& row : acc) {
    std::vector<Atom> projected;
    for (const auto& v : select) projected.push_back(row.at(v));
    out.insert(std::move(projected));
  }
  return out;
}

bool conforms_k1(int scenario, const Sap& a, const Sap& b) {
  const std::size_t va = a.variable_count();
  const std::size_t vb = b.variable_count();
  const std::size_t atoms = shared_atom_count(a, b);
  auto share_single_variable = [&] {
    return va == 1 && vb == 1 && a.variables() == b.variables();
  };
  switch (scenario) {
    case 1: return va == 0 && vb == 0 && atoms == 1;
    case 2: return atoms == 1 && ((va == 1 && vb == 0) || (va == 0 && vb == 1));
    case 3: return atoms == 0 && share_single_variable();
    case 4: return atoms == 1 && share_single_variable();
    default: return false;
  }
}

QueryResult eval_k1(TripleIndex& index, int scenario, const Sap& a, const Sap& b) {
  if (scenario < 1 || scenario > 4) throw std::invalid_argument("k=1 scenario must be 1..4");
  if (!conforms_k1(scenario, a, b)) {
    throw std::invalid_argument("SAP pair does not have the shape of k=1 scenario " + std::to_string(scenario));
  }
  const Bgp bgp({a, b});
  return eval_bgp(index, bgp, bgp.variables());
}

}  // namespace rdfidx

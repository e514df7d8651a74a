#include "rdfidx/plan.hpp"

#include <algorithm>
#include <sstream>

#include <json.hpp>

namespace rdfidx {

Relation Relation::from_matches(const Sap& sap, const std::vector<Triple>& candidates) {
  Relation rel;
  rel.vars = sap.variables();
  for (const auto& t : candidates) {
    auto binding = matches(t, sap);
    if (!binding) continue;
    std::vector<Atom> row;
    row.reserve(rel.vars.size());
    for (const auto& v : rel.vars) row.push_back(binding->at(v));
    rel.rows.push_back(std::move(row));
  }
  return rel;
}

BindingSet Relation::to_binding_set() const {
  BindingSet out(vars);
  for (const auto& row : rows) out.insert(row);
  return out;
}

Relation merge_join(Relation left, Relation right) {
  std::vector<std::size_t> lcols, rcols, rextra;
  for (std::size_t j = 0; j < right.vars.size(); ++j) {
    auto it = std::find(left.vars.begin(), left.vars.end(), right.vars[j]);
    if (it != left.vars.end()) {
      lcols.push_back(static_cast<std::size_t>(it - left.vars.begin()));
      rcols.push_back(j);
    } else {
      rextra.push_back(j);
    }
  }

  Relation out;
  out.vars = left.vars;
  for (std::size_t j : rextra) out.vars.push_back(right.vars[j]);

  auto emit = [&](const std::vector<Atom>& l, const std::vector<Atom>& r) {
    std::vector<Atom> row = l;
    for (std::size_t j : rextra) row.push_back(r[j]);
    out.rows.push_back(std::move(row));
  };

  // Compares the join columns of a left row against a right row.
  auto cmp = [&](const std::vector<Atom>& l, const std::vector<Atom>& r) {
    for (std::size_t k = 0; k < lcols.size(); ++k) {
      if (auto c = l[lcols[k]] <=> r[rcols[k]]; c != 0) return c;
    }
    return std::strong_ordering::equal;
  };
  auto by_cols = [](const std::vector<std::size_t>& cols) {
    return [&cols](const std::vector<Atom>& a, const std::vector<Atom>& b) {
      for (std::size_t c : cols) {
        if (a[c] != b[c]) return a[c] < b[c];
      }
      return false;
    };
  };

  // Resorting loaded inputs happens in memory and costs no block reads.
  std::sort(left.rows.begin(), left.rows.end(), by_cols(lcols));
  std::sort(right.rows.begin(), right.rows.end(), by_cols(rcols));

  std::size_t i = 0, j = 0;
  while (i < left.rows.size() && j < right.rows.size()) {
    const auto c = cmp(left.rows[i], right.rows[j]);
    if (c < 0) {
      ++i;
    } else if (c > 0) {
      ++j;
    } else {
      std::size_t i_end = i, j_end = j;
      while (i_end < left.rows.size() && cmp(left.rows[i_end], right.rows[j]) == 0) ++i_end;
      while (j_end < right.rows.size() && cmp(left.rows[i], right.rows[j_end]) == 0) ++j_end;
      for (std::size_t a = i; a < i_end; ++a) {
        for (std::size_t b = j; b < j_end; ++b) emit(left.rows[a], right.rows[b]);
      }
      i = i_end;
      j = j_end;
    }
  }
  return out;
}

BindingSet project(const Relation& rel, const std::vector<std::string>& select) {
  std::vector<std::size_t> cols;
  for (const auto& v : select) {
    auto it = std::find(rel.vars.begin(), rel.vars.end(), v);
    if (it == rel.vars.end()) throw std::invalid_argument("projection variable ?" + v + " is not bound");
    cols.push_back(static_cast<std::size_t>(it - rel.vars.begin()));
  }
  BindingSet out(select);
  for (const auto& row : rel.rows) {
    std::vector<Atom> projected;
    projected.reserve(cols.size());
    for (std::size_t c : cols) projected.push_back(row[c]);
    out.insert(std::move(projected));
  }
  return out;
}

std::string_view to_string(StepKind k) noexcept {
  switch (k) {
    case StepKind::SapLookup: return "SapLookup";
    case StepKind::SelfJoin: return "SelfJoin";
    case StepKind::Scan: return "Scan";
    default: return "MergeJoin";
  }
}

std::uint64_t QueryPlan::total_reads() const {
  std::uint64_t n = 0;
  for (const auto& s : steps) n += s.reads;
  return n;
}

std::string QueryPlan::to_text() const {
  std::ostringstream os;
  os << family << " plan, " << total_reads() << " block reads\n";
  for (const auto& s : steps) {
    os << "  " << to_string(s.kind) << " saps=[";
    for (std::size_t i = 0; i < s.saps.size(); ++i) os << (i ? "," : "") << s.saps[i] + 1;
    os << "]";
    if (!s.access.empty()) os << ' ' << s.access;
    if (!s.join_vars.empty()) {
      os << " on";
      for (const auto& v : s.join_vars) os << " ?" << v;
    }
    if (s.full_scan) os << " (full scan)";
    os << " descents=" << s.descents << " reads=" << s.reads << " rows=" << s.rows << '\n';
  }
  return os.str();
}

std::string QueryPlan::to_json() const {
  nlohmann::json j;
  j["family"] = family;
  j["reads"] = total_reads();
  j["steps"] = nlohmann::json::array();
  for (const auto& s : steps) {
    nlohmann::json step;
    step["op"] = std::string(to_string(s.kind));
    std::vector<std::size_t> saps;
    for (auto i : s.saps) saps.push_back(i + 1);
    step["saps"] = saps;
    step["access"] = s.access;
    step["join_vars"] = s.join_vars;
    step["descents"] = s.descents;
    step["reads"] = s.reads;
    step["rows"] = s.rows;
    step["full_scan"] = s.full_scan;
    j["steps"].push_back(std::move(step));
  }
  return j.dump(2, ' ', false, nlohmann::json::error_handler_t::replace);
}

}  // namespace rdfidx

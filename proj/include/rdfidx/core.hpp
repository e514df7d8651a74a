#pragma once

// Domain vocabulary shared by every module: atoms, triples, graphs, access
// patterns, join classification and variable bindings.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace rdfidx {

inline constexpr std::size_t kUnboundedAtomLen = static_cast<std::size_t>(-1);

/// An opaque, non-empty byte string naming a subject, predicate or object.
/// Ordering is bytewise lexicographic (unsigned), which is also the order of
/// the zero-padded fixed-width keys built from atoms.
class Atom {
 public:
  explicit Atom(std::string bytes, std::size_t max_len = kUnboundedAtomLen);
  explicit Atom(std::string_view bytes, std::size_t max_len = kUnboundedAtomLen)
      : Atom(std::string(bytes), max_len) {}
  explicit Atom(const char* bytes, std::size_t max_len = kUnboundedAtomLen)
      : Atom(std::string(bytes), max_len) {}

  const std::string& bytes() const noexcept { return bytes_; }
  std::string_view view() const noexcept { return bytes_; }
  std::size_t size() const noexcept { return bytes_.size(); }

  friend bool operator==(const Atom&, const Atom&) = default;
  friend std::strong_ordering operator<=>(const Atom& a, const Atom& b) noexcept {
    const int c = a.bytes_.compare(b.bytes_);
    return c < 0 ? std::strong_ordering::less
                 : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
  }

 private:
  std::string bytes_;
};

enum class Role : std::uint8_t { Subject = 0, Predicate = 1, Object = 2 };

inline constexpr Role kRoles[] = {Role::Subject, Role::Predicate, Role::Object};

char role_letter(Role r) noexcept;

struct Triple {
  Atom s;
  Atom p;
  Atom o;

  const Atom& at(Role r) const noexcept {
    switch (r) {
      case Role::Subject: return s;
      case Role::Predicate: return p;
      default: return o;
    }
  }

  friend bool operator==(const Triple&, const Triple&) = default;
  friend std::strong_ordering operator<=>(const Triple&, const Triple&) = default;
};

Triple make_triple(std::string_view s, std::string_view p, std::string_view o);

/// A finite set of triples, held sorted in SPO order without duplicates.
class Graph {
 public:
  Graph() = default;
  explicit Graph(std::vector<Triple> triples);

  /// Returns false when the triple was already present.
  bool insert(Triple t);
  bool contains(const Triple& t) const;

  std::size_t size() const noexcept { return triples_.size(); }
  bool empty() const noexcept { return triples_.empty(); }
  const std::vector<Triple>& triples() const noexcept { return triples_; }
  auto begin() const noexcept { return triples_.begin(); }
  auto end() const noexcept { return triples_.end(); }

  /// Sorted, distinct atoms of A(G).
  std::vector<Atom> atoms() const;
  std::size_t max_atom_len() const;

  friend bool operator==(const Graph&, const Graph&) = default;

 private:
  std::vector<Triple> triples_;
};

struct Variable {
  std::string name;  // without the leading '?'
  friend bool operator==(const Variable&, const Variable&) = default;
  friend auto operator<=>(const Variable&, const Variable&) = default;
};

/// Either a constant atom or a named variable.
class Term {
 public:
  Term(Atom a) : value_(std::move(a)) {}  // NOLINT(google-explicit-constructor)
  Term(Variable v);                       // NOLINT(google-explicit-constructor)

  static Term var(std::string name) { return Term(Variable{std::move(name)}); }
  static Term atom(std::string_view bytes) { return Term(Atom(bytes)); }

  bool is_variable() const noexcept { return std::holds_alternative<Variable>(value_); }
  bool is_constant() const noexcept { return !is_variable(); }
  const Atom& constant() const { return std::get<Atom>(value_); }
  const std::string& var_name() const { return std::get<Variable>(value_).name; }

  friend bool operator==(const Term&, const Term&) = default;

 private:
  std::variant<Atom, Variable> value_;
};

/// Parses "?x" as a variable and anything else as a constant atom.
Term term(std::string_view text);

/// Simple access pattern: a triple whose positions may be variables.
struct Sap {
  Term s;
  Term p;
  Term o;

  const Term& at(Role r) const noexcept {
    switch (r) {
      case Role::Subject: return s;
      case Role::Predicate: return p;
      default: return o;
    }
  }
  std::size_t variable_count() const noexcept;
  std::vector<std::string> variables() const;  // first-appearance order, distinct
  std::vector<Role> bound_roles() const;

  friend bool operator==(const Sap&, const Sap&) = default;
};

Sap make_sap(std::string_view s, std::string_view p, std::string_view o);
Sap sap_of(const Triple& t);

/// Basic graph pattern: a non-empty ordered conjunction of SAPs. Variables are
/// scoped over the whole pattern.
class Bgp {
 public:
  explicit Bgp(std::vector<Sap> saps);
  const std::vector<Sap>& saps() const noexcept { return saps_; }
  std::size_t size() const noexcept { return saps_.size(); }
  const Sap& operator[](std::size_t i) const { return saps_[i]; }
  std::vector<std::string> variables() const;

  friend bool operator==(const Bgp&, const Bgp&) = default;

 private:
  std::vector<Sap> saps_;
};

enum class JoinType : std::uint8_t { SS, SP, SO, PP, PO, OO };

JoinType join_type_of(Role a, Role b) noexcept;
std::string_view to_string(JoinType j) noexcept;

enum class JoinCause : std::uint8_t { Variable, Atom };

struct JoinEdge {
  JoinType type;
  JoinCause cause;
  std::string term;  // variable name or atom bytes
  Role role_in_a;
  Role role_in_b;

  friend bool operator==(const JoinEdge&, const JoinEdge&) = default;
  friend auto operator<=>(const JoinEdge&, const JoinEdge&) = default;
};

/// Every position pair (one from each SAP) holding the same variable or the
/// same constant atom, sorted.
std::vector<JoinEdge> join_types(const Sap& a, const Sap& b);

using BindingRow = std::map<std::string, Atom>;

/// Binding of the SAP's variables if the triple satisfies it.
std::optional<BindingRow> matches(const Triple& t, const Sap& sap);

/// A set of binding rows over a fixed variable domain. Rows are stored as
/// atom vectors aligned with variables().
class BindingSet {
 public:
  BindingSet() = default;
  explicit BindingSet(std::vector<std::string> variables);

  const std::vector<std::string>& variables() const noexcept { return variables_; }
  const std::set<std::vector<Atom>>& rows() const noexcept { return rows_; }
  std::size_t size() const noexcept { return rows_.size(); }
  bool empty() const noexcept { return rows_.empty(); }

  void insert(std::vector<Atom> row);
  void insert(const BindingRow& row);
  bool contains(const BindingRow& row) const;
  std::vector<BindingRow> to_rows() const;

  /// Equal when both bind the same variable set to the same rows, regardless
  /// of column order.
  friend bool operator==(const BindingSet& a, const BindingSet& b);

 private:
  std::vector<std::string> variables_;
  std::set<std::vector<Atom>> rows_;
};

struct GraphStats {
  std::size_t triples = 0;
  std::size_t subjects = 0;
  std::size_t predicates = 0;
  std::size_t objects = 0;
  std::size_t atoms = 0;
  std::size_t subject_object = 0;
  std::size_t subject_predicate = 0;
  std::size_t predicate_object = 0;
  double mean_atom_len = 0.0;  // over distinct atoms of A(G)

  friend bool operator==(const GraphStats&, const GraphStats&) = default;
};

GraphStats role_sets(const Graph& g);

}  // namespace rdfidx

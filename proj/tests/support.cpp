#include "support.hpp"

#include <atomic>
#include <unistd.h>

namespace rdfidx::testing {

Graph doc_graph() {
  return Graph({
      make_triple("Yamada", "authored", "doc1"),
      make_triple("Yamada", "knows", "McShea"),
      make_triple("knows", "is a kind of", "social action"),
      make_triple("Herzog", "authored", "doc2"),
      make_triple("Herzog", "authored", "doc3"),
      make_triple("McShea", "performed", "doc3"),
      make_triple("McShea", "past action", "authored"),
      make_triple("doc1", "type", "PDF"),
      make_triple("doc1", "rating", "4/5"),
      make_triple("doc2", "type", "MP3"),
      make_triple("doc3", "type", "MP3"),
      make_triple("doc3", "created_on", "26.10.08"),
  });
}

std::string doc_query() {
  return "SELECT ?date ?type\n"
         "WHERE { McShea performed  ?doc  .\n"
         "        ?doc   created_on ?date .\n"
         "        ?doc   type       ?type  }\n";
}

std::filesystem::path data_path(const std::string& name) {
  return std::filesystem::path(RDFIDX_TEST_DATA) / name;
}

TempDir::TempDir() {
  static std::atomic<int> counter{0};
  dir_ = std::filesystem::temp_directory_path() /
         ("rdfidx-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
  std::filesystem::remove_all(dir_);
  std::filesystem::create_directories(dir_);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(dir_, ec);
}

Graph random_graph(Rng& rng, std::size_t n, std::size_t pool) {
  std::vector<Triple> ts;
  auto atom = [&] { return Atom("n" + std::to_string(rng.uniform_index(pool))); };
  for (std::size_t i = 0; i < n; ++i) ts.push_back(Triple{atom(), atom(), atom()});
  return Graph(std::move(ts));
}

Bgp random_bgp(Rng& rng, const Graph& g, std::size_t max_saps, std::size_t max_vars) {
  const std::size_t k = 1 + rng.uniform_index(max_saps);
  const std::size_t nvars = rng.uniform_index(max_vars + 1);
  const std::vector<std::string> names = {"x", "y", "z", "w"};
  const auto atoms = g.atoms();
  std::vector<Sap> saps;
  for (std::size_t i = 0; i < k; ++i) {
    const Triple& t = g.triples()[rng.uniform_index(g.size())];
    std::vector<Term> terms;
    for (Role r : kRoles) {
      const auto roll = rng.uniform_index(10);
      if (nvars > 0 && roll < 5) {
        terms.push_back(Term::var(names[rng.uniform_index(nvars)]));
      } else if (roll == 5) {
        terms.push_back(Term(atoms[rng.uniform_index(atoms.size())]));
      } else if (roll == 6) {
        terms.push_back(Term::atom("absent"));
      } else {
        terms.push_back(Term(t.at(r)));
      }
    }
    saps.push_back(Sap{terms[0], terms[1], terms[2]});
  }
  return Bgp(std::move(saps));
}

std::vector<std::string> random_select(Rng& rng, const Bgp& bgp) {
  std::vector<std::string> out;
  for (const auto& v : bgp.variables()) {
    if (rng.uniform_index(3) != 0) out.push_back(v);
  }
  return out;
}

}  // namespace rdfidx::testing

#include <gtest/gtest.h>

#include "rdfidx/btree.hpp"
#include "rdfidx/data_io.hpp"
#include "rdfidx/query.hpp"
#include "rdfidx/triplet.hpp"
#include "support.hpp"

using namespace rdfidx;
using rdfidx::testing::doc_graph;

namespace {

AtomPair pr(const char* a, const char* b) { return {Atom(a), Atom(b)}; }

TripletIndex fig1_index(std::uint32_t bs = kDefaultBlockSize) {
  return TripletIndex::build(doc_graph(), PageStore::in_memory(bs));
}

}  // namespace

TEST(TripleT, WorkedExampleDoc1) {
  auto idx = fig1_index();
  const auto p = idx.payload(Atom("doc1"));
  ASSERT_TRUE(p);
  EXPECT_EQ(p->s_bucket, (std::vector<AtomPair>{pr("4/5", "rating"), pr("PDF", "type")}));
  EXPECT_TRUE(p->p_bucket.empty());
  EXPECT_EQ(p->o_bucket, (std::vector<AtomPair>{pr("Yamada", "authored")}));
}

TEST(TripleT, PayloadOfKnows) {
  auto idx = fig1_index();
  const auto p = idx.payload(Atom("knows"));
  ASSERT_TRUE(p);
  EXPECT_EQ(p->s_bucket, (std::vector<AtomPair>{pr("social action", "is a kind of")}));
  EXPECT_EQ(p->p_bucket, (std::vector<AtomPair>{pr("Yamada", "McShea")}));
  EXPECT_TRUE(p->o_bucket.empty());
}

TEST(TripleT, PayloadOfAuthoredSortedByDeclaredOrder) {
  auto idx = fig1_index();
  const auto p = idx.payload(Atom("authored"));
  ASSERT_TRUE(p);
  EXPECT_TRUE(p->s_bucket.empty());
  EXPECT_EQ(p->p_bucket,
            (std::vector<AtomPair>{pr("Herzog", "doc2"), pr("Herzog", "doc3"), pr("Yamada", "doc1")}));
  EXPECT_EQ(p->o_bucket, (std::vector<AtomPair>{pr("McShea", "past action")}));
}

TEST(TripleT, SingleTriple) {
  auto idx = TripletIndex::build(Graph({make_triple("a", "b", "c")}), PageStore::in_memory());
  EXPECT_EQ(idx.tree().size(), 3u);
  for (const char* k : {"a", "b", "c"}) {
    const auto p = idx.payload(Atom(k));
    ASSERT_TRUE(p);
    EXPECT_EQ(p->pair_count(), 1u);
  }
  EXPECT_EQ(idx.payload(Atom("a"))->s_bucket, (std::vector<AtomPair>{pr("c", "b")}));
  EXPECT_EQ(idx.payload(Atom("b"))->p_bucket, (std::vector<AtomPair>{pr("a", "c")}));
  EXPECT_EQ(idx.payload(Atom("c"))->o_bucket, (std::vector<AtomPair>{pr("a", "b")}));
}

TEST(TripleT, AbsentAtom) {
  auto idx = fig1_index();
  EXPECT_FALSE(idx.payload(Atom("nobody")));
}

TEST(TripleT, PayloadCostIsDepthPlusBlocks) {
  auto idx = fig1_index();
  const auto ref = idx.payload_ref(Atom("doc3"));
  ASSERT_TRUE(ref);
  idx.store().reset_read_counter();
  idx.payload(Atom("doc3"));
  EXPECT_EQ(idx.store().stats().reads, idx.tree().height() + payload_blocks(ref->length, kDefaultBlockSize));
  EXPECT_EQ(payload_blocks(ref->length, kDefaultBlockSize), 1u);
}

TEST(TripleT, MultiBlockPayload) {
  // One hub atom in 300 triples: its payload spans several 512-byte pages.
  std::vector<Triple> ts;
  for (int i = 0; i < 300; ++i) ts.push_back(make_triple("hub", "p", "o" + std::to_string(i)));
  auto idx = TripletIndex::build(Graph(ts), PageStore::in_memory(512));
  const auto ref = idx.payload_ref(Atom("hub"));
  ASSERT_TRUE(ref);
  const std::uint32_t w = idx.atom_width();  // 4: "o299"
  EXPECT_EQ(ref->length, 3 * 4 + 300 * 2 * w);
  idx.store().reset_read_counter();
  const auto p = idx.payload(Atom("hub"));
  EXPECT_EQ(p->s_bucket.size(), 300u);
  EXPECT_EQ(idx.store().stats().reads, idx.tree().height() + (ref->length + 511) / 512);
}

TEST(TripleT, ReconstructionOnRandomGraphs) {
  Rng rng(3);
  for (int round = 0; round < 10; ++round) {
    const Graph g = rdfidx::testing::random_graph(rng, 1 + rng.uniform_index(400), 3 + rng.uniform_index(40));
    auto idx = TripletIndex::build(g, PageStore::in_memory(1024));
    EXPECT_EQ(idx.tree().size(), g.atoms().size());
    for (Role r : kRoles) {
      std::vector<Triple> rebuilt;
      for (const auto& k : g.atoms()) {
        const auto p = idx.payload(k);
        ASSERT_TRUE(p);
        const auto& b = p->bucket(r);
        EXPECT_TRUE(std::is_sorted(b.begin(), b.end()));
        EXPECT_EQ(std::adjacent_find(b.begin(), b.end()), b.end());
        for (auto& t : p->triples(k, r)) rebuilt.push_back(t);
      }
      EXPECT_EQ(Graph(rebuilt), g);
      EXPECT_EQ(rebuilt.size(), g.size());
    }
  }
}

TEST(TripleT, SelfJoinSubjectObject) {
  auto idx = fig1_index();
  const auto got = idx.self_join(Atom("doc3"), make_sap("?w", "performed", "doc3"), make_sap("doc3", "type", "?t"));
  BindingSet expected({"w", "t"});
  expected.insert(std::vector<Atom>{Atom("McShea"), Atom("MP3")});
  EXPECT_EQ(got, expected);
}

TEST(TripleT, SelfJoinPredicateObject) {
  auto idx = fig1_index();
  const Sap a = make_sap("?x", "authored", "?y");
  const Sap b = make_sap("McShea", "past action", "authored");
  const auto got = idx.self_join(Atom("authored"), a, b);
  EXPECT_EQ(got, oracle_eval(doc_graph(), Bgp({a, b}), {"x", "y"}));
  EXPECT_EQ(got.size(), 3u);
}

TEST(TripleT, SelfJoinEmptyBucketAndPreconditions) {
  auto idx = fig1_index();
  // doc1 never occurs as a predicate.
  EXPECT_TRUE(idx.self_join(Atom("doc1"), make_sap("doc1", "?p", "?o"), make_sap("?s", "doc1", "?o2")).empty());
  EXPECT_THROW(idx.self_join(Atom("doc1"), make_sap("doc1", "?p", "?o"), make_sap("doc1", "type", "?o")),
               std::invalid_argument);
  EXPECT_THROW(idx.self_join(Atom("doc9"), make_sap("doc1", "?p", "?o"), make_sap("?s", "type", "doc1")),
               std::invalid_argument);
}

TEST(TripleT, EvalSapCostDepthPlusOnePayload) {
  auto idx = fig1_index();
  idx.store().reset_read_counter();
  const auto r = idx.eval_sap(make_sap("McShea", "performed", "?doc"));
  BindingSet expected({"doc"});
  expected.insert(std::vector<Atom>{Atom("doc3")});
  EXPECT_EQ(r, expected);
  EXPECT_EQ(idx.store().stats().reads, idx.tree().height() + 1);
}

TEST(TripleT, FullyBoundSaps) {
  auto idx = fig1_index();
  const auto present = idx.eval_sap(make_sap("doc3", "type", "MP3"));
  EXPECT_EQ(present.size(), 1u);
  EXPECT_TRUE(present.variables().empty());
  EXPECT_TRUE(idx.eval_sap(make_sap("doc3", "type", "PDF")).empty());
  EXPECT_TRUE(idx.eval_sap(make_sap("doc9", "type", "PDF")).empty());
}

TEST(TripleT, AtomInducedJoinUsesOneDescent) {
  auto idx = fig1_index();
  const Bgp bgp({make_sap("?w", "performed", "doc3"), make_sap("doc3", "type", "?t")});
  const auto r = eval_bgp(idx, bgp, {"w", "t"});
  std::size_t descents = 0;
  for (const auto& s : r.plan.steps) descents += s.descents;
  EXPECT_EQ(descents, 1u);
  ASSERT_FALSE(r.plan.steps.empty());
  EXPECT_EQ(r.plan.steps[0].kind, StepKind::SelfJoin);
  EXPECT_EQ(r.cost.reads, idx.tree().height() + 1);
  EXPECT_EQ(r.bindings, oracle_eval(doc_graph(), bgp, {"w", "t"}));
}

TEST(TripleT, AllOrdersKeepsAnswers) {
  const Graph g = doc_graph();
  auto idx = TripletIndex::build(g, PageStore::in_memory(), IndexOptions{0, true});
  const auto p = idx.payload(Atom("doc1"));
  ASSERT_TRUE(p);
  EXPECT_EQ(p->o_bucket, (std::vector<AtomPair>{pr("Yamada", "authored")}));
  const Bgp bgp({make_sap("?s", "?p", "MP3")});
  EXPECT_EQ(eval_bgp(idx, bgp, {"s", "p"}).bindings, oracle_eval(g, bgp, {"s", "p"}));
}

TEST(TripleT, ReopenFromFile) {
  rdfidx::testing::TempDir tmp;
  {
    auto idx = TripletIndex::build(doc_graph(), PageStore::create(tmp / "t.db"));
    idx.store().flush();
  }
  auto idx = open_index(PageStore::open(tmp / "t.db"));
  EXPECT_EQ(idx->family(), Family::TripleT);
  EXPECT_EQ(idx->eval_sap(make_sap("?s", "type", "MP3")).size(), 2u);
}

TEST(TripleT, AtomWidthChecks) {
  EXPECT_THROW(TripletIndex::build(doc_graph(), PageStore::in_memory(), IndexOptions{4, false}),
               std::invalid_argument);
  auto idx = TripletIndex::build(doc_graph(), PageStore::in_memory(), IndexOptions{64, false});
  EXPECT_EQ(idx.atom_width(), 64u);
  EXPECT_EQ(idx.tree().config().key_width, 64u);
}

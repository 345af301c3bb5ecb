#include <algorithm>

#include "doctest.h"
#include "fcnet/analysis.hpp"
#include "support/nets.hpp"

using namespace fcnet;

namespace {

Marking mk(const PetriNet& net, std::initializer_list<std::pair<const char*, int>> counts) {
  Marking m(net.place_count(), 0);
  for (auto [id, n] : counts) m[net.place_index(id)] = n;
  return m;
}

}  // namespace

TEST_CASE("cluster block transform moves the choice tokens aside") {
  auto b = fixtures::net_b();
  auto tr = cluster_block_transform(b, "a");
  CHECK(tr.cluster_place == "p0");
  CHECK(tr.net.initial_marking()[tr.net.place_index(tr.alpha)] == 1);
  CHECK(tr.net.initial_marking()[tr.net.place_index("p0")] == 0);
  CHECK(non_conflicting(tr.net, tr.beta));
  CHECK(classify(tr.net).is_free_choice);

  // phi of the transformed initial marking is the original initial marking.
  CHECK(tr.phi(b, tr.net.initial_marking()) == b.initial_marking());
}

TEST_CASE("cluster block transform rejects non-conflicting transitions") {
  auto b = fixtures::net_b();
  try {
    cluster_block_transform(b, "c");
    FAIL("expected NotConflicting");
  } catch (const Error& e) {
    CHECK(e.code() == Err::NotConflicting);
  }
}

TEST_CASE("blocking beta in the transformed net maps to the cluster blocking") {
  auto b = fixtures::net_b();
  auto tr = cluster_block_transform(b, "a");

  // The transformed net is not live (alpha drains), so the blocking marking
  // of beta is derived with the exhaustive oracle instead.
  auto oracle = blocking_oracle(tr.net, tr.beta);
  REQUIRE(oracle.r_b.size() == 1);
  Marking back = tr.phi(b, oracle.r_b[0]);
  auto en = enabled_set(b, back);
  CHECK(en == std::vector<int>{b.transition_index("a"), b.transition_index("b")});

  // And it agrees with the direct cluster-variant computation.
  CHECK(back == blocking_marking(b, "a").blocking_marking);
}

TEST_CASE("efcn rewrite leaves free choice nets alone") {
  auto b = fixtures::net_b();
  auto out = efcn_to_fcn(b);
  CHECK(out.places() == b.places());
  CHECK(out.transitions() == b.transitions());
  CHECK(out.to_spec().arcs.size() == b.to_spec().arcs.size());
}

TEST_CASE("efcn rewrite funnels the shared preset through a silent transition") {
  auto e = fixtures::efcn_example();
  auto out = efcn_to_fcn(e);
  CHECK(classify(out).is_free_choice);
  CHECK(out.transition_count() == e.transition_count() + 1);
  CHECK(out.place_count() == e.place_count() + 1);

  // Token flow is preserved: the rewritten net still cycles.
  CHECK(is_live(out) == Liveness::Live);
  CHECK(is_bounded(out).bounded);
}

TEST_CASE("efcn rewrite handles several shared presets at once") {
  NetSpec s;
  s.places = {{"p", 1}, {"pp", 1}, {"o", 0}, {"r", 0}, {"rr", 0}, {"o2", 0}};
  s.transitions = {"q1", "q2", "m1", "s1", "s2", "back"};
  s.arcs = {{"p", "q1"},  {"pp", "q1"}, {"p", "q2"},  {"pp", "q2"}, {"q1", "o"},
            {"q2", "o"},  {"o", "m1"},  {"m1", "r"},  {"m1", "rr"}, {"r", "s1"},
            {"rr", "s1"}, {"r", "s2"},  {"rr", "s2"}, {"s1", "o2"}, {"s2", "o2"},
            {"o2", "back"}, {"back", "p"}, {"back", "pp"}};
  PetriNet net(s);
  REQUIRE(classify(net).is_extended_free_choice);
  REQUIRE_FALSE(classify(net).is_free_choice);

  auto out = efcn_to_fcn(net);
  CHECK(classify(out).is_free_choice);
  CHECK(out.transition_count() == net.transition_count() + 2);
  CHECK(out.place_count() == net.place_count() + 2);
  CHECK(is_live(out) == Liveness::Live);
  CHECK(is_bounded(out).bounded);
}

TEST_CASE("efcn rewrite rejects non-extended-free-choice input") {
  try {
    efcn_to_fcn(fixtures::ctrex_nonfc());
    FAIL("expected NotEFCN");
  } catch (const Error& e) {
    CHECK(e.code() == Err::NotEFCN);
  }
}

TEST_CASE("free choice expansion of NET-A") {
  auto a = fixtures::net_a();
  auto exp = free_choice_expansion(a);
  // One inserted transition/place pair per place-to-transition arc.
  CHECK(exp.inserted.size() == 2);
  CHECK(exp.net.place_count() == a.place_count() + 2);
  CHECK(exp.net.transition_count() == a.transition_count() + 2);
  CHECK(classify(exp.net).is_free_choice);
  CHECK(exp.project(a, exp.net.initial_marking()) == a.initial_marking());
}

TEST_CASE("free choice expansion of NET-B") {
  auto b = fixtures::net_b();
  auto exp = free_choice_expansion(b);
  CHECK(exp.inserted.size() == 4);
  CHECK(classify(exp.net).is_free_choice);
  // New places start empty.
  for (const auto& ins : exp.inserted)
    CHECK(exp.net.initial_marking()[exp.net.place_index(ins.s_pq)] == 0);

  CHECK(commoner_live(exp.net).live);
  auto bound = is_bounded(exp.net);
  REQUIRE(bound.bounded);
}

TEST_CASE("expansion preserves boundedness both ways on fixtures") {
  for (const auto& net : {fixtures::net_a(), fixtures::net_b(), fixtures::ctrex_nonfc(),
                          fixtures::ctrex_unbounded(), fixtures::nonfc_mutex()}) {
    auto exp = free_choice_expansion(net);
    CHECK(is_bounded(net).bounded == is_bounded(exp.net).bounded);
  }
}

TEST_CASE("the alternating net is live but its expansion is not") {
  auto net = fixtures::alternating_net();
  CHECK_FALSE(classify(net).is_free_choice);
  CHECK(is_live(net) == Liveness::Live);

  auto exp = free_choice_expansion(net);
  auto report = commoner_live(exp.net);
  CHECK_FALSE(report.live);
  CHECK(report.violating_siphon.has_value());
  // Expansion liveness would imply liveness of the original; the converse
  // fails exactly here.
  CHECK(is_live(exp.net) == Liveness::NotLive);
}

TEST_CASE("expansion markings project back") {
  auto b = fixtures::net_b();
  auto exp = free_choice_expansion(b);
  // Walk a few steps in the expansion and check the projection is a marking
  // of the original net with the same token total.
  Marking m = exp.net.initial_marking();
  for (int step = 0; step < 6; ++step) {
    auto en = enabled_set(exp.net, m);
    if (en.empty()) break;
    m = fire(exp.net, m, en[0]);
    Marking proj = exp.project(b, m);
    int total = 0;
    for (int x : proj) total += x;
    CHECK(total == 1);
  }
}

TEST_CASE("transform identifiers are reserved") {
  auto b = fixtures::net_b();
  auto exp = free_choice_expansion(b);
  for (const auto& ins : exp.inserted) {
    CHECK(ins.t_pq.rfind(kExpansionPrefix, 0) == 0);
    CHECK(ins.s_pq.rfind(kExpansionPrefix, 0) == 0);
  }
  auto tr = cluster_block_transform(b, "a");
  CHECK(tr.alpha.rfind(kBlockPrefix, 0) == 0);
  CHECK(tr.beta.rfind(kBlockPrefix, 0) == 0);
}

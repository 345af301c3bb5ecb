#include <algorithm>
#include <set>

#include "doctest.h"
#include "fcnet/routing.hpp"
#include "fcnet/timed.hpp"
#include "support/nets.hpp"
#include "support/random_nets.hpp"

using namespace fcnet;

namespace {

Marking mk(const PetriNet& net, std::initializer_list<std::pair<const char*, int>> counts) {
  Marking m(net.place_count(), 0);
  for (auto [id, n] : counts) m[net.place_index(id)] = n;
  return m;
}

RoutingSpec periodic_ab(const PetriNet& b) {
  RoutingSpec r = trivial_routing(b);
  r.per_place[b.place_index("p0")].kind = RoutingKind::Periodic;
  r.per_place[b.place_index("p0")].periodic = {b.transition_index("a"), b.transition_index("b")};
  return r;
}

}  // namespace

TEST_CASE("initial tokens take the first routing values") {
  auto b = fixtures::net_b();
  RoutedNet rn(b, periodic_ab(b));
  auto s = rn.init();
  int p0 = b.place_index("p0");
  REQUIRE(s.pending[p0].size() == 1);
  CHECK(s.pending[p0].front() == b.transition_index("a"));

  // Two initial tokens split across the period.
  NetSpec two = b.to_spec();
  for (auto& [id, tokens] : two.places)
    if (id == "p0") tokens = 2;
  PetriNet b2(two);
  RoutedNet rn2(b2, periodic_ab(b2));
  auto s2 = rn2.init();
  CHECK(s2.pending[b2.place_index("p0")] ==
        std::deque<int>{b2.transition_index("a"), b2.transition_index("b")});

  // No choice places: trivial assignments.
  auto a = fixtures::net_a();
  RoutedNet rna(a, trivial_routing(a));
  auto sa = rna.init();
  CHECK(sa.pending[a.place_index("p1")].front() == a.transition_index("t1"));
}

TEST_CASE("routed enabling needs an assigned token") {
  auto b = fixtures::net_b();
  RoutedNet rn(b, periodic_ab(b));
  auto s = rn.init();
  CHECK(rn.routed_enabled(s, b.transition_index("a")));
  CHECK_FALSE(rn.routed_enabled(s, b.transition_index("b")));

  // After a and c the token re-enters p0 assigned to b.
  s = rn.routed_fire(s, b.transition_index("a"));
  s = rn.routed_fire(s, b.transition_index("c"));
  CHECK_FALSE(rn.routed_enabled(s, b.transition_index("a")));
  CHECK(rn.routed_enabled(s, b.transition_index("b")));

  // Plain and routed enabling coincide without choice places.
  auto a = fixtures::net_a();
  RoutedNet rna(a, trivial_routing(a));
  auto sa = rna.init();
  for (int t = 0; t < a.transition_count(); ++t)
    CHECK(rna.routed_enabled(sa, t) == enabled(a, routed_marking(sa), t));
}

TEST_CASE("routed fire draws destinations in arrival order") {
  auto b = fixtures::net_b();
  RoutedNet rn(b, periodic_ab(b));
  auto s = rn.init();
  s = rn.routed_fire(s, b.transition_index("a"));
  int p1 = b.place_index("p1");
  REQUIRE(s.pending[p1].size() == 1);
  CHECK(s.pending[p1].front() == b.transition_index("c"));

  CHECK_THROWS_AS((void)rn.routed_fire(rn.init(), b.transition_index("b")), Error);
}

TEST_CASE("self loops recycle the token with a fresh assignment") {
  auto net = fixtures::self_loop_net();
  RoutedNet rn(net, trivial_routing(net));
  auto s = rn.init();
  CHECK(s.drawn[0] == 1);
  s = rn.routed_fire(s, 0);
  s = rn.routed_fire(s, 0);
  CHECK(routed_marking(s) == Marking{1});
  CHECK(s.drawn[0] == 3);
}

TEST_CASE("Bernoulli draws follow the declared cumulative order") {
  auto b = fixtures::net_b();
  int p0 = b.place_index("p0");
  int ta = b.transition_index("a"), tb = b.transition_index("b");

  RoutingSpec fwd = trivial_routing(b);
  fwd.per_place[p0].kind = RoutingKind::Bernoulli;
  fwd.per_place[p0].probs = {0.3, 0.7};
  RoutingSpec rev = fwd;
  rev.per_place[p0].order = {1, 0};  // walk b's interval first

  RoutedNet rn_fwd(b, fwd, 5), rn_rev(b, rev, 5);
  RandomStreams streams(5);
  for (uint64_t n = 1; n <= 200; ++n) {
    double u = streams.uniform01("route", "p0", n);
    CHECK(rn_fwd.route(p0, n) == (u < 0.3 ? ta : tb));
    CHECK(rn_rev.route(p0, n) == (u < 0.7 ? tb : ta));
  }

  RoutingSpec bad = rev;
  bad.per_place[p0].order = {1, 1};
  CHECK_THROWS_AS(RoutedNet(b, bad, 5), Error);
}

TEST_CASE("equitability of periodic and Bernoulli rules") {
  auto b = fixtures::net_b();
  CHECK(is_equitable(b, periodic_ab(b)));

  RoutingSpec only_a = trivial_routing(b);
  only_a.per_place[b.place_index("p0")].kind = RoutingKind::Periodic;
  only_a.per_place[b.place_index("p0")].periodic = {b.transition_index("a")};
  CHECK_FALSE(is_equitable(b, only_a));

  RoutingSpec bern = trivial_routing(b);
  bern.per_place[b.place_index("p0")].kind = RoutingKind::Bernoulli;
  bern.per_place[b.place_index("p0")].probs = {1.0, 0.0};
  CHECK_FALSE(is_equitable(b, bern));
  bern.per_place[b.place_index("p0")].probs = {0.5, 0.5};
  CHECK(is_equitable(b, bern));

  // Rules must route into the place's own outputs, with probabilities
  // summing to one.
  RoutingSpec stray = trivial_routing(b);
  stray.per_place[b.place_index("p0")].kind = RoutingKind::Periodic;
  stray.per_place[b.place_index("p0")].periodic = {b.transition_index("c")};
  CHECK_THROWS_AS(check_routing(b, stray), Error);
  RoutingSpec lossy = trivial_routing(b);
  lossy.per_place[b.place_index("p0")].kind = RoutingKind::Bernoulli;
  lossy.per_place[b.place_index("p0")].probs = {0.5, 0.4};
  CHECK_THROWS_AS(check_routing(b, lossy), Error);
}

TEST_CASE("routed blocking runs to the blocking marking") {
  auto b = fixtures::net_b();
  RoutedNet rn(b, periodic_ab(b));

  auto run_c = routed_blocking(rn, b.transition_index("c"));
  CHECK(routed_marking(run_c.final) == mk(b, {{"p1", 1}}));
  CHECK(run_c.parikh[b.transition_index("a")] == 1);
  CHECK(run_c.word.size() == 1);

  // Blocking a leaves the token in p0 assigned to a.
  auto run_a = routed_blocking(rn, b.transition_index("a"));
  CHECK(routed_marking(run_a.final) == mk(b, {{"p0", 1}}));
  int p0 = b.place_index("p0");
  CHECK(run_a.final.pending[p0].front() == b.transition_index("a"));

  auto a = fixtures::net_a();
  RoutedNet rna(a, trivial_routing(a));
  auto run_t2 = routed_blocking(rna, a.transition_index("t2"));
  CHECK(routed_marking(run_t2.final) == mk(a, {{"p2", 1}}));
}

TEST_CASE("routed blocking checks its hypotheses") {
  auto net = fixtures::ctrex_unbounded();
  RoutedNet rn(net, trivial_routing(net));
  try {
    routed_blocking(rn, net.transition_index("bb"));
    FAIL("expected HypothesisViolated");
  } catch (const Error& e) {
    CHECK(e.code() == Err::HypothesisViolated);
  }
  // A self-regenerating pump diverges while avoiding bb; without the check
  // that surfaces as the step cap.
  NetSpec s;
  s.places = {{"p", 1}, {"r", 0}};
  s.transitions = {"s", "bb"};
  s.arcs = {{"p", "s"}, {"s", "p"}, {"s", "r"}, {"r", "bb"}};
  PetriNet pump(s);
  RoutedNet rp(pump, trivial_routing(pump));
  try {
    routed_blocking(rp, pump.transition_index("bb"), 500, false);
    FAIL("expected StepCapExceeded");
  } catch (const Error& e) {
    CHECK(e.code() == Err::StepCapExceeded);
  }
}

TEST_CASE("Parikh vectors of maximal avoiding runs are unique") {
  auto b = fixtures::net_b();
  RoutedNet rn(b, periodic_ab(b));
  auto rep = routed_parikh_unique(rn, b.transition_index("c"), 100, 7);
  CHECK(rep.unique);
  CHECK(rep.prefix_monotone);
  CHECK(rep.sigma[b.transition_index("a")] == 1);

  auto a = fixtures::net_a();
  RoutedNet rna(a, trivial_routing(a));
  auto rep_a = routed_parikh_unique(rna, a.transition_index("t1"), 10, 7);
  CHECK(rep_a.unique);
  CHECK(rep_a.sigma == Parikh{0, 0});
}

TEST_CASE("routed deadlock is unique when it exists") {
  auto net = fixtures::single_arc_net();
  RoutedNet rn(net, trivial_routing(net));
  auto dl = routed_deadlock(rn, 1000, 50);
  REQUIRE(dl.has_value());
  CHECK(dl->marking == Marking{0});
  CHECK(dl->parikh == Parikh{1});

  // Live nets never quiesce: the cap is the outcome, not an error.
  auto a = fixtures::net_a();
  RoutedNet rna(a, trivial_routing(a));
  CHECK_FALSE(routed_deadlock(rna, 500, 3).has_value());
}

TEST_CASE("driven open expansion drains back to its deadlock") {
  // NET-B started at the blocking marking of c, expanded at c, with one input
  // firing granted through an explicit source place.
  auto b = fixtures::net_b();
  auto m_c = blocking_marking(b, "c").blocking_marking;
  NetSpec at_mc = b.to_spec();
  for (size_t p = 0; p < at_mc.places.size(); ++p)
    at_mc.places[p].second = m_c[b.place_index(at_mc.places[p].first)];
  PetriNet base(at_mc);
  auto exp = open_expansion(base, "c", base.initial_marking());

  NetSpec driven = exp.net.to_spec();
  driven.places.emplace_back("src", 1);
  driven.arcs.emplace_back("src", exp.input_transition);
  PetriNet net(driven);

  RoutingSpec routing = trivial_routing(net);
  int p0 = net.place_index("p0");
  routing.per_place[p0].kind = RoutingKind::Periodic;
  routing.per_place[p0].periodic = {net.transition_index("a"), net.transition_index("b")};

  RoutedNet rn(net, routing);
  auto dl = routed_deadlock(rn, 10000, 50);
  REQUIRE(dl.has_value());
  // One full pass: I, the split halves of c, and one a-c loop re-park the
  // token; the deadlock is the expansion marking with the source spent.
  Marking expect(net.place_count(), 0);
  for (int p = 0; p < exp.net.place_count(); ++p)
    expect[net.place_index(exp.net.place_name(p))] = exp.psi_marking[p];
  CHECK(dl->marking == expect);
  CHECK(dl->parikh[net.transition_index(exp.b_out)] == 1);
  CHECK(dl->parikh[net.transition_index(exp.input_transition)] == 1);
}

TEST_CASE("routed reachability on the fixtures") {
  auto a = fixtures::net_a();
  RoutedNet rna(a, trivial_routing(a));
  auto ga = routed_reachability(rna);
  CHECK(ga.states.size() == 2);
  CHECK(routed_live(rna, ga) == Liveness::Live);

  // One circulating token under the alternating period: the routed state
  // space is the 4-cycle a, c, b, d (two p0 phases, one state for each of
  // p1 and p2).
  auto b = fixtures::net_b();
  RoutedNet rnb(b, periodic_ab(b));
  auto gb = routed_reachability(rnb);
  CHECK(gb.states.size() == 4);
  CHECK(gb.edges.size() == 4);
  CHECK(routed_live(rnb, gb) == Liveness::Live);

  // Every routed marking is plain-reachable.
  auto plain = reachability(b, b.initial_marking());
  std::set<Marking> plain_set(plain.nodes.begin(), plain.nodes.end());
  for (const auto& m : gb.markings) CHECK(plain_set.count(m) == 1);
}

TEST_CASE("routed liveness depends on the routing") {
  // The alternating net stays live only under the strict a,b period.
  auto net = fixtures::alternating_net();
  int a = net.transition_index("a"), b = net.transition_index("b");
  int p = net.place_index("p");

  RoutingSpec alt = trivial_routing(net);
  alt.per_place[p].kind = RoutingKind::Periodic;
  alt.per_place[p].periodic = {a, b};
  RoutedNet rn_alt(net, alt);
  auto g_alt = routed_reachability(rn_alt);
  CHECK(routed_live(rn_alt, g_alt) == Liveness::Live);

  RoutingSpec aabb = trivial_routing(net);
  aabb.per_place[p].kind = RoutingKind::Periodic;
  aabb.per_place[p].periodic = {a, a, b, b};
  RoutedNet rn_aabb(net, aabb);
  auto g_aabb = routed_reachability(rn_aabb);
  CHECK(routed_live(rn_aabb, g_aabb) == Liveness::NotLive);
}

TEST_CASE("every transition occurs within the regression window") {
  // Empirical cover lengths, frozen: NET-A covers in 2 steps, NET-B in 4.
  auto a = fixtures::net_a();
  RoutedNet rna(a, trivial_routing(a));
  auto sa = rna.init();
  std::set<int> seen;
  for (int i = 0; i < 2; ++i) {
    auto en = rna.routed_enabled_set(sa);
    REQUIRE_FALSE(en.empty());
    seen.insert(en[0]);
    sa = rna.routed_fire(sa, en[0]);
  }
  CHECK(seen.size() == 2);

  auto b = fixtures::net_b();
  RoutedNet rnb(b, periodic_ab(b));
  auto sb = rnb.init();
  seen.clear();
  for (int i = 0; i < 4; ++i) {
    auto en = rnb.routed_enabled_set(sb);
    REQUIRE_FALSE(en.empty());
    seen.insert(en[0]);
    sb = rnb.routed_fire(sb, en[0]);
  }
  CHECK(seen.size() == 4);
}

TEST_CASE("random routings validate and stay equitable") {
  for (uint64_t seed = 1; seed <= 10; ++seed) {
    auto gen = testgen::random_fcn(seed, {});
    if (!gen) continue;
    auto periodic = testgen::random_equitable_periodic(gen->net, seed);
    check_routing(gen->net, periodic);
    CHECK(is_equitable(gen->net, periodic));
    auto bern = testgen::random_equitable_bernoulli(gen->net, seed);
    check_routing(gen->net, bern);
    CHECK(is_equitable(gen->net, bern));
  }
}

#include <string>

#include "benchmark/benchmark.h"
#include "fcnet/analysis.hpp"
#include "fcnet/routing.hpp"
#include "fcnet/throughput.hpp"
#include "fcnet/timed.hpp"

using namespace fcnet;

namespace {

// Ring of n choice stages: p_i -> {a_i, b_i}, each branch returns to the next
// stage. Live, 1-bounded, free choice; the state space grows linearly with n.
PetriNet ring_net(int n) {
  NetSpec s;
  for (int i = 0; i < n; ++i) {
    std::string si = std::to_string(i), sj = std::to_string((i + 1) % n);
    s.places.emplace_back("p" + si, i == 0 ? 1 : 0);
    s.places.emplace_back("q" + si, 0);
    s.places.emplace_back("r" + si, 0);
    s.transitions.push_back("a" + si);
    s.transitions.push_back("b" + si);
    s.transitions.push_back("c" + si);
    s.transitions.push_back("d" + si);
    s.arcs.emplace_back("p" + si, "a" + si);
    s.arcs.emplace_back("p" + si, "b" + si);
    s.arcs.emplace_back("a" + si, "q" + si);
    s.arcs.emplace_back("q" + si, "c" + si);
    s.arcs.emplace_back("c" + si, "p" + sj);
    s.arcs.emplace_back("b" + si, "r" + si);
    s.arcs.emplace_back("r" + si, "d" + si);
    s.arcs.emplace_back("d" + si, "p" + sj);
  }
  return PetriNet(s);
}

RoutingSpec ring_routing(const PetriNet& net) {
  RoutingSpec r = trivial_routing(net);
  for (int p = 0; p < net.place_count(); ++p)
    if (net.place_post(p).size() == 2) {
      r.per_place[p].kind = RoutingKind::Bernoulli;
      r.per_place[p].probs = {0.5, 0.5};
    }
  return r;
}

TimingSpec ring_timing(const PetriNet& net) {
  TimingSpec t;
  t.per_transition.resize(net.transition_count());
  for (auto& tt : t.per_transition) {
    tt.kind = TimingKind::Exponential;
    tt.rate = 1.0;
  }
  return t;
}

void BM_Reachability(benchmark::State& state) {
  auto net = ring_net(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto g = reachability(net, net.initial_marking());
    benchmark::DoNotOptimize(g.nodes.size());
  }
}
BENCHMARK(BM_Reachability)->Arg(4)->Arg(16)->Arg(64);

void BM_KarpMiller(benchmark::State& state) {
  auto net = ring_net(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto b = is_bounded(net);
    benchmark::DoNotOptimize(b.bound);
  }
}
BENCHMARK(BM_KarpMiller)->Arg(4)->Arg(16)->Arg(64);

void BM_Commoner(benchmark::State& state) {
  auto net = ring_net(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto r = commoner_live(net);
    benchmark::DoNotOptimize(r.live);
  }
}
BENCHMARK(BM_Commoner)->Arg(2)->Arg(4)->Arg(6);

void BM_BlockingMarking(benchmark::State& state) {
  auto net = ring_net(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto r = blocking_marking(net, "c0", false, false);
    benchmark::DoNotOptimize(r.witness_sequence.size());
  }
}
BENCHMARK(BM_BlockingMarking)->Arg(4)->Arg(16)->Arg(64);

void BM_BlockingOracle(benchmark::State& state) {
  auto net = ring_net(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto r = blocking_oracle(net, "c0");
    benchmark::DoNotOptimize(r.r_b.size());
  }
}
BENCHMARK(BM_BlockingOracle)->Arg(4)->Arg(16)->Arg(64);

void BM_RoutedBlocking(benchmark::State& state) {
  auto net = ring_net(static_cast<int>(state.range(0)));
  RoutingSpec routing = trivial_routing(net);
  for (int p = 0; p < net.place_count(); ++p)
    if (net.place_post(p).size() == 2) {
      routing.per_place[p].kind = RoutingKind::Periodic;
      routing.per_place[p].periodic = net.place_post(p);
    }
  RoutedNet rn(net, routing);
  int b = net.transition_index("c0");
  for (auto _ : state) {
    auto run = routed_blocking(rn, b, kDefaultStepCap, false);
    benchmark::DoNotOptimize(run.word.size());
  }
}
BENCHMARK(BM_RoutedBlocking)->Arg(4)->Arg(16)->Arg(64);

void BM_SimulateEvents(benchmark::State& state) {
  auto net = ring_net(8);
  auto routing = ring_routing(net);
  auto timing = ring_timing(net);
  long long events = state.range(0);
  uint64_t seed = 0;
  for (auto _ : state) {
    SimConfig cfg;
    cfg.seed = ++seed;
    cfg.stop = StopRule::events(events);
    auto res = simulate(net, routing, timing, cfg);
    benchmark::DoNotOptimize(res.final.clock);
  }
  state.SetItemsProcessed(state.iterations() * events);
}
BENCHMARK(BM_SimulateEvents)->Arg(1000)->Arg(10000);

void BM_PerronWorkedMatrix(benchmark::State& state) {
  auto m = example_matrix();
  for (auto _ : state) {
    auto tv = perron_vector(m);
    benchmark::DoNotOptimize(tv.residual);
  }
}
BENCHMARK(BM_PerronWorkedMatrix);

void BM_PerronRing(benchmark::State& state) {
  auto net = ring_net(static_cast<int>(state.range(0)));
  auto m = build_R(net, ring_routing(net));
  for (auto _ : state) {
    auto tv = perron_vector(m);
    benchmark::DoNotOptimize(tv.residual);
  }
}
BENCHMARK(BM_PerronRing)->Arg(16)->Arg(64);

}  // namespace

BENCHMARK_MAIN();

#include "fcnet/routing.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <unordered_map>

namespace fcnet {

RoutingSpec trivial_routing(const PetriNet& net) {
  RoutingSpec spec;
  spec.per_place.resize(net.place_count());
  return spec;
}

void check_routing(const PetriNet& net, const RoutingSpec& routing) {
  if (static_cast<int>(routing.per_place.size()) != net.place_count())
    throw Error(Err::InvalidRouting, "routing does not cover every place");
  for (int p = 0; p < net.place_count(); ++p) {
    const auto& r = routing.per_place[p];
    const auto& outs = net.place_post(p);
    switch (r.kind) {
      case RoutingKind::Trivial:
        if (outs.size() > 1)
          throw Error(Err::InvalidRouting,
                      "choice place " + net.place_name(p) + " has no routing rule");
        break;
      case RoutingKind::Periodic: {
        if (r.periodic.empty())
          throw Error(Err::InvalidRouting,
                      "empty periodic sequence at " + net.place_name(p));
        for (int t : r.periodic)
          if (!std::binary_search(outs.begin(), outs.end(), t))
            throw Error(Err::InvalidRouting, "periodic rule of " + net.place_name(p) +
                                                 " routes to " + net.transition_name(t) +
                                                 " which is not an output");
        break;
      }
      case RoutingKind::Bernoulli: {
        if (r.probs.size() != outs.size())
          throw Error(Err::InvalidRouting,
                      "Bernoulli rule of " + net.place_name(p) +
                          " must give one probability per output transition");
        double sum = 0;
        for (double x : r.probs) {
          if (x < 0)
            throw Error(Err::InvalidRouting,
                        "negative probability at " + net.place_name(p));
          sum += x;
        }
        if (std::abs(sum - 1.0) > 1e-12)
          throw Error(Err::InvalidRouting,
                      "probabilities at " + net.place_name(p) + " sum to " +
                          std::to_string(sum));
        if (!r.order.empty()) {
          std::vector<char> seen(outs.size(), 0);
          bool ok = r.order.size() == outs.size();
          for (int k : r.order)
            if (k < 0 || k >= static_cast<int>(outs.size()) || seen[k])
              ok = false;
            else
              seen[k] = 1;
          if (!ok)
            throw Error(Err::InvalidRouting,
                        "draw order of " + net.place_name(p) + " is not a permutation");
        }
        break;
      }
    }
  }
}

bool is_equitable(const PetriNet& net, const RoutingSpec& routing) {
  for (int p = 0; p < net.place_count(); ++p) {
    const auto& r = routing.per_place[p];
    const auto& outs = net.place_post(p);
    if (outs.size() <= 1) continue;
    if (r.kind == RoutingKind::Periodic) {
      for (int t : outs)
        if (std::find(r.periodic.begin(), r.periodic.end(), t) == r.periodic.end())
          return false;
    } else if (r.kind == RoutingKind::Bernoulli) {
      for (double x : r.probs)
        if (x <= 0.0) return false;
    } else {
      return false;  // unspecified choice
    }
  }
  return true;
}

double routing_prob(const PetriNet& net, const RoutingSpec& routing, int p, int t) {
  const auto& outs = net.place_post(p);
  auto pos = std::find(outs.begin(), outs.end(), t);
  if (pos == outs.end()) return 0.0;
  const auto& r = routing.per_place[p];
  switch (r.kind) {
    case RoutingKind::Trivial:
      return 1.0;
    case RoutingKind::Bernoulli:
      return r.probs[pos - outs.begin()];
    case RoutingKind::Periodic: {
      long long hits = std::count(r.periodic.begin(), r.periodic.end(), t);
      return static_cast<double>(hits) / static_cast<double>(r.periodic.size());
    }
  }
  return 0.0;
}

Marking routed_marking(const RoutedState& state) {
  Marking m(state.pending.size());
  for (size_t p = 0; p < state.pending.size(); ++p)
    m[p] = static_cast<int>(state.pending[p].size());
  return m;
}

RoutedNet::RoutedNet(const PetriNet& net, RoutingSpec routing, uint64_t seed)
    : net_(net), routing_(std::move(routing)), streams_(seed) {
  check_routing(net_, routing_);
}

int RoutedNet::route(int p, long long n) const {
  const auto& outs = net_.place_post(p);
  const auto& r = routing_.per_place[p];
  switch (r.kind) {
    case RoutingKind::Trivial:
      return outs.empty() ? -1 : outs[0];
    case RoutingKind::Periodic:
      return r.periodic[static_cast<size_t>((n - 1) % static_cast<long long>(r.periodic.size()))];
    case RoutingKind::Bernoulli: {
      double u = streams_.uniform01("route", net_.place_name(p), static_cast<uint64_t>(n));
      double acc = 0;
      int last = -1;
      for (size_t k = 0; k < outs.size(); ++k) {
        size_t i = r.order.empty() ? k : static_cast<size_t>(r.order[k]);
        acc += r.probs[i];
        last = outs[i];
        if (u < acc) return outs[i];
      }
      return last;
    }
  }
  return -1;
}

RoutedState RoutedNet::init() const {
  RoutedState s;
  s.pending.resize(net_.place_count());
  s.drawn.assign(net_.place_count(), 0);
  for (int p = 0; p < net_.place_count(); ++p) {
    int tokens = net_.initial_marking()[p];
    for (int i = 1; i <= tokens; ++i) s.pending[p].push_back(route(p, i));
    s.drawn[p] = tokens;
  }
  return s;
}

bool RoutedNet::routed_enabled(const RoutedState& state, int t) const {
  for (int p : net_.trans_pre(t)) {
    const auto& q = state.pending[p];
    if (std::find(q.begin(), q.end(), t) == q.end()) return false;
  }
  return true;
}

std::vector<int> RoutedNet::routed_enabled_set(const RoutedState& state) const {
  std::vector<int> out;
  for (int t = 0; t < net_.transition_count(); ++t)
    if (routed_enabled(state, t)) out.push_back(t);
  return out;
}

RoutedState RoutedNet::routed_fire(const RoutedState& state, int t) const {
  if (!routed_enabled(state, t))
    throw Error(Err::NotRoutedEnabled,
                net_.transition_name(t) + " has no assigned token in some input place");
  RoutedState out = state;
  // Oldest token assigned to t leaves each input place.
  for (int p : net_.trans_pre(t)) {
    auto& q = out.pending[p];
    q.erase(std::find(q.begin(), q.end(), t));
  }
  for (int p : net_.trans_post(t)) {
    out.drawn[p] += 1;
    out.pending[p].push_back(route(p, out.drawn[p]));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Runs

namespace {

void check_blocking_hypotheses(const RoutedNet& rn) {
  const PetriNet& net = rn.net();
  if (!is_equitable(net, rn.routing()))
    throw Error(Err::HypothesisViolated, "routing is not equitable");
  if (!is_bounded(net).bounded) throw Error(Err::HypothesisViolated, "net is not bounded");
  bool live;
  try {
    if (classify(net).is_free_choice) {
      live = commoner_live(net).live;
    } else {
      live = commoner_live(free_choice_expansion(net).net).live;
    }
  } catch (const Error& e) {
    if (e.code() != Err::TooLarge) throw;
    auto lv = is_live(net);
    if (lv == Liveness::Inconclusive) throw;
    live = (lv == Liveness::Live);
  }
  if (!live)
    throw Error(Err::HypothesisViolated, "free choice expansion is not live");
}

// One maximal b-avoiding run. pick(k) chooses among the k enabled candidates.
// With sticky set, verifies that an enabled transition stays enabled until it
// fires.
template <typename Pick>
RoutedRun run_avoiding(const RoutedNet& rn, int b, long long step_cap, Pick pick,
                       bool check_sticky = false) {
  RoutedRun run;
  run.parikh.assign(rn.net().transition_count(), 0);
  RoutedState state = rn.init();
  std::vector<char> was_enabled(rn.net().transition_count(), 0);
  for (long long step = 0;; ++step) {
    std::vector<int> candidates;
    for (int t = 0; t < rn.net().transition_count(); ++t) {
      bool en = rn.routed_enabled(state, t);
      if (check_sticky) {
        if (was_enabled[t] && !en)
          throw Error(Err::InternalError, "routed enabling was lost without firing " +
                                              rn.net().transition_name(t));
        was_enabled[t] = en;
      }
      if (en && t != b) candidates.push_back(t);
    }
    if (candidates.empty()) break;
    if (step >= step_cap)
      throw Error(Err::StepCapExceeded,
                  "no quiescence after " + std::to_string(step_cap) + " firings");
    int t = candidates[pick(candidates.size())];
    state = rn.routed_fire(state, t);
    run.word.push_back(t);
    run.parikh[t] += 1;
    if (check_sticky) was_enabled[t] = rn.routed_enabled(state, t);
  }
  run.final = std::move(state);
  return run;
}

}  // namespace

RoutedRun routed_blocking(const RoutedNet& rn, int b, long long step_cap,
                          bool check_hypotheses) {
  if (check_hypotheses) check_blocking_hypotheses(rn);
  return run_avoiding(rn, b, step_cap, [](size_t) { return 0; });
}

ParikhUniqueReport routed_parikh_unique(const RoutedNet& rn, int b, int trials,
                                        uint64_t shuffle_seed, long long step_cap,
                                        bool check_hypotheses) {
  if (check_hypotheses) check_blocking_hypotheses(rn);
  ParikhUniqueReport report;
  RoutedRun ref = run_avoiding(rn, b, step_cap, [](size_t) { return 0; }, true);
  report.sigma = ref.parikh;
  report.final_marking = routed_marking(ref.final);

  RandomStreams shuffles(shuffle_seed);
  for (int trial = 0; trial < trials; ++trial) {
    Parikh prefix(rn.net().transition_count(), 0);
    uint64_t draw = 0;
    bool monotone = true;
    auto pick = [&](size_t k) {
      return static_cast<size_t>(shuffles.bits("shuffle", std::to_string(trial), draw++) % k);
    };
    RoutedRun r = run_avoiding(rn, b, step_cap, pick, true);
    for (int t : r.word) {
      prefix[t] += 1;
      if (prefix[t] > report.sigma[t]) monotone = false;
    }
    if (!monotone) report.prefix_monotone = false;
    if (r.parikh != report.sigma || routed_marking(r.final) != report.final_marking) {
      report.unique = false;
      report.counterexample = {report.sigma, r.parikh};
      return report;
    }
  }
  return report;
}

std::optional<RoutedDeadlock> routed_deadlock(const RoutedNet& rn, long long step_cap,
                                              int shuffles, uint64_t shuffle_seed) {
  auto run_once = [&](auto pick) -> std::optional<RoutedDeadlock> {
    try {
      RoutedRun r = run_avoiding(rn, -1, step_cap, pick);
      return RoutedDeadlock{routed_marking(r.final), r.parikh};
    } catch (const Error& e) {
      if (e.code() == Err::StepCapExceeded) return std::nullopt;
      throw;
    }
  };
  auto first = run_once([](size_t) { return 0; });
  if (!first) return std::nullopt;
  RandomStreams rng(shuffle_seed);
  for (int s = 0; s < shuffles; ++s) {
    uint64_t draw = 0;
    auto again = run_once([&](size_t k) {
      return static_cast<size_t>(rng.bits("shuffle", std::to_string(s), draw++) % k);
    });
    if (!again || again->marking != first->marking || again->parikh != first->parikh)
      throw Error(Err::InternalError, "routed deadlock is not unique across shuffles");
  }
  return first;
}

// ---------------------------------------------------------------------------
// Routed reachability

namespace {

struct StateKey {
  std::vector<int> data;
  bool operator==(const StateKey&) const = default;
};

struct StateKeyHash {
  size_t operator()(const StateKey& k) const {
    size_t h = 1469598103934665603ull;
    for (int x : k.data) {
      h ^= static_cast<size_t>(x) + 0x9e3779b97f4a7c15ull;
      h *= 1099511628211ull;
    }
    return h;
  }
};

StateKey make_key(const RoutedNet& rn, const RoutedState& s) {
  StateKey key;
  for (size_t p = 0; p < s.pending.size(); ++p) {
    const auto& r = rn.routing().per_place[p];
    long long period = r.kind == RoutingKind::Periodic
                           ? static_cast<long long>(r.periodic.size())
                           : 1;
    key.data.push_back(static_cast<int>(s.drawn[p] % period));
    key.data.push_back(static_cast<int>(s.pending[p].size()));
    for (int d : s.pending[p]) key.data.push_back(d);
    key.data.push_back(-9);
  }
  return key;
}

}  // namespace

RoutedGraph routed_reachability(const RoutedNet& rn, long long node_cap) {
  if (!rn.routing().fully_periodic())
    throw Error(Err::InvalidRouting, "routed reachability needs a fully periodic routing");
  RoutedGraph g;
  std::unordered_map<StateKey, int, StateKeyHash> index;
  RoutedState root = rn.init();
  index[make_key(rn, root)] = 0;
  g.states.push_back(root);
  g.markings.push_back(routed_marking(root));
  std::queue<int> work;
  work.push(0);
  long long expanded = 0;
  while (!work.empty()) {
    if (expanded >= node_cap) {
      g.truncated = true;
      break;
    }
    int cur = work.front();
    work.pop();
    ++expanded;
    RoutedState state = g.states[cur];
    for (int t = 0; t < rn.net().transition_count(); ++t) {
      if (!rn.routed_enabled(state, t)) continue;
      RoutedState nxt = rn.routed_fire(state, t);
      StateKey key = make_key(rn, nxt);
      auto it = index.find(key);
      int to;
      if (it == index.end()) {
        to = static_cast<int>(g.states.size());
        index.emplace(std::move(key), to);
        g.markings.push_back(routed_marking(nxt));
        g.states.push_back(std::move(nxt));
        work.push(to);
      } else {
        to = it->second;
      }
      g.edges.push_back({cur, t, to});
    }
  }
  g.succ.assign(g.states.size(), {});
  g.pred.assign(g.states.size(), {});
  for (const auto& e : g.edges) {
    g.succ[e.from].push_back({e.transition, e.to});
    g.pred[e.to].push_back({e.transition, e.from});
  }
  return g;
}

Liveness routed_live(const RoutedNet& rn, const RoutedGraph& graph) {
  if (graph.truncated) return Liveness::Inconclusive;
  size_t n = graph.states.size();
  for (int t = 0; t < rn.net().transition_count(); ++t) {
    std::vector<char> ok(n, 0);
    std::queue<int> q;
    for (size_t i = 0; i < n; ++i)
      if (rn.routed_enabled(graph.states[i], t)) {
        ok[i] = 1;
        q.push(static_cast<int>(i));
      }
    if (q.empty()) return Liveness::NotLive;
    size_t covered = q.size();
    while (!q.empty()) {
      int cur = q.front();
      q.pop();
      for (auto [tr, from] : graph.pred[cur])
        if (!ok[from]) {
          ok[from] = 1;
          ++covered;
          q.push(from);
        }
    }
    if (covered != n) return Liveness::NotLive;
  }
  return Liveness::Live;
}

}  // namespace fcnet

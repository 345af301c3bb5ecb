#pragma once

#include <deque>
#include <optional>
#include <string>
#include <vector>

#include "fcnet/analysis.hpp"
#include "fcnet/net.hpp"
#include "fcnet/rng.hpp"

namespace fcnet {

inline constexpr long long kDefaultStepCap = 1'000'000;

// ---------------------------------------------------------------------------
// Routing specification

enum class RoutingKind { Trivial, Periodic, Bernoulli };

struct PlaceRouting {
  RoutingKind kind = RoutingKind::Trivial;
  std::vector<int> periodic;   // transition indices in firing order, repeated forever
  std::vector<double> probs;   // parallel to place_post(p)
  // Cumulative-walk order for Bernoulli draws, as positions into
  // place_post(p); empty means place_post order. Transforms that rename
  // output transitions set this so a renamed rule keeps mapping the same
  // stream values to the same choices.
  std::vector<int> order;
};

// One routing rule per place. Places with at most one output transition carry
// the trivial routing; every choice place must name one of the other kinds.
struct RoutingSpec {
  std::vector<PlaceRouting> per_place;

  bool fully_periodic() const {
    for (const auto& r : per_place)
      if (r.kind == RoutingKind::Bernoulli) return false;
    return true;
  }
  bool has_bernoulli() const { return !fully_periodic(); }
};

// All places trivial; valid only for nets without choice places.
RoutingSpec trivial_routing(const PetriNet& net);

// Throws Error(InvalidRouting) describing the first violation.
void check_routing(const PetriNet& net, const RoutingSpec& routing);

// Every output transition of every place receives infinitely many tokens:
// periodic rules mention all of p*, Bernoulli rules give everyone positive
// probability.
bool is_equitable(const PetriNet& net, const RoutingSpec& routing);

// P{u_p(1) = t} for Bernoulli and the long-run frequency for periodic rules.
double routing_prob(const PetriNet& net, const RoutingSpec& routing, int p, int t);

// ---------------------------------------------------------------------------
// Routed token game

// World state of the routed net. Tokens sit in per-place FIFO queues holding
// their assigned destination (-1 in places without output transitions);
// drawn[p] counts the routing decisions u_p(1..drawn[p]) consumed so far.
struct RoutedState {
  std::vector<std::deque<int>> pending;
  std::vector<long long> drawn;

  bool operator==(const RoutedState&) const = default;
};

Marking routed_marking(const RoutedState& state);

// Binds a net, a routing and a seed; holds a reference, so the net must
// outlive it.
class RoutedNet {
 public:
  RoutedNet(const PetriNet& net, RoutingSpec routing, uint64_t seed = 0);

  const PetriNet& net() const { return net_; }
  const RoutingSpec& routing() const { return routing_; }

  // The n-th routing decision of place p (n is 1-based).
  int route(int p, long long n) const;

  RoutedState init() const;
  bool routed_enabled(const RoutedState& state, int t) const;
  std::vector<int> routed_enabled_set(const RoutedState& state) const;
  RoutedState routed_fire(const RoutedState& state, int t) const;  // throws NotRoutedEnabled

 private:
  const PetriNet& net_;
  RoutingSpec routing_;
  RandomStreams streams_;
};

struct RoutedRun {
  std::vector<int> word;
  Parikh parikh;
  RoutedState final;
};

// Fires routed-enabled transitions other than b (lexicographic pick) until
// only b remains enabled. Hypotheses: equitable routing and a live, bounded
// free choice expansion; with check_hypotheses they are verified up front
// (Error(HypothesisViolated)), otherwise a diverging run ends in
// Error(StepCapExceeded).
RoutedRun routed_blocking(const RoutedNet& rn, int b, long long step_cap = kDefaultStepCap,
                          bool check_hypotheses = true);

struct ParikhUniqueReport {
  bool unique = true;
  bool prefix_monotone = true;
  Parikh sigma;              // the common Parikh vector
  Marking final_marking;
  std::optional<std::pair<Parikh, Parikh>> counterexample;
};

// Replays `trials` randomized-order b-avoiding executions to quiescence and
// checks they all share one Parikh vector; every prefix must stay below it.
ParikhUniqueReport routed_parikh_unique(const RoutedNet& rn, int b, int trials,
                                        uint64_t shuffle_seed,
                                        long long step_cap = kDefaultStepCap,
                                        bool check_hypotheses = true);

struct RoutedDeadlock {
  Marking marking;
  Parikh parikh;
};

// Runs to quiescence with no transition blocked; re-runs under shuffled
// choice orders and checks the deadlock marking and Parikh vector never
// change. nullopt when no deadlock is reached within step_cap.
std::optional<RoutedDeadlock> routed_deadlock(const RoutedNet& rn,
                                              long long step_cap = kDefaultStepCap,
                                              int shuffles = 20, uint64_t shuffle_seed = 1);

// ---------------------------------------------------------------------------
// Routed reachability (periodic routings only)

struct RoutedGraph {
  std::vector<RoutedState> states;
  std::vector<Marking> markings;  // projection per state
  struct Edge {
    int from;
    int transition;
    int to;
  };
  std::vector<Edge> edges;
  bool truncated = false;
  std::vector<std::vector<std::pair<int, int>>> succ;  // (transition, state)
  std::vector<std::vector<std::pair<int, int>>> pred;
};

// Exhaustive expansion over (pending assignments, routing phases); the phase
// of a periodic rule is its decision counter modulo the period, which makes
// the state space finite on bounded nets.
RoutedGraph routed_reachability(const RoutedNet& rn, long long node_cap = kDefaultNodeCap);

// Routed liveness on an untruncated routed graph: from every state, every
// transition can become routed-enabled again.
Liveness routed_live(const RoutedNet& rn, const RoutedGraph& graph);

}  // namespace fcnet

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fcnet/net.hpp"
#include "fcnet/routing.hpp"

namespace fcnet {

inline constexpr long long kDefaultEventCap = 10'000'000;

// ---------------------------------------------------------------------------
// Firing-time specification

enum class TimingKind { Deterministic, Exponential, Uniform };

struct TransitionTiming {
  TimingKind kind = TimingKind::Deterministic;
  double value = 0.0;  // Deterministic
  double rate = 1.0;   // Exponential
  double lo = 0.0, hi = 0.0;  // Uniform
  // Random stream identity; defaults to the transition name. Transforms remap
  // it so a split transition keeps drawing the original sequence.
  std::string stream;
};

struct TimingSpec {
  std::vector<TransitionTiming> per_transition;
};

// Throws Error(InvalidConfig) on non-finite or out-of-range parameters.
void check_timing(const PetriNet& net, const TimingSpec& timing);

double timing_mean(const TransitionTiming& t);

// ---------------------------------------------------------------------------
// Simulation configuration and results

struct StopRule {
  enum class Kind { MaxClock, MaxFirings, MaxEvents };
  Kind kind = Kind::MaxEvents;
  double max_clock = 0.0;
  int transition = -1;       // MaxFirings target
  long long count = 0;       // MaxFirings / MaxEvents budget

  static StopRule clock(double horizon) { return {Kind::MaxClock, horizon, -1, 0}; }
  static StopRule firings(int transition, long long n) {
    return {Kind::MaxFirings, 0.0, transition, n};
  }
  static StopRule events(long long n) { return {Kind::MaxEvents, 0.0, -1, n}; }
};

struct SimConfig {
  uint64_t seed = 0;
  StopRule stop = StopRule::events(kDefaultEventCap);
  // Transition whose firing time is +infinity: it starts and freezes tokens
  // but never completes.
  std::optional<int> frozen_transition;
  // External token arrivals (place, instant); tokens are numbered on arrival
  // like any other deposit.
  std::vector<std::pair<int, double>> injections;
  bool check_invariants = false;
};

// Completion instants per transition, nondecreasing within each row.
struct DaterLog {
  std::vector<std::vector<double>> completions;

  long long count_up_to(int t, double horizon) const;
};

struct TimedState {
  double clock = 0.0;
  Marking free;                          // unfrozen tokens per place
  std::vector<long long> in_flight;      // firings begun but not completed, per transition
  std::vector<long long> begun;          // firings started, per transition
  std::vector<long long> completed;      // firings completed, per transition
  std::vector<long long> entered;        // tokens ever placed, per place (incl. initial)
  bool quiescent = false;                // no pending completion and nothing startable

  // Free plus frozen tokens per place.
  Marking total_marking(const PetriNet& net) const;
};

struct SimResult {
  DaterLog daters;
  TimedState final;
};

// As-soon-as-possible execution of the stochastic routed timed net: an
// enabled transition immediately begins firing at its full enabling degree,
// freezing one token per input place per firing; a completion deposits one
// token into each output place and draws its routing destination in arrival
// order. Simultaneous events are processed in (instant, injection-before-
// completion, entity id, index) order. Transitions without input places never
// start on their own; they are driven through injections.
SimResult simulate(const PetriNet& net, const RoutingSpec& routing, const TimingSpec& timing,
                   const SimConfig& config);

// ---------------------------------------------------------------------------
// Throughput estimation

struct ThroughputEstimate {
  std::vector<double> lambda_hat;  // completions(t) / horizon, per transition
  std::vector<double> gamma_hat;   // last completion instant / count, per transition
  double horizon = 0.0;
};

ThroughputEstimate throughput_estimate(const PetriNet& net, const DaterLog& daters,
                                       double horizon);

// ---------------------------------------------------------------------------
// Enabling degree and the open expansion

// Largest k such that k firings of b can start together: the minimum token
// count over the input places of b.
int enabling_degree(const PetriNet& net, const Marking& m, int b);
int enabling_degree(const PetriNet& net, const Marking& m, const std::string& b);

struct OpenExpansion {
  PetriNet net;
  std::string blocked;            // the split transition of the original net
  std::string input_transition;   // I, fires only when driven
  std::string input_place;        // p_I
  std::string b_in;               // carries the firing duration of b
  std::string b_out;              // immediate half taking b's input places
  std::string recycle_place;      // p_b
  int enabling_deg = 0;           // K
  Marking psi_marking;            // deadlocked initial marking of the expansion

  // Timing/routing for the expansion, derived from specs of the original net;
  // b_in keeps b's random stream, b_out and I are immediate.
  TimingSpec expand_timing(const PetriNet& original, const TimingSpec& timing) const;
  RoutingSpec expand_routing(const PetriNet& original, const RoutingSpec& routing) const;
};

// Splits b into b_out -> p_b -> b_in behind an external input I -> p_I; the
// expansion marking freezes K tokens worth of enabling into p_b and is a
// deadlock until I is driven.
OpenExpansion open_expansion(const PetriNet& net, int b, const Marking& m_b);
OpenExpansion open_expansion(const PetriNet& net, const std::string& b, const Marking& m_b);

// ---------------------------------------------------------------------------
// Blocked-transition return times

struct TauReport {
  std::vector<double> samples;
  long long cap_outs = 0;
  double mean = 0.0;
  double max = 0.0;
};

// Per replication: freeze b and run from the initial marking until nothing
// but b can move; tau is the instant of the last completion. Every run must
// quiesce within event_cap events and all runs must agree on the final total
// marking.
TauReport measure_tau(const PetriNet& net, const RoutingSpec& routing, const TimingSpec& timing,
                      int b, int replications, uint64_t seed,
                      long long event_cap = kDefaultEventCap, bool check_hypotheses = true);

}  // namespace fcnet

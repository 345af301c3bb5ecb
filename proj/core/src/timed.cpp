#include "fcnet/timed.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <thread>
#include <queue>
#include <set>

#include "fcnet/analysis.hpp"

namespace fcnet {

void check_timing(const PetriNet& net, const TimingSpec& timing) {
  if (static_cast<int>(timing.per_transition.size()) != net.transition_count())
    throw Error(Err::InvalidConfig, "timing does not cover every transition");
  for (int t = 0; t < net.transition_count(); ++t) {
    const auto& tt = timing.per_transition[t];
    switch (tt.kind) {
      case TimingKind::Deterministic:
        if (!(tt.value >= 0) || !std::isfinite(tt.value))
          throw Error(Err::InvalidConfig,
                      "bad deterministic time at " + net.transition_name(t));
        break;
      case TimingKind::Exponential:
        if (!(tt.rate > 0) || !std::isfinite(tt.rate))
          throw Error(Err::InvalidConfig, "bad rate at " + net.transition_name(t));
        break;
      case TimingKind::Uniform:
        if (!(tt.lo >= 0) || !(tt.lo <= tt.hi) || !std::isfinite(tt.hi))
          throw Error(Err::InvalidConfig, "bad uniform range at " + net.transition_name(t));
        break;
    }
  }
}

double timing_mean(const TransitionTiming& t) {
  switch (t.kind) {
    case TimingKind::Deterministic: return t.value;
    case TimingKind::Exponential: return 1.0 / t.rate;
    case TimingKind::Uniform: return 0.5 * (t.lo + t.hi);
  }
  return 0.0;
}

long long DaterLog::count_up_to(int t, double horizon) const {
  const auto& row = completions[t];
  return std::upper_bound(row.begin(), row.end(), horizon) - row.begin();
}

Marking TimedState::total_marking(const PetriNet& net) const {
  Marking m = free;
  for (int t = 0; t < net.transition_count(); ++t)
    if (in_flight[t] > 0)
      for (int p : net.trans_pre(t)) m[p] += static_cast<int>(in_flight[t]);
  return m;
}

// ---------------------------------------------------------------------------
// Simulator

namespace {

struct Event {
  double instant;
  int kind;  // 0 = injection, 1 = completion
  int entity;
  long long index;

  bool operator>(const Event& o) const {
    if (instant != o.instant) return instant > o.instant;
    if (kind != o.kind) return kind > o.kind;
    if (entity != o.entity) return entity > o.entity;
    return index > o.index;
  }
};

class Simulator {
 public:
  Simulator(const PetriNet& net, const RoutingSpec& routing, const TimingSpec& timing,
            const SimConfig& config)
      : net_(net), routing_(routing), timing_(timing), cfg_(config), streams_(config.seed) {
    check_routing(net_, routing_);
    check_timing(net_, timing_);
    if (cfg_.stop.kind == StopRule::Kind::MaxFirings &&
        (cfg_.stop.transition < 0 || cfg_.stop.transition >= net_.transition_count()))
      throw Error(Err::InvalidConfig, "stop rule names no transition");
    pending_.resize(net_.place_count());
    entered_.assign(net_.place_count(), 0);
    injected_.assign(net_.place_count(), 0);
    begun_.assign(net_.transition_count(), 0);
    completed_.assign(net_.transition_count(), 0);
    daters_.completions.resize(net_.transition_count());
  }

  SimResult run() {
    for (int p = 0; p < net_.place_count(); ++p)
      for (int i = 0; i < net_.initial_marking()[p]; ++i) deposit(p);
    for (size_t i = 0; i < cfg_.injections.size(); ++i) {
      auto [p, instant] = cfg_.injections[i];
      if (p < 0 || p >= net_.place_count() || instant < 0)
        throw Error(Err::InvalidConfig, "bad injection");
      agenda_.push({instant, 0, p, static_cast<long long>(i)});
    }
    start_cascade();

    long long events_processed = 0;
    bool stopped = false;
    while (!agenda_.empty()) {
      Event ev = agenda_.top();
      if (cfg_.stop.kind == StopRule::Kind::MaxClock && ev.instant > cfg_.stop.max_clock) {
        clock_ = cfg_.stop.max_clock;
        stopped = true;
        break;
      }
      if (cfg_.stop.kind == StopRule::Kind::MaxEvents && events_processed >= cfg_.stop.count) {
        stopped = true;
        break;
      }
      agenda_.pop();
      clock_ = ev.instant;
      if (ev.kind == 0) {
        injected_[ev.entity] += 1;
        deposit(ev.entity);
      } else {
        int t = ev.entity;
        completed_[t] += 1;
        daters_.completions[t].push_back(ev.instant);
        for (int p : net_.trans_post(t)) deposit(p);
        ++events_processed;
      }
      start_cascade();
      if (cfg_.check_invariants) check_conservation();
      if (cfg_.stop.kind == StopRule::Kind::MaxFirings && ev.kind == 1 &&
          ev.entity == cfg_.stop.transition && completed_[ev.entity] >= cfg_.stop.count) {
        stopped = true;
        break;
      }
    }

    SimResult res;
    res.daters = std::move(daters_);
    res.final.clock = clock_;
    res.final.free.resize(net_.place_count());
    for (int p = 0; p < net_.place_count(); ++p)
      res.final.free[p] = static_cast<int>(pending_[p].size());
    res.final.begun = begun_;
    res.final.completed = completed_;
    res.final.entered = entered_;
    res.final.in_flight.resize(net_.transition_count());
    for (int t = 0; t < net_.transition_count(); ++t)
      res.final.in_flight[t] = begun_[t] - completed_[t];
    res.final.quiescent = !stopped && agenda_.empty();
    return res;
  }

 private:
  int route(int p, long long n) {
    const auto& outs = net_.place_post(p);
    const auto& r = routing_.per_place[p];
    switch (r.kind) {
      case RoutingKind::Trivial:
        return outs.empty() ? -1 : outs[0];
      case RoutingKind::Periodic:
        return r.periodic[static_cast<size_t>((n - 1) %
                                              static_cast<long long>(r.periodic.size()))];
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

  double sample_duration(int t, long long n) {
    const auto& tt = timing_.per_transition[t];
    const std::string& stream = tt.stream.empty() ? net_.transition_name(t) : tt.stream;
    switch (tt.kind) {
      case TimingKind::Deterministic:
        return tt.value;
      case TimingKind::Exponential:
        return -std::log(streams_.uniform01("time", stream, static_cast<uint64_t>(n))) / tt.rate;
      case TimingKind::Uniform:
        return tt.lo +
               streams_.uniform01("time", stream, static_cast<uint64_t>(n)) * (tt.hi - tt.lo);
    }
    return 0.0;
  }

  void deposit(int p) {
    entered_[p] += 1;
    pending_[p].push_back(route(p, entered_[p]));
  }

  bool startable(int t) const {
    if (net_.trans_pre(t).empty()) return false;  // input-driven source
    for (int p : net_.trans_pre(t)) {
      const auto& q = pending_[p];
      if (std::find(q.begin(), q.end(), t) == q.end()) return false;
    }
    return true;
  }

  void start_cascade() {
    // Starts only consume, so one pass per transition drains its full
    // enabling degree and cannot unblock anything else.
    for (int t = 0; t < net_.transition_count(); ++t) {
      while (startable(t)) {
        for (int p : net_.trans_pre(t)) {
          auto& q = pending_[p];
          q.erase(std::find(q.begin(), q.end(), t));
        }
        begun_[t] += 1;
        if (cfg_.frozen_transition && *cfg_.frozen_transition == t) continue;
        agenda_.push({clock_ + sample_duration(t, begun_[t]), 1, t, begun_[t]});
      }
    }
  }

  void check_conservation() const {
    for (int p = 0; p < net_.place_count(); ++p) {
      long long expect = net_.initial_marking()[p] + injected_[p];
      for (int t : net_.place_pre(p)) expect += completed_[t];
      for (int t : net_.place_post(p)) expect -= begun_[t];
      if (expect < 0 || expect != static_cast<long long>(pending_[p].size()))
        throw Error(Err::InternalError,
                    "token conservation failed at place " + net_.place_name(p));
    }
  }

  const PetriNet& net_;
  const RoutingSpec& routing_;
  const TimingSpec& timing_;
  SimConfig cfg_;
  RandomStreams streams_;

  double clock_ = 0.0;
  std::vector<std::deque<int>> pending_;
  std::vector<long long> entered_, injected_, begun_, completed_;
  std::priority_queue<Event, std::vector<Event>, std::greater<Event>> agenda_;
  DaterLog daters_;
};

}  // namespace

SimResult simulate(const PetriNet& net, const RoutingSpec& routing, const TimingSpec& timing,
                   const SimConfig& config) {
  Simulator sim(net, routing, timing, config);
  return sim.run();
}

ThroughputEstimate throughput_estimate(const PetriNet& net, const DaterLog& daters,
                                       double horizon) {
  if (!(horizon > 0)) throw Error(Err::InvalidConfig, "horizon must be positive");
  ThroughputEstimate est;
  est.horizon = horizon;
  est.lambda_hat.assign(net.transition_count(), 0.0);
  est.gamma_hat.assign(net.transition_count(), 0.0);
  for (int t = 0; t < net.transition_count(); ++t) {
    long long n = daters.count_up_to(t, horizon);
    est.lambda_hat[t] = static_cast<double>(n) / horizon;
    if (n > 0) est.gamma_hat[t] = daters.completions[t][n - 1] / static_cast<double>(n);
  }
  return est;
}

// ---------------------------------------------------------------------------
// Enabling degree and open expansion

int enabling_degree(const PetriNet& net, const Marking& m, int b) {
  if (!enabled(net, m, b))
    throw Error(Err::NotEnabled, net.transition_name(b) + " is not enabled");
  int k = INT32_MAX;
  for (int p : net.trans_pre(b)) k = std::min(k, m[p]);
  return k;
}

int enabling_degree(const PetriNet& net, const Marking& m, const std::string& b) {
  return enabling_degree(net, m, net.transition_index(b));
}

OpenExpansion open_expansion(const PetriNet& net, int b, const Marking& m_b) {
  int K = enabling_degree(net, m_b, b);
  const std::string& bn = net.transition_name(b);

  std::set<std::string> taken(net.places().begin(), net.places().end());
  taken.insert(net.transitions().begin(), net.transitions().end());
  auto fresh = [&taken](std::string c) {
    while (taken.count(c)) c += "_";
    taken.insert(c);
    return c;
  };

  std::string name_i = fresh(std::string(kExpansionPrefix) + "I");
  std::string name_pi = fresh(std::string(kExpansionPrefix) + "p_I");
  std::string name_bin = fresh(std::string(kExpansionPrefix) + bn + "_i");
  std::string name_bout = fresh(std::string(kExpansionPrefix) + bn + "_o");
  std::string name_pb = fresh(std::string(kExpansionPrefix) + "p_" + bn);

  NetSpec spec;
  for (int p = 0; p < net.place_count(); ++p) {
    int tokens = m_b[p];
    if (net.has_arc_pt(p, b)) tokens += -K + (net.has_arc_tp(b, p) ? K : 0);
    if (tokens < 0) throw Error(Err::InternalError, "negative expansion marking");
    spec.places.emplace_back(net.place_name(p), tokens);
  }
  spec.places.emplace_back(name_pb, K);
  spec.places.emplace_back(name_pi, 0);
  for (int t = 0; t < net.transition_count(); ++t)
    if (t != b) spec.transitions.push_back(net.transition_name(t));
  spec.transitions.push_back(name_i);
  spec.transitions.push_back(name_bin);
  spec.transitions.push_back(name_bout);

  for (int p = 0; p < net.place_count(); ++p) {
    for (int t : net.place_post(p)) {
      if (t != b) {
        spec.arcs.emplace_back(net.place_name(p), net.transition_name(t));
      } else if (net.has_arc_tp(b, p)) {
        // Self-loop pair moves to b_in.
        spec.arcs.emplace_back(net.place_name(p), name_bin);
        spec.arcs.emplace_back(name_bin, net.place_name(p));
      } else {
        spec.arcs.emplace_back(net.place_name(p), name_bout);
      }
    }
  }
  for (int t = 0; t < net.transition_count(); ++t) {
    if (t == b) continue;
    for (int p : net.trans_post(t))
      spec.arcs.emplace_back(net.transition_name(t), net.place_name(p));
  }
  for (int p : net.trans_post(b))
    if (!net.has_arc_pt(p, b)) spec.arcs.emplace_back(name_bin, net.place_name(p));
  spec.arcs.emplace_back(name_i, name_pi);
  spec.arcs.emplace_back(name_pi, name_bin);
  spec.arcs.emplace_back(name_bout, name_pb);
  spec.arcs.emplace_back(name_pb, name_bin);

  OpenExpansion out{PetriNet(spec), bn,       name_i, name_pi,
                    name_bin,       name_bout, name_pb, K,
                    {}};
  out.psi_marking = out.net.initial_marking();

  // The expansion marking must be dead until I is driven.
  for (int t = 0; t < out.net.transition_count(); ++t)
    if (!out.net.trans_pre(t).empty() && enabled(out.net, out.psi_marking, t))
      throw Error(Err::InternalError, "open expansion marking is not a deadlock");
  return out;
}

OpenExpansion open_expansion(const PetriNet& net, const std::string& b, const Marking& m_b) {
  return open_expansion(net, net.transition_index(b), m_b);
}

TimingSpec OpenExpansion::expand_timing(const PetriNet& original,
                                        const TimingSpec& timing) const {
  TimingSpec out;
  out.per_transition.resize(net.transition_count());
  for (int t = 0; t < net.transition_count(); ++t) {
    const std::string& name = net.transition_name(t);
    if (original.has_transition(name)) {
      const auto& src = timing.per_transition[original.transition_index(name)];
      out.per_transition[t] = src;
      if (out.per_transition[t].stream.empty()) out.per_transition[t].stream = name;
    } else if (name == b_in) {
      // b_in inherits b's distribution and stream.
      out.per_transition[t] = timing.per_transition[original.transition_index(blocked)];
      if (out.per_transition[t].stream.empty()) out.per_transition[t].stream = blocked;
    } else {
      out.per_transition[t] = {TimingKind::Deterministic, 0.0, 1.0, 0.0, 0.0, name};
    }
  }
  return out;
}

RoutingSpec OpenExpansion::expand_routing(const PetriNet& original,
                                          const RoutingSpec& routing) const {
  // Destinations pointing at the split transition follow it: self-loop inputs
  // route to b_in, plain inputs to b_out.
  int b_orig = original.transition_index(blocked);

  RoutingSpec out;
  out.per_place.resize(net.place_count());
  for (int p = 0; p < net.place_count(); ++p) {
    const std::string& name = net.place_name(p);
    if (!original.has_place(name)) continue;  // p_I, p_b are single-output
    int po = original.place_index(name);
    const auto& src = routing.per_place[po];
    auto renamed = [&](int t_orig) {
      if (t_orig != b_orig) return net.transition_index(original.transition_name(t_orig));
      bool self_loop = original.has_arc_pt(po, b_orig) && original.has_arc_tp(b_orig, po);
      return net.transition_index(self_loop ? b_in : b_out);
    };
    PlaceRouting& dst = out.per_place[p];
    dst.kind = src.kind;
    if (src.kind == RoutingKind::Periodic) {
      for (int t : src.periodic) dst.periodic.push_back(renamed(t));
    } else if (src.kind == RoutingKind::Bernoulli) {
      // Keep the cumulative layout of the original rule so identical stream
      // values keep making the same (renamed) choices.
      const auto& old_outs = original.place_post(po);
      const auto& new_outs = net.place_post(p);
      dst.probs.assign(new_outs.size(), 0.0);
      dst.order.clear();
      for (size_t k = 0; k < old_outs.size(); ++k) {
        size_t old_i = src.order.empty() ? k : static_cast<size_t>(src.order[k]);
        int mapped = renamed(old_outs[old_i]);
        auto pos = std::find(new_outs.begin(), new_outs.end(), mapped);
        dst.probs[pos - new_outs.begin()] = src.probs[old_i];
        dst.order.push_back(static_cast<int>(pos - new_outs.begin()));
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Blocked-transition return times

TauReport measure_tau(const PetriNet& net, const RoutingSpec& routing, const TimingSpec& timing,
                      int b, int replications, uint64_t seed, long long event_cap,
                      bool check_hypotheses) {
  if (check_hypotheses) {
    if (!is_equitable(net, routing))
      throw Error(Err::HypothesisViolated, "routing is not equitable");
    if (!is_bounded(net).bounded) throw Error(Err::HypothesisViolated, "net is not bounded");
    bool live;
    try {
      live = classify(net).is_free_choice ? commoner_live(net).live
                                          : commoner_live(free_choice_expansion(net).net).live;
    } catch (const Error& e) {
      if (e.code() != Err::TooLarge) throw;
      auto lv = is_live(net);
      if (lv == Liveness::Inconclusive) throw;
      live = (lv == Liveness::Live);
    }
    if (!live) throw Error(Err::HypothesisViolated, "free choice expansion is not live");
  }

  // Replications are independent (the index is folded into the seed), so the
  // batch fans out over a few workers; results are keyed by replication index
  // and aggregation stays order-independent.
  struct Slot {
    double tau = -1.0;  // -1 marks a cap-out
    Marking total;
  };
  std::vector<Slot> slots(static_cast<size_t>(std::max(replications, 0)));
  auto worker = [&](int offset, int stride) {
    for (int r = offset; r < replications; r += stride) {
      SimConfig cfg;
      cfg.seed = RandomStreams::derive(seed, static_cast<uint64_t>(r));
      cfg.frozen_transition = b;
      cfg.stop = StopRule::events(event_cap);
      SimResult res = simulate(net, routing, timing, cfg);
      if (!res.final.quiescent) continue;
      double tau = 0.0;
      for (const auto& row : res.daters.completions)
        if (!row.empty()) tau = std::max(tau, row.back());
      slots[r].tau = tau;
      slots[r].total = res.final.total_marking(net);
    }
  };
  unsigned workers = std::min<unsigned>(std::thread::hardware_concurrency(), 4);
  if (workers > 1 && replications >= 64) {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back(worker, static_cast<int>(w), static_cast<int>(workers));
    for (auto& th : pool) th.join();
  } else {
    worker(0, 1);
  }

  TauReport report;
  std::optional<Marking> final_marking;
  for (const auto& slot : slots) {
    if (slot.tau < 0) {
      report.cap_outs += 1;
      continue;
    }
    if (!final_marking) {
      final_marking = slot.total;
    } else if (*final_marking != slot.total) {
      throw Error(Err::InternalError, "blocked runs quiesced in different markings");
    }
    report.samples.push_back(slot.tau);
  }
  for (double x : report.samples) {
    report.mean += x;
    report.max = std::max(report.max, x);
  }
  if (!report.samples.empty()) report.mean /= static_cast<double>(report.samples.size());
  return report;
}

}  // namespace fcnet

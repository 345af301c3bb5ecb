#include "random_nets.hpp"

#include <algorithm>
#include <set>
#include <string>
#include <vector>

namespace testgen {

using namespace fcnet;

std::optional<GeneratedNet> random_fcn(uint64_t seed, const NetGenOptions& opt) {
  std::mt19937_64 rng(seed);
  for (int attempt = 0; attempt < opt.attempts; ++attempt) {
    int num_p = std::uniform_int_distribution<int>(2, opt.max_places)(rng);
    int num_t = std::uniform_int_distribution<int>(2, opt.max_transitions)(rng);
    int walk_len =
        std::uniform_int_distribution<int>(std::max(num_p, num_t), num_p + num_t + 2)(rng);

    // Closed alternating walk p_0 t_0 p_1 t_1 ... back to p_0; a surjection
    // onto both node sets keeps the net connected and strongly connected.
    std::vector<int> p_slots(walk_len), t_slots(walk_len);
    for (int i = 0; i < walk_len; ++i) {
      p_slots[i] = i < num_p ? i : std::uniform_int_distribution<int>(0, num_p - 1)(rng);
      t_slots[i] = i < num_t ? i : std::uniform_int_distribution<int>(0, num_t - 1)(rng);
    }
    std::shuffle(p_slots.begin(), p_slots.end(), rng);
    std::shuffle(t_slots.begin(), t_slots.end(), rng);

    NetSpec spec;
    std::vector<int> tokens(num_p, 0);
    int total_tokens = std::uniform_int_distribution<int>(1, opt.max_bound)(rng);
    for (int i = 0; i < total_tokens; ++i)
      tokens[std::uniform_int_distribution<int>(0, num_p - 1)(rng)] += 1;
    for (int p = 0; p < num_p; ++p) spec.places.emplace_back("p" + std::to_string(p), tokens[p]);
    for (int t = 0; t < num_t; ++t) spec.transitions.push_back("t" + std::to_string(t));

    std::set<std::pair<std::string, std::string>> arcs;
    auto pn = [](int p) { return "p" + std::to_string(p); };
    auto tn = [](int t) { return "t" + std::to_string(t); };
    for (int i = 0; i < walk_len; ++i) {
      arcs.insert({pn(p_slots[i]), tn(t_slots[i])});
      arcs.insert({tn(t_slots[i]), pn(p_slots[(i + 1) % walk_len])});
    }
    int extra = std::uniform_int_distribution<int>(0, 2)(rng);
    for (int i = 0; i < extra; ++i) {
      int p = std::uniform_int_distribution<int>(0, num_p - 1)(rng);
      int t = std::uniform_int_distribution<int>(0, num_t - 1)(rng);
      if (rng() & 1)
        arcs.insert({pn(p), tn(t)});
      else
        arcs.insert({tn(t), pn(p)});
    }

    // Fork/join synchronization: duplicate a single-output place between its
    // producer and consumer. The twin keeps a single output, so free choice
    // is preserved, and it copies the token count to keep the join fed.
    int forks = std::uniform_int_distribution<int>(0, 2)(rng);
    for (int i = 0; i < forks; ++i) {
      int p = std::uniform_int_distribution<int>(0, num_p - 1)(rng);
      std::vector<std::string> outs, ins;
      for (const auto& [from, to] : arcs) {
        if (from == pn(p)) outs.push_back(to);
        if (to == pn(p)) ins.push_back(from);
      }
      if (outs.size() != 1 || ins.empty()) continue;
      // Mirror every producer so the twin carries exactly the flow of p.
      std::string twin = "p" + std::to_string(static_cast<int>(spec.places.size()));
      spec.places.emplace_back(twin, tokens[p]);
      for (const auto& in : ins) arcs.insert({in, twin});
      arcs.insert({twin, outs[0]});
    }
    if (static_cast<int>(spec.places.size()) > opt.max_places) continue;
    spec.arcs.assign(arcs.begin(), arcs.end());

    if (!validate(spec).empty()) continue;
    PetriNet net(spec);
    if (!classify(net).is_free_choice) continue;
    if (!strongly_connected(net)) continue;
    // Capped explicit reachability doubles as the boundedness filter: a
    // truncated graph means unbounded or too big either way.
    auto graph = reachability(net, net.initial_marking(), 3000);
    if (graph.truncated) continue;
    int bound = 0;
    for (const auto& m : graph.nodes)
      for (int x : m) bound = std::max(bound, x);
    if (bound == 0 || bound > opt.max_bound) continue;
    if (opt.require_live && !commoner_live(net).live) continue;
    return GeneratedNet{std::move(net), bound};
  }
  return std::nullopt;
}

RoutingSpec random_equitable_periodic(const PetriNet& net, uint64_t seed) {
  std::mt19937_64 rng(seed);
  RoutingSpec spec = trivial_routing(net);
  for (int p = 0; p < net.place_count(); ++p) {
    const auto& outs = net.place_post(p);
    if (outs.size() <= 1) continue;
    std::vector<int> period = outs;
    int dup = std::uniform_int_distribution<int>(0, 2)(rng);
    for (int i = 0; i < dup; ++i)
      period.push_back(outs[std::uniform_int_distribution<int>(0, (int)outs.size() - 1)(rng)]);
    std::shuffle(period.begin(), period.end(), rng);
    spec.per_place[p].kind = RoutingKind::Periodic;
    spec.per_place[p].periodic = period;
  }
  return spec;
}

RoutingSpec random_equitable_bernoulli(const PetriNet& net, uint64_t seed) {
  std::mt19937_64 rng(seed);
  RoutingSpec spec = trivial_routing(net);
  for (int p = 0; p < net.place_count(); ++p) {
    const auto& outs = net.place_post(p);
    if (outs.size() <= 1) continue;
    std::vector<double> w(outs.size());
    double sum = 0;
    for (double& x : w) {
      x = std::uniform_real_distribution<double>(0.2, 1.0)(rng);
      sum += x;
    }
    for (double& x : w) x /= sum;
    spec.per_place[p].kind = RoutingKind::Bernoulli;
    spec.per_place[p].probs = w;
  }
  return spec;
}

}  // namespace testgen

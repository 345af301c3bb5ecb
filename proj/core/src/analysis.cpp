#include "fcnet/analysis.hpp"

#include <algorithm>
#include <climits>
#include <queue>
#include <sstream>
#include <unordered_map>

namespace fcnet {

ReachabilityGraph reachability(const PetriNet& net, const Marking& root, long long node_cap) {
  ReachabilityGraph g;
  std::unordered_map<Marking, int, MarkingHash> index;
  g.nodes.push_back(root);
  index[root] = 0;
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
    Marking m = g.nodes[cur];
    for (int t = 0; t < net.transition_count(); ++t) {
      if (!enabled(net, m, t)) continue;
      Marking nxt = fire(net, m, t);
      auto it = index.find(nxt);
      int to;
      if (it == index.end()) {
        to = static_cast<int>(g.nodes.size());
        index.emplace(nxt, to);
        g.nodes.push_back(std::move(nxt));
        work.push(to);
      } else {
        to = it->second;
      }
      g.edges.push_back({cur, t, to});
    }
  }
  g.succ.assign(g.nodes.size(), {});
  g.pred.assign(g.nodes.size(), {});
  for (const auto& e : g.edges) {
    g.succ[e.from].push_back({e.transition, e.to});
    g.pred[e.to].push_back({e.transition, e.from});
  }
  return g;
}

std::string to_dot(const PetriNet& net, const ReachabilityGraph& graph) {
  std::ostringstream os;
  os << "digraph reachability {\n";
  os << "  rankdir=LR;\n";
  for (size_t i = 0; i < graph.nodes.size(); ++i) {
    os << "  n" << i << " [label=\"" << marking_to_string(net, graph.nodes[i]) << "\"";
    if (i == 0) os << ",style=bold";
    os << "];\n";
  }
  for (const auto& e : graph.edges)
    os << "  n" << e.from << " -> n" << e.to << " [label=\""
       << net.transition_name(e.transition) << "\"];\n";
  if (graph.truncated) os << "  truncated [shape=plaintext,label=\"(truncated)\"];\n";
  os << "}\n";
  return os.str();
}

// ---------------------------------------------------------------------------
// Karp-Miller coverability

namespace {

constexpr long long kOmega = -1;
using GenMarking = std::vector<long long>;

bool gen_leq(const GenMarking& a, const GenMarking& b) {
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i] == kOmega && b[i] != kOmega) return false;
    if (a[i] != kOmega && b[i] != kOmega && a[i] > b[i]) return false;
  }
  return true;
}

struct KmHash {
  size_t operator()(const GenMarking& m) const {
    size_t h = 1469598103934665603ull;
    for (long long x : m) {
      h ^= static_cast<size_t>(x) + 0x9e3779b97f4a7c15ull;
      h *= 1099511628211ull;
    }
    return h;
  }
};

}  // namespace

BoundResult is_bounded(const PetriNet& net) {
  struct Node {
    GenMarking m;
    int parent;
    int via;  // transition from parent
  };
  std::vector<Node> tree;
  std::unordered_map<GenMarking, int, KmHash> seen;

  GenMarking root(net.initial_marking().begin(), net.initial_marking().end());
  tree.push_back({root, -1, -1});
  seen[root] = 0;
  std::queue<int> work;
  work.push(0);

  BoundResult res;
  bool any_omega = false;

  while (!work.empty()) {
    int cur = work.front();
    work.pop();
    for (int t = 0; t < net.transition_count(); ++t) {
      bool ok = true;
      for (int p : net.trans_pre(t))
        if (tree[cur].m[p] == 0) {
          ok = false;
          break;
        }
      if (!ok) continue;
      GenMarking nxt = tree[cur].m;
      for (int p : net.trans_pre(t))
        if (nxt[p] != kOmega) nxt[p] -= 1;
      for (int p : net.trans_post(t))
        if (nxt[p] != kOmega) nxt[p] += 1;

      // Accelerate against dominated ancestors until stable; inserting an
      // omega can expose further dominations.
      bool accelerated = false;
      GenMarking pre_accel = nxt;
      int dominated_ancestor = -1;
      bool changed = true;
      while (changed) {
        changed = false;
        for (int a = cur; a != -1; a = tree[a].parent) {
          if (tree[a].m != nxt && gen_leq(tree[a].m, nxt)) {
            if (dominated_ancestor < 0) dominated_ancestor = a;
            for (size_t p = 0; p < nxt.size(); ++p)
              if (tree[a].m[p] != kOmega && nxt[p] != kOmega && tree[a].m[p] < nxt[p]) {
                nxt[p] = kOmega;
                changed = true;
              }
            accelerated = true;
          }
        }
      }

      if (accelerated && !any_omega) {
        // First acceleration anywhere: both markings are still concrete, so
        // the tree path is a genuine repeatable firing sequence.
        UnboundedWitness w;
        w.from.assign(tree[dominated_ancestor].m.begin(), tree[dominated_ancestor].m.end());
        w.to.assign(pre_accel.begin(), pre_accel.end());
        std::vector<int> path{t};
        for (int a = cur; a != dominated_ancestor; a = tree[a].parent) path.push_back(tree[a].via);
        std::reverse(path.begin(), path.end());
        w.pump = path;
        for (int p = 0; p < net.place_count(); ++p)
          if (w.to[p] > w.from[p]) w.growing_places.push_back(net.place_name(p));
        res.witness = w;
      }
      if (accelerated) any_omega = true;

      if (seen.count(nxt)) continue;
      int id = static_cast<int>(tree.size());
      seen.emplace(nxt, id);
      tree.push_back({std::move(nxt), cur, t});
      work.push(id);
    }
  }

  if (any_omega) {
    res.bounded = false;
    return res;
  }
  res.bounded = true;
  long long best = 0;
  for (const auto& n : tree)
    for (long long x : n.m) best = std::max(best, x);
  res.bound = static_cast<int>(best);
  return res;
}

// ---------------------------------------------------------------------------
// Liveness

Liveness is_live_graph(const PetriNet& net, const ReachabilityGraph& graph) {
  if (graph.truncated) return Liveness::Inconclusive;
  size_t n = graph.nodes.size();
  for (int t = 0; t < net.transition_count(); ++t) {
    std::vector<char> can_reach_enabled(n, 0);
    std::queue<int> q;
    for (size_t i = 0; i < n; ++i)
      if (enabled(net, graph.nodes[i], t)) {
        can_reach_enabled[i] = 1;
        q.push(static_cast<int>(i));
      }
    if (q.empty()) return Liveness::NotLive;
    size_t covered = q.size();
    while (!q.empty()) {
      int cur = q.front();
      q.pop();
      for (auto [tr, from] : graph.pred[cur])
        if (!can_reach_enabled[from]) {
          can_reach_enabled[from] = 1;
          ++covered;
          q.push(from);
        }
    }
    if (covered != n) return Liveness::NotLive;
  }
  return Liveness::Live;
}

Liveness is_live(const PetriNet& net, long long node_cap) {
  auto graph = reachability(net, net.initial_marking(), node_cap);
  return is_live_graph(net, graph);
}

// ---------------------------------------------------------------------------
// Commoner

std::vector<int> max_trap_within(const PetriNet& net, const std::vector<int>& places) {
  std::vector<char> in(net.place_count(), 0);
  for (int p : places) in[p] = 1;
  bool changed = true;
  while (changed) {
    changed = false;
    for (int p = 0; p < net.place_count(); ++p) {
      if (!in[p]) continue;
      for (int t : net.place_post(p)) {
        bool feeds_back = false;
        for (int p2 : net.trans_post(t))
          if (in[p2]) {
            feeds_back = true;
            break;
          }
        if (!feeds_back) {
          in[p] = 0;
          changed = true;
          break;
        }
      }
    }
  }
  std::vector<int> out;
  for (int p = 0; p < net.place_count(); ++p)
    if (in[p]) out.push_back(p);
  return out;
}

SiphonTrapReport commoner_live(const PetriNet& net) {
  if (!classify(net).is_free_choice)
    throw Error(Err::NotFreeChoice, "siphon-trap liveness test requires a free choice net");
  int P = net.place_count();
  if (P > kSiphonPlaceCap)
    throw Error(Err::TooLarge, "siphon enumeration capped at " +
                                   std::to_string(kSiphonPlaceCap) + " places, net has " +
                                   std::to_string(P));

  std::vector<uint32_t> in_mask(net.transition_count(), 0);   // places feeding t
  std::vector<uint32_t> out_mask(net.transition_count(), 0);  // places fed by t
  for (int t = 0; t < net.transition_count(); ++t) {
    for (int p : net.trans_pre(t)) in_mask[t] |= 1u << p;
    for (int p : net.trans_post(t)) out_mask[t] |= 1u << p;
  }
  auto is_siphon = [&](uint32_t s) {
    for (int t = 0; t < net.transition_count(); ++t)
      if ((out_mask[t] & s) != 0 && (in_mask[t] & s) == 0) return false;
    return true;
  };

  SiphonTrapReport report;
  std::vector<uint32_t> minimal;
  // Subsets in increasing popcount order: any siphon that contains no earlier
  // minimal siphon is itself minimal.
  for (int k = 1; k <= P; ++k) {
    uint32_t mask = (1u << k) - 1;
    uint32_t limit = 1u << P;
    while (mask < limit) {
      bool covered = false;
      for (uint32_t ms : minimal)
        if ((mask & ms) == ms) {
          covered = true;
          break;
        }
      if (!covered && is_siphon(mask)) {
        minimal.push_back(mask);
        ++report.checked_siphons;
        std::vector<int> places;
        for (int p = 0; p < P; ++p)
          if (mask & (1u << p)) places.push_back(p);
        auto trap = max_trap_within(net, places);
        long long tokens = 0;
        for (int p : trap) tokens += net.initial_marking()[p];
        if (trap.empty() || tokens == 0) {
          std::vector<std::string> ids;
          for (int p : places) ids.push_back(net.place_name(p));
          report.violating_siphon = ids;
          report.live = false;
          return report;
        }
      }
      // Gosper's hack: next subset of the same size.
      uint32_t c = mask & static_cast<uint32_t>(-static_cast<int32_t>(mask));
      uint32_t r = mask + c;
      if (r == 0) break;
      mask = (((r ^ mask) >> 2) / c) | r;
    }
  }
  report.live = true;
  return report;
}

// ---------------------------------------------------------------------------
// Blocking markings

namespace {

// Shortest directed distance from every node to transition b; places are
// 0..P-1, transitions P..P+T-1. Unreachable nodes get INT_MAX.
std::vector<int> distances_to(const PetriNet& net, int b) {
  int P = net.place_count();
  int n = P + net.transition_count();
  std::vector<int> dist(n, INT_MAX);
  std::queue<int> q;
  dist[P + b] = 0;
  q.push(P + b);
  while (!q.empty()) {
    int cur = q.front();
    q.pop();
    auto visit = [&](int node) {
      if (dist[node] == INT_MAX) {
        dist[node] = dist[cur] + 1;
        q.push(node);
      }
    };
    if (cur < P) {
      for (int t : net.place_pre(cur)) visit(P + t);
    } else {
      for (int p : net.trans_pre(cur - P)) visit(p);
    }
  }
  return dist;
}

}  // namespace

BlockingResult blocking_marking(const PetriNet& net, int b, bool force_cluster,
                                bool check_hypotheses) {
  int bound_k = 0;
  if (check_hypotheses) {
    if (!classify(net).is_free_choice)
      throw Error(Err::HypothesisViolated, "net is not free choice");
    bool live;
    try {
      live = commoner_live(net).live;
    } catch (const Error& e) {
      if (e.code() != Err::TooLarge) throw;
      auto lv = is_live(net);
      if (lv == Liveness::Inconclusive) throw;
      live = (lv == Liveness::Live);
    }
    if (!live) throw Error(Err::HypothesisViolated, "net is not live");
    auto bound = is_bounded(net);
    if (!bound.bounded) throw Error(Err::HypothesisViolated, "net is not bounded");
    bound_k = bound.bound;
  } else {
    // Trusted caller; keep only a generous divergence guard.
    for (int x : net.initial_marking()) bound_k += x;
    bound_k = std::max(bound_k, 1) * 64;
  }

  NodeSet cl = cluster_of_transition(net, b);
  std::vector<char> in_cluster_place(net.place_count(), 0);
  for (int p : cl.places) in_cluster_place[p] = 1;

  auto dist = distances_to(net, b);
  int P = net.place_count();
  int T = net.transition_count();

  // One output transition per place outside [b], sitting on a shortest path
  // to b; ties broken towards the lexicographically least identifier.
  std::vector<char> allocated(T, 0);
  for (int p = 0; p < P; ++p) {
    if (in_cluster_place[p]) continue;
    if (dist[p] == INT_MAX)
      throw Error(Err::InternalError,
                  "no path from place " + net.place_name(p) + " to blocked transition");
    int pick = -1;
    for (int t : net.place_post(p))
      if (dist[P + t] == dist[p] - 1) {
        pick = t;
        break;
      }
    if (pick < 0) throw Error(Err::InternalError, "shortest-path allocation failed");
    allocated[pick] = 1;
  }
  allocated[b] = 0;
  for (int t : cl.transitions) allocated[t] = 0;

  long long cap = static_cast<long long>(bound_k) * T * (T + 1) / 2;
  BlockingResult res;
  res.blocking_marking = net.initial_marking();
  res.parikh.assign(T, 0);
  res.used_cluster_variant = force_cluster || !non_conflicting(net, b);

  for (;;) {
    int next = -1;
    for (int t = 0; t < T; ++t)
      if (allocated[t] && enabled(net, res.blocking_marking, t)) {
        next = t;
        break;
      }
    if (next < 0) break;
    if (static_cast<long long>(res.witness_sequence.size()) >= cap)
      throw Error(Err::InternalError, "allocated firing sequence exceeded its length bound");
    res.blocking_marking = fire(net, res.blocking_marking, next);
    res.witness_sequence.push_back(next);
    res.parikh[next] += 1;
  }

  res.blocked_cluster = cl.transitions;
  auto en = enabled_set(net, res.blocking_marking);
  if (en != cl.transitions)
    throw Error(Err::InternalError, "allocation quiesced outside the blocked cluster");
  return res;
}

BlockingResult blocking_marking(const PetriNet& net, const std::string& b, bool force_cluster,
                                bool check_hypotheses) {
  return blocking_marking(net, net.transition_index(b), force_cluster, check_hypotheses);
}

BlockingOracleResult blocking_oracle(const PetriNet& net, int b, long long node_cap) {
  auto graph = reachability(net, net.initial_marking(), node_cap);
  BlockingOracleResult res;
  res.truncated = graph.truncated;

  std::vector<char> blocked(graph.nodes.size(), 0);
  for (size_t i = 0; i < graph.nodes.size(); ++i) {
    auto en = enabled_set(net, graph.nodes[i]);
    if (en.empty() || (en.size() == 1 && en[0] == b)) {
      blocked[i] = 1;
      res.r_b.push_back(graph.nodes[i]);
    }
  }

  // Nodes reachable from the root along b-avoiding paths.
  std::vector<char> avoid(graph.nodes.size(), 0);
  std::queue<int> q;
  avoid[0] = 1;
  q.push(0);
  while (!q.empty()) {
    int cur = q.front();
    q.pop();
    for (auto [t, to] : graph.succ[cur])
      if (t != b && !avoid[to]) {
        avoid[to] = 1;
        q.push(to);
      }
  }
  for (size_t i = 0; i < graph.nodes.size(); ++i)
    if (blocked[i] && avoid[i]) res.r_b_prime.push_back(graph.nodes[i]);

  std::sort(res.r_b.begin(), res.r_b.end());
  std::sort(res.r_b_prime.begin(), res.r_b_prime.end());
  return res;
}

BlockingOracleResult blocking_oracle(const PetriNet& net, const std::string& b,
                                     long long node_cap) {
  return blocking_oracle(net, net.transition_index(b), node_cap);
}

bool home_state_property(const PetriNet& net, const ReachabilityGraph& graph, int b,
                         const Marking& target) {
  (void)net;
  int target_idx = -1;
  for (size_t i = 0; i < graph.nodes.size(); ++i)
    if (graph.nodes[i] == target) {
      target_idx = static_cast<int>(i);
      break;
    }
  if (target_idx < 0) return false;
  std::vector<char> ok(graph.nodes.size(), 0);
  std::queue<int> q;
  ok[target_idx] = 1;
  q.push(target_idx);
  size_t covered = 1;
  while (!q.empty()) {
    int cur = q.front();
    q.pop();
    for (auto [t, from] : graph.pred[cur])
      if (t != b && !ok[from]) {
        ok[from] = 1;
        ++covered;
        q.push(from);
      }
  }
  return covered == graph.nodes.size();
}

}  // namespace fcnet

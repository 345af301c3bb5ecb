#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "fcnet/net.hpp"

namespace fcnet {

inline constexpr long long kDefaultNodeCap = 1'000'000;

// ---------------------------------------------------------------------------
// Reachability

struct ReachabilityGraph {
  std::vector<Marking> nodes;  // nodes[0] is the root
  struct Edge {
    int from;
    int transition;
    int to;
  };
  std::vector<Edge> edges;
  bool truncated = false;

  // Adjacency by node, filled by reachability().
  std::vector<std::vector<std::pair<int, int>>> succ;  // (transition, node)
  std::vector<std::vector<std::pair<int, int>>> pred;  // (transition, node)
};

// Breadth-first closure under fire. Stops and sets truncated once node_cap
// markings have been expanded.
ReachabilityGraph reachability(const PetriNet& net, const Marking& root,
                               long long node_cap = kDefaultNodeCap);

std::string to_dot(const PetriNet& net, const ReachabilityGraph& graph);

// ---------------------------------------------------------------------------
// Boundedness (Karp-Miller) and liveness

struct UnboundedWitness {
  Marking from;                    // reachable marking
  std::vector<int> pump;           // repeatable sequence from it
  Marking to;                      // from after pump, coordinate-wise > from
  std::vector<std::string> growing_places;
};

struct BoundResult {
  bool bounded = false;
  int bound = 0;  // max token count over any place, when bounded
  std::optional<UnboundedWitness> witness;
};

BoundResult is_bounded(const PetriNet& net);

enum class Liveness { Live, NotLive, Inconclusive };

// Explicit check on the full reachability graph: from every node, every
// transition must be reachable-enabled. Inconclusive when the graph is
// truncated.
Liveness is_live(const PetriNet& net, long long node_cap = kDefaultNodeCap);
Liveness is_live_graph(const PetriNet& net, const ReachabilityGraph& graph);

// ---------------------------------------------------------------------------
// Commoner's siphon-trap test

inline constexpr int kSiphonPlaceCap = 20;

struct SiphonTrapReport {
  bool live = false;
  std::optional<std::vector<std::string>> violating_siphon;  // sorted place ids
  long long checked_siphons = 0;                             // minimal siphons examined
};

// Enumerates minimal siphons (exact; guarded by kSiphonPlaceCap places) and
// looks for one whose maximal internal trap is initially unmarked.
// Throws NotFreeChoice / TooLarge.
SiphonTrapReport commoner_live(const PetriNet& net);

// The maximal trap contained in the given place set (possibly empty).
std::vector<int> max_trap_within(const PetriNet& net, const std::vector<int>& places);

// ---------------------------------------------------------------------------
// Blocking markings

struct BlockingResult {
  Marking blocking_marking;
  std::vector<int> witness_sequence;       // transition indices, avoids b
  Parikh parikh;
  std::vector<int> blocked_cluster;        // transitions enabled at the end
  bool used_cluster_variant = false;
};

// Computes the blocking marking of transition b on a live and bounded Free
// Choice net: allocates, for every place outside the cluster [b], one output
// transition lying on a shortest path to b, then fires allocated transitions
// until quiescence. When b is conflicting the cluster [b] is blocked instead
// and every transition of [b] is enabled in the result.
// Throws Error(HypothesisViolated) naming the failing hypothesis when the net
// is not free choice, not live (Commoner) or not bounded; callers that have
// already verified the hypotheses for this net may pass check_hypotheses =
// false (the witness length cap then falls back to the structural worst case).
BlockingResult blocking_marking(const PetriNet& net, const std::string& b,
                                bool force_cluster = false, bool check_hypotheses = true);
BlockingResult blocking_marking(const PetriNet& net, int b, bool force_cluster = false,
                                bool check_hypotheses = true);

struct BlockingOracleResult {
  // Reachable markings whose enabled set is contained in {b}.
  std::vector<Marking> r_b;
  // The subset of r_b reachable by a b-avoiding path.
  std::vector<Marking> r_b_prime;
  bool truncated = false;
};

// Brute-force ground truth over the explicit reachability graph.
BlockingOracleResult blocking_oracle(const PetriNet& net, int b,
                                     long long node_cap = kDefaultNodeCap);
BlockingOracleResult blocking_oracle(const PetriNet& net, const std::string& b,
                                     long long node_cap = kDefaultNodeCap);

// True when every node of the graph has a b-avoiding path to target.
bool home_state_property(const PetriNet& net, const ReachabilityGraph& graph, int b,
                         const Marking& target);

// ---------------------------------------------------------------------------
// Net transforms

inline constexpr const char* kExpansionPrefix = "__exp_";
inline constexpr const char* kBlockPrefix = "__blk_";

struct ClusterBlockTransform {
  PetriNet net;            // original net plus alpha -> beta -> p_b
  std::string alpha;       // fresh place, holds the tokens of p_b initially
  std::string beta;        // fresh non-conflicting transition
  std::string cluster_place;  // p_b of the original net

  // Maps a marking of the transformed net back to the original:
  // M(p_b) = M'(alpha) + M'(p_b), identity elsewhere.
  Marking phi(const PetriNet& original, const Marking& transformed) const;
};

// Requires b conflicting; its cluster then has a single place p_b.
ClusterBlockTransform cluster_block_transform(const PetriNet& net, const std::string& b);

// Rewrites every shared multi-input choice of an extended free choice net
// through a fresh silent transition and place; the result is free choice.
PetriNet efcn_to_fcn(const PetriNet& net);

struct FreeChoiceExpansion {
  PetriNet net;
  // For every original arc p -> q, the inserted transition t_pq and place s_pq.
  struct Inserted {
    std::string place_from;
    std::string transition_to;
    std::string t_pq;
    std::string s_pq;
  };
  std::vector<Inserted> inserted;

  // Projects a marking of the expansion back to the original net: tokens on
  // s_pq count towards p.
  Marking project(const PetriNet& original, const Marking& expanded) const;
};

// Replaces every place-to-transition arc (p,q) by p -> t_pq -> s_pq -> q.
// The result is free choice and bounded iff the input is bounded.
FreeChoiceExpansion free_choice_expansion(const PetriNet& net);

}  // namespace fcnet

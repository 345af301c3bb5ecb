#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace fcnet {

// ---------------------------------------------------------------------------
// Errors

enum class Err {
  InvalidNet,
  ParseError,
  UnknownNode,
  NotEnabled,
  NotEnabledAt,
  NotReverseFirable,
  NotFreeChoice,
  NotEFCN,
  NotConflicting,
  NotStronglyConnected,
  TooLarge,
  Truncated,
  HypothesisViolated,
  InvalidRouting,
  NotRoutedEnabled,
  StepCapExceeded,
  InvalidConfig,
  EventCapExceeded,
  MissingRoutingProb,
  NoConvergence,
  SpectralRadiusNotOne,
  InternalError,
};

class Error : public std::runtime_error {
 public:
  Error(Err code, std::string msg) : std::runtime_error(std::move(msg)), code_(code) {}
  Err code() const { return code_; }

 private:
  Err code_;
};

const char* err_name(Err code);

// ---------------------------------------------------------------------------
// Raw net description and validation diagnostics

struct NetSpec {
  std::vector<std::pair<std::string, int>> places;  // id, initial token count
  std::vector<std::string> transitions;
  std::vector<std::pair<std::string, std::string>> arcs;  // from, to
};

enum class Diag {
  EmptyNodeSet,
  NodeClash,
  DanglingArc,
  DuplicateArc,
  DisconnectedNet,
  NegativeMarking,
  BadArcDirection,
};

struct Diagnostic {
  Diag kind;
  std::string detail;
};

std::string diag_to_string(const Diagnostic& d);

// Checks every structural invariant of NetSpec and returns all violations.
std::vector<Diagnostic> validate(const NetSpec& spec);

// ---------------------------------------------------------------------------
// Core value types

// Token count per place, in net place order.
using Marking = std::vector<int>;

// Occurrence count per transition, in net transition order. Negative entries
// only appear when reverse firings are counted.
using Parikh = std::vector<long long>;

struct NetClass {
  bool is_t_net = false;
  bool is_s_net = false;
  bool is_free_choice = false;
  bool is_extended_free_choice = false;
};

// Dense P x T matrix with entries in {-1, 0, +1}; self-loop pairs map to 0.
struct IncidenceMatrix {
  int num_places = 0;
  int num_transitions = 0;
  std::vector<int8_t> entries;  // row-major, place-major

  int at(int p, int t) const { return entries[static_cast<size_t>(p) * num_transitions + t]; }
};

// A cluster or any other mixed node set, as index vectors (both sorted).
struct NodeSet {
  std::vector<int> places;
  std::vector<int> transitions;
};

// ---------------------------------------------------------------------------
// PetriNet
//
// Immutable bipartite graph plus initial marking. Place and transition
// identifiers are opaque strings; both lists are kept sorted so that every
// index-based iteration is in lexicographic identifier order.

class PetriNet {
 public:
  // Throws Error(InvalidNet) carrying all diagnostics if the spec is invalid.
  explicit PetriNet(const NetSpec& spec);

  int place_count() const { return static_cast<int>(places_.size()); }
  int transition_count() const { return static_cast<int>(transitions_.size()); }

  const std::vector<std::string>& places() const { return places_; }
  const std::vector<std::string>& transitions() const { return transitions_; }

  const std::string& place_name(int p) const { return places_[p]; }
  const std::string& transition_name(int t) const { return transitions_[t]; }

  bool has_place(const std::string& id) const { return place_idx_.count(id) != 0; }
  bool has_transition(const std::string& id) const { return trans_idx_.count(id) != 0; }

  // Throw Error(UnknownNode) for ids that do not name a node of this net.
  int place_index(const std::string& id) const;
  int transition_index(const std::string& id) const;

  const std::vector<int>& place_pre(int p) const { return place_pre_[p]; }    // transitions
  const std::vector<int>& place_post(int p) const { return place_post_[p]; }  // transitions
  const std::vector<int>& trans_pre(int t) const { return trans_pre_[t]; }    // places
  const std::vector<int>& trans_post(int t) const { return trans_post_[t]; }  // places

  bool has_arc_pt(int p, int t) const;
  bool has_arc_tp(int t, int p) const;

  const Marking& initial_marking() const { return initial_marking_; }

  // The spec this net was built from (arcs normalized to sorted order).
  NetSpec to_spec() const;

 private:
  std::vector<std::string> places_;
  std::vector<std::string> transitions_;
  std::unordered_map<std::string, int> place_idx_;
  std::unordered_map<std::string, int> trans_idx_;
  std::vector<std::vector<int>> place_pre_, place_post_;
  std::vector<std::vector<int>> trans_pre_, trans_post_;
  Marking initial_marking_;
};

// ---------------------------------------------------------------------------
// Token game and structural queries

// Input/output nodes of a node named by id; results are sorted id lists.
std::vector<std::string> preset(const PetriNet& net, const std::string& id);
std::vector<std::string> postset(const PetriNet& net, const std::string& id);

IncidenceMatrix incidence(const PetriNet& net);

// A transition is enabled when every input place holds at least one token.
// Uses the arc sets, not the incidence matrix, so a self-loop needs a token.
bool enabled(const PetriNet& net, const Marking& m, int t);
bool enabled(const PetriNet& net, const Marking& m, const std::string& t);

// Sorted indices of all enabled transitions.
std::vector<int> enabled_set(const PetriNet& net, const Marking& m);

Marking fire(const PetriNet& net, const Marking& m, int t);
Marking fire(const PetriNet& net, const Marking& m, const std::string& t);

// Undoes one firing of t: returns the unique m1 with m1 -> m under t.
Marking reverse_fire(const PetriNet& net, const Marking& m, int t);
Marking reverse_fire(const PetriNet& net, const Marking& m, const std::string& t);

struct FireSequenceResult {
  Marking final_marking;
  Parikh parikh;
};

// Folds fire over the word; throws Error(NotEnabledAt) naming the first
// failing index.
FireSequenceResult fire_sequence(const PetriNet& net, const Marking& m,
                                 const std::vector<std::string>& word);
FireSequenceResult fire_sequence_idx(const PetriNet& net, const Marking& m,
                                     const std::vector<int>& word);

NetClass classify(const PetriNet& net);

// Least node set containing id and closed under: a place pulls in all its
// output transitions, a transition pulls in all its input places.
NodeSet cluster(const PetriNet& net, const std::string& id);
NodeSet cluster_of_transition(const PetriNet& net, int t);

// True when every input place of t has t as its only output transition.
bool non_conflicting(const PetriNet& net, int t);
bool non_conflicting(const PetriNet& net, const std::string& t);

bool strongly_connected(const PetriNet& net);

// ---------------------------------------------------------------------------
// Small helpers shared across modules

std::string marking_to_string(const PetriNet& net, const Marking& m);
std::string parikh_to_string(const PetriNet& net, const Parikh& v);

struct MarkingHash {
  size_t operator()(const Marking& m) const {
    size_t h = 1469598103934665603ull;
    for (int x : m) {
      h ^= static_cast<size_t>(x) + 0x9e3779b97f4a7c15ull;
      h *= 1099511628211ull;
    }
    return h;
  }
};

}  // namespace fcnet

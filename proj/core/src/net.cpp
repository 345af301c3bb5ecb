#include "fcnet/net.hpp"

#include <algorithm>
#include <queue>
#include <set>
#include <sstream>

namespace fcnet {

const char* err_name(Err code) {
  switch (code) {
    case Err::InvalidNet: return "InvalidNet";
    case Err::ParseError: return "ParseError";
    case Err::UnknownNode: return "UnknownNode";
    case Err::NotEnabled: return "NotEnabled";
    case Err::NotEnabledAt: return "NotEnabledAt";
    case Err::NotReverseFirable: return "NotReverseFirable";
    case Err::NotFreeChoice: return "NotFreeChoice";
    case Err::NotEFCN: return "NotEFCN";
    case Err::NotConflicting: return "NotConflicting";
    case Err::NotStronglyConnected: return "NotStronglyConnected";
    case Err::TooLarge: return "TooLarge";
    case Err::Truncated: return "Truncated";
    case Err::HypothesisViolated: return "HypothesisViolated";
    case Err::InvalidRouting: return "InvalidRouting";
    case Err::NotRoutedEnabled: return "NotRoutedEnabled";
    case Err::StepCapExceeded: return "StepCapExceeded";
    case Err::InvalidConfig: return "InvalidConfig";
    case Err::EventCapExceeded: return "EventCapExceeded";
    case Err::MissingRoutingProb: return "MissingRoutingProb";
    case Err::NoConvergence: return "NoConvergence";
    case Err::SpectralRadiusNotOne: return "SpectralRadiusNotOne";
    case Err::InternalError: return "InternalError";
  }
  return "UnknownError";
}

std::string diag_to_string(const Diagnostic& d) {
  switch (d.kind) {
    case Diag::EmptyNodeSet: return "EmptyNodeSet: " + d.detail;
    case Diag::NodeClash: return "NodeClash: " + d.detail;
    case Diag::DanglingArc: return "DanglingArc: " + d.detail;
    case Diag::DuplicateArc: return "DuplicateArc: " + d.detail;
    case Diag::DisconnectedNet: return "DisconnectedNet: " + d.detail;
    case Diag::NegativeMarking: return "NegativeMarking: " + d.detail;
    case Diag::BadArcDirection: return "BadArcDirection: " + d.detail;
  }
  return "UnknownDiagnostic";
}

std::vector<Diagnostic> validate(const NetSpec& spec) {
  std::vector<Diagnostic> out;
  if (spec.places.empty()) out.push_back({Diag::EmptyNodeSet, "no places"});
  if (spec.transitions.empty()) out.push_back({Diag::EmptyNodeSet, "no transitions"});

  std::set<std::string> place_ids, trans_ids;
  for (const auto& [id, tokens] : spec.places) {
    if (!place_ids.insert(id).second) out.push_back({Diag::NodeClash, "duplicate place " + id});
    if (tokens < 0) out.push_back({Diag::NegativeMarking, id});
  }
  for (const auto& id : spec.transitions) {
    if (!trans_ids.insert(id).second)
      out.push_back({Diag::NodeClash, "duplicate transition " + id});
    if (place_ids.count(id))
      out.push_back({Diag::NodeClash, id + " is both a place and a transition"});
  }

  std::set<std::pair<std::string, std::string>> seen_arcs;
  for (const auto& [from, to] : spec.arcs) {
    bool fp = place_ids.count(from), ft = trans_ids.count(from);
    bool tp = place_ids.count(to), tt = trans_ids.count(to);
    if (!fp && !ft) {
      out.push_back({Diag::DanglingArc, from});
      continue;
    }
    if (!tp && !tt) {
      out.push_back({Diag::DanglingArc, to});
      continue;
    }
    if ((fp && tp) || (ft && tt)) {
      out.push_back({Diag::BadArcDirection, from + " -> " + to});
      continue;
    }
    if (!seen_arcs.insert({from, to}).second)
      out.push_back({Diag::DuplicateArc, from + " -> " + to});
  }

  // Connectivity of the underlying undirected graph, checked only once the
  // node/arc level is sound.
  if (out.empty()) {
    std::unordered_map<std::string, std::vector<std::string>> adj;
    for (const auto& [from, to] : spec.arcs) {
      adj[from].push_back(to);
      adj[to].push_back(from);
    }
    std::set<std::string> seen;
    std::queue<std::string> q;
    q.push(spec.places.front().first);
    seen.insert(spec.places.front().first);
    while (!q.empty()) {
      auto cur = q.front();
      q.pop();
      for (const auto& nxt : adj[cur])
        if (seen.insert(nxt).second) q.push(nxt);
    }
    size_t total = spec.places.size() + spec.transitions.size();
    if (seen.size() != total)
      out.push_back({Diag::DisconnectedNet,
                     std::to_string(total - seen.size()) + " node(s) unreachable from " +
                         spec.places.front().first});
  }
  return out;
}

PetriNet::PetriNet(const NetSpec& spec) {
  auto diags = validate(spec);
  if (!diags.empty()) {
    std::ostringstream os;
    os << "invalid net:";
    for (const auto& d : diags) os << " [" << diag_to_string(d) << "]";
    throw Error(Err::InvalidNet, os.str());
  }

  std::vector<std::pair<std::string, int>> sorted_places = spec.places;
  std::sort(sorted_places.begin(), sorted_places.end());
  transitions_ = spec.transitions;
  std::sort(transitions_.begin(), transitions_.end());

  for (const auto& [id, tokens] : sorted_places) {
    place_idx_[id] = static_cast<int>(places_.size());
    places_.push_back(id);
    initial_marking_.push_back(tokens);
  }
  for (size_t i = 0; i < transitions_.size(); ++i) trans_idx_[transitions_[i]] = static_cast<int>(i);

  place_pre_.resize(places_.size());
  place_post_.resize(places_.size());
  trans_pre_.resize(transitions_.size());
  trans_post_.resize(transitions_.size());

  for (const auto& [from, to] : spec.arcs) {
    if (place_idx_.count(from)) {
      int p = place_idx_.at(from), t = trans_idx_.at(to);
      place_post_[p].push_back(t);
      trans_pre_[t].push_back(p);
    } else {
      int t = trans_idx_.at(from), p = place_idx_.at(to);
      trans_post_[t].push_back(p);
      place_pre_[p].push_back(t);
    }
  }
  for (auto& v : place_pre_) std::sort(v.begin(), v.end());
  for (auto& v : place_post_) std::sort(v.begin(), v.end());
  for (auto& v : trans_pre_) std::sort(v.begin(), v.end());
  for (auto& v : trans_post_) std::sort(v.begin(), v.end());
}

int PetriNet::place_index(const std::string& id) const {
  auto it = place_idx_.find(id);
  if (it == place_idx_.end()) throw Error(Err::UnknownNode, "unknown place " + id);
  return it->second;
}

int PetriNet::transition_index(const std::string& id) const {
  auto it = trans_idx_.find(id);
  if (it == trans_idx_.end()) throw Error(Err::UnknownNode, "unknown transition " + id);
  return it->second;
}

bool PetriNet::has_arc_pt(int p, int t) const {
  const auto& v = place_post_[p];
  return std::binary_search(v.begin(), v.end(), t);
}

bool PetriNet::has_arc_tp(int t, int p) const {
  const auto& v = trans_post_[t];
  return std::binary_search(v.begin(), v.end(), p);
}

NetSpec PetriNet::to_spec() const {
  NetSpec s;
  for (int p = 0; p < place_count(); ++p) s.places.emplace_back(places_[p], initial_marking_[p]);
  s.transitions = transitions_;
  for (int p = 0; p < place_count(); ++p)
    for (int t : place_post_[p]) s.arcs.emplace_back(places_[p], transitions_[t]);
  for (int t = 0; t < transition_count(); ++t)
    for (int p : trans_post_[t]) s.arcs.emplace_back(transitions_[t], places_[p]);
  return s;
}

std::vector<std::string> preset(const PetriNet& net, const std::string& id) {
  std::vector<std::string> out;
  if (net.has_place(id)) {
    for (int t : net.place_pre(net.place_index(id))) out.push_back(net.transition_name(t));
  } else {
    for (int p : net.trans_pre(net.transition_index(id))) out.push_back(net.place_name(p));
  }
  return out;
}

std::vector<std::string> postset(const PetriNet& net, const std::string& id) {
  std::vector<std::string> out;
  if (net.has_place(id)) {
    for (int t : net.place_post(net.place_index(id))) out.push_back(net.transition_name(t));
  } else {
    for (int p : net.trans_post(net.transition_index(id))) out.push_back(net.place_name(p));
  }
  return out;
}

IncidenceMatrix incidence(const PetriNet& net) {
  IncidenceMatrix m;
  m.num_places = net.place_count();
  m.num_transitions = net.transition_count();
  m.entries.assign(static_cast<size_t>(m.num_places) * m.num_transitions, 0);
  for (int t = 0; t < m.num_transitions; ++t) {
    for (int p : net.trans_post(t))
      if (!net.has_arc_pt(p, t))
        m.entries[static_cast<size_t>(p) * m.num_transitions + t] = 1;
    for (int p : net.trans_pre(t))
      if (!net.has_arc_tp(t, p))
        m.entries[static_cast<size_t>(p) * m.num_transitions + t] = -1;
  }
  return m;
}

bool enabled(const PetriNet& net, const Marking& m, int t) {
  for (int p : net.trans_pre(t))
    if (m[p] <= 0) return false;
  return true;
}

bool enabled(const PetriNet& net, const Marking& m, const std::string& t) {
  return enabled(net, m, net.transition_index(t));
}

std::vector<int> enabled_set(const PetriNet& net, const Marking& m) {
  std::vector<int> out;
  for (int t = 0; t < net.transition_count(); ++t)
    if (enabled(net, m, t)) out.push_back(t);
  return out;
}

Marking fire(const PetriNet& net, const Marking& m, int t) {
  if (!enabled(net, m, t))
    throw Error(Err::NotEnabled, "transition " + net.transition_name(t) + " is not enabled");
  Marking out = m;
  for (int p : net.trans_pre(t)) out[p] -= 1;
  for (int p : net.trans_post(t)) out[p] += 1;
  return out;
}

Marking fire(const PetriNet& net, const Marking& m, const std::string& t) {
  return fire(net, m, net.transition_index(t));
}

Marking reverse_fire(const PetriNet& net, const Marking& m, int t) {
  Marking prev = m;
  for (int p : net.trans_post(t)) prev[p] -= 1;
  for (int p : net.trans_pre(t)) prev[p] += 1;
  for (int x : prev)
    if (x < 0)
      throw Error(Err::NotReverseFirable,
                  "no predecessor marking under " + net.transition_name(t));
  if (!enabled(net, prev, t))
    throw Error(Err::NotReverseFirable,
                net.transition_name(t) + " is not enabled in the candidate predecessor");
  return prev;
}

Marking reverse_fire(const PetriNet& net, const Marking& m, const std::string& t) {
  return reverse_fire(net, m, net.transition_index(t));
}

FireSequenceResult fire_sequence_idx(const PetriNet& net, const Marking& m,
                                     const std::vector<int>& word) {
  FireSequenceResult res;
  res.final_marking = m;
  res.parikh.assign(net.transition_count(), 0);
  for (size_t i = 0; i < word.size(); ++i) {
    if (!enabled(net, res.final_marking, word[i]))
      throw Error(Err::NotEnabledAt, "step " + std::to_string(i) + ": " +
                                         net.transition_name(word[i]) + " not enabled");
    res.final_marking = fire(net, res.final_marking, word[i]);
    res.parikh[word[i]] += 1;
  }
  return res;
}

FireSequenceResult fire_sequence(const PetriNet& net, const Marking& m,
                                 const std::vector<std::string>& word) {
  std::vector<int> idx;
  idx.reserve(word.size());
  for (const auto& t : word) idx.push_back(net.transition_index(t));
  return fire_sequence_idx(net, m, idx);
}

NetClass classify(const PetriNet& net) {
  NetClass c;
  c.is_t_net = true;
  for (int p = 0; p < net.place_count() && c.is_t_net; ++p)
    if (net.place_pre(p).size() != 1 || net.place_post(p).size() != 1) c.is_t_net = false;

  c.is_s_net = true;
  for (int t = 0; t < net.transition_count() && c.is_s_net; ++t)
    if (net.trans_pre(t).size() != 1 || net.trans_post(t).size() != 1) c.is_s_net = false;

  c.is_free_choice = true;
  for (int p = 0; p < net.place_count() && c.is_free_choice; ++p)
    for (int t : net.place_post(p))
      if (net.place_post(p).size() != 1 && net.trans_pre(t).size() != 1) {
        c.is_free_choice = false;
        break;
      }

  c.is_extended_free_choice = true;
  for (int p = 0; p < net.place_count() && c.is_extended_free_choice; ++p) {
    const auto& outs = net.place_post(p);
    for (size_t i = 0; i + 1 < outs.size(); ++i)
      if (net.trans_pre(outs[i]) != net.trans_pre(outs[i + 1])) {
        c.is_extended_free_choice = false;
        break;
      }
  }
  return c;
}

NodeSet cluster(const PetriNet& net, const std::string& id) {
  std::vector<char> in_p(net.place_count(), 0), in_t(net.transition_count(), 0);
  std::queue<std::pair<bool, int>> work;  // (is_place, index)
  if (net.has_place(id)) {
    in_p[net.place_index(id)] = 1;
    work.push({true, net.place_index(id)});
  } else {
    int t = net.transition_index(id);
    in_t[t] = 1;
    work.push({false, t});
  }
  while (!work.empty()) {
    auto [is_place, idx] = work.front();
    work.pop();
    if (is_place) {
      for (int t : net.place_post(idx))
        if (!in_t[t]) {
          in_t[t] = 1;
          work.push({false, t});
        }
    } else {
      for (int p : net.trans_pre(idx))
        if (!in_p[p]) {
          in_p[p] = 1;
          work.push({true, p});
        }
    }
  }
  NodeSet out;
  for (int p = 0; p < net.place_count(); ++p)
    if (in_p[p]) out.places.push_back(p);
  for (int t = 0; t < net.transition_count(); ++t)
    if (in_t[t]) out.transitions.push_back(t);
  return out;
}

NodeSet cluster_of_transition(const PetriNet& net, int t) {
  return cluster(net, net.transition_name(t));
}

bool non_conflicting(const PetriNet& net, int t) {
  for (int p : net.trans_pre(t))
    if (net.place_post(p).size() != 1) return false;
  return true;
}

bool non_conflicting(const PetriNet& net, const std::string& t) {
  return non_conflicting(net, net.transition_index(t));
}

bool strongly_connected(const PetriNet& net) {
  // Nodes 0..P-1 are places, P..P+T-1 transitions. One forward and one
  // backward reachability pass from node 0 suffice.
  int n = net.place_count() + net.transition_count();
  auto sweep = [&](bool forward) {
    std::vector<char> seen(n, 0);
    std::queue<int> q;
    q.push(0);
    seen[0] = 1;
    int count = 1;
    while (!q.empty()) {
      int cur = q.front();
      q.pop();
      auto visit = [&](int nxt) {
        if (!seen[nxt]) {
          seen[nxt] = 1;
          ++count;
          q.push(nxt);
        }
      };
      if (cur < net.place_count()) {
        const auto& ts = forward ? net.place_post(cur) : net.place_pre(cur);
        for (int t : ts) visit(net.place_count() + t);
      } else {
        int t = cur - net.place_count();
        const auto& ps = forward ? net.trans_post(t) : net.trans_pre(t);
        for (int p : ps) visit(p);
      }
    }
    return count == n;
  };
  return sweep(true) && sweep(false);
}

std::string marking_to_string(const PetriNet& net, const Marking& m) {
  std::ostringstream os;
  os << "(";
  bool first = true;
  for (int p = 0; p < net.place_count(); ++p) {
    if (m[p] == 0) continue;
    if (!first) os << ",";
    os << net.place_name(p) << ":" << m[p];
    first = false;
  }
  if (first) os << "empty";
  os << ")";
  return os.str();
}

std::string parikh_to_string(const PetriNet& net, const Parikh& v) {
  std::ostringstream os;
  os << "(";
  bool first = true;
  for (int t = 0; t < net.transition_count(); ++t) {
    if (v[t] == 0) continue;
    if (!first) os << ",";
    os << net.transition_name(t) << ":" << v[t];
    first = false;
  }
  if (first) os << "0";
  os << ")";
  return os.str();
}

}  // namespace fcnet

#include <algorithm>
#include <map>
#include <set>

#include "fcnet/analysis.hpp"

namespace fcnet {

namespace {

std::string fresh_id(std::set<std::string>& taken, std::string candidate) {
  while (taken.count(candidate)) candidate += "_";
  taken.insert(candidate);
  return candidate;
}

std::set<std::string> all_ids(const PetriNet& net) {
  std::set<std::string> ids(net.places().begin(), net.places().end());
  ids.insert(net.transitions().begin(), net.transitions().end());
  return ids;
}

}  // namespace

Marking ClusterBlockTransform::phi(const PetriNet& original, const Marking& transformed) const {
  Marking out(original.place_count(), 0);
  for (int p = 0; p < original.place_count(); ++p)
    out[p] = transformed[net.place_index(original.place_name(p))];
  out[original.place_index(cluster_place)] += transformed[net.place_index(alpha)];
  return out;
}

ClusterBlockTransform cluster_block_transform(const PetriNet& net, const std::string& b) {
  int bi = net.transition_index(b);
  if (non_conflicting(net, bi))
    throw Error(Err::NotConflicting, b + " is non-conflicting; nothing to transform");
  NodeSet cl = cluster_of_transition(net, bi);
  if (cl.places.size() != 1)
    throw Error(Err::NotConflicting,
                "cluster of " + b + " has " + std::to_string(cl.places.size()) +
                    " places; the transform needs a single choice place");
  int pb = cl.places[0];

  auto taken = all_ids(net);
  ClusterBlockTransform out{net, "", "", net.place_name(pb)};
  out.alpha = fresh_id(taken, std::string(kBlockPrefix) + "alpha");
  out.beta = fresh_id(taken, std::string(kBlockPrefix) + "beta");

  NetSpec spec = net.to_spec();
  for (auto& [id, tokens] : spec.places)
    if (id == out.cluster_place) tokens = 0;
  spec.places.emplace_back(out.alpha, net.initial_marking()[pb]);
  spec.transitions.push_back(out.beta);
  spec.arcs.emplace_back(out.alpha, out.beta);
  spec.arcs.emplace_back(out.beta, out.cluster_place);
  out.net = PetriNet(spec);
  return out;
}

PetriNet efcn_to_fcn(const PetriNet& net) {
  auto cls = classify(net);
  if (!cls.is_extended_free_choice)
    throw Error(Err::NotEFCN, "net is not extended free choice");
  if (cls.is_free_choice) return net;

  // Group transitions by preset. A group violates free choice exactly when
  // both the shared preset and the group have at least two members.
  std::map<std::vector<int>, std::vector<int>> groups;
  for (int t = 0; t < net.transition_count(); ++t) groups[net.trans_pre(t)].push_back(t);

  auto taken = all_ids(net);
  NetSpec spec = net.to_spec();
  int counter = 0;
  for (const auto& [pre, ts] : groups) {
    if (pre.size() < 2 || ts.size() < 2) continue;
    std::string tag = std::to_string(counter++);
    std::string t_new = fresh_id(taken, std::string(kExpansionPrefix) + "efc_t" + tag);
    std::string s_new = fresh_id(taken, std::string(kExpansionPrefix) + "efc_s" + tag);
    std::set<std::pair<std::string, std::string>> removed;
    for (int p : pre)
      for (int t : ts) removed.insert({net.place_name(p), net.transition_name(t)});
    std::erase_if(spec.arcs, [&](const auto& a) { return removed.count(a) != 0; });
    spec.transitions.push_back(t_new);
    spec.places.emplace_back(s_new, 0);
    for (int p : pre) spec.arcs.emplace_back(net.place_name(p), t_new);
    spec.arcs.emplace_back(t_new, s_new);
    for (int t : ts) spec.arcs.emplace_back(s_new, net.transition_name(t));
  }
  PetriNet out(spec);
  if (!classify(out).is_free_choice)
    throw Error(Err::InternalError, "extended free choice rewrite left a non-free-choice arc");
  return out;
}

Marking FreeChoiceExpansion::project(const PetriNet& original, const Marking& expanded) const {
  Marking out(original.place_count(), 0);
  for (int p = 0; p < original.place_count(); ++p)
    out[p] = expanded[net.place_index(original.place_name(p))];
  for (const auto& ins : inserted)
    out[original.place_index(ins.place_from)] += expanded[net.place_index(ins.s_pq)];
  return out;
}

FreeChoiceExpansion free_choice_expansion(const PetriNet& net) {
  auto taken = all_ids(net);
  NetSpec spec;
  spec.transitions = net.transitions();
  for (int p = 0; p < net.place_count(); ++p)
    spec.places.emplace_back(net.place_name(p), net.initial_marking()[p]);
  // Transition-to-place arcs survive; each place-to-transition arc (p,q)
  // becomes the chain p -> t_pq -> s_pq -> q.
  for (int t = 0; t < net.transition_count(); ++t)
    for (int p : net.trans_post(t))
      spec.arcs.emplace_back(net.transition_name(t), net.place_name(p));

  std::vector<FreeChoiceExpansion::Inserted> inserted;
  for (int p = 0; p < net.place_count(); ++p) {
    for (int q : net.place_post(p)) {
      const std::string& pn = net.place_name(p);
      const std::string& qn = net.transition_name(q);
      FreeChoiceExpansion::Inserted ins;
      ins.place_from = pn;
      ins.transition_to = qn;
      ins.t_pq = fresh_id(taken, std::string(kExpansionPrefix) + "t_" + pn + "_" + qn);
      ins.s_pq = fresh_id(taken, std::string(kExpansionPrefix) + "s_" + pn + "_" + qn);
      spec.transitions.push_back(ins.t_pq);
      spec.places.emplace_back(ins.s_pq, 0);
      spec.arcs.emplace_back(pn, ins.t_pq);
      spec.arcs.emplace_back(ins.t_pq, ins.s_pq);
      spec.arcs.emplace_back(ins.s_pq, qn);
      inserted.push_back(std::move(ins));
    }
  }
  FreeChoiceExpansion out{PetriNet(spec), std::move(inserted)};
  if (!classify(out.net).is_free_choice)
    throw Error(Err::InternalError, "free choice expansion produced a non-free-choice net");
  return out;
}

}  // namespace fcnet

#pragma once

#include "fcnet/net.hpp"

// Shared fixture nets. NET-A is the two-place cycle, NET-B the one-token
// choice loop; the ctrex_* nets each break exactly one of the live / bounded /
// free-choice hypotheses while keeping the other two.
namespace fixtures {

// p1 -> t1 -> p2 -> t2 -> p1, one token in p1.
inline fcnet::PetriNet net_a() {
  fcnet::NetSpec s;
  s.places = {{"p1", 1}, {"p2", 0}};
  s.transitions = {"t1", "t2"};
  s.arcs = {{"p1", "t1"}, {"t1", "p2"}, {"p2", "t2"}, {"t2", "p1"}};
  return fcnet::PetriNet(s);
}

// p0 -> {a, b}; a -> p1 -> c -> p0; b -> p2 -> d -> p0; one token in p0.
inline fcnet::PetriNet net_b() {
  fcnet::NetSpec s;
  s.places = {{"p0", 1}, {"p1", 0}, {"p2", 0}};
  s.transitions = {"a", "b", "c", "d"};
  s.arcs = {{"p0", "a"}, {"p0", "b"}, {"a", "p1"}, {"p1", "c"},
            {"c", "p0"}, {"b", "p2"}, {"p2", "d"}, {"d", "p0"}};
  return fcnet::PetriNet(s);
}

// Bounded free choice, not live: after either branch fires the start place
// stays empty forever. Blocking bb is ambiguous, (x:1) vs (x:1, r:1).
inline fcnet::PetriNet ctrex_nonlive() {
  fcnet::NetSpec s;
  s.places = {{"c", 1}, {"x", 0}, {"r", 0}};
  s.transitions = {"t1", "t2", "bb"};
  s.arcs = {{"c", "t1"}, {"c", "t2"}, {"t1", "x"}, {"t2", "x"}, {"t2", "r"}, {"x", "bb"}};
  return fcnet::PetriNet(s);
}

// Live free choice, unbounded: s pumps a token into r on every loop, so the
// bb-blocked markings (q:1, r:k) form an infinite family.
inline fcnet::PetriNet ctrex_unbounded() {
  fcnet::NetSpec s;
  s.places = {{"p", 1}, {"q", 0}, {"r", 0}};
  s.transitions = {"s", "bb"};
  s.arcs = {{"p", "s"}, {"s", "q"}, {"s", "r"}, {"q", "bb"}, {"bb", "p"}};
  return fcnet::PetriNet(s);
}

// Live and 1-bounded but not free choice: t1/t2 park a token in u or v, whose
// only consumer g needs both sides at once. Blocking bb can strand the token
// either way, giving three distinct bb-blocked markings.
inline fcnet::PetriNet ctrex_nonfc() {
  fcnet::NetSpec s;
  s.places = {{"c", 1}, {"x", 0}, {"u", 0}, {"ub", 1}, {"v", 0}, {"vb", 1}};
  s.transitions = {"t1", "t2", "g", "bb"};
  s.arcs = {{"c", "t1"}, {"ub", "t1"}, {"t1", "x"}, {"t1", "u"},
            {"c", "t2"}, {"vb", "t2"}, {"t2", "x"}, {"t2", "v"},
            {"u", "g"},  {"v", "g"},  {"g", "ub"}, {"g", "vb"},
            {"x", "bb"}, {"bb", "c"}};
  return fcnet::PetriNet(s);
}

// Two cycles competing for one resource token; live, bounded, not free
// choice, and tb has no blocking marking at all.
inline fcnet::PetriNet nonfc_mutex() {
  fcnet::NetSpec s;
  s.places = {{"pa", 1}, {"qa", 0}, {"pb", 1}, {"qb", 0}, {"r", 1}};
  s.transitions = {"ta", "ua", "tb", "ub"};
  s.arcs = {{"pa", "ta"}, {"r", "ta"}, {"ta", "qa"}, {"qa", "ua"}, {"ua", "pa"}, {"ua", "r"},
            {"pb", "tb"}, {"r", "tb"}, {"tb", "qb"}, {"qb", "ub"}, {"ub", "pb"}, {"ub", "r"}};
  return fcnet::PetriNet(s);
}

// Live but not free choice; the unrouted net is live while only the strictly
// alternating routing keeps the routed net alive, so its free choice
// expansion is not live.
inline fcnet::PetriNet alternating_net() {
  fcnet::NetSpec s;
  s.places = {{"p", 1}, {"qa", 1}, {"qb", 0}};
  s.transitions = {"a", "b"};
  s.arcs = {{"p", "a"}, {"qa", "a"}, {"a", "p"}, {"a", "qb"},
            {"p", "b"}, {"qb", "b"}, {"b", "p"}, {"b", "qa"}};
  return fcnet::PetriNet(s);
}

// Extended free choice but not free choice: q1 and q2 share the two-place
// preset {p, pp}.
inline fcnet::PetriNet efcn_example() {
  fcnet::NetSpec s;
  s.places = {{"p", 1}, {"pp", 1}, {"o", 0}};
  s.transitions = {"q1", "q2", "back"};
  s.arcs = {{"p", "q1"}, {"pp", "q1"}, {"p", "q2"}, {"pp", "q2"},
            {"q1", "o"}, {"q2", "o"},  {"o", "back"}, {"back", "p"}, {"back", "pp"}};
  return fcnet::PetriNet(s);
}

// p <-> t self loop.
inline fcnet::PetriNet self_loop_net() {
  fcnet::NetSpec s;
  s.places = {{"p", 1}};
  s.transitions = {"t"};
  s.arcs = {{"p", "t"}, {"t", "p"}};
  return fcnet::PetriNet(s);
}

// Single arc p -> t; fires once and deadlocks.
inline fcnet::PetriNet single_arc_net() {
  fcnet::NetSpec s;
  s.places = {{"p", 1}};
  s.transitions = {"t"};
  s.arcs = {{"p", "t"}};
  return fcnet::PetriNet(s);
}

// Join transition with inputs p (2 tokens) and q (5 tokens).
inline fcnet::PetriNet join_net() {
  fcnet::NetSpec s;
  s.places = {{"p", 2}, {"q", 5}};
  s.transitions = {"b"};
  s.arcs = {{"p", "b"}, {"q", "b"}};
  return fcnet::PetriNet(s);
}

}  // namespace fixtures

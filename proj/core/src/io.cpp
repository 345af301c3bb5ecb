#include "fcnet/io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace fcnet {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& msg) { throw Error(Err::ParseError, msg); }

void reject_unknown_keys(const json& obj, std::initializer_list<const char*> allowed,
                         const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* k : allowed)
      if (it.key() == k) {
        ok = true;
        break;
      }
    if (!ok) fail("unknown key \"" + it.key() + "\" in " + where);
  }
}

std::string require_id(const json& j, const std::string& where) {
  if (!j.is_string()) fail(where + " must be a string");
  std::string id = j.get<std::string>();
  if (id.empty()) fail("empty identifier in " + where);
  return id;
}

RoutingSpec parse_routing(const json& j, const PetriNet& net) {
  RoutingSpec spec = trivial_routing(net);
  if (!j.is_object()) fail("\"routing\" must be an object keyed by place id");
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!net.has_place(it.key())) fail("routing names unknown place " + it.key());
    int p = net.place_index(it.key());
    const json& rule = it.value();
    if (!rule.is_object() || !rule.contains("type")) fail("routing rule of " + it.key());
    std::string type = rule.at("type").get<std::string>();
    PlaceRouting& dst = spec.per_place[p];
    if (type == "periodic") {
      reject_unknown_keys(rule, {"type", "sequence"}, "routing rule of " + it.key());
      if (!rule.contains("sequence") || !rule.at("sequence").is_array())
        fail("periodic rule of " + it.key() + " needs a \"sequence\" array");
      dst.kind = RoutingKind::Periodic;
      for (const json& e : rule.at("sequence")) {
        std::string t = e.get<std::string>();
        if (!net.has_transition(t)) fail("routing of " + it.key() + " names unknown " + t);
        dst.periodic.push_back(net.transition_index(t));
      }
    } else if (type == "bernoulli") {
      reject_unknown_keys(rule, {"type", "probs"}, "routing rule of " + it.key());
      if (!rule.contains("probs") || !rule.at("probs").is_object())
        fail("bernoulli rule of " + it.key() + " needs a \"probs\" object");
      dst.kind = RoutingKind::Bernoulli;
      const auto& outs = net.place_post(p);
      dst.probs.assign(outs.size(), 0.0);
      for (auto pit = rule.at("probs").begin(); pit != rule.at("probs").end(); ++pit) {
        if (!net.has_transition(pit.key()))
          fail("routing of " + it.key() + " names unknown " + pit.key());
        int t = net.transition_index(pit.key());
        auto pos = std::find(outs.begin(), outs.end(), t);
        if (pos == outs.end())
          fail(pit.key() + " is not an output transition of " + it.key());
        dst.probs[pos - outs.begin()] = pit.value().get<double>();
      }
    } else {
      fail("unknown routing type \"" + type + "\" at " + it.key());
    }
  }
  check_routing(net, spec);
  return spec;
}

TimingSpec parse_timing(const json& j, const PetriNet& net) {
  if (!j.is_object()) fail("\"timing\" must be an object keyed by transition id");
  TimingSpec spec;
  spec.per_transition.resize(net.transition_count());
  std::vector<char> covered(net.transition_count(), 0);
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!net.has_transition(it.key())) fail("timing names unknown transition " + it.key());
    int t = net.transition_index(it.key());
    const json& rule = it.value();
    if (!rule.is_object() || !rule.contains("dist")) fail("timing rule of " + it.key());
    std::string dist = rule.at("dist").get<std::string>();
    TransitionTiming& dst = spec.per_transition[t];
    if (dist == "det") {
      reject_unknown_keys(rule, {"dist", "value"}, "timing rule of " + it.key());
      dst.kind = TimingKind::Deterministic;
      dst.value = rule.at("value").get<double>();
    } else if (dist == "exp") {
      reject_unknown_keys(rule, {"dist", "rate"}, "timing rule of " + it.key());
      dst.kind = TimingKind::Exponential;
      dst.rate = rule.at("rate").get<double>();
    } else if (dist == "uniform") {
      reject_unknown_keys(rule, {"dist", "lo", "hi"}, "timing rule of " + it.key());
      dst.kind = TimingKind::Uniform;
      dst.lo = rule.at("lo").get<double>();
      dst.hi = rule.at("hi").get<double>();
    } else {
      fail("unknown dist \"" + dist + "\" at " + it.key());
    }
    covered[t] = 1;
  }
  for (int t = 0; t < net.transition_count(); ++t)
    if (!covered[t]) fail("timing section misses transition " + net.transition_name(t));
  check_timing(net, spec);
  return spec;
}

}  // namespace

LoadedNet parse_net_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    fail(std::string("not valid JSON: ") + e.what());
  }
  if (!j.is_object()) fail("top level must be an object");
  reject_unknown_keys(j, {"places", "transitions", "arcs", "routing", "timing"}, "net file");
  if (!j.contains("places") || !j.contains("transitions") || !j.contains("arcs"))
    fail("net file needs \"places\", \"transitions\" and \"arcs\"");

  NetSpec spec;
  for (const json& pj : j.at("places")) {
    if (!pj.is_object()) fail("places entries must be objects");
    reject_unknown_keys(pj, {"id", "marking"}, "place");
    if (!pj.contains("id")) fail("place without id");
    std::string id = require_id(pj.at("id"), "place id");
    int marking = 0;
    if (pj.contains("marking")) {
      if (!pj.at("marking").is_number_integer()) fail("marking of " + id + " must be an integer");
      marking = pj.at("marking").get<int>();
    }
    spec.places.emplace_back(id, marking);
  }
  for (const json& tj : j.at("transitions")) {
    if (!tj.is_object()) fail("transitions entries must be objects");
    reject_unknown_keys(tj, {"id"}, "transition");
    if (!tj.contains("id")) fail("transition without id");
    spec.transitions.push_back(require_id(tj.at("id"), "transition id"));
  }
  for (const json& aj : j.at("arcs")) {
    if (!aj.is_array() || aj.size() != 2)
      fail("arcs must be [from, to] pairs; weighted arcs are not supported");
    spec.arcs.emplace_back(aj.at(0).get<std::string>(), aj.at(1).get<std::string>());
  }

  PetriNet net(spec);  // throws InvalidNet with full diagnostics
  LoadedNet out{std::move(net), std::nullopt, std::nullopt};
  if (j.contains("routing")) out.routing = parse_routing(j.at("routing"), out.net);
  if (j.contains("timing")) out.timing = parse_timing(j.at("timing"), out.net);
  return out;
}

LoadedNet load_net_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_net_text(buf.str());
}

std::string net_to_json_text(const PetriNet& net, const RoutingSpec* routing,
                             const TimingSpec* timing) {
  json j;
  j["places"] = json::array();
  for (int p = 0; p < net.place_count(); ++p)
    j["places"].push_back({{"id", net.place_name(p)}, {"marking", net.initial_marking()[p]}});
  j["transitions"] = json::array();
  for (const auto& t : net.transitions()) j["transitions"].push_back({{"id", t}});
  j["arcs"] = json::array();
  NetSpec spec = net.to_spec();
  std::sort(spec.arcs.begin(), spec.arcs.end());
  for (const auto& [from, to] : spec.arcs) j["arcs"].push_back({from, to});

  if (routing) {
    json rj = json::object();
    for (int p = 0; p < net.place_count(); ++p) {
      const auto& r = routing->per_place[p];
      if (r.kind == RoutingKind::Periodic) {
        json seq = json::array();
        for (int t : r.periodic) seq.push_back(net.transition_name(t));
        rj[net.place_name(p)] = {{"type", "periodic"}, {"sequence", seq}};
      } else if (r.kind == RoutingKind::Bernoulli) {
        json probs = json::object();
        const auto& outs = net.place_post(p);
        for (size_t i = 0; i < outs.size(); ++i)
          probs[net.transition_name(outs[i])] = r.probs[i];
        rj[net.place_name(p)] = {{"type", "bernoulli"}, {"probs", probs}};
      }
    }
    if (!rj.empty()) j["routing"] = rj;
  }
  if (timing) {
    json tj = json::object();
    for (int t = 0; t < net.transition_count(); ++t) {
      const auto& tt = timing->per_transition[t];
      switch (tt.kind) {
        case TimingKind::Deterministic:
          tj[net.transition_name(t)] = {{"dist", "det"}, {"value", tt.value}};
          break;
        case TimingKind::Exponential:
          tj[net.transition_name(t)] = {{"dist", "exp"}, {"rate", tt.rate}};
          break;
        case TimingKind::Uniform:
          tj[net.transition_name(t)] = {{"dist", "uniform"}, {"lo", tt.lo}, {"hi", tt.hi}};
          break;
      }
    }
    j["timing"] = tj;
  }
  return j.dump(2) + "\n";
}

RoutingMatrix parse_matrix_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  RoutingMatrix m;
  auto split = [](const std::string& s) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : s) {
      if (c == ',') {
        parts.push_back(cur);
        cur.clear();
      } else if (c != '\r' && c != ' ') {
        cur += c;
      }
    }
    parts.push_back(cur);
    return parts;
  };
  if (!std::getline(in, line)) fail("empty matrix file");
  m.labels = split(line);
  if (m.labels.empty() || m.labels.front().empty()) fail("matrix header with transition ids expected");
  size_t n = m.labels.size();
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto parts = split(line);
    if (parts.size() != n) fail("matrix row with " + std::to_string(parts.size()) +
                                " entries, expected " + std::to_string(n));
    std::vector<double> row;
    for (const auto& s : parts) {
      try {
        row.push_back(std::stod(s));
      } catch (...) {
        fail("bad matrix entry \"" + s + "\"");
      }
      if (row.back() < 0) fail("negative matrix entry");
    }
    m.r.push_back(std::move(row));
  }
  if (m.r.size() != n) fail("matrix must be square");
  return m;
}

RoutingMatrix load_matrix_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_matrix_csv(buf.str());
}

void write_dater_csv(std::ostream& os, const PetriNet& net, const DaterLog& daters) {
  os << "transition,n,instant\n";
  char buf[64];
  for (int t = 0; t < net.transition_count(); ++t) {
    const auto& row = daters.completions[t];
    for (size_t n = 0; n < row.size(); ++n) {
      std::snprintf(buf, sizeof buf, "%.17g", row[n]);
      os << net.transition_name(t) << "," << (n + 1) << "," << buf << "\n";
    }
  }
}

std::string dater_csv_text(const PetriNet& net, const DaterLog& daters) {
  std::ostringstream os;
  write_dater_csv(os, net, daters);
  return os.str();
}

}  // namespace fcnet

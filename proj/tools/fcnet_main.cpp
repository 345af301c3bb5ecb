// fcnet: structural analysis, blocking markings, simulation and throughput
// prediction for free choice Petri nets described in JSON files.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "fcnet/analysis.hpp"
#include "fcnet/io.hpp"
#include "fcnet/routing.hpp"
#include "fcnet/throughput.hpp"
#include "fcnet/timed.hpp"
#include "json.hpp"

using nlohmann::json;
using namespace fcnet;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitViolation = 1;
constexpr int kExitUsage = 2;

int exit_code_for(Err code) {
  switch (code) {
    case Err::HypothesisViolated:
    case Err::SpectralRadiusNotOne:
    case Err::NoConvergence:
    case Err::NotStronglyConnected:
    case Err::StepCapExceeded:
    case Err::EventCapExceeded:
    case Err::Truncated:
    case Err::InternalError:
      return kExitViolation;
    default:
      return kExitUsage;
  }
}

struct Output {
  bool as_json = false;

  int ok(const json& report, const std::string& human) const {
    if (as_json)
      std::cout << report.dump(2) << "\n";
    else
      std::cout << human;
    return report.value("exit", kExitOk);
  }

  int fail(const std::string& command, const Error& e) const {
    json report = {{"command", command},
                   {"status", exit_code_for(e.code()) == kExitViolation ? "violation" : "error"},
                   {"error", {{"code", err_name(e.code())}, {"message", e.what()}}}};
    if (as_json)
      std::cout << report.dump(2) << "\n";
    else
      std::cerr << command << ": " << err_name(e.code()) << ": " << e.what() << "\n";
    return exit_code_for(e.code());
  }
};

json marking_json(const PetriNet& net, const Marking& m) {
  json o = json::object();
  for (int p = 0; p < net.place_count(); ++p)
    if (m[p] != 0) o[net.place_name(p)] = m[p];
  return o;
}

json parikh_json(const PetriNet& net, const Parikh& v) {
  json o = json::object();
  for (int t = 0; t < net.transition_count(); ++t)
    if (v[t] != 0) o[net.transition_name(t)] = v[t];
  return o;
}

long long cap_from(std::optional<long long> cli_cap) {
  if (cli_cap) return *cli_cap;
  if (const char* env = std::getenv("FCNET_CAP")) {
    char* end = nullptr;
    long long v = std::strtoll(env, &end, 10);
    if (end && *end == '\0' && v > 0) return v;
  }
  return kDefaultNodeCap;
}

int run_classify(const std::string& file, const Output& out, long long cap,
                 const std::optional<std::string>& dot_path) {
  LoadedNet loaded = load_net_file(file);
  const PetriNet& net = loaded.net;
  auto cls = classify(net);
  auto bound = is_bounded(net);
  auto graph = reachability(net, net.initial_marking(), cap);
  auto live = is_live_graph(net, graph);
  if (dot_path) {
    std::ofstream f(*dot_path, std::ios::binary);
    if (!f) throw Error(Err::InvalidConfig, "cannot write " + *dot_path);
    f << to_dot(net, graph);
  }

  json report = {{"command", "classify"}, {"status", "ok"}};
  report["net"] = {{"places", net.place_count()}, {"transitions", net.transition_count()}};
  report["class"] = {{"t_net", cls.is_t_net},
                     {"s_net", cls.is_s_net},
                     {"free_choice", cls.is_free_choice},
                     {"extended_free_choice", cls.is_extended_free_choice}};
  report["strongly_connected"] = strongly_connected(net);
  if (bound.bounded)
    report["bounded"] = {{"bounded", true}, {"bound", bound.bound}};
  else
    report["bounded"] = {{"bounded", false},
                         {"growing_places", bound.witness ? json(bound.witness->growing_places)
                                                          : json::array()}};
  report["live"] = live == Liveness::Live      ? json(true)
                   : live == Liveness::NotLive ? json(false)
                                               : json("inconclusive");
  if (cls.is_free_choice && net.place_count() <= kSiphonPlaceCap) {
    auto commoner = commoner_live(net);
    report["commoner"] = {{"live", commoner.live},
                          {"checked_siphons", commoner.checked_siphons}};
    if (commoner.violating_siphon)
      report["commoner"]["violating_siphon"] = *commoner.violating_siphon;
  }

  std::ostringstream os;
  os << file << ": " << net.place_count() << " places, " << net.transition_count()
     << " transitions\n";
  os << "  class: " << (cls.is_t_net ? "T-net " : "") << (cls.is_s_net ? "S-net " : "")
     << (cls.is_free_choice ? "FC " : "") << (cls.is_extended_free_choice ? "EFC" : "") << "\n";
  os << "  bounded: " << (bound.bounded ? std::to_string(bound.bound) : "no") << "\n";
  os << "  live: "
     << (live == Liveness::Live ? "yes" : live == Liveness::NotLive ? "no" : "inconclusive")
     << "\n";
  if (report.contains("commoner"))
    os << "  commoner: " << (report["commoner"]["live"].get<bool>() ? "live" : "not live")
       << "\n";
  return out.ok(report, os.str());
}

int run_blocking(const std::string& file, const std::string& transition, bool with_oracle,
                 bool force_cluster, const Output& out, long long cap) {
  LoadedNet loaded = load_net_file(file);
  const PetriNet& net = loaded.net;
  auto res = blocking_marking(net, transition, force_cluster);

  json report = {{"command", "blocking"}, {"status", "ok"}, {"transition", transition}};
  report["cluster_variant"] = res.used_cluster_variant;
  report["blocking_marking"] = marking_json(net, res.blocking_marking);
  json witness = json::array();
  for (int t : res.witness_sequence) witness.push_back(net.transition_name(t));
  report["witness"] = witness;
  report["parikh"] = parikh_json(net, res.parikh);
  json blocked = json::array();
  for (int t : res.blocked_cluster) blocked.push_back(net.transition_name(t));
  report["blocked_cluster"] = blocked;

  std::ostringstream os;
  os << "blocking marking of " << transition << ": "
     << marking_to_string(net, res.blocking_marking) << "\n";
  os << "  witness (" << res.witness_sequence.size() << " firings):";
  for (int t : res.witness_sequence) os << " " << net.transition_name(t);
  os << "\n";

  if (with_oracle) {
    auto oracle = blocking_oracle(net, net.transition_index(transition), cap);
    bool agrees = !oracle.truncated && oracle.r_b.size() == 1 &&
                  oracle.r_b[0] == res.blocking_marking && oracle.r_b_prime == oracle.r_b;
    report["oracle"] = {{"agrees", agrees},
                        {"r_b_count", oracle.r_b.size()},
                        {"truncated", oracle.truncated}};
    os << "  oracle: " << (agrees ? "agrees" : "DISAGREES") << " (" << oracle.r_b.size()
       << " blocked marking(s))\n";
    if (!agrees) {
      report["status"] = "violation";
      report["exit"] = kExitViolation;
    }
  }
  return out.ok(report, os.str());
}

int run_simulate(const std::string& file, uint64_t seed, std::optional<double> horizon,
                 std::optional<std::string> firings, std::optional<std::string> csv_path,
                 long long max_events, const Output& out) {
  LoadedNet loaded = load_net_file(file);
  const PetriNet& net = loaded.net;
  if (!loaded.timing) throw Error(Err::InvalidConfig, file + " has no timing section");
  RoutingSpec routing = loaded.routing_or_trivial();

  SimConfig cfg;
  cfg.seed = seed;
  if (horizon && firings)
    throw Error(Err::InvalidConfig, "--horizon and --firings are mutually exclusive");
  if (horizon) {
    cfg.stop = StopRule::clock(*horizon);
  } else if (firings) {
    auto colon = firings->find(':');
    if (colon == std::string::npos)
      throw Error(Err::InvalidConfig, "--firings wants transition:count");
    std::string t = firings->substr(0, colon);
    long long n = std::stoll(firings->substr(colon + 1));
    cfg.stop = StopRule::firings(net.transition_index(t), n);
  } else {
    cfg.stop = StopRule::events(max_events);
  }

  SimResult res = simulate(net, routing, *loaded.timing, cfg);
  double t_end = res.final.clock;

  json report = {{"command", "simulate"}, {"status", "ok"}, {"seed", seed}};
  report["clock"] = t_end;
  report["quiescent"] = res.final.quiescent;
  json rates = json::object(), counts = json::object();
  for (int t = 0; t < net.transition_count(); ++t) {
    counts[net.transition_name(t)] = res.daters.completions[t].size();
    rates[net.transition_name(t)] =
        t_end > 0 ? static_cast<double>(res.daters.completions[t].size()) / t_end : 0.0;
  }
  report["completions"] = counts;
  report["rates"] = rates;

  std::ostringstream os;
  os << "simulated to clock " << t_end << (res.final.quiescent ? " (quiescent)" : "") << "\n";
  for (int t = 0; t < net.transition_count(); ++t)
    os << "  " << net.transition_name(t) << ": " << res.daters.completions[t].size()
       << " firings, rate " << rates[net.transition_name(t)].get<double>() << "\n";

  if (csv_path) {
    std::ofstream csv(*csv_path, std::ios::binary);
    if (!csv) throw Error(Err::InvalidConfig, "cannot write " + *csv_path);
    write_dater_csv(csv, net, res.daters);
    report["csv"] = *csv_path;
    os << "  daters written to " << *csv_path << "\n";
  }
  return out.ok(report, os.str());
}

int run_throughput(std::optional<std::string> file, std::optional<std::string> matrix_path,
                   bool grid, bool validate_sim, uint64_t seed, const Output& out) {
  RoutingMatrix m;
  std::optional<LoadedNet> loaded;
  if (matrix_path) {
    m = load_matrix_csv(*matrix_path);
  } else if (file) {
    loaded = load_net_file(*file);
    if (!loaded->routing)
      throw Error(Err::MissingRoutingProb, *file + " has no routing section");
    m = build_R(loaded->net, *loaded->routing);
  } else {
    throw Error(Err::InvalidConfig, "need a net file or --matrix");
  }

  auto tv = perron_vector(m);
  json report = {{"command", "throughput"}, {"status", "ok"}};
  report["labels"] = m.labels;
  report["x"] = tv.x;
  report["residual"] = tv.residual;
  report["spectral_radius"] = tv.spectral_radius;

  std::ostringstream os;
  os << "throughput vector (normalized):\n";
  for (int i = 0; i < m.size(); ++i) os << "  " << m.labels[i] << ": " << tv.x[i] << "\n";
  os << "  residual " << tv.residual << ", spectral radius " << tv.spectral_radius << "\n";

  if (grid) {
    std::vector<double> xs;
    for (int k = 1; k <= 19; ++k) xs.push_back(0.05 * k);
    auto pr = parametric_check(xs);
    report["parametric"] = {{"all_pass", pr.all_pass}, {"tolerance", pr.tolerance}};
    double worst = 0;
    for (const auto& row : pr.rows) worst = std::max(worst, row.max_abs_err);
    report["parametric"]["max_abs_err"] = worst;
    os << "  parametric grid: " << (pr.all_pass ? "pass" : "FAIL") << " (worst " << worst
       << ")\n";
    if (!pr.all_pass) {
      report["status"] = "violation";
      report["exit"] = kExitViolation;
    }
  }

  if (validate_sim) {
    if (!loaded || !loaded->timing)
      throw Error(Err::InvalidConfig, "--validate-sim needs a net file with timing");
    auto cmp = compare_sim(loaded->net, *loaded->routing, *loaded->timing,
                           StopRule::events(100000), seed);
    // Empirical rates normalized to sum 1, directly comparable with x.
    double total = 0;
    for (double v : cmp.lambda_hat) total += v;
    std::vector<double> sim_ratios = cmp.lambda_hat;
    if (total > 0)
      for (double& v : sim_ratios) v /= total;
    report["sim_ratios"] = sim_ratios;
    report["max_rel_err"] = cmp.max_ratio_rel_err;
    report["sim"] = {{"rates", cmp.lambda_hat},
                     {"tinvariant_resid", cmp.tinvariant_resid},
                     {"horizon", cmp.horizon}};
    os << "  simulation ratios: max relative error " << cmp.max_ratio_rel_err << "\n";
  }
  return out.ok(report, os.str());
}

int run_expand(const std::string& file, bool free_choice, std::optional<std::string> open_b,
               bool efcn, std::optional<std::string> out_path, const Output& out) {
  int chosen = int(free_choice) + int(open_b.has_value()) + int(efcn);
  if (chosen != 1)
    throw Error(Err::InvalidConfig, "pick exactly one of --free-choice, --open, --efcn");
  LoadedNet loaded = load_net_file(file);
  const PetriNet& net = loaded.net;

  json report = {{"command", "expand"}, {"status", "ok"}};
  std::string text;
  std::string kind;
  if (free_choice) {
    kind = "free-choice";
    auto exp = free_choice_expansion(net);
    report["transitions_added"] = exp.inserted.size();
    report["places_added"] = exp.inserted.size();
    text = net_to_json_text(exp.net);
  } else if (efcn) {
    kind = "efcn";
    auto rewritten = efcn_to_fcn(net);
    report["transitions_added"] = rewritten.transition_count() - net.transition_count();
    report["places_added"] = rewritten.place_count() - net.place_count();
    text = net_to_json_text(rewritten);
  } else {
    kind = "open";
    auto res = blocking_marking(net, *open_b);
    auto exp = open_expansion(net, *open_b, res.blocking_marking);
    report["enabling_degree"] = exp.enabling_deg;
    report["input_transition"] = exp.input_transition;
    text = net_to_json_text(exp.net);
  }
  report["kind"] = kind;

  std::ostringstream os;
  if (out_path) {
    std::ofstream f(*out_path, std::ios::binary);
    if (!f) throw Error(Err::InvalidConfig, "cannot write " + *out_path);
    f << text;
    report["output"] = *out_path;
    os << kind << " expansion written to " << *out_path << "\n";
    return out.ok(report, os.str());
  }
  // Without --out the transformed net itself is the output.
  std::cout << text;
  return kExitOk;
}

int run_tau(const std::string& file, const std::string& transition, int replications,
            uint64_t seed, const Output& out) {
  LoadedNet loaded = load_net_file(file);
  const PetriNet& net = loaded.net;
  if (!loaded.timing) throw Error(Err::InvalidConfig, file + " has no timing section");
  auto rep = measure_tau(net, loaded.routing_or_trivial(), *loaded.timing,
                         net.transition_index(transition), replications, seed);

  json report = {{"command", "tau"}, {"status", "ok"}, {"transition", transition}};
  report["replications"] = replications;
  report["cap_outs"] = rep.cap_outs;
  report["mean"] = rep.mean;
  report["max"] = rep.max;
  if (rep.cap_outs > 0) {
    report["status"] = "violation";
    report["exit"] = kExitViolation;
  }

  std::ostringstream os;
  os << "tau over " << replications << " replications: mean " << rep.mean << ", max " << rep.max
     << ", cap-outs " << rep.cap_outs << "\n";
  return out.ok(report, os.str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"free choice net analysis and simulation"};
  app.require_subcommand(1);

  Output out;
  std::optional<long long> cap;
  uint64_t seed = 0;
  app.add_flag("--json", out.as_json, "emit a JSON report on stdout");
  app.add_option("--cap", cap, "node/step cap for explicit searches");
  app.add_option("--seed", seed, "random seed");

  std::string file, transition;
  bool with_oracle = false, force_cluster = false;
  std::optional<std::string> dot_path;

  auto* classify_cmd = app.add_subcommand("classify", "net class, boundedness, liveness");
  classify_cmd->add_option("file", file)->required();
  classify_cmd->add_option("--dot", dot_path, "write the reachability graph as DOT");

  auto* blocking_cmd = app.add_subcommand("blocking", "blocking marking of a transition");
  blocking_cmd->add_option("file", file)->required();
  blocking_cmd->add_option("transition", transition)->required();
  blocking_cmd->add_flag("--oracle", with_oracle, "cross-check with the exhaustive oracle");
  blocking_cmd->add_flag("--cluster", force_cluster, "block the whole cluster");

  std::optional<double> horizon;
  std::optional<std::string> firings, csv_path;
  long long max_events = 100000;
  auto* sim_cmd = app.add_subcommand("simulate", "stochastic timed simulation");
  sim_cmd->add_option("file", file)->required();
  sim_cmd->add_option("--horizon", horizon, "stop at this clock value");
  sim_cmd->add_option("--firings", firings, "stop after transition:count completions");
  sim_cmd->add_option("--events", max_events, "stop after this many completions");
  sim_cmd->add_option("--csv", csv_path, "write the dater log as CSV");

  std::optional<std::string> tp_file, matrix_path;
  bool grid = false, validate_sim = false;
  auto* tp_cmd = app.add_subcommand("throughput", "Perron throughput vector");
  tp_cmd->add_option("file", tp_file);
  tp_cmd->add_option("--matrix", matrix_path, "read the routing matrix from CSV");
  tp_cmd->add_flag("--grid", grid, "run the parametric family check");
  tp_cmd->add_flag("--validate-sim", validate_sim, "cross-check ratios against a simulation");

  bool exp_fc = false, exp_efcn = false;
  std::optional<std::string> open_b, out_path;
  auto* expand_cmd = app.add_subcommand("expand", "net transforms");
  expand_cmd->add_option("file", file)->required();
  expand_cmd->add_flag("--free-choice", exp_fc, "free choice expansion");
  expand_cmd->add_flag("--efcn", exp_efcn, "extended free choice rewrite");
  expand_cmd->add_option("--open", open_b, "open expansion at this transition");
  expand_cmd->add_option("--out,-o", out_path, "output net file");

  int replications = 1000;
  auto* tau_cmd = app.add_subcommand("tau", "blocked-transition return times");
  tau_cmd->add_option("file", file)->required();
  tau_cmd->add_option("transition", transition)->required();
  tau_cmd->add_option("--replications", replications, "number of replications");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  std::string cmd_name = classify_cmd->parsed()   ? "classify"
                         : blocking_cmd->parsed() ? "blocking"
                         : sim_cmd->parsed()      ? "simulate"
                         : tp_cmd->parsed()       ? "throughput"
                         : expand_cmd->parsed()   ? "expand"
                                                  : "tau";
  try {
    if (classify_cmd->parsed()) return run_classify(file, out, cap_from(cap), dot_path);
    if (blocking_cmd->parsed())
      return run_blocking(file, transition, with_oracle, force_cluster, out, cap_from(cap));
    if (sim_cmd->parsed())
      return run_simulate(file, seed, horizon, firings, csv_path, max_events, out);
    if (tp_cmd->parsed()) return run_throughput(tp_file, matrix_path, grid, validate_sim, seed, out);
    if (expand_cmd->parsed()) return run_expand(file, exp_fc, open_b, exp_efcn, out_path, out);
    return run_tau(file, transition, replications, seed, out);
  } catch (const Error& e) {
    return out.fail(cmd_name, e);
  } catch (const std::exception& e) {
    std::cerr << cmd_name << ": " << e.what() << "\n";
    return kExitUsage;
  }
}

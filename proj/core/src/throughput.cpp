#include "fcnet/throughput.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

namespace fcnet {

RoutingMatrix build_R(const PetriNet& net, const RoutingSpec& routing) {
  if (!strongly_connected(net))
    throw Error(Err::NotStronglyConnected, "routing matrix needs a strongly connected net");
  check_routing(net, routing);
  for (int p = 0; p < net.place_count(); ++p)
    if (net.place_post(p).size() > 1 &&
        routing.per_place[p].kind == RoutingKind::Trivial)
      throw Error(Err::MissingRoutingProb,
                  "choice place " + net.place_name(p) + " carries no probabilities");

  int n = net.transition_count();
  RoutingMatrix m;
  m.labels = net.transitions();
  m.r.assign(n, std::vector<double>(n, 0.0));
  for (int j = 0; j < n; ++j) {
    double inv = 1.0 / static_cast<double>(net.trans_pre(j).size());
    for (int p : net.trans_pre(j)) {
      double prob = routing_prob(net, routing, p, j);
      for (int i : net.place_pre(p)) m.r[i][j] += inv * prob;
    }
  }
  return m;
}

bool irreducible(const RoutingMatrix& m) {
  int n = m.size();
  if (n == 0) return false;
  auto reach = [&](bool forward) {
    std::vector<char> seen(n, 0);
    std::queue<int> q;
    seen[0] = 1;
    q.push(0);
    int count = 1;
    while (!q.empty()) {
      int cur = q.front();
      q.pop();
      for (int j = 0; j < n; ++j) {
        double w = forward ? m.r[cur][j] : m.r[j][cur];
        if (w > 0 && !seen[j]) {
          seen[j] = 1;
          ++count;
          q.push(j);
        }
      }
    }
    return count == n;
  };
  return reach(true) && reach(false);
}

ThroughputVector perron_vector(const RoutingMatrix& m, double tol, long long max_iter,
                               const std::vector<double>* start) {
  if (!irreducible(m))
    throw Error(Err::SpectralRadiusNotOne, "matrix is reducible");
  int n = m.size();
  std::vector<double> x(n, 1.0 / n), next(n);
  if (start) {
    if (static_cast<int>(start->size()) != n)
      throw Error(Err::InvalidConfig, "start vector size mismatch");
    double norm = 0;
    for (double v : *start) {
      if (!(v > 0)) throw Error(Err::InvalidConfig, "start vector must be positive");
      norm += v;
    }
    for (int i = 0; i < n; ++i) x[i] = (*start)[i] / norm;
  }

  ThroughputVector out;
  for (long long it = 1; it <= max_iter; ++it) {
    // Damped step: y = x (R + I) / 2 keeps periodic matrices converging.
    for (int j = 0; j < n; ++j) {
      double acc = x[j];
      for (int i = 0; i < n; ++i) acc += x[i] * m.r[i][j];
      next[j] = acc * 0.5;
    }
    double norm = 0;
    for (double v : next) norm += v;
    for (double& v : next) v /= norm;
    double delta = 0;
    for (int j = 0; j < n; ++j) delta = std::max(delta, std::abs(next[j] - x[j]));
    x = next;
    if (delta <= tol * 0.5) {
      out.iterations = it;
      break;
    }
    if (it == max_iter)
      throw Error(Err::NoConvergence,
                  "power iteration did not converge in " + std::to_string(max_iter) + " steps");
  }

  out.x = x;
  double radius = 0, resid = 0;
  for (int j = 0; j < n; ++j) {
    double xr = 0;
    for (int i = 0; i < n; ++i) xr += x[i] * m.r[i][j];
    radius += xr;
    resid = std::max(resid, std::abs(xr - x[j]));
  }
  out.residual = resid;
  out.spectral_radius = radius;
  if (std::abs(radius - 1.0) > std::max(tol, 1e-9) * 100)
    throw Error(Err::SpectralRadiusNotOne,
                "spectral radius estimate " + std::to_string(radius));
  for (double v : x)
    if (!(v > 0))
      throw Error(Err::SpectralRadiusNotOne, "eigenvector is not strictly positive");
  return out;
}

RoutingMatrix example_matrix() { return example_matrix_parametric(0.3); }

RoutingMatrix example_matrix_parametric(double x) {
  RoutingMatrix m;
  m.labels = {"a", "b", "c", "d", "e"};
  m.r = {
      {0.4, 0.3, 0.0, 0.0, 0.0},
      {0.4, 0.4, 0.4, 0.0, 0.0},
      {0.0, 0.1, 0.4, x, 1.0 - x},
      {0.0, 0.0, 0.5, 0.0, 0.0},
      {0.0, 0.0, 0.0, x, 1.0 - x},
  };
  return m;
}

std::vector<double> example_eigenvector(double x) {
  double norm = 12.0 + 17.0 * x;
  return {2.0 * x / norm, 3.0 * x / norm, 12.0 * x / norm, 12.0 * x / norm,
          (12.0 - 12.0 * x) / norm};
}

ParametricReport parametric_check(const std::vector<double>& grid, double tol) {
  ParametricReport report;
  report.tolerance = tol;
  for (double x : grid) {
    auto tv = perron_vector(example_matrix_parametric(x));
    auto expect = example_eigenvector(x);
    double err = 0;
    for (size_t i = 0; i < expect.size(); ++i)
      err = std::max(err, std::abs(tv.x[i] - expect[i]));
    bool pass = err <= tol;
    report.rows.push_back({x, err, pass});
    if (!pass) report.all_pass = false;
  }
  return report;
}

SimComparison compare_sim(const PetriNet& net, const RoutingSpec& routing,
                          const TimingSpec& timing, const StopRule& stop, uint64_t seed) {
  SimComparison out;
  out.predicted = perron_vector(build_R(net, routing));

  SimConfig cfg;
  cfg.seed = seed;
  cfg.stop = stop;
  SimResult res = simulate(net, routing, timing, cfg);
  out.horizon = res.final.clock;
  auto est = throughput_estimate(net, res.daters, out.horizon);
  out.lambda_hat = est.lambda_hat;

  int n = net.transition_count();
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      if (a == b) continue;
      double want = out.predicted.x[a] / out.predicted.x[b];
      if (out.lambda_hat[b] <= 0) {
        out.max_ratio_rel_err = std::numeric_limits<double>::infinity();
        continue;
      }
      double got = out.lambda_hat[a] / out.lambda_hat[b];
      out.max_ratio_rel_err = std::max(out.max_ratio_rel_err, std::abs(got - want) / want);
    }

  auto inc = incidence(net);
  double scale = 0;
  for (double v : out.lambda_hat) scale = std::max(scale, v);
  if (scale > 0) {
    for (int p = 0; p < net.place_count(); ++p) {
      double acc = 0;
      for (int t = 0; t < n; ++t) acc += inc.at(p, t) * out.lambda_hat[t];
      out.tinvariant_resid = std::max(out.tinvariant_resid, std::abs(acc) / scale);
    }
  }
  return out;
}

}  // namespace fcnet

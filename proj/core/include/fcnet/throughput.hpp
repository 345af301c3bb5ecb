#pragma once

#include <string>
#include <vector>

#include "fcnet/net.hpp"
#include "fcnet/routing.hpp"
#include "fcnet/timed.hpp"

namespace fcnet {

// ---------------------------------------------------------------------------
// Routing matrix

// Square nonnegative matrix indexed by transitions:
//   R[i][j] = (1/|pre(j)|) * sum over places p with i -> p -> j of P{u_p(1)=j}.
struct RoutingMatrix {
  std::vector<std::string> labels;
  std::vector<std::vector<double>> r;

  int size() const { return static_cast<int>(labels.size()); }
  double at(int i, int j) const { return r[i][j]; }
};

// Requires a strongly connected net and a routing probability on every choice
// place. Throws NotStronglyConnected / MissingRoutingProb.
RoutingMatrix build_R(const PetriNet& net, const RoutingSpec& routing);

// Strong connectivity of the positive-entry digraph.
bool irreducible(const RoutingMatrix& m);

// ---------------------------------------------------------------------------
// Perron left-eigenvector

struct ThroughputVector {
  std::vector<double> x;         // positive, sums to 1
  double residual = 0.0;         // ||xR - x||_inf
  double spectral_radius = 0.0;  // estimated as ||xR||_1 at the fixed point
  long long iterations = 0;
};

// Damped left power iteration x <- x(R+I)/2, normalized in L1, optionally
// from a caller-supplied positive start. Throws NoConvergence and
// SpectralRadiusNotOne.
ThroughputVector perron_vector(const RoutingMatrix& m, double tol = 1e-12,
                               long long max_iter = 1'000'000,
                               const std::vector<double>* start = nullptr);

// ---------------------------------------------------------------------------
// The worked 5x5 matrix and its parametric family

// Fixed instance (the routing splits 0.3 / 0.7 at the shared place).
RoutingMatrix example_matrix();
// Family with the split replaced by x / 1-x in the two affected rows.
RoutingMatrix example_matrix_parametric(double x);
// Closed form (2x, 3x, 12x, 12x, 12-12x) / (12+17x).
std::vector<double> example_eigenvector(double x);

struct ParametricReport {
  struct Row {
    double x;
    double max_abs_err;
    bool pass;
  };
  std::vector<Row> rows;
  bool all_pass = true;
  double tolerance = 0.0;
};

// Checks perron_vector against the closed form on every grid point.
ParametricReport parametric_check(const std::vector<double>& grid, double tol = 1e-8);

// ---------------------------------------------------------------------------
// Simulation cross-validation

struct SimComparison {
  ThroughputVector predicted;
  std::vector<double> lambda_hat;        // empirical rates at the end of the run
  double horizon = 0.0;
  double max_ratio_rel_err = 0.0;        // worst |l_a/l_b - x_a/x_b| / (x_a/x_b)
  double tinvariant_resid = 0.0;         // ||N lambda_hat||_inf / max lambda_hat
};

// Runs the simulator and compares empirical rate ratios with the predicted
// eigenvector ratios; also checks the rates form an approximate T-invariant.
SimComparison compare_sim(const PetriNet& net, const RoutingSpec& routing,
                          const TimingSpec& timing, const StopRule& stop, uint64_t seed);

}  // namespace fcnet

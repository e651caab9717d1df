#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "stickycs/convexity.hpp"
#include "stickycs/dynamics.hpp"
#include "stickycs/initial_data.hpp"

namespace scs {

enum class Verdict { NoCluster, FiniteTimeCluster, InfiniteTimeCluster, ConfinedTo };
const char* to_string(Verdict v);

struct PredictionRecord {
  std::string id, theorem;
  Verdict verdict = Verdict::NoCluster;
  LabelInterval labels;
  bool closed = false;  // labels read as [lo, hi] rather than (lo, hi]
  double time_bound = std::numeric_limits<double>::infinity();
  double rate = 0.0;  // decay rate for infinite-time clusters
  double D0 = 0.0;
};

enum class SeparationForm { BoundedExp, Subcritical };

/// Lower bound on the distance between two label units (points or intervals,
/// intervals measured by their mass-weighted mean position).
struct SeparationRecord {
  std::string id, theorem;
  SeparationForm form = SeparationForm::BoundedExp;
  LabelInterval left, right;
  double c0 = 0.0, phi_sup = 0.0;
};

struct Prediction {
  std::vector<PredictionRecord> records;
  std::vector<SeparationRecord> separations;
  bool bounded = false, heavy_tailed = false, weakly_singular = false;
  double D0 = 0.0;
  std::uint64_t seed = 0;
  /// Labels that must be exact grid points for the records to be checkable.
  std::vector<double> labels() const;
};

struct PredictOptions {
  std::uint64_t seed = 20240601;
  int subcritical_pairs = 20;
  int labels_per_gap = 3;
  /// K per Sigma- component, keyed by component index; default is the middle half.
  std::map<std::size_t, std::pair<double, double>> K;
};

Prediction predict(const RegionDecomposition& regions, const QuantileFn& X0, const Flux& A, const Envelope& env,
                   const Protocol& p, double D0, const PredictOptions& opts = {});

double supercritical_time_bound(const Flux& A, const Envelope& env, const LabelInterval& component, double k_lo,
                                double k_hi, const QuantileFn& X0);

template <class Scalar>
Scalar bounded_phi_separation(Scalar c0, Scalar phi_sup, Scalar t) {
  using std::exp;
  return c0 * exp(-phi_sup * t);
}

template <class Scalar>
Scalar heavy_tail_contraction(Scalar D0, Scalar phi_floor, Scalar t) {
  using std::exp;
  return D0 * exp(-phi_floor * t);
}

double weak_singular_collapse_time(double D0, double phi_floor, double c, double beta, double R, double m_minus,
                                   double m_plus);

/// eta with 2 Phi(eta/2) = sigma; +inf when Phi is too small to reach sigma.
double eta_for(const Protocol& p, double sigma);

struct Cluster {
  LabelInterval labels;
  Eigen::Index first = 0, last = 0;
  double x = 0.0, mass = 0.0;
};

struct ClusterReport {
  double t = 0.0;
  std::vector<Cluster> clusters;
};

ClusterReport clusters_of(const ParticleState& s, const Eigen::VectorXd& theta);
ClusterReport extract_clusters(const Trajectory& traj, double t);

/// Mass-weighted mean position over a grid-aligned label interval (or the
/// particle holding a single label).
double barycenter_R(const Trajectory& traj, const LabelInterval& C, double t);
double barycenter_R(const ParticleState& s, const Eigen::VectorXd& theta, const LabelInterval& C);

/// Exact L1 distance between two piecewise-linear quantile functions.
double wasserstein1(const QuantileFn& Xa, const QuantileFn& Xb);

/// Least-squares slope of log(y) against t over points with y > 0.
double fitted_decay_exponent(const std::vector<double>& t, const std::vector<double>& y);

/// Partition refinement failures across the recorded states of a trajectory.
long stickiness_violations(const Trajectory& traj);

struct VerifyRow {
  std::string id, theorem, check;
  int N = 0;
  double t = 0.0, empirical = 0.0, bound = 0.0, margin = 0.0;
  bool pass = false;
};

struct VerifyReport {
  std::vector<VerifyRow> rows;
  bool all_pass() const;
  std::size_t failures() const;
};

struct VerifyOptions {
  double slack = 1e-6;
  double subcritical_decay_floor = -1e-3;
  double heavy_tail_rate_slack = 0.05;
  /// Subcritical bound uses gap0 - closing_speed * u_max * t; two particles with
  /// |v| <= u_max can approach at 2 u_max, 1 gives the literal single-speed form.
  double closing_speed = 2.0;
};

struct RunRef {
  int N = 0;
  const Trajectory* traj = nullptr;
};

VerifyReport verify(const Prediction& pred, const InitialModel& model, const Envelope& env,
                    const std::vector<RunRef>& runs, const VerifyOptions& opts = {});

struct W1Row {
  double t = 0.0;
  int N = 0, N2 = 0;
  double w1 = 0.0;
};

std::vector<W1Row> self_convergence(const std::vector<RunRef>& runs, const std::vector<double>& times);

}  // namespace scs

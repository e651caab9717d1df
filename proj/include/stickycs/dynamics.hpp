#pragma once

#include <Eigen/Core>

#include <vector>

#include "stickycs/initial_data.hpp"
#include "stickycs/protocol.hpp"

namespace scs {

/// Contiguous stuck particles first..last (inclusive).
struct Group {
  Eigen::Index first = 0, last = 0;
  Eigen::Index size() const { return last - first + 1; }
  bool operator==(const Group&) const = default;
};

struct ParticleState {
  double t = 0.0;
  Eigen::VectorXd masses, x, v;
  std::vector<Group> groups;

  Eigen::Index size() const { return masses.size(); }
  /// Groups formed from exactly equal positions; velocities are left as given.
  static ParticleState from_arrays(const Eigen::VectorXd& masses, const Eigen::VectorXd& x, const Eigen::VectorXd& v,
                                   double t = 0.0);
  static ParticleState from_discretization(const Discretization& d);
  /// Index of the group holding particle i.
  std::size_t group_of(Eigen::Index i) const;
  double momentum() const { return masses.dot(v); }
};

struct CollisionEvent {
  double t = 0.0;
  Eigen::Index first = 0, last = 0;
  Eigen::VectorXd pre_v, pre_psi;  // per constituent particle
  double post_v = 0.0, post_psi = 0.0, x = 0.0;
};

struct AdvanceOptions {
  double rtol = 1e-10;
  double atol_rel = 1e-12;
  double merge_eps_rel = 1e-12;
  double gap_min_rel = 1e-13;
  /// Position scale for the relative thresholds; 0 means the initial diameter.
  double scale = 0.0;
  std::vector<double> sample_times;
  long max_steps = 10'000'000;
  bool monitor = true;
};

struct Diagnostics {
  long accepted = 0, rejected = 0, events = 0;
  double merge_eps = 0.0, gap_min = 0.0;
  double psi_scale = 0.0;        // max |psi| of the initial state
  double max_psi_drift = 0.0;    // between events, absolute
  double momentum0 = 0.0;
  double max_momentum_drift = 0.0;
  double speed0 = 0.0;           // max |v| of the initial state
  double max_speed_excess = 0.0;
  long ordering_violations = 0;
};

struct Trajectory {
  Eigen::VectorXd theta;
  ParticleState initial;
  Eigen::VectorXd psi_initial;
  std::vector<ParticleState> samples;
  std::vector<Eigen::VectorXd> psi;
  std::vector<CollisionEvent> events;
  std::vector<ParticleState> event_states;  // right after each event time
  Protocol protocol = Protocol::zero();
  AdvanceOptions options;
  Diagnostics diag;
};

/// a_i = sum_j m_j phi(x_j - x_i)(v_j - v_i), evaluated per group.
Eigen::VectorXd accelerations(const ParticleState& s, const Protocol& p, double gap_min = 0.0);
/// psi_i = v_i + sum_j m_j Phi(x_i - x_j).
Eigen::VectorXd compute_psi(const ParticleState& s, const Protocol& p);

Trajectory advance(const ParticleState& s, const Protocol& p, double t_end, const AdvanceOptions& opts = {});
/// advance() from the discretized data, recording its label grid.
Trajectory simulate(const Discretization& d, const Protocol& p, double t_end, const AdvanceOptions& opts = {});

/// Latest recorded state at or before t, integrated forward to t.
ParticleState state_at(const Trajectory& traj, double t);
/// X_N(m, t).
double eval_xn(const Trajectory& traj, double m, double t);

}  // namespace scs

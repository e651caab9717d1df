#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "stickycs/dynamics.hpp"
#include "stickycs/protocol.hpp"

namespace scs::testing {

inline Protocol inverse_linear() {
  CustomKernel ck;
  ck.phi = [](double r) { return 1.0 / (1.0 + std::fabs(r)); };
  ck.primitive = [](double x) { return std::copysign(std::log1p(std::fabs(x)), x); };
  ck.heavy_tailed = true;
  ck.sup_norm = 1.0;
  return Protocol::custom(ck);
}

/// Unit total mass, distinct sorted positions in [0, 2], velocities in [-1, 1].
inline ParticleState random_state(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  Eigen::VectorXd m(n), x(n), v(n);
  for (int i = 0; i < n; ++i) {
    m[i] = 0.2 + U(rng);
    x[i] = 2.0 * U(rng);
    v[i] = 2.0 * U(rng) - 1.0;
  }
  m /= m.sum();
  std::sort(x.data(), x.data() + n);
  for (int i = 1; i < n; ++i) x[i] = std::max(x[i], x[i - 1] + 1e-3);
  return ParticleState::from_arrays(m, x, v);
}

struct EventAudit {
  long events = 0;
  double secant_err = 0.0;   // post psi against the secant slope of A_N over the merged labels
  double barycentric = 0.0;  // worst violation over all internal splits
};

/// A_N(theta_k) = sum_{i<k} m_i psi0_i, so the secant over particles first..last is their mass-weighted psi0 mean.
inline EventAudit audit_events(const Trajectory& tr) {
  EventAudit a;
  const auto& m = tr.initial.masses;
  const auto& p0 = tr.psi_initial;
  for (const auto& ev : tr.events) {
    ++a.events;
    double mass = 0.0, mom = 0.0;
    for (Eigen::Index i = ev.first; i <= ev.last; ++i) {
      mass += m[i];
      mom += m[i] * p0[i];
    }
    a.secant_err = std::max(a.secant_err, std::fabs(ev.post_psi - mom / mass));
    const Eigen::Index n = ev.last - ev.first + 1;
    double lm = 0.0, lp = 0.0;
    for (Eigen::Index j = 1; j < n; ++j) {
      lm += m[ev.first + j - 1];
      lp += m[ev.first + j - 1] * ev.pre_psi[j - 1];
      double rm = 0.0, rp = 0.0;
      for (Eigen::Index k = j; k < n; ++k) {
        rm += m[ev.first + k];
        rp += m[ev.first + k] * ev.pre_psi[k];
      }
      a.barycentric = std::max({a.barycentric, ev.post_psi - lp / lm, rp / rm - ev.post_psi});
    }
  }
  return a;
}

}  // namespace scs::testing

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "stickycs/dynamics.hpp"
#include "stickycs/error.hpp"
#include "support.hpp"

using namespace scs;
using Eigen::VectorXd;

namespace {

ParticleState pair(double v0, double v1) {
  return ParticleState::from_arrays(VectorXd::Constant(2, 0.5), (VectorXd(2) << 0.0, 1.0).finished(),
                                    (VectorXd(2) << v0, v1).finished());
}

// Sticky dynamics for phi = 1 in closed form. With unit mass, v_i = psi_i - (x_i - xbar),
// xbar moves at the momentum P, and y = x - xbar relaxes to psi - P at rate 1.
struct ConstantKernelOracle {
  struct G {
    double m, psi, y;
  };
  std::vector<G> g;
  double P = 0.0, xbar = 0.0, t = 0.0;
  std::vector<double> event_times;

  explicit ConstantKernelOracle(const ParticleState& s) {
    const VectorXd psi = compute_psi(s, Protocol::constant(1.0));
    P = s.momentum();
    xbar = s.masses.dot(s.x);
    for (Eigen::Index i = 0; i < s.size(); ++i) g.push_back({s.masses[i], psi[i], s.x[i] - xbar});
  }

  void flow(double dt) {
    for (auto& q : g) {
      const double c = q.psi - P;
      q.y = c + (q.y - c) * std::exp(-dt);
    }
    xbar += P * dt;
    t += dt;
  }

  void run(double t_end) {
    while (true) {
      double best = INFINITY;
      std::size_t k = 0;
      for (std::size_t j = 0; j + 1 < g.size(); ++j) {
        const double dc = g[j + 1].psi - g[j].psi, g0 = g[j + 1].y - g[j].y;
        if (dc >= 0) continue;
        const double tau = std::log((g0 - dc) / -dc);
        if (tau < best) best = tau, k = j;
      }
      if (t + best > t_end) break;
      flow(best);
      const double m = g[k].m + g[k + 1].m;
      g[k] = {m, (g[k].m * g[k].psi + g[k + 1].m * g[k + 1].psi) / m, 0.5 * (g[k].y + g[k + 1].y)};
      g.erase(g.begin() + static_cast<long>(k) + 1);
      event_times.push_back(t);
    }
    flow(t_end - t);
  }
};

}  // namespace

TEST_CASE("accelerations examples") {
  const auto s = pair(1.0, 0.0);
  CHECK(accelerations(s, Protocol::zero()).isZero());
  const VectorXd a = accelerations(s, Protocol::constant(1.0));
  CHECK(a[0] == doctest::Approx(-0.5));
  CHECK(a[1] == doctest::Approx(0.5));
  CHECK(accelerations(pair(0.3, 0.3), Protocol::smooth_bounded(1.0, 1.0)).isZero());
}

TEST_CASE("compute_psi examples") {
  const auto s = pair(0.0, 0.0);
  CHECK(compute_psi(pair(0.2, -0.4), Protocol::zero()) == (VectorXd(2) << 0.2, -0.4).finished());
  const VectorXd psi = compute_psi(s, Protocol::constant(1.0));
  CHECK(psi[0] == doctest::Approx(-0.5));
  CHECK(psi[1] == doctest::Approx(0.5));
  const auto one = ParticleState::from_arrays(VectorXd::Ones(1), VectorXd::Zero(1), VectorXd::Constant(1, 0.7));
  CHECK(compute_psi(one, Protocol::constant(3.0))[0] == 0.7);
}

TEST_CASE("pressureless two-body collision") {
  AdvanceOptions o;
  o.sample_times = {0.5, 1.5};
  const auto tr = advance(pair(1.0, 0.0), Protocol::zero(), 2.0, o);
  REQUIRE(tr.events.size() == 1);
  const auto& e = tr.events[0];
  CHECK(std::fabs(e.t - 1.0) <= 1e-9);
  CHECK(std::fabs(e.x - 1.0) <= 1e-9);
  CHECK(std::fabs(e.post_v - 0.5) <= 1e-12);
  CHECK(tr.samples.back().groups.size() == 1);
  CHECK(tr.samples.back().x[0] == doctest::Approx(1.5).epsilon(1e-9));

  Trajectory t2 = tr;
  t2.theta = (VectorXd(3) << -0.5, 0.0, 0.5).finished();
  CHECK(eval_xn(t2, -0.25, 0.0) == 0.0);
  CHECK(eval_xn(t2, 0.25, 0.0) == 1.0);
  CHECK(eval_xn(t2, -0.1, 1.5) == eval_xn(t2, 0.4, 1.5));
  CHECK(std::fabs(eval_xn(t2, -0.1, 1.0) - 1.0) <= 1e-9);
  CHECK(std::fabs(eval_xn(t2, 0.4, 1.0) - 1.0) <= 1e-9);
  CHECK_THROWS_AS(eval_xn(t2, -0.6, 1.0), ContractViolation);
}

TEST_CASE("ordered free flow never collides") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    auto s = testing::random_state(rng, 8);
    std::sort(s.v.data(), s.v.data() + s.size());
    const auto tr = advance(s, Protocol::zero(), 3.0);
    CHECK(tr.events.empty());
    const auto& f = tr.samples.back();
    for (Eigen::Index i = 0; i < s.size(); ++i) CHECK(std::fabs(f.x[i] - (s.x[i] + 3.0 * s.v[i])) <= 1e-12);
  }
}

TEST_CASE("constant kernel equilibrium gap") {
  AdvanceOptions o;
  for (int k = 1; k <= 40; ++k) o.sample_times.push_back(0.5 * k);
  const auto tr = advance(pair(0.0, 0.0), Protocol::constant(1.0), 20.0, o);
  CHECK(tr.events.empty());
  for (const auto& s : tr.samples) CHECK(std::fabs(s.x[1] - s.x[0] - 1.0) <= 1e-8);
}

TEST_CASE("constant kernel approaching pair decays without collision") {
  AdvanceOptions o;
  for (int k = 1; k <= 10; ++k) o.sample_times.push_back(k);
  const auto tr = advance(pair(1.0, 0.0), Protocol::constant(1.0), 10.0, o);
  CHECK(tr.events.empty());
  for (const auto& s : tr.samples) CHECK(std::fabs(s.x[1] - s.x[0] - std::exp(-s.t)) <= 1e-9);
}

TEST_CASE("constant kernel matches the closed-form sticky solution") {
  std::mt19937_64 rng(17);
  std::size_t merges = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 3 + trial % 6;
    const auto s = testing::random_state(rng, n);
    ConstantKernelOracle ref(s);
    ref.run(6.0);
    const auto tr = advance(s, Protocol::constant(1.0), 6.0);
    INFO("trial ", trial);
    REQUIRE(tr.events.size() == ref.event_times.size());
    merges += ref.event_times.size();
    for (std::size_t k = 0; k < tr.events.size(); ++k) CHECK(std::fabs(tr.events[k].t - ref.event_times[k]) <= 1e-8);
    const auto& f = tr.samples.back();
    REQUIRE(f.groups.size() == ref.g.size());
    for (std::size_t k = 0; k < ref.g.size(); ++k) CHECK(std::fabs(f.x[f.groups[k].first] - (ref.g[k].y + ref.xbar)) <= 1e-8);
  }
  CHECK(merges >= 20);
}

TEST_CASE("psi conservation, secant rule and barycentric splits") {
  std::mt19937_64 rng(23);
  const Protocol kernels[] = {Protocol::constant(1.0), testing::inverse_linear(), Protocol::smooth_bounded(2.0, 1.0)};
  long events = 0;
  for (int trial = 0; trial < 30; ++trial) {
    const auto& p = kernels[trial % 3];
    auto s = testing::random_state(rng, 4 + trial % 12);
    s.v *= 3.0;  // enough kinetic energy to force collisions
    const auto tr = advance(s, p, 10.0);
    const auto a = testing::audit_events(tr);
    events += a.events;
    const double scale = std::max(1.0, tr.diag.psi_scale);
    CHECK(tr.diag.max_psi_drift <= 1e-8 * scale);
    CHECK(a.secant_err <= 1e-8 * scale);
    CHECK(a.barycentric <= 1e-9);
    CHECK(std::fabs(tr.diag.max_momentum_drift) <= 1e-9);
    CHECK(tr.diag.max_speed_excess <= 1e-9);
    CHECK(tr.diag.ordering_violations == 0);
    for (const auto& st : tr.samples)
      for (Eigen::Index i = 1; i < st.size(); ++i) CHECK(st.x[i] >= st.x[i - 1]);
  }
  CHECK(events > 30);
}

TEST_CASE("state_at off a sample re-integrates") {
  std::mt19937_64 rng(29);
  const auto s = testing::random_state(rng, 10);
  const Protocol p = testing::inverse_linear();
  AdvanceOptions o;
  o.sample_times = {1.0, 2.0};
  const auto coarse = advance(s, p, 3.0, o);
  o.sample_times = {1.0, 1.37, 2.0};
  const auto fine = advance(s, p, 3.0, o);
  const auto a = state_at(coarse, 1.37);
  const auto& b = fine.samples[2];
  REQUIRE(b.t == 1.37);
  CHECK(a.t == 1.37);
  CHECK((a.x - b.x).cwiseAbs().maxCoeff() <= 1e-8);
  CHECK((a.v - b.v).cwiseAbs().maxCoeff() <= 1e-8);
  CHECK_THROWS_AS(state_at(coarse, 3.5), ContractViolation);
}

TEST_CASE("equal initial positions stick at t0") {
  const auto s = ParticleState::from_arrays(VectorXd::Constant(3, 1.0 / 3), (VectorXd(3) << 0.0, 0.0, 1.0).finished(),
                                            (VectorXd(3) << 1.0, -1.0, 0.0).finished());
  CHECK(s.groups.size() == 2);
  const auto tr = advance(s, Protocol::zero(), 1.0);
  REQUIRE_FALSE(tr.events.empty());
  CHECK(tr.events[0].t == 0.0);
  CHECK(tr.events[0].post_v == doctest::Approx(0.0));
}

TEST_CASE("fault injection") {
  CHECK_THROWS_AS(ParticleState::from_arrays(VectorXd::Ones(2), (VectorXd(2) << 1.0, 0.0).finished(), VectorXd::Zero(2)),
                  ContractViolation);
  CHECK_THROWS_AS(ParticleState::from_arrays(VectorXd::Zero(2), VectorXd::Zero(2), VectorXd::Zero(2)), ContractViolation);

  auto bad = pair(0.0, 0.0);
  bad.x[0] = 2.0;
  CHECK_THROWS_AS(advance(bad, Protocol::zero(), 1.0), ContractViolation);

  auto hole = pair(0.0, 0.0);
  hole.groups.pop_back();
  CHECK_THROWS_AS(advance(hole, Protocol::zero(), 1.0), ContractViolation);

  auto later = pair(0.0, 0.0);
  later.t = 2.0;
  CHECK_THROWS_AS(advance(later, Protocol::zero(), 1.0), ContractViolation);

  AdvanceOptions o;
  o.max_steps = 3;
  std::mt19937_64 rng(31);
  CHECK_THROWS_AS(advance(testing::random_state(rng, 12), Protocol::constant(1.0), 50.0, o), IntegrationError);
}

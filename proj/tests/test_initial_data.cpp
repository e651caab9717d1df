#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "stickycs/error.hpp"
#include "stickycs/initial_data.hpp"

using namespace scs;

namespace {

InitialData two_atoms(double v0 = 1.0, double v1 = 0.0) {
  InitialData d;
  d.atoms = {{0.5, 0.0, v0}, {0.5, 1.0, v1}};
  return d;
}

InitialData uniform(double u = 0.0) {
  InitialData d;
  d.blocks.push_back({1.0, 0.0, 1.0, {{0.0, 1.0, u, u}}});
  return d;
}

// Random atomic data: distinct sorted positions, random masses and velocities.
InitialData random_atoms(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::vector<double> w(n), x(n);
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += (w[i] = 0.1 + U(rng));
  for (int i = 0; i < n; ++i) x[i] = i + 0.5 * U(rng);
  InitialData d;
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    const double m = i + 1 < n ? w[i] / s : 1.0 - acc;
    acc += m;
    d.atoms.push_back({m, x[i], 2.0 * U(rng) - 1.0});
  }
  return d;
}

}  // namespace

TEST_CASE("build_cdf examples") {
  InitialData one;
  one.atoms = {{1.0, 0.0, 0.0}};
  const Cdf M1 = build_cdf(one);
  CHECK(M1(-1e-9) == -0.5);
  CHECK(M1(0.0) == 0.5);
  const Cdf M2 = build_cdf(two_atoms());
  CHECK(M2(-0.1) == -0.5);
  CHECK(M2(0.0) == 0.0);
  CHECK(M2(0.7) == 0.0);
  CHECK(M2(1.0) == 0.5);
  const Cdf M3 = build_cdf(uniform());
  for (double x : {0.0, 0.25, 0.6, 1.0}) CHECK(M3(x) == doctest::Approx(x - 0.5).epsilon(1e-15));
  CHECK(M3(-3.0) == -0.5);
  CHECK(M3(4.0) == 0.5);
}

TEST_CASE("generalized_inverse examples") {
  const QuantileFn X = generalized_inverse(build_cdf(uniform()));
  for (double m : {-0.4, -0.1, 0.0, 0.3, 0.5}) CHECK(X(m) == doctest::Approx(m + 0.5).epsilon(1e-15));
  InitialData one;
  one.atoms = {{1.0, 0.0, 0.0}};
  const QuantileFn X1 = generalized_inverse(build_cdf(one));
  for (double m : {-0.49, 0.0, 0.5}) CHECK(X1(m) == 0.0);
  const QuantileFn X2 = generalized_inverse(build_cdf(two_atoms()));
  CHECK(X2(-0.3) == 0.0);
  CHECK(X2(0.0) == 0.0);
  CHECK(X2(1e-12) == 1.0);
  CHECK(X2(0.5) == 1.0);
  CHECK(X2.right_limit(0.0) == 1.0);
  CHECK_THROWS_AS(X2(0.6), ContractViolation);
}

TEST_CASE("round trip of M and X on random atomic and mixed data") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(-0.5, 0.5);
  for (int rep = 0; rep < 20; ++rep) {
    InitialData d = random_atoms(rng, 2 + rep % 7);
    const Cdf M = build_cdf(d);
    const QuantileFn X = generalized_inverse(M);
    std::vector<std::pair<double, double>> cum;  // (upper label, position)
    double c = -0.5;
    for (const auto& a : d.atoms) cum.push_back({c += a.mass, a.x});
    for (int k = 0; k < 1000; ++k) {
      const double m = U(rng);
      if (m <= -0.5) continue;
      double want = cum.back().second;
      for (const auto& [hi, x] : cum)
        if (m <= hi) {
          want = x;
          break;
        }
      CHECK(X(m) == want);
    }
  }
  // mixed: the inf characterisation X(m) = inf{x : M(x) >= m} on a fine scan
  InitialData d;
  d.atoms = {{0.2, 0.5, 0.0}, {0.1, 2.0, 0.0}};
  d.blocks = {{0.4, 0.0, 1.0, {{0.0, 1.0, 0.0, 0.0}}}, {0.3, 1.5, 1.8, {{1.5, 1.8, 0.0, 0.0}}}};
  const Cdf M = build_cdf(d);
  const QuantileFn X = generalized_inverse(M);
  for (double m : {-0.45, -0.31, -0.2, -0.05, 0.1, 0.25, 0.39, 0.45, 0.5}) {
    double lo = -1.0, hi = 3.0;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      (M(mid) >= m ? hi : lo) = mid;
    }
    CHECK(X(m) == doctest::Approx(hi).epsilon(1e-12));
  }
}

TEST_CASE("validate names the offending field") {
  InitialData d = two_atoms();
  d.atoms[0].mass = -0.5;
  d.atoms[1].mass = 1.5;
  try {
    d.validate();
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.field() == "atoms[0].mass");
  }
  InitialData m = two_atoms();
  m.atoms[1].mass = 0.4;
  CHECK_THROWS_AS(m.validate(), ConfigError);
  InitialData c;
  c.atoms = {{0.5, 0.0, 1.0}, {0.5, 0.0, 0.0}};
  CHECK_THROWS_AS(c.validate(), ConfigError);
  InitialData gap;
  gap.blocks.push_back({1.0, 0.0, 1.0, {{0.0, 0.4, 0.0, 0.0}, {0.5, 1.0, 0.0, 0.0}}});
  CHECK_THROWS_AS(gap.validate(), ConfigError);
  InitialData ov;
  ov.blocks = {{0.5, 0.0, 1.0, {{0.0, 1.0, 0.0, 0.0}}}, {0.5, 0.5, 2.0, {{0.5, 2.0, 0.0, 0.0}}}};
  CHECK_THROWS_AS(ov.validate(), ConfigError);
}

TEST_CASE("build_psi0 examples") {
  InitialData d = two_atoms(0.3, -0.2);
  const Psi0 p0 = build_psi0(d, Protocol::zero());
  CHECK(p0(0.0) == 0.3);
  CHECK(p0(1.0) == -0.2);

  const Psi0 p1 = build_psi0(two_atoms(0.0, 0.0), Protocol::constant(1.0));
  CHECK(p1(0.0) == doctest::Approx(-0.5));
  CHECK(p1(1.0) == doctest::Approx(0.5));

  InitialData sym;
  sym.atoms = {{0.25, -1.0, 0.0}, {0.25, 1.0, 0.0}};
  sym.blocks = {{0.5, -0.5, 0.5, {{-0.5, 0.5, 0.0, 0.0}}}};
  for (const Protocol& p : {Protocol::constant(1.0), Protocol::smooth_bounded(1.0, 1.0), Protocol::weakly_singular({})})
    CHECK(build_psi0(sym, p)(0.0) == doctest::Approx(0.0).scale(1.0).epsilon(1e-13));
}

TEST_CASE("block convolution matches direct quadrature") {
  InitialData d;
  d.atoms = {{0.3, 1.4, 0.1}};
  d.blocks = {{0.7, 0.0, 1.0, {{0.0, 1.0, 0.2, -0.4}}}};
  for (const Protocol& p : {Protocol::constant(2.0), Protocol::smooth_bounded(1.0, 2.0), Protocol::weakly_singular({}),
                            Protocol::weakly_singular({1.5, 0.3, 0.4, 2.0})}) {
    const Psi0 psi = build_psi0(d, p);
    for (double x : {0.0, 0.13, 0.5, 0.77, 1.0}) {
      // y = x -+ s^2 on each side of x removes the sqrt-type cusp of Phi at 0
      auto seg = [&](double len, double sign) {
        if (len <= 0) return 0.0;
        const int n = 40000;
        const double S = std::sqrt(len);
        double acc = 0.0;
        for (int k = 0; k < n; ++k) {
          const double u = S * (k + 0.5) / n;
          acc += 2.0 * u * p.primitive(sign * u * u);
        }
        return acc * S / n;
      };
      auto seg2 = [&](double a, double b) { return seg(x - a, 1.0) + seg(b - x, -1.0); };
      const double conv = 0.7 * seg2(0.0, 1.0) + 0.3 * p.primitive(x - 1.4);
      INFO(p.describe(), " x=", x);
      CHECK(std::fabs(psi.convolution(x) - conv) <= 1e-7 * std::max(1.0, std::fabs(conv)));
      CHECK(psi(x) == doctest::Approx(0.2 - 0.6 * x + conv).epsilon(1e-7));
    }
  }
}

TEST_CASE("build_flux examples") {
  InitialData c = uniform(0.7);
  const InitialModel mc = build_model(c, Protocol::zero());
  for (double m : {-0.5, -0.2, 0.1, 0.5}) CHECK(mc.flux(m) == doctest::Approx(0.7 * (m + 0.5)));
  for (char e : mc.flux.exact) CHECK(e);

  const InitialModel m2 = build_model(two_atoms(0.0, 0.0), Protocol::constant(1.0));
  REQUIRE(m2.flux.size() == 3);
  CHECK(m2.flux.m == std::vector<double>{-0.5, 0.0, 0.5});
  CHECK(m2.flux.a[0] == 0.0);
  CHECK(m2.flux.a[1] == doctest::Approx(-0.25));
  CHECK(m2.flux.a[2] == doctest::Approx(0.0).scale(1.0));

  InitialData one;
  one.atoms = {{1.0, 3.0, -1.5}};
  const InitialModel m1 = build_model(one, Protocol::constant(4.0));
  CHECK(m1.flux(0.5) == doctest::Approx(-1.5));
  CHECK(m1.flux(0.0) == doctest::Approx(-0.75));
}

TEST_CASE("curved flux is within the knot tolerance of the exact antiderivative") {
  // u0 = x on [0,1], phi = 1: psi0 = 2x - 1/2, X0(m) = m + 1/2, A(m) = (m+1/2)^2 - (m+1/2)/2
  InitialData d;
  d.blocks = {{1.0, 0.0, 1.0, {{0.0, 1.0, 0.0, 1.0}}}};
  const InitialModel M = build_model(d, Protocol::constant(1.0));
  auto exact = [](double m) { return (m + 0.5) * (m + 0.5) - 0.5 * (m + 0.5); };
  for (std::size_t k = 0; k < M.flux.size(); ++k) CHECK(std::fabs(M.flux.a[k] - exact(M.flux.m[k])) <= 1e-12);
  for (int k = 0; k <= 1000; ++k) {
    const double m = -0.5 + k / 1000.0;
    CHECK(std::fabs(M.flux(m) - exact(m)) <= 2e-10);
  }
  CHECK(M.flux.lipschitz() <= 1.5 + 1e-9);
}

TEST_CASE("discretize examples") {
  const InitialModel M = build_model(uniform(), Protocol::zero());
  const Discretization d = discretize(M, 2);
  CHECK(d.theta.size() == 3);
  CHECK(d.theta[1] == 0.0);
  CHECK(d.masses[0] == 0.5);
  CHECK(d.x0[0] == doctest::Approx(0.5));
  CHECK(d.x0[1] == doctest::Approx(1.0));
  CHECK(d.psi0.cwiseAbs().maxCoeff() == doctest::Approx(0.0).scale(1.0));
  CHECK(d.v0.cwiseAbs().maxCoeff() == doctest::Approx(0.0).scale(1.0));

  const InitialModel Mk = build_model(two_atoms(0.0, 0.0), Protocol::constant(1.0));
  const Discretization one = discretize(Mk, 1);
  REQUIRE(one.size() == 1);
  CHECK(one.x0[0] == Mk.x0(0.5));
  CHECK(one.v0[0] == doctest::Approx(Mk.flux(0.5) - 0.0));

  const Discretization s = discretize(M, 2, {0.1});
  CHECK(s.theta.size() == 4);
  CHECK(s.theta[2] == 0.1);
  CHECK(discretize(M, 2, {0.1, 0.1}).theta.size() == 4);
  CHECK_THROWS_AS(discretize(M, 2, {0.5}), ContractViolation);
  CHECK_THROWS_AS(discretize(M, 2, {-0.5}), ContractViolation);
  CHECK_THROWS_AS(discretize(M, 0), ContractViolation);
  CHECK(s.particle_of(0.05) == 1);
  CHECK(s.particle_of(0.1) == 1);
  CHECK(s.grid_index(0.1) == 2);
  CHECK(s.grid_index(0.2) == -1);
}

TEST_CASE("atomic data is reproduced exactly by the matching grid") {
  std::mt19937_64 rng(5);
  for (int rep = 0; rep < 30; ++rep) {
    const InitialData d = random_atoms(rng, 2 + rep % 9);
    const Protocol p = rep % 2 ? Protocol::constant(0.7) : Protocol::smooth_bounded(1.0, 1.0);
    const InitialModel M = build_model(d, p);
    std::vector<double> snap;
    double c = -0.5;
    for (std::size_t i = 0; i + 1 < d.atoms.size(); ++i) snap.push_back(c += d.atoms[i].mass);
    const Discretization D = discretize(M, 1, snap);
    REQUIRE(D.size() == static_cast<Eigen::Index>(d.atoms.size()));
    for (Eigen::Index i = 0; i < D.size(); ++i) {
      CHECK(D.masses[i] == doctest::Approx(d.atoms[i].mass).epsilon(1e-14));
      CHECK(D.x0[i] == d.atoms[i].x);
      CHECK(D.v0[i] == doctest::Approx(d.atoms[i].value).epsilon(1e-12).scale(1.0));
    }
    for (Eigen::Index k = 0; k < D.theta.size(); ++k) CHECK(D.a_theta[k] == doctest::Approx(M.flux(D.theta[k])).epsilon(1e-14).scale(1.0));
  }
}

TEST_CASE("psi slope identity and D3 on mixed data") {
  InitialData d;
  d.atoms = {{0.2, 0.5, 0.3}};
  d.blocks = {{0.8, 0.0, 1.0, {{0.0, 0.5, 0.0, 1.0}, {0.5, 1.0, -0.5, 0.2}}}};
  const InitialModel M = build_model(d, Protocol::smooth_bounded(1.0, 1.0));
  for (int N : {3, 16, 50}) {
    const Discretization D = discretize(M, N, {0.05});
    for (Eigen::Index i = 0; i < D.size(); ++i) {
      CHECK(D.psi0[i] * D.masses[i] == doctest::Approx(M.flux(D.theta[i + 1]) - M.flux(D.theta[i])).epsilon(1e-12).scale(1e-14));
      CHECK(D.x0[i] == M.x0(D.theta[i + 1]));
      double s = 0.0;
      for (Eigen::Index j = 0; j < D.size(); ++j) s += D.masses[j] * M.protocol.primitive(D.x0[i] - D.x0[j]);
      CHECK(D.v0[i] == doctest::Approx(D.psi0[i] - s).epsilon(1e-12).scale(1e-14));
    }
    CHECK(D.masses.sum() == doctest::Approx(1.0).epsilon(1e-15));
    for (Eigen::Index i = 0; i + 1 < D.size(); ++i) CHECK(D.x0[i] <= D.x0[i + 1]);
  }
}

TEST_CASE("X_N^0 converges in L1 at first order") {
  InitialData d;
  d.blocks = {{0.6, 0.0, 1.0, {{0.0, 1.0, 0.0, 0.0}}}, {0.4, 1.5, 3.5, {{1.5, 3.5, 0.0, 0.0}}}};
  const InitialModel M = build_model(d, Protocol::zero());
  auto l1 = [&](int N) {
    const Discretization D = discretize(M, N);
    const int n = 200000;
    double s = 0.0;
    for (int k = 0; k < n; ++k) {
      const double m = -0.5 + (k + 0.5) / n;
      s += std::fabs(M.x0(m) - D.x0[D.particle_of(m)]);
    }
    return s / n;
  };
  double prev = l1(8);
  for (int N : {16, 32, 64, 128}) {
    const double e = l1(N);
    CHECK(e <= prev / 2 * 4);
    CHECK(e >= prev / 2 / 4);
    prev = e;
  }
}

TEST_CASE("atom label blocks and label grid crowding") {
  InitialData d;
  d.atoms = {{0.25, 0.0, 0.0}, {0.25, 2.0, 0.0}};
  d.blocks = {{0.5, 0.5, 1.5, {{0.5, 1.5, 0.0, 0.0}}}};
  const auto b = atom_label_blocks(build_cdf(d));
  REQUIRE(b.size() == 2);
  CHECK(b[0].first == -0.5);
  CHECK(b[0].second == doctest::Approx(-0.25));
  CHECK(b[1].first == doctest::Approx(0.25));
  CHECK(b[1].second == 0.5);

  const auto g = label_grid(4, {0.25 + 1e-6});
  CHECK(std::find(g.begin(), g.end(), 0.25) == g.end());
  CHECK(std::find(g.begin(), g.end(), 0.25 + 1e-6) != g.end());
  CHECK(g.front() == -0.5);
  CHECK(g.back() == 0.5);
}

TEST_CASE("from_particles quantile function") {
  Eigen::VectorXd th(4), x(3);
  th << -0.5, -0.2, 0.1, 0.5;
  x << 0.0, 1.0, 1.0;
  const QuantileFn X = QuantileFn::from_particles(th, x);
  CHECK(X(-0.3) == 0.0);
  CHECK(X(-0.2) == 0.0);
  CHECK(X(-0.1) == 1.0);
  CHECK(X(0.5) == 1.0);
}

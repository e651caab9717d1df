#pragma once

#include <Eigen/Core>

#include <array>
#include <cmath>

namespace scs {

/// One Dormand-Prince 5(4) step with FSAL stage and Hairer's dense output.
struct Dp5 {
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                          a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                          e6 = 22.0 / 525, e7 = -1.0 / 40;
  static constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                          d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                          d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;

  std::array<Eigen::VectorXd, 7> k;
  Eigen::VectorXd y0, y1, err, tmp;
  std::array<Eigen::VectorXd, 5> r;
  double t = 0.0, h = 0.0;

  /// f(t, y, dydt) -> bool; false marks an inadmissible stage. k[0] must hold f(t, y).
  template <class F>
  bool step(F&& f, double t0, const Eigen::VectorXd& y, double hh) {
    t = t0;
    h = hh;
    y0 = y;
    const Eigen::Index n = y.size();
    for (int s = 1; s < 7; ++s) k[s].resize(n);
    tmp = y + h * a21 * k[0];
    if (!f(t + c2 * h, tmp, k[1])) return false;
    tmp = y + h * (a31 * k[0] + a32 * k[1]);
    if (!f(t + c3 * h, tmp, k[2])) return false;
    tmp = y + h * (a41 * k[0] + a42 * k[1] + a43 * k[2]);
    if (!f(t + c4 * h, tmp, k[3])) return false;
    tmp = y + h * (a51 * k[0] + a52 * k[1] + a53 * k[2] + a54 * k[3]);
    if (!f(t + c5 * h, tmp, k[4])) return false;
    tmp = y + h * (a61 * k[0] + a62 * k[1] + a63 * k[2] + a64 * k[3] + a65 * k[4]);
    if (!f(t + h, tmp, k[5])) return false;
    y1 = y + h * (b1 * k[0] + b3 * k[2] + b4 * k[3] + b5 * k[4] + b6 * k[5]);
    if (!f(t + h, y1, k[6])) return false;
    err = h * (e1 * k[0] + e3 * k[2] + e4 * k[3] + e5 * k[4] + e6 * k[5] + e7 * k[6]);
    return true;
  }

  /// Scaled RMS error norm.
  double error_norm(const Eigen::VectorXd& atol, double rtol) const {
    const Eigen::ArrayXd sc = atol.array() + rtol * y0.array().abs().max(y1.array().abs());
    return std::sqrt((err.array() / sc).square().mean());
  }

  void prepare_dense() {
    r[0] = y0;
    r[1] = y1 - y0;
    r[2] = h * k[0] - r[1];
    r[3] = r[1] - h * k[6] - r[2];
    r[4] = h * (d1 * k[0] + d3 * k[2] + d4 * k[3] + d5 * k[4] + d6 * k[5] + d7 * k[6]);
  }

  /// Dense output at t + theta h; prepare_dense() first.
  Eigen::VectorXd dense(double theta) const {
    if (theta == 1.0) return y1;
    const double th1 = 1.0 - theta;
    return r[0] + theta * (r[1] + th1 * (r[2] + theta * (r[3] + th1 * r[4])));
  }
};

}  // namespace scs

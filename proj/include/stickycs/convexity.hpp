#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "stickycs/initial_data.hpp"

namespace scs {

/// Indices of the lower convex hull of the graph points (m[k], a[k]), m
/// strictly increasing. Collinear points on the hull are kept, so a vertex is
/// dropped only when some chord passes strictly below it.
template <class Scalar>
std::vector<std::size_t> lower_hull(const Scalar* m, const Scalar* a, std::size_t n) {
  std::vector<std::size_t> h;
  h.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    while (h.size() >= 2) {
      const std::size_t i = h[h.size() - 2], j = h.back();
      const Scalar cross = (m[j] - m[i]) * (a[k] - a[i]) - (a[j] - a[i]) * (m[k] - m[i]);
      if (cross < Scalar(0)) h.pop_back();
      else break;
    }
    h.push_back(k);
  }
  return h;
}

/// A** sampled at every breakpoint of the flux it came from.
struct Envelope {
  std::vector<std::size_t> hull;
  std::vector<double> m, value;

  double operator()(double label) const;
  double slope(std::size_t k) const { return (value[k + 1] - value[k]) / (m[k + 1] - m[k]); }
};

Envelope lower_convex_envelope(const Flux& A);

/// (lo, hi] by default; (lo, hi) when `open`; the single label {lo} when `point`.
struct LabelInterval {
  double lo = 0.0, hi = 0.0;
  bool open = false;
  bool point = false;

  static LabelInterval single(double m) { return {m, m, false, true}; }
  bool contains(double m) const { return point ? m == lo : (m > lo && (open ? m < hi : m <= hi)); }
  /// Closure containment, used for grid-aligned comparisons.
  bool covers(const LabelInterval& o) const { return o.lo >= lo && o.hi <= hi; }
  double length() const { return hi - lo; }
  bool operator==(const LabelInterval& o) const = default;
};

enum class Region { Plus, Zero, Minus, MinusRightEnd };

const char* to_string(Region r);

struct RegionTolerances {
  double contact_rel = 1e-9;
  double slope_rel = 1e-9;
};

struct RegionDecomposition {
  std::vector<LabelInterval> plus, zero, minus;
  double eps_contact = 0.0, eps_slope = 0.0;
  /// Contact labels where A kinks while A** stays linear.
  std::vector<double> flagged;

  Region region_of(double m) const;
  /// Sigma- component containing m, or nullptr.
  const LabelInterval* minus_component(double m) const;
  /// All interval endpoints strictly inside (-1/2, 1/2).
  std::vector<double> endpoints() const;
};

RegionDecomposition classify_regions(const Flux& A, const Envelope& env, RegionTolerances tol = {});

/// {m} on Sigma+, otherwise the maximal (m', m''] containing m on which A** is linear.
LabelInterval l_interval(double m, const Envelope& env, const RegionDecomposition& regions);

/// Initial cluster containing m, else the Sigma- component closure (m-, m+], else {m}.
LabelInterval c_interval(double m, const QuantileFn& X0, const RegionDecomposition& regions);

struct A4Report {
  bool ok = true;
  std::vector<double> witnesses;
};

A4Report check_a4(const Flux& A, const RegionDecomposition& regions);

struct LevelSet {
  double h0 = 0.0, h = 0.0, c_h = 0.0;
  double a0 = 0.0, b0 = 0.0;      // convex end zones, rescaled to [0,1]
  double s_a = 0.0, s_b = 0.0;    // f^-1(h), rescaled
  double a_h = 0.0, b_h = 0.0;    // f^-1(h) as mass labels
};

/// Level-set data for f = (A - A**) on the component rescaled to [0,1].
/// K = [k_lo, k_hi] must sit inside the open component.
LevelSet level_set_params(const Flux& A, const Envelope& env, const LabelInterval& component, double k_lo, double k_hi);

/// Throws RefineError unless every Sigma- component holds at least two grid cells.
void require_resolved(const Discretization& d, const RegionDecomposition& regions);

}  // namespace scs

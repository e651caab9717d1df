#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <vector>

#include "stickycs/protocol.hpp"

namespace scs {

/// How the per-atom and per-block values of InitialData are read: as the
/// velocity u0, or directly as psi0 = u0 + Phi * rho0 (u0 is then derived).
enum class ValueMode { Velocity, Psi };

struct Atom {
  double mass = 0.0;
  double x = 0.0;
  double value = 0.0;
};

/// Value linear on [a, b], from va at a to vb at b.
struct ValuePiece {
  double a = 0.0, b = 0.0, va = 0.0, vb = 0.0;
  double at(double x) const { return b == a ? va : va + (vb - va) * (x - a) / (b - a); }
};

/// Uniform density mass/(b-a) on [a, b] with a piecewise-linear value.
struct UniformBlock {
  double mass = 0.0;
  double a = 0.0, b = 1.0;
  std::vector<ValuePiece> value;
  double value_at(double x) const;
};

struct InitialData {
  std::vector<Atom> atoms;
  std::vector<UniformBlock> blocks;
  ValueMode mode = ValueMode::Velocity;

  /// Throws ConfigError naming the offending field.
  void validate() const;
  double total_mass() const;
  double support_min() const;
  double support_max() const;
  double diameter() const { return support_max() - support_min(); }
};

/// Right-continuous M0(x) = -1/2 + rho0((-inf, x]); linear between knots.
class Cdf {
 public:
  struct Knot {
    double x, left, right;  // M(x-) and M(x)
  };
  explicit Cdf(std::vector<Knot> knots) : knots_(std::move(knots)) {}
  double operator()(double x) const;
  const std::vector<Knot>& knots() const { return knots_; }

 private:
  std::vector<Knot> knots_;
};

/// Nondecreasing left-continuous function on (-1/2, 1/2], stored as segments
/// on (m_lo, m_hi]; x_lo == x_hi marks a constant (atomic) segment.
class QuantileFn {
 public:
  struct Segment {
    double m_lo, m_hi, x_lo, x_hi;
    bool constant() const { return x_lo == x_hi; }
  };
  QuantileFn() = default;
  explicit QuantileFn(std::vector<Segment> segs) : segs_(std::move(segs)) {}
  /// Piecewise-constant X_N from a label grid theta_0 < ... < theta_N and positions x_1..x_N.
  static QuantileFn from_particles(const Eigen::VectorXd& theta, const Eigen::VectorXd& x);

  /// X(m); for m <= -1/2 returns the right limit X(-1/2+).
  double operator()(double m) const;
  double right_limit(double m) const;
  const std::vector<Segment>& segments() const { return segs_; }

 private:
  std::size_t find(double m) const;
  std::vector<Segment> segs_;
};

Cdf build_cdf(const InitialData& data);
QuantileFn generalized_inverse(const Cdf& M);

/// psi0 = u0 + Phi * rho0 on supp(rho0), with the convolution done in closed
/// form through the second primitive of phi.
class Psi0 {
 public:
  Psi0(InitialData data, Protocol p);
  double convolution(double x) const;
  double on_block(double x) const;
  double at_atom(double x) const;
  /// psi0 at a support point, atoms taking precedence.
  double operator()(double x) const;
  double velocity(double x) const { return (*this)(x) - convolution(x); }
  /// Positions where psi0 may fail to be smooth: block ends, piece ends, atoms.
  std::vector<double> kinks() const;
  const InitialData& data() const { return data_; }
  const Protocol& protocol() const { return p_; }

 private:
  InitialData data_;
  Protocol p_;
};

Psi0 build_psi0(const InitialData& data, const Protocol& p);

/// Piecewise-linear A on [-1/2, 1/2] through (m[k], a[k]). exact[k] marks the
/// segment [m[k], m[k+1]] as carrying a constant psi0∘X0, i.e. truly linear.
struct Flux {
  std::vector<double> m, a;
  std::vector<char> exact;

  std::size_t size() const { return m.size(); }
  double operator()(double label) const;
  double slope(std::size_t k) const { return (a[k + 1] - a[k]) / (m[k + 1] - m[k]); }
  double lipschitz() const;
  std::size_t segment_of(double label) const;
};

Flux build_flux(const Psi0& psi0, const QuantileFn& X0, double eps = 1e-10);

struct Discretization {
  Eigen::VectorXd theta;   // N+1 labels
  Eigen::VectorXd masses;  // N
  Eigen::VectorXd x0, psi0, v0;
  Eigen::VectorXd a_theta;  // A(theta_i)
  Eigen::Index size() const { return masses.size(); }
  /// Index i (0-based particle) with label in (theta_i, theta_{i+1}].
  Eigen::Index particle_of(double label) const;
  /// Index k with theta_k == label exactly, or -1.
  Eigen::Index grid_index(double label) const;
};

struct InitialModel {
  InitialData data;
  Protocol protocol;
  Cdf cdf;
  QuantileFn x0;
  Psi0 psi0;
  Flux flux;
};

InitialModel build_model(const InitialData& data, const Protocol& p);

/// Label grid: uniform N-partition merged with the snap labels (duplicates
/// dropped, uniform points crowding a snap removed).
std::vector<double> label_grid(int N, std::vector<double> snap);

Discretization discretize(const InitialModel& model, int N, std::vector<double> snap = {});
Discretization discretize(const InitialData& data, const Protocol& p, int N, std::vector<double> snap = {});

/// Label intervals (M(x-), M(x)] of every atom.
std::vector<std::pair<double, double>> atom_label_blocks(const Cdf& M);

}  // namespace scs

#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>

namespace scs {

enum class ProtocolKind { Zero, Constant, SmoothBounded, WeaklySingular, Custom };

std::string to_string(ProtocolKind kind);

/// Parameters of phi(r) = c r^-beta on (0, R), continued for r >= R by the
/// power tail c R^-beta (1 + (r - R))^-tail_gamma.
struct WeakSingularity {
  double c = 1.0;
  double beta = 0.5;
  double R = 1.0;
  double tail_gamma = 1.0;
};

/// User-supplied kernel. `primitive` is optional; when absent Phi is obtained
/// by quadrature. `singularity` declares a lower bound c r^-beta on (0, R).
struct CustomKernel {
  std::function<double(double)> phi;
  std::function<double(double)> primitive;
  bool heavy_tailed = false;
  std::optional<double> sup_norm;
  std::optional<WeakSingularity> singularity;
};

/// Communication protocol phi: even, nonnegative and radially nonincreasing.
/// Immutable after construction; cheap to copy.
class Protocol {
 public:
  static Protocol zero();
  static Protocol constant(double phi0);
  /// phi(r) = K (1 + |r|)^-gamma. Heavy-tailed iff gamma <= 1.
  static Protocol smooth_bounded(double K, double gamma);
  static Protocol weakly_singular(const WeakSingularity& ws);
  static Protocol custom(CustomKernel kernel);

  ProtocolKind kind() const noexcept { return kind_; }
  bool heavy_tailed() const noexcept { return heavy_tailed_; }
  bool bounded() const noexcept { return sup_norm_.has_value(); }
  bool weakly_singular() const noexcept { return singularity_.has_value(); }
  std::optional<double> sup_norm() const noexcept { return sup_norm_; }
  const std::optional<WeakSingularity>& singularity() const noexcept { return singularity_; }

  double phi0() const noexcept { return p0_; }
  double gamma() const noexcept { return p1_; }

  /// phi(|r|); +infinity at r = 0 for singular kernels.
  double phi(double r) const;
  /// Phi(x) = int_0^x phi.
  double primitive(double x) const;
  /// int_0^x Phi, used for exact convolutions against uniform densities.
  double second_primitive(double x) const;

  std::string describe() const;

 private:
  Protocol() = default;
  void validate() const;

  ProtocolKind kind_ = ProtocolKind::Zero;
  double p0_ = 0.0;  // phi0 or K
  double p1_ = 0.0;  // gamma
  bool heavy_tailed_ = false;
  std::optional<double> sup_norm_;
  std::optional<WeakSingularity> singularity_;
  std::shared_ptr<const CustomKernel> custom_;
};

double phi_eval(const Protocol& p, double r);
double phi_primitive(const Protocol& p, double x);
/// Uniform communication floor phi(D) for a support diameter bound D > 0.
double phi_floor(const Protocol& p, double diameter_bound);

}  // namespace scs

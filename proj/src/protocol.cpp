#include "stickycs/protocol.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <limits>
#include <sstream>

#include "stickycs/error.hpp"

namespace scs {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// int_0^s K (1+u)^-g du, s >= 0
double tail1(double s, double K, double g) {
  if (g == 1.0) return K * std::log1p(s);
  return K * std::expm1((1.0 - g) * std::log1p(s)) / (1.0 - g);
}

// int_0^s tail1(u) du, s >= 0
double tail2(double s, double K, double g) {
  if (g == 1.0) return K * ((1.0 + s) * std::log1p(s) - s);
  if (g == 2.0) return K * (s - std::log1p(s));
  return K / (1.0 - g) * (std::expm1((2.0 - g) * std::log1p(s)) / (2.0 - g) - s);
}

double ws_phi(const WeakSingularity& w, double r) {
  if (r == 0.0) return kInf;
  if (r < w.R) return w.beta == 0.5 ? w.c / std::sqrt(r) : w.c * std::pow(r, -w.beta);
  const double k = w.c * std::pow(w.R, -w.beta);
  return k * std::pow(1.0 + (r - w.R), -w.tail_gamma);
}

double ws_Phi_abs(const WeakSingularity& w, double s) {
  const double b1 = 1.0 - w.beta;
  if (s <= w.R) return w.c * std::pow(s, b1) / b1;
  const double k = w.c * std::pow(w.R, -w.beta);
  return w.c * std::pow(w.R, b1) / b1 + tail1(s - w.R, k, w.tail_gamma);
}

double ws_Phi2_abs(const WeakSingularity& w, double s) {
  const double b1 = 1.0 - w.beta, b2 = 2.0 - w.beta;
  if (s <= w.R) return w.c * std::pow(s, b2) / (b1 * b2);
  const double k = w.c * std::pow(w.R, -w.beta);
  const double at_R = w.c * std::pow(w.R, b2) / (b1 * b2);
  return at_R + ws_Phi_abs(w, w.R) * (s - w.R) + tail2(s - w.R, k, w.tail_gamma);
}

template <class F>
double integrate(F f, double a, double b, const char* what) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
  double l1 = 0.0;
  const double v = GK::integrate(f, a, b, 20, 1e-13, nullptr, &l1);
  // GK's own estimate is pessimistic on short intervals; compare against the split integral instead
  const double mid = 0.5 * (a + b);
  const double v2 = GK::integrate(f, a, mid, 20, 1e-13) + GK::integrate(f, mid, b, 20, 1e-13);
  if (!std::isfinite(v) || std::fabs(v - v2) > 1e-12 * std::max(1.0, l1))
    throw ContractViolation(std::string("quadrature did not converge for custom kernel ") + what);
  return v;
}

void check_ws(const WeakSingularity& w) {
  if (!(w.c > 0.0)) throw ConfigError("protocol.c", "must be > 0");
  if (!(w.beta > 0.0 && w.beta < 1.0)) throw ConfigError("protocol.beta", "must lie in (0,1)");
  if (!(w.R > 0.0)) throw ConfigError("protocol.R", "must be > 0");
  if (!(w.tail_gamma >= 0.0)) throw ConfigError("protocol.tail_gamma", "must be >= 0");
}

}  // namespace

std::string to_string(ProtocolKind kind) {
  switch (kind) {
    case ProtocolKind::Zero: return "zero";
    case ProtocolKind::Constant: return "constant";
    case ProtocolKind::SmoothBounded: return "smooth_bounded";
    case ProtocolKind::WeaklySingular: return "weakly_singular";
    case ProtocolKind::Custom: return "custom";
  }
  return "?";
}

Protocol Protocol::zero() {
  Protocol p;
  p.kind_ = ProtocolKind::Zero;
  p.sup_norm_ = 0.0;
  return p;
}

Protocol Protocol::constant(double phi0) {
  if (!(phi0 > 0.0) || !std::isfinite(phi0)) throw ConfigError("protocol.phi0", "must be a finite value > 0");
  Protocol p;
  p.kind_ = ProtocolKind::Constant;
  p.p0_ = phi0;
  p.sup_norm_ = phi0;
  p.heavy_tailed_ = true;
  return p;
}

Protocol Protocol::smooth_bounded(double K, double gamma) {
  if (!(K > 0.0) || !std::isfinite(K)) throw ConfigError("protocol.K", "must be a finite value > 0");
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw ConfigError("protocol.gamma", "must be >= 0");
  Protocol p;
  p.kind_ = ProtocolKind::SmoothBounded;
  p.p0_ = K;
  p.p1_ = gamma;
  p.sup_norm_ = K;
  p.heavy_tailed_ = gamma <= 1.0;
  return p;
}

Protocol Protocol::weakly_singular(const WeakSingularity& ws) {
  check_ws(ws);
  Protocol p;
  p.kind_ = ProtocolKind::WeaklySingular;
  p.singularity_ = ws;
  p.heavy_tailed_ = ws.tail_gamma <= 1.0;
  p.validate();
  return p;
}

Protocol Protocol::custom(CustomKernel kernel) {
  if (!kernel.phi) throw ConfigError("protocol.phi", "custom kernel needs a callable phi");
  if (kernel.singularity) check_ws(*kernel.singularity);
  Protocol p;
  p.kind_ = ProtocolKind::Custom;
  p.heavy_tailed_ = kernel.heavy_tailed;
  p.sup_norm_ = kernel.sup_norm;
  p.singularity_ = kernel.singularity;
  p.custom_ = std::make_shared<const CustomKernel>(std::move(kernel));
  p.validate();
  return p;
}

void Protocol::validate() const {
  // Sample on a geometric grid; catches sign errors, growth and a violated
  // singular lower bound without pretending to prove (A1).
  double prev = kInf;
  for (int k = 0; k <= 240; ++k) {
    const double r = 1e-8 * std::pow(10.0, k / 20.0);
    const double v = phi(r);
    if (std::isnan(v) || v < 0.0) throw ConfigError("protocol", "phi must be nonnegative");
    if (v > prev * (1.0 + 1e-12) + 1e-300) throw ConfigError("protocol", "phi must be radially nonincreasing");
    if (sup_norm_ && v > *sup_norm_ * (1.0 + 1e-12)) throw ConfigError("protocol.sup_norm", "phi exceeds declared sup norm");
    if (singularity_ && r < singularity_->R) {
      const double lb = singularity_->c * std::pow(r, -singularity_->beta);
      if (v < lb * (1.0 - 1e-12)) throw ConfigError("protocol", "phi is below c r^-beta on (0,R)");
    }
    if (custom_ && custom_->phi(-r) != v) throw ConfigError("protocol", "phi must be even");
    prev = v;
  }
}

double Protocol::phi(double r) const {
  r = std::fabs(r);
  switch (kind_) {
    case ProtocolKind::Zero: return 0.0;
    case ProtocolKind::Constant: return p0_;
    case ProtocolKind::SmoothBounded:
      if (p1_ == 1.0) return p0_ / (1.0 + r);
      if (p1_ == 2.0) return p0_ / ((1.0 + r) * (1.0 + r));
      return p0_ * std::pow(1.0 + r, -p1_);
    case ProtocolKind::WeaklySingular: return ws_phi(*singularity_, r);
    case ProtocolKind::Custom: return custom_->phi(r);
  }
  return 0.0;
}

double Protocol::primitive(double x) const {
  const double s = std::fabs(x);
  const double sg = x < 0.0 ? -1.0 : 1.0;
  if (s == 0.0) return 0.0;
  switch (kind_) {
    case ProtocolKind::Zero: return 0.0;
    case ProtocolKind::Constant: return p0_ * x;
    case ProtocolKind::SmoothBounded: return sg * tail1(s, p0_, p1_);
    case ProtocolKind::WeaklySingular: return sg * ws_Phi_abs(*singularity_, s);
    case ProtocolKind::Custom:
      if (custom_->primitive) return custom_->primitive(x);
      return sg * integrate([this](double r) { return custom_->phi(r); }, 0.0, s, "phi");
  }
  return 0.0;
}

double Protocol::second_primitive(double x) const {
  const double s = std::fabs(x);
  if (s == 0.0) return 0.0;
  switch (kind_) {
    case ProtocolKind::Zero: return 0.0;
    case ProtocolKind::Constant: return 0.5 * p0_ * s * s;
    case ProtocolKind::SmoothBounded: return tail2(s, p0_, p1_);
    case ProtocolKind::WeaklySingular: return ws_Phi2_abs(*singularity_, s);
    case ProtocolKind::Custom:
      // by parts: int_0^s Phi = s Phi(s) - int_0^s r phi(r) dr, one quadrature instead of a nested one
      return s * primitive(s) - integrate([this](double r) { return r * phi(r); }, 0.0, s, "Phi");
  }
  return 0.0;
}

std::string Protocol::describe() const {
  std::ostringstream os;
  os.precision(17);
  os << to_string(kind_);
  switch (kind_) {
    case ProtocolKind::Constant: os << "(phi0=" << p0_ << ")"; break;
    case ProtocolKind::SmoothBounded: os << "(K=" << p0_ << ",gamma=" << p1_ << ")"; break;
    case ProtocolKind::WeaklySingular: {
      const auto& w = *singularity_;
      os << "(c=" << w.c << ",beta=" << w.beta << ",R=" << w.R << ",tail_gamma=" << w.tail_gamma << ")";
      break;
    }
    default: break;
  }
  return os.str();
}

double phi_eval(const Protocol& p, double r) { return p.phi(r); }

double phi_primitive(const Protocol& p, double x) { return p.primitive(x); }

double phi_floor(const Protocol& p, double diameter_bound) {
  if (!(diameter_bound > 0.0)) throw ContractViolation("phi_floor: diameter bound must be > 0");
  return p.phi(diameter_bound);
}

}  // namespace scs

#include "stickycs/initial_data.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "stickycs/error.hpp"

namespace scs {
namespace {

std::string idx(const char* what, std::size_t i, const char* field) {
  return std::string(what) + "[" + std::to_string(i) + "]." + field;
}

bool finite(double v) { return std::isfinite(v); }

}  // namespace

double UniformBlock::value_at(double x) const {
  for (const auto& p : value)
    if (x >= p.a && x <= p.b) return p.at(x);
  throw ContractViolation("value undefined at x = " + std::to_string(x));
}

void InitialData::validate() const {
  if (atoms.empty() && blocks.empty()) throw ConfigError("initial", "no atoms or blocks given");
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    const auto& a = atoms[i];
    if (!(a.mass > 0.0) || !finite(a.mass)) throw ConfigError(idx("atoms", i, "mass"), "must be a finite value > 0");
    if (!finite(a.x)) throw ConfigError(idx("atoms", i, "x"), "must be finite");
    if (!finite(a.value)) throw ConfigError(idx("atoms", i, "value"), "must be finite");
    for (std::size_t j = 0; j < i; ++j)
      if (atoms[j].x == a.x && atoms[j].value != a.value)
        throw ConfigError(idx("atoms", i, "value"), "atoms sharing a position must share a value");
  }
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const auto& b = blocks[i];
    if (!(b.mass > 0.0) || !finite(b.mass)) throw ConfigError(idx("blocks", i, "mass"), "must be a finite value > 0");
    if (!finite(b.a) || !finite(b.b) || !(b.a < b.b)) throw ConfigError(idx("blocks", i, "interval"), "need finite a < b");
    if (b.value.empty()) throw ConfigError(idx("blocks", i, "value"), "missing value pieces");
    if (b.value.front().a != b.a || b.value.back().b != b.b)
      throw ConfigError(idx("blocks", i, "value"), "pieces must cover the block exactly");
    for (std::size_t k = 0; k < b.value.size(); ++k) {
      const auto& p = b.value[k];
      if (!(p.a < p.b) || !finite(p.va) || !finite(p.vb))
        throw ConfigError(idx("blocks", i, "value"), "piece needs a < b and finite values");
      if (k + 1 < b.value.size() && p.b != b.value[k + 1].a)
        throw ConfigError(idx("blocks", i, "value"), "pieces must be contiguous");
    }
  }
  std::vector<std::pair<double, double>> iv;
  for (const auto& b : blocks) iv.emplace_back(b.a, b.b);
  std::sort(iv.begin(), iv.end());
  for (std::size_t k = 1; k < iv.size(); ++k)
    if (iv[k].first < iv[k - 1].second) throw ConfigError("blocks", "blocks must not overlap");
  if (std::fabs(total_mass() - 1.0) > 1e-12) throw ConfigError("mass", "total mass must be 1 (got " + std::to_string(total_mass()) + ")");
}

double InitialData::total_mass() const {
  double s = 0.0;
  for (const auto& a : atoms) s += a.mass;
  for (const auto& b : blocks) s += b.mass;
  return s;
}

double InitialData::support_min() const {
  double lo = INFINITY;
  for (const auto& a : atoms) lo = std::min(lo, a.x);
  for (const auto& b : blocks) lo = std::min(lo, b.a);
  return lo;
}

double InitialData::support_max() const {
  double hi = -INFINITY;
  for (const auto& a : atoms) hi = std::max(hi, a.x);
  for (const auto& b : blocks) hi = std::max(hi, b.b);
  return hi;
}

double Cdf::operator()(double x) const {
  if (knots_.empty() || x < knots_.front().x) return -0.5;
  auto it = std::upper_bound(knots_.begin(), knots_.end(), x, [](double v, const Knot& k) { return v < k.x; });
  const std::size_t k = static_cast<std::size_t>(it - knots_.begin()) - 1;
  if (knots_[k].x == x || k + 1 == knots_.size()) return knots_[k].right;
  const auto& a = knots_[k];
  const auto& b = knots_[k + 1];
  return a.right + (b.left - a.right) * (x - a.x) / (b.x - a.x);
}

Cdf build_cdf(const InitialData& data) {
  data.validate();
  std::map<double, double> atom_mass;
  for (const auto& a : data.atoms) atom_mass[a.x] += a.mass;
  std::vector<double> xs;
  for (const auto& a : data.atoms) xs.push_back(a.x);
  for (const auto& b : data.blocks) {
    xs.push_back(b.a);
    xs.push_back(b.b);
  }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

  std::vector<Cdf::Knot> knots;
  double level = -0.5;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    if (k > 0) {
      const double lo = xs[k - 1], hi = xs[k];
      for (const auto& b : data.blocks) {
        if (b.b <= lo || b.a >= hi) continue;
        if (b.a == lo && b.b == hi)
          level += b.mass;
        else
          level += b.mass * (std::min(hi, b.b) - std::max(lo, b.a)) / (b.b - b.a);
      }
    }
    const double left = level;
    auto it = atom_mass.find(xs[k]);
    if (it != atom_mass.end()) level += it->second;
    knots.push_back({xs[k], left, level});
  }
  knots.back().right = 0.5;
  if (knots.back().left > 0.5) knots.back().left = 0.5;
  return Cdf(std::move(knots));
}

QuantileFn generalized_inverse(const Cdf& M) {
  std::vector<QuantileFn::Segment> segs;
  const auto& kn = M.knots();
  for (std::size_t k = 0; k < kn.size(); ++k) {
    if (k > 0 && kn[k].left > kn[k - 1].right) segs.push_back({kn[k - 1].right, kn[k].left, kn[k - 1].x, kn[k].x});
    if (kn[k].right > kn[k].left) segs.push_back({kn[k].left, kn[k].right, kn[k].x, kn[k].x});
  }
  return QuantileFn(std::move(segs));
}

QuantileFn QuantileFn::from_particles(const Eigen::VectorXd& theta, const Eigen::VectorXd& x) {
  if (theta.size() != x.size() + 1) throw ContractViolation("from_particles: theta must have N+1 entries");
  std::vector<Segment> segs;
  for (Eigen::Index i = 0; i < x.size(); ++i) segs.push_back({theta[i], theta[i + 1], x[i], x[i]});
  return QuantileFn(std::move(segs));
}

std::size_t QuantileFn::find(double m) const {
  auto it = std::lower_bound(segs_.begin(), segs_.end(), m, [](const Segment& s, double v) { return s.m_hi < v; });
  if (it == segs_.end()) --it;
  return static_cast<std::size_t>(it - segs_.begin());
}

double QuantileFn::operator()(double m) const {
  if (segs_.empty()) throw ContractViolation("empty quantile function");
  if (m <= segs_.front().m_lo) return segs_.front().x_lo;
  if (m > segs_.back().m_hi + 1e-15) throw ContractViolation("label out of range: " + std::to_string(m));
  const auto& s = segs_[find(m)];
  if (s.constant() || m >= s.m_hi) return s.x_hi;
  return s.x_lo + (s.x_hi - s.x_lo) * (m - s.m_lo) / (s.m_hi - s.m_lo);
}

double QuantileFn::right_limit(double m) const {
  if (segs_.empty()) throw ContractViolation("empty quantile function");
  auto it = std::upper_bound(segs_.begin(), segs_.end(), m, [](double v, const Segment& s) { return v < s.m_hi; });
  if (it == segs_.end()) return segs_.back().x_hi;
  const auto& s = *it;
  if (s.constant() || m <= s.m_lo) return s.x_lo;
  return s.x_lo + (s.x_hi - s.x_lo) * (m - s.m_lo) / (s.m_hi - s.m_lo);
}

Psi0::Psi0(InitialData data, Protocol p) : data_(std::move(data)), p_(std::move(p)) {}

double Psi0::convolution(double x) const {
  if (p_.kind() == ProtocolKind::Zero) return 0.0;
  double s = 0.0;
  for (const auto& a : data_.atoms) s += a.mass * p_.primitive(x - a.x);
  for (const auto& b : data_.blocks)
    s += b.mass / (b.b - b.a) * (p_.second_primitive(x - b.a) - p_.second_primitive(x - b.b));
  return s;
}

double Psi0::on_block(double x) const {
  for (const auto& b : data_.blocks) {
    if (x < b.a || x > b.b) continue;
    const double v = b.value_at(x);
    return data_.mode == ValueMode::Psi ? v : v + convolution(x);
  }
  throw ContractViolation("psi0: no block contains x = " + std::to_string(x));
}

double Psi0::at_atom(double x) const {
  for (const auto& a : data_.atoms)
    if (a.x == x) return data_.mode == ValueMode::Psi ? a.value : a.value + convolution(x);
  throw ContractViolation("psi0: no atom at x = " + std::to_string(x));
}

double Psi0::operator()(double x) const {
  for (const auto& a : data_.atoms)
    if (a.x == x) return at_atom(x);
  return on_block(x);
}

std::vector<double> Psi0::kinks() const {
  std::vector<double> k;
  for (const auto& a : data_.atoms) k.push_back(a.x);
  for (const auto& b : data_.blocks)
    for (const auto& p : b.value) {
      k.push_back(p.a);
      k.push_back(p.b);
    }
  std::sort(k.begin(), k.end());
  k.erase(std::unique(k.begin(), k.end()), k.end());
  return k;
}

Psi0 build_psi0(const InitialData& data, const Protocol& p) {
  data.validate();
  return Psi0(data, p);
}

double Flux::operator()(double label) const {
  if (label <= m.front()) return a.front();
  if (label >= m.back()) return a.back();
  const std::size_t k = segment_of(label);
  if (label == m[k]) return a[k];
  return a[k] + (a[k + 1] - a[k]) * (label - m[k]) / (m[k + 1] - m[k]);
}

std::size_t Flux::segment_of(double label) const {
  auto it = std::upper_bound(m.begin(), m.end(), label);
  std::ptrdiff_t k = (it - m.begin()) - 1;
  k = std::clamp<std::ptrdiff_t>(k, 0, static_cast<std::ptrdiff_t>(m.size()) - 2);
  return static_cast<std::size_t>(k);
}

double Flux::lipschitz() const {
  double L = 0.0;
  for (std::size_t k = 0; k + 1 < m.size(); ++k) L = std::max(L, std::fabs(slope(k)));
  return L;
}

Flux build_flux(const Psi0& psi0, const QuantileFn& X0, double eps) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
  Flux F;
  F.m.push_back(X0.segments().front().m_lo);
  F.a.push_back(0.0);
  const auto kinks = psi0.kinks();

  auto push = [&](double m, double a, bool exact) {
    F.m.push_back(m);
    F.a.push_back(a);
    F.exact.push_back(exact ? 1 : 0);
  };

  for (const auto& s : X0.segments()) {
    const double A0 = F.a.back();
    if (s.constant()) {
      push(s.m_hi, A0 + psi0(s.x_lo) * (s.m_hi - s.m_lo), true);
      continue;
    }
    auto x_of = [&s](double m) { return s.x_lo + (s.x_hi - s.x_lo) * (m - s.m_lo) / (s.m_hi - s.m_lo); };
    std::vector<double> cuts{s.m_lo};
    for (double xk : kinks)
      if (xk > s.x_lo && xk < s.x_hi) cuts.push_back(s.m_lo + (xk - s.x_lo) / (s.x_hi - s.x_lo) * (s.m_hi - s.m_lo));
    cuts.push_back(s.m_hi);

    for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
      const double ml = cuts[c], mr = cuts[c + 1];
      if (!(mr > ml)) continue;
      auto g = [&](double m) { return psi0.on_block(x_of(m)); };
      const double Al = F.a.back();
      double gmin = INFINITY, gmax = -INFINITY;
      for (int j = 0; j < 17; ++j) {
        const double v = g(ml + (j + 0.5) / 17.0 * (mr - ml));
        gmin = std::min(gmin, v);
        gmax = std::max(gmax, v);
      }
      if (gmax - gmin <= 1e-13 * std::max(1.0, std::fabs(gmax))) {
        push(mr, Al + 0.5 * (gmin + gmax) * (mr - ml), true);
        continue;
      }
      auto I = [&](double lo, double hi) { return boost::math::quadrature::gauss<double, 20>::integrate(g, lo, hi); };
      auto refine = [&](auto&& self, double lo, double alo, double hi, double ahi, int depth) -> void {
        const double mid = 0.5 * (lo + hi);
        const double amid = alo + I(lo, mid);
        if (depth >= 3 && (std::fabs(amid - 0.5 * (alo + ahi)) <= eps || depth >= 40)) {
          push(hi, ahi, false);
          return;
        }
        self(self, lo, alo, mid, amid, depth + 1);
        self(self, mid, amid, hi, ahi, depth + 1);
      };
      refine(refine, ml, Al, mr, Al + GK::integrate(g, ml, mr, 15, 1e-13), 0);
    }
  }
  F.m.back() = 0.5;
  return F;
}

Eigen::Index Discretization::particle_of(double label) const {
  if (!(label > theta[0]) || label > theta[theta.size() - 1]) throw ContractViolation("label out of range: " + std::to_string(label));
  const double* b = theta.data() + 1;
  const double* e = theta.data() + theta.size();
  return std::lower_bound(b, e, label) - b;
}

Eigen::Index Discretization::grid_index(double label) const {
  const double* b = theta.data();
  const double* e = b + theta.size();
  const double* it = std::lower_bound(b, e, label);
  return (it != e && *it == label) ? it - b : -1;
}

InitialModel build_model(const InitialData& data, const Protocol& p) {
  Cdf M = build_cdf(data);
  QuantileFn X = generalized_inverse(M);
  Psi0 psi = build_psi0(data, p);
  Flux A = build_flux(psi, X);
  return InitialModel{data, p, std::move(M), std::move(X), std::move(psi), std::move(A)};
}

std::vector<double> label_grid(int N, std::vector<double> snap) {
  if (N < 1) throw ContractViolation("discretize: N must be >= 1");
  for (double s : snap)
    if (!std::isfinite(s) || s <= -0.5 || s >= 0.5) throw ContractViolation("snap label must lie in (-1/2, 1/2): " + std::to_string(s));
  std::sort(snap.begin(), snap.end());
  snap.erase(std::unique(snap.begin(), snap.end()), snap.end());
  const double crowd = 1e-3 / N;
  std::vector<double> grid{-0.5};
  for (int k = 1; k < N; ++k) {
    const double u = -0.5 + static_cast<double>(k) / N;
    auto it = std::lower_bound(snap.begin(), snap.end(), u);
    bool near = (it != snap.end() && *it - u < crowd) || (it != snap.begin() && u - *(it - 1) < crowd);
    if (!near) grid.push_back(u);
  }
  grid.insert(grid.end(), snap.begin(), snap.end());
  grid.push_back(0.5);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

Discretization discretize(const InitialModel& model, int N, std::vector<double> snap) {
  const auto grid = label_grid(N, std::move(snap));
  const Eigen::Index n = static_cast<Eigen::Index>(grid.size()) - 1;
  Discretization d;
  d.theta = Eigen::Map<const Eigen::VectorXd>(grid.data(), n + 1);
  d.masses = d.theta.tail(n) - d.theta.head(n);
  d.x0.resize(n);
  d.psi0.resize(n);
  d.v0.resize(n);
  d.a_theta.resize(n + 1);
  for (Eigen::Index k = 0; k <= n; ++k) d.a_theta[k] = model.flux(d.theta[k]);
  for (Eigen::Index i = 0; i < n; ++i) {
    d.x0[i] = model.x0(d.theta[i + 1]);
    d.psi0[i] = (d.a_theta[i + 1] - d.a_theta[i]) / d.masses[i];
  }
  const Protocol& p = model.protocol;
  for (Eigen::Index i = 0; i < n; ++i) {
    double s = 0.0;
    if (p.kind() != ProtocolKind::Zero)
      for (Eigen::Index j = 0; j < n; ++j) s += d.masses[j] * p.primitive(d.x0[i] - d.x0[j]);
    d.v0[i] = d.psi0[i] - s;
  }
  return d;
}

Discretization discretize(const InitialData& data, const Protocol& p, int N, std::vector<double> snap) {
  return discretize(build_model(data, p), N, std::move(snap));
}

std::vector<std::pair<double, double>> atom_label_blocks(const Cdf& M) {
  std::vector<std::pair<double, double>> out;
  for (const auto& k : M.knots())
    if (k.right > k.left) out.emplace_back(k.left, k.right);
  return out;
}

}  // namespace scs

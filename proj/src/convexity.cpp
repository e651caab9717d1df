#include "stickycs/convexity.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "stickycs/error.hpp"

namespace scs {

double Envelope::operator()(double label) const {
  if (label <= m.front()) return value.front();
  if (label >= m.back()) return value.back();
  auto it = std::upper_bound(m.begin(), m.end(), label);
  const std::size_t k = static_cast<std::size_t>(it - m.begin()) - 1;
  if (m[k] == label) return value[k];
  return value[k] + (value[k + 1] - value[k]) * (label - m[k]) / (m[k + 1] - m[k]);
}

Envelope lower_convex_envelope(const Flux& A) {
  const std::size_t n = A.size();
  if (n < 2) throw ContractViolation("lower_convex_envelope: need at least 2 breakpoints");
  Envelope e;
  e.hull = lower_hull(A.m.data(), A.a.data(), n);
  e.m = A.m;
  e.value.resize(n);
  for (std::size_t h = 0; h + 1 < e.hull.size(); ++h) {
    const std::size_t i = e.hull[h], j = e.hull[h + 1];
    e.value[i] = A.a[i];
    for (std::size_t k = i + 1; k < j; ++k) e.value[k] = A.a[i] + (A.a[j] - A.a[i]) * (A.m[k] - A.m[i]) / (A.m[j] - A.m[i]);
  }
  e.value[n - 1] = A.a[n - 1];
  return e;
}

const char* to_string(Region r) {
  switch (r) {
    case Region::Plus: return "sigma_plus";
    case Region::Zero: return "sigma_zero";
    case Region::Minus: return "sigma_minus";
    case Region::MinusRightEnd: return "sigma_minus_right_end";
  }
  return "?";
}

Region RegionDecomposition::region_of(double m) const {
  if (!(m > -0.5 && m <= 0.5)) throw ContractViolation("label out of range: " + std::to_string(m));
  for (const auto& c : minus)
    if (c.contains(m)) return Region::Minus;
  for (const auto& c : zero)
    if (c.contains(m)) return Region::Zero;
  for (const auto& c : plus)
    if (c.contains(m)) return Region::Plus;
  for (const auto& c : minus)
    if (c.hi == m) return Region::MinusRightEnd;
  throw ContractViolation("label not covered by the region decomposition: " + std::to_string(m));
}

const LabelInterval* RegionDecomposition::minus_component(double m) const {
  for (const auto& c : minus)
    if (c.contains(m)) return &c;
  return nullptr;
}

std::vector<double> RegionDecomposition::endpoints() const {
  std::vector<double> out;
  for (const auto* list : {&plus, &zero, &minus})
    for (const auto& c : *list)
      for (double v : {c.lo, c.hi})
        if (v > -0.5 && v < 0.5) out.push_back(v);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

RegionDecomposition classify_regions(const Flux& A, const Envelope& env, RegionTolerances tol) {
  const std::size_t n = A.size();
  if (env.m.size() != n || env.m != A.m) throw ContractViolation("classify_regions: envelope built on a different breakpoint set");
  RegionDecomposition r;
  const auto [lo, hi] = std::minmax_element(A.a.begin(), A.a.end());
  r.eps_contact = tol.contact_rel * (*hi - *lo);
  r.eps_slope = tol.slope_rel * A.lipschitz();

  std::vector<char> contact(n);
  for (std::size_t k = 0; k < n; ++k) contact[k] = A.a[k] - env.value[k] <= r.eps_contact;
  contact.front() = contact.back() = 1;

  auto add_plus = [&](double a, double b) {
    if (!r.plus.empty() && r.plus.back().hi == a) r.plus.back().hi = b;
    else r.plus.push_back({a, b});
  };

  std::size_t i = 0;
  while (i + 1 < n) {
    if (contact[i] && contact[i + 1]) {
      std::size_t j = i;
      while (j + 1 < n && contact[j] && contact[j + 1]) ++j;
      // cells i..j-1 form a contact run; split by slope
      std::size_t s = i;
      while (s < j) {
        const double s0 = A.slope(s);
        std::size_t e = s + 1;
        bool exact = A.exact[s];
        while (e < j && std::fabs(A.slope(e) - s0) <= r.eps_slope) {
          exact = exact || A.exact[e];
          ++e;
        }
        if (exact || e - s >= 2) r.zero.push_back({A.m[s], A.m[e]});
        else add_plus(A.m[s], A.m[e]);
        s = e;
      }
      i = j;
    } else {
      std::size_t l = i + 1;
      while (!contact[l]) ++l;
      r.minus.push_back({A.m[i], A.m[l], true, false});
      i = l;
    }
  }
  for (std::size_t k = 1; k + 1 < n; ++k) {
    if (!contact[k]) continue;
    if (std::fabs(A.slope(k) - A.slope(k - 1)) > r.eps_slope && std::fabs(env.slope(k) - env.slope(k - 1)) <= r.eps_slope)
      r.flagged.push_back(A.m[k]);
  }
  return r;
}

LabelInterval l_interval(double m, const Envelope& env, const RegionDecomposition& regions) {
  if (regions.region_of(m) == Region::Plus) return LabelInterval::single(m);
  auto it = std::lower_bound(env.m.begin(), env.m.end(), m);
  std::size_t k = static_cast<std::size_t>(it - env.m.begin());
  k = k == 0 ? 0 : k - 1;
  const double s = env.slope(k);
  std::size_t a = k, b = k + 1;
  while (a > 0 && std::fabs(env.slope(a - 1) - s) <= regions.eps_slope) --a;
  while (b + 1 < env.m.size() && std::fabs(env.slope(b) - s) <= regions.eps_slope) ++b;
  return {env.m[a], env.m[b]};
}

LabelInterval c_interval(double m, const QuantileFn& X0, const RegionDecomposition& regions) {
  if (!(m > -0.5 && m <= 0.5)) throw ContractViolation("label out of range: " + std::to_string(m));
  const auto& segs = X0.segments();
  for (std::size_t k = 0; k < segs.size(); ++k) {
    if (!(segs[k].constant() && m > segs[k].m_lo && m <= segs[k].m_hi)) continue;
    double lo = segs[k].m_lo, hi = segs[k].m_hi;
    for (std::size_t j = k; j > 0 && segs[j - 1].constant() && segs[j - 1].x_lo == segs[k].x_lo; --j) lo = segs[j - 1].m_lo;
    for (std::size_t j = k + 1; j < segs.size() && segs[j].constant() && segs[j].x_lo == segs[k].x_lo; ++j) hi = segs[j].m_hi;
    return {lo, hi};
  }
  if (const auto* c = regions.minus_component(m)) return {c->lo, c->hi};
  return LabelInterval::single(m);
}

A4Report check_a4(const Flux& A, const RegionDecomposition& regions) {
  A4Report rep;
  auto convex_near = [&](double s) {
    for (int k = 1; k <= 20; ++k) {
      const double d = std::ldexp(0.5, -k);
      const double lo = std::max(-0.5, s - d), hi = std::min(0.5, s + d);
      const double guard = 1e-12;
      std::vector<double> pm{lo};
      auto it = std::upper_bound(A.m.begin(), A.m.end(), lo + guard);
      for (; it != A.m.end() && *it < hi - guard; ++it) pm.push_back(*it);
      pm.push_back(hi);
      bool ok = true;
      double prev = -INFINITY;
      for (std::size_t j = 0; j + 1 < pm.size() && ok; ++j) {
        const double sl = (A(pm[j + 1]) - A(pm[j])) / (pm[j + 1] - pm[j]);
        if (sl < prev - regions.eps_slope) ok = false;
        prev = sl;
      }
      if (ok) return true;
    }
    return false;
  };
  for (const auto& c : regions.minus)
    for (double s : {c.lo, c.hi})
      if (!convex_near(s)) {
        rep.ok = false;
        rep.witnesses.push_back(s);
      }
  return rep;
}

LevelSet level_set_params(const Flux& A, const Envelope& env, const LabelInterval& comp, double k_lo, double k_hi) {
  const double mm = comp.lo, mp = comp.hi, w = mp - mm;
  if (!(k_lo > mm && k_hi < mp && k_lo <= k_hi)) throw ContractViolation("level_set_params: K must lie inside the open component");
  std::vector<double> s, f;
  for (std::size_t k = 0; k < A.size(); ++k) {
    if (A.m[k] < mm || A.m[k] > mp) continue;
    s.push_back((A.m[k] - mm) / w);
    f.push_back(A.a[k] - env.value[k]);
  }
  if (s.size() < 3 || s.front() != 0.0 || s.back() != 1.0)
    throw ContractViolation("level_set_params: component endpoints are not flux breakpoints");
  for (std::size_t k = 1; k + 1 < s.size(); ++k)
    if (!(f[k] > 0.0)) throw ContractViolation("level_set_params: A - A** not positive inside the component");

  const std::size_t n = s.size();
  std::vector<double> sl(n - 1);
  for (std::size_t k = 0; k + 1 < n; ++k) sl[k] = (f[k + 1] - f[k]) / (s[k + 1] - s[k]);
  const double tol = 1e-9 * A.lipschitz() * w;
  std::size_t ia = 0, ib = 0;
  for (std::size_t k = 1; k + 1 < n; ++k)
    if (sl[k] < sl[k - 1] - tol) {
      ia = k;
      break;
    }
  for (std::size_t k = n - 2; k >= 1; --k)
    if (sl[k] < sl[k - 1] - tol) {
      ib = k;
      break;
    }
  if (ia == 0 || ib == 0) throw ContractViolation("level_set_params: no concave kink inside the component");

  LevelSet L;
  L.a0 = s[ia];
  L.b0 = s[ib];
  double fmin = INFINITY;
  for (std::size_t k = ia; k <= ib; ++k) fmin = std::min(fmin, f[k]);
  L.h0 = 0.5 * fmin;

  auto f_at = [&](double x) {
    auto it = std::upper_bound(s.begin(), s.end(), x);
    const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(it - s.begin()) - 1, n - 2);
    return f[k] + sl[k] * (x - s[k]);
  };
  const double sk_lo = (k_lo - mm) / w, sk_hi = (k_hi - mm) / w;
  if (sk_lo < L.a0) L.h0 = std::min(L.h0, f_at(sk_lo));
  if (sk_hi > L.b0) L.h0 = std::min(L.h0, f_at(sk_hi));
  L.h = L.h0;
  L.c_h = L.h / w;

  L.s_a = L.a0;
  for (std::size_t k = 0; k < ia; ++k)
    if (f[k] <= L.h && f[k + 1] >= L.h) {
      L.s_a = f[k + 1] == f[k] ? s[k] : s[k] + (L.h - f[k]) / sl[k];
      break;
    }
  L.s_b = L.b0;
  for (std::size_t k = n - 1; k > ib; --k)
    if (f[k] <= L.h && f[k - 1] >= L.h) {
      L.s_b = f[k - 1] == f[k] ? s[k] : s[k] + (L.h - f[k]) / sl[k - 1];
      break;
    }
  L.a_h = mm + L.s_a * w;
  L.b_h = mm + L.s_b * w;
  return L;
}

void require_resolved(const Discretization& d, const RegionDecomposition& regions) {
  for (const auto& c : regions.minus) {
    int inside = 0;
    for (Eigen::Index k = 0; k < d.theta.size(); ++k)
      if (d.theta[k] > c.lo && d.theta[k] < c.hi) ++inside;
    if (inside < 1)
      throw RefineError("sigma_minus component (" + std::to_string(c.lo) + ", " + std::to_string(c.hi) +
                        ") spans fewer than 2 grid cells; refine N");
  }
}

}  // namespace scs

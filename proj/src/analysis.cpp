#include "stickycs/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "stickycs/error.hpp"

namespace scs {

using Eigen::Index;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string label_str(const LabelInterval& L) {
  std::ostringstream os;
  os.precision(6);
  if (L.point) os << "{" << L.lo << "}";
  else os << "(" << L.lo << "," << L.hi << (L.open ? ")" : "]");
  return os.str();
}

// (1/|C|) int_C X over (lo, hi], exact for piecewise-linear X.
double mean_x(const QuantileFn& X, double lo, double hi) {
  double s = 0.0;
  for (const auto& g : X.segments()) {
    const double a = std::max(lo, g.m_lo), b = std::min(hi, g.m_hi);
    if (!(b > a)) continue;
    auto at = [&g](double m) { return g.constant() ? g.x_lo : g.x_lo + (g.x_hi - g.x_lo) * (m - g.m_lo) / (g.m_hi - g.m_lo); };
    s += 0.5 * (at(a) + at(b)) * (b - a);
  }
  return s / (hi - lo);
}

double unit_x0(const QuantileFn& X, const LabelInterval& U) { return U.point ? X(U.lo) : mean_x(X, U.lo, U.hi); }

Index particle_of(const Eigen::VectorXd& theta, double m) {
  if (!(m > theta[0] && m <= theta[theta.size() - 1])) throw ContractViolation("label out of range");
  return std::lower_bound(theta.data() + 1, theta.data() + theta.size(), m) - (theta.data() + 1);
}

Index grid_index(const Eigen::VectorXd& theta, double m) {
  const double* b = theta.data();
  const double* e = b + theta.size();
  const double* it = std::lower_bound(b, e, m);
  if (it == e || *it != m) throw ContractViolation("label " + std::to_string(m) + " is not a grid point");
  return it - b;
}

}  // namespace

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::NoCluster: return "NoCluster";
    case Verdict::FiniteTimeCluster: return "FiniteTimeCluster";
    case Verdict::InfiniteTimeCluster: return "InfiniteTimeCluster";
    case Verdict::ConfinedTo: return "ConfinedTo";
  }
  return "?";
}

std::vector<double> Prediction::labels() const {
  std::vector<double> out;
  auto add = [&out](const LabelInterval& L) {
    for (double v : {L.lo, L.hi})
      if (v > -0.5 && v < 0.5) out.push_back(v);
  };
  for (const auto& r : records) add(r.labels);
  for (const auto& s : separations) {
    add(s.left);
    add(s.right);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

double supercritical_time_bound(const Flux& A, const Envelope& env, const LabelInterval& comp, double k_lo, double k_hi,
                                const QuantileFn& X0) {
  const LevelSet L = level_set_params(A, env, comp, k_lo, k_hi);
  const double width = X0(comp.hi) - X0(comp.lo);
  return width * (comp.hi - comp.lo) / (0.5 * L.h0);
}

double weak_singular_collapse_time(double D0, double phi_floor, double c, double beta, double R, double m_minus,
                                   double m_plus) {
  if (!(phi_floor > 0.0)) throw ContractViolation("weak_singular_collapse_time: communication floor must be > 0");
  if (!(beta > 0.0 && beta < 1.0) || !(c > 0.0) || !(R > 0.0) || !(m_plus > m_minus))
    throw ContractViolation("weak_singular_collapse_time: invalid parameters");
  const double T1 = std::max(0.0, std::log(D0 / R) / phi_floor);
  return T1 + std::pow(R, beta) / (c * beta * (m_plus - m_minus));
}

double eta_for(const Protocol& p, double sigma) {
  if (!(sigma > 0.0)) return 0.0;
  auto g = [&p](double e) { return 2.0 * p.primitive(0.5 * e); };
  double hi = 1.0;
  while (g(hi) < sigma) {
    hi *= 2.0;
    if (hi > 1e12) return kInf;
  }
  double lo = 0.0;
  for (int k = 0; k < 200 && hi - lo > 1e-15 * hi; ++k) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) < sigma ? lo : hi) = mid;
  }
  return lo;
}

Prediction predict(const RegionDecomposition& regions, const QuantileFn& X0, const Flux& A, const Envelope& env,
                   const Protocol& p, double D0, const PredictOptions& opts) {
  const A4Report a4 = check_a4(A, regions);
  if (!a4.ok) {
    std::ostringstream os;
    os.precision(17);
    os << "flux is not locally convex at sigma_minus boundary label(s):";
    for (double w : a4.witnesses) os << " " << w;
    throw AssumptionError(os.str());
  }
  Prediction P;
  P.bounded = p.bounded();
  P.heavy_tailed = p.heavy_tailed();
  P.weakly_singular = p.weakly_singular();
  P.D0 = D0;
  P.seed = opts.seed;
  int next = 0;
  auto id = [&next](const char* tag) { return std::string(tag) + "-" + std::to_string(next++); };

  for (const auto& I : regions.plus) {
    PredictionRecord r;
    r.id = id("nc");
    r.theorem = "subcritical-no-cluster";
    r.verdict = Verdict::NoCluster;
    r.labels = I;
    P.records.push_back(r);
  }

  for (std::size_t k = 0; k < regions.minus.size(); ++k) {
    const auto& c = regions.minus[k];
    const double w = c.hi - c.lo;
    double klo = c.lo + 0.25 * w, khi = c.hi - 0.25 * w;
    if (auto it = opts.K.find(k); it != opts.K.end()) std::tie(klo, khi) = it->second;
    PredictionRecord r;
    r.id = id("ftc");
    r.theorem = "supercritical-collapse";
    r.verdict = Verdict::FiniteTimeCluster;
    r.labels = {klo, khi};
    r.closed = true;
    r.time_bound = supercritical_time_bound(A, env, c, klo, khi, X0);
    P.records.push_back(r);
    PredictionRecord q;
    q.id = id("conf");
    q.theorem = "supercritical-confinement";
    q.verdict = Verdict::ConfinedTo;
    q.labels = {c.lo, c.hi};
    P.records.push_back(q);
  }

  // distinct nontrivial L intervals
  std::vector<LabelInterval> Ls;
  auto add_L = [&](double m) {
    LabelInterval L = l_interval(m, env, regions);
    if (L.point) return;
    for (const auto& e : Ls)
      if (e == L) return;
    Ls.push_back(L);
  };
  for (const auto& I : regions.zero) add_L(0.5 * (I.lo + I.hi));
  for (const auto& I : regions.minus) add_L(0.5 * (I.lo + I.hi));
  std::sort(Ls.begin(), Ls.end(), [](const LabelInterval& a, const LabelInterval& b) { return a.lo < b.lo; });

  if (P.bounded) {
    for (const auto& I : regions.zero) {
      PredictionRecord r;
      r.id = id("nc");
      r.theorem = "critical-bounded-no-new-cluster";
      r.verdict = Verdict::NoCluster;
      r.labels = I;
      P.records.push_back(r);
    }
    std::vector<LabelInterval> clusters;
    for (const auto& s : X0.segments())
      if (s.constant()) clusters.push_back({s.m_lo, s.m_hi});
    for (const auto& L : Ls) {
      std::vector<LabelInterval> units;
      for (const auto& c : regions.minus)
        if (c.lo >= L.lo && c.hi <= L.hi) units.push_back({c.lo, c.hi});
      for (const auto& c : clusters) {
        if (!(c.lo >= L.lo && c.hi <= L.hi)) continue;
        bool inside = false;
        for (const auto& u : units) inside = inside || (c.lo >= u.lo && c.hi <= u.hi);
        if (!inside) units.push_back(c);
      }
      std::sort(units.begin(), units.end(), [](const auto& a, const auto& b) { return a.lo < b.lo; });
      std::vector<LabelInterval> seq;
      double cur = L.lo;
      auto fill = [&](double a, double b) {
        if (!(b > a)) return;
        for (int j = 1; j <= opts.labels_per_gap; ++j) seq.push_back(LabelInterval::single(a + (b - a) * j / (opts.labels_per_gap + 1)));
      };
      for (const auto& u : units) {
        fill(cur, u.lo);
        seq.push_back(u);
        cur = u.hi;
      }
      fill(cur, L.hi);
      for (std::size_t j = 0; j + 1 < seq.size(); ++j) {
        const auto& U1 = seq[j];
        const auto& U2 = seq[j + 1];
        double c0;
        if (U1.point && U2.point) c0 = X0(U2.lo) - X0(U1.lo);
        else if (U1.point) c0 = X0(U2.lo) - X0(U1.lo);
        else if (U2.point) c0 = X0(U2.lo) - X0(U1.hi);
        else c0 = unit_x0(X0, U2) - unit_x0(X0, U1);
        if (!(c0 > 0.0)) continue;
        SeparationRecord s;
        s.id = id("sep");
        s.theorem = "critical-bounded-separation";
        s.form = SeparationForm::BoundedExp;
        s.left = U1;
        s.right = U2;
        s.c0 = c0;
        s.phi_sup = *p.sup_norm();
        P.separations.push_back(s);
      }
    }
  }

  if (P.heavy_tailed) {
    for (const auto& L : Ls) {
      PredictionRecord r;
      r.id = id("itc");
      r.theorem = "critical-heavy-tail-contraction";
      r.verdict = Verdict::InfiniteTimeCluster;
      r.labels = L;
      r.D0 = D0;
      r.rate = phi_floor(p, D0);
      P.records.push_back(r);
      if (P.weakly_singular) {
        const auto& w = *p.singularity();
        PredictionRecord q;
        q.id = id("ftc");
        q.theorem = "critical-weak-singular-collapse";
        q.verdict = Verdict::FiniteTimeCluster;
        q.labels = L;
        q.D0 = D0;
        q.rate = r.rate;
        q.time_bound = weak_singular_collapse_time(D0, r.rate, w.c, w.beta, w.R, L.lo, L.hi);
        P.records.push_back(q);
      }
    }
  }

  // labels from distinct L(m) never meet
  auto sub_pair = [&](double a, double b) {
    SeparationRecord s;
    s.id = id("sub");
    s.theorem = "distinct-L-separation";
    s.form = SeparationForm::Subcritical;
    s.left = LabelInterval::single(a);
    s.right = LabelInterval::single(b);
    P.separations.push_back(s);
  };
  double plus_len = 0.0;
  for (const auto& I : regions.plus) plus_len += I.hi - I.lo;
  if (plus_len > 1e-6 && opts.subcritical_pairs > 0) {
    std::mt19937_64 rng(opts.seed);
    auto unif = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
    auto draw = [&] {
      double u = unif() * plus_len;
      for (const auto& I : regions.plus) {
        if (u < I.hi - I.lo) return I.lo + u;
        u -= I.hi - I.lo;
      }
      return regions.plus.back().hi;
    };
    int made = 0;
    for (int tries = 0; made < opts.subcritical_pairs && tries < 100 * opts.subcritical_pairs; ++tries) {
      double a = draw(), b = draw();
      if (a > b) std::swap(a, b);
      if (b - a < 1e-3 || !(a > -0.5) || !(b < 0.5)) continue;
      sub_pair(a, b);
      ++made;
    }
  }
  for (std::size_t j = 0; j + 1 < Ls.size(); ++j) sub_pair(0.5 * (Ls[j].lo + Ls[j].hi), 0.5 * (Ls[j + 1].lo + Ls[j + 1].hi));
  return P;
}

ClusterReport clusters_of(const ParticleState& s, const Eigen::VectorXd& theta) {
  ClusterReport R;
  R.t = s.t;
  for (const auto& g : s.groups) {
    if (g.size() < 2) continue;
    Cluster c;
    c.first = g.first;
    c.last = g.last;
    c.labels = {theta[g.first], theta[g.last + 1]};
    c.x = s.x[g.first];
    c.mass = s.masses.segment(g.first, g.size()).sum();
    R.clusters.push_back(c);
  }
  return R;
}

ClusterReport extract_clusters(const Trajectory& traj, double t) { return clusters_of(state_at(traj, t), traj.theta); }

double barycenter_R(const ParticleState& s, const Eigen::VectorXd& theta, const LabelInterval& C) {
  if (C.point) return s.x[particle_of(theta, C.lo)];
  const Index a = grid_index(theta, C.lo), b = grid_index(theta, C.hi);
  if (b <= a) throw ContractViolation("barycenter_R: empty interval");
  const auto m = s.masses.segment(a, b - a);
  return m.dot(s.x.segment(a, b - a)) / m.sum();
}

double barycenter_R(const Trajectory& traj, const LabelInterval& C, double t) {
  return barycenter_R(state_at(traj, t), traj.theta, C);
}

double wasserstein1(const QuantileFn& Xa, const QuantileFn& Xb) {
  const auto& A = Xa.segments();
  const auto& B = Xb.segments();
  auto at = [](const QuantileFn::Segment& g, double m) {
    return g.constant() ? g.x_lo : g.x_lo + (g.x_hi - g.x_lo) * (m - g.m_lo) / (g.m_hi - g.m_lo);
  };
  std::size_t i = 0, j = 0;
  double lo = std::max(A.front().m_lo, B.front().m_lo);
  double total = 0.0;
  while (i < A.size() && j < B.size()) {
    const double hi = std::min(A[i].m_hi, B[j].m_hi);
    if (hi > lo) {
      const double d0 = at(A[i], lo) - at(B[j], lo);
      const double d1 = at(A[i], hi) - at(B[j], hi);
      const double w = hi - lo;
      if (d0 * d1 >= 0.0) total += 0.5 * (std::fabs(d0) + std::fabs(d1)) * w;
      else total += 0.5 * w * (d0 * d0 + d1 * d1) / (std::fabs(d0) + std::fabs(d1));
      lo = hi;
    }
    if (A[i].m_hi <= hi) ++i;
    if (j < B.size() && B[j].m_hi <= hi) ++j;
  }
  return total;
}

double fitted_decay_exponent(const std::vector<double>& t, const std::vector<double>& y) {
  double n = 0, st = 0, sy = 0, stt = 0, sty = 0;
  for (std::size_t k = 0; k < t.size() && k < y.size(); ++k) {
    if (!(y[k] > 0.0)) continue;
    const double ly = std::log(y[k]);
    n += 1;
    st += t[k];
    sy += ly;
    stt += t[k] * t[k];
    sty += t[k] * ly;
  }
  const double den = n * stt - st * st;
  if (n < 2 || den == 0.0) return 0.0;
  return (n * sty - st * sy) / den;
}

namespace {

std::vector<const ParticleState*> ordered_states(const Trajectory& traj) {
  std::vector<const ParticleState*> v;
  for (const auto& s : traj.samples) v.push_back(&s);
  for (const auto& s : traj.event_states) v.push_back(&s);
  std::stable_sort(v.begin(), v.end(), [](const ParticleState* a, const ParticleState* b) { return a->t < b->t; });
  return v;
}

}  // namespace

long stickiness_violations(const Trajectory& traj) {
  const auto st = ordered_states(traj);
  long bad = 0;
  for (std::size_t k = 1; k < st.size(); ++k) {
    std::vector<Index> cuts;
    for (const auto& g : st[k - 1]->groups) cuts.push_back(g.last);
    for (const auto& g : st[k]->groups)
      if (!std::binary_search(cuts.begin(), cuts.end(), g.last)) ++bad;
  }
  return bad;
}

bool VerifyReport::all_pass() const {
  return std::all_of(rows.begin(), rows.end(), [](const VerifyRow& r) { return r.pass; });
}

std::size_t VerifyReport::failures() const {
  return static_cast<std::size_t>(std::count_if(rows.begin(), rows.end(), [](const VerifyRow& r) { return !r.pass; }));
}

namespace {

struct RunView {
  int N;
  const Trajectory& tr;
  const QuantileFn& X0;
  std::vector<const ParticleState*> states;

  Index first_in(const LabelInterval& L, bool closed) const {
    if (L.point) return particle_of(tr.theta, L.lo);
    return closed ? particle_of(tr.theta, L.lo) : grid_index(tr.theta, L.lo);
  }
  Index last_in(const LabelInterval& L) const { return particle_of(tr.theta, L.point ? L.lo : L.hi); }

  double allowance(const LabelInterval& U) const {
    const auto& x0 = tr.initial.x;
    if (U.point) return std::fabs(x0[particle_of(tr.theta, U.lo)] - X0(U.lo));
    double a = 0.0;
    const Index i0 = grid_index(tr.theta, U.lo), i1 = grid_index(tr.theta, U.hi);
    for (Index i = i0; i < i1; ++i) a = std::max(a, x0[i] - X0.right_limit(tr.theta[i]));
    return a;
  }

  double pos(const ParticleState& s, const LabelInterval& U) const { return barycenter_R(s, tr.theta, U); }

  double collapse_time(Index a, Index b) const {
    for (const auto* s : states)
      if (s->group_of(a) == s->group_of(b)) return s->t;
    return kInf;
  }
};

}  // namespace

VerifyReport verify(const Prediction& pred, const InitialModel& model, const Envelope& env, const std::vector<RunRef>& runs,
                    const VerifyOptions& opts) {
  VerifyReport rep;
  const double lo_s = 1.0 - opts.slack, hi_s = 1.0 + opts.slack;
  const Protocol& p = model.protocol;
  for (const auto& run : runs) {
    RunView rv{run.N, *run.traj, model.x0, ordered_states(*run.traj)};
    const auto& tr = *run.traj;
    const auto& th = tr.theta;
    const double t_last = tr.samples.back().t;
    auto row = [&](const std::string& id, const std::string& thm, const std::string& check, double t, double emp,
                   double bound, double margin) {
      rep.rows.push_back({id, thm, check, run.N, t, emp, bound, margin, margin >= 0.0});
    };

    std::vector<Index> init_cuts;
    for (const auto& g : tr.samples.front().groups) init_cuts.push_back(g.last);
    auto in_initial_group = [&](const Group& g) {
      auto it = std::lower_bound(init_cuts.begin(), init_cuts.end(), g.first);
      return it != init_cuts.end() && *it >= g.last;
    };

    for (const auto& r : pred.records) {
      const LabelInterval& L = r.labels;
      switch (r.verdict) {
        case Verdict::NoCluster: {
          long bad = 0;
          double worst_t = 0.0;
          for (const auto* s : rv.states)
            for (const auto& g : s->groups) {
              if (g.size() < 2 || in_initial_group(g)) continue;
              bool touches = false;
              for (Index k = g.first; k <= g.last && !touches; ++k) touches = th[k] >= L.lo && th[k + 1] <= L.hi;
              if (touches) {
                if (bad == 0) worst_t = s->t;
                ++bad;
              }
            }
          row(r.id, r.theorem, "no-new-cluster " + label_str(L), worst_t, static_cast<double>(bad), 0.0, -static_cast<double>(bad));
          break;
        }
        case Verdict::ConfinedTo: {
          long bad = 0;
          double worst_t = 0.0;
          for (const auto* s : rv.states)
            for (const auto& g : s->groups) {
              if (g.size() < 2) continue;
              const double a = th[g.first], b = th[g.last + 1];
              bool touches = false;
              for (Index k = g.first; k <= g.last && !touches; ++k) touches = th[k] >= L.lo && th[k + 1] <= L.hi;
              if (!touches) continue;
              const bool inside = a >= L.lo && b <= L.hi;
              const bool covers = a <= L.lo && b >= L.hi;
              if (!inside && !covers) {
                if (bad == 0) worst_t = s->t;
                ++bad;
              }
            }
          row(r.id, r.theorem, "confined " + label_str(L), worst_t, static_cast<double>(bad), 0.0, -static_cast<double>(bad));
          break;
        }
        case Verdict::FiniteTimeCluster: {
          const Index a = rv.first_in(L, r.closed), b = rv.last_in(L);
          const double tc = rv.collapse_time(a, b);
          const double margin = std::isfinite(tc) ? r.time_bound * hi_s - tc : -kInf;
          row(r.id, r.theorem, (r.closed ? "collapse [" + std::to_string(L.lo) + "," + std::to_string(L.hi) + "]" : "collapse " + label_str(L)),
              std::isfinite(tc) ? tc : t_last, tc, r.time_bound, margin);
          break;
        }
        case Verdict::InfiniteTimeCluster: {
          const Index a = rv.first_in(L, false), b = rv.last_in(L);
          double Dbar = 0.0;
          for (const auto& s : tr.samples) Dbar = std::max(Dbar, s.x[s.size() - 1] - s.x[0]);
          const double floor = Dbar > 0.0 ? phi_floor(p, Dbar) : r.rate;
          const double alw = std::max(std::fabs(tr.initial.x[a] - model.x0.right_limit(L.lo)),
                                      std::fabs(tr.initial.x[b] - model.x0(L.hi)));
          double worst = kInf, wt = 0.0, we = 0.0, wb = 0.0;
          std::vector<double> ts, ds;
          for (const auto& s : tr.samples) {
            const double d = s.x[b] - s.x[a];
            const double bound = heavy_tail_contraction(r.D0, floor, s.t);
            const double m = bound * hi_s + alw - d;
            if (m < worst) {
              worst = m;
              wt = s.t;
              we = d;
              wb = bound;
            }
            ts.push_back(s.t);
            ds.push_back(d);
          }
          row(r.id, r.theorem, "contraction " + label_str(L), wt, we, wb, worst);
          const bool vanished = std::any_of(ds.begin(), ds.end(), [](double d) { return d <= 0.0; });
          const double rate = vanished ? -kInf : fitted_decay_exponent(ts, ds);
          const double need = -floor * (1.0 - opts.heavy_tail_rate_slack);
          row(r.id, r.theorem, "decay-exponent " + label_str(L), t_last, rate, need, need - rate);
          break;
        }
      }
    }

    for (const auto& s : pred.separations) {
      const double alw = std::max(rv.allowance(s.left), rv.allowance(s.right));
      if (s.form == SeparationForm::BoundedExp) {
        double worst = kInf, wt = 0.0, we = 0.0, wb = 0.0;
        for (const auto& st : tr.samples) {
          const double d = rv.pos(st, s.right) - rv.pos(st, s.left);
          const double bound = bounded_phi_separation(s.c0, s.phi_sup, st.t);
          const double m = d - (bound * lo_s - alw);
          if (m < worst) {
            worst = m;
            wt = st.t;
            we = d;
            wb = bound;
          }
        }
        row(s.id, s.theorem, "separation " + label_str(s.left) + "-" + label_str(s.right), wt, we, wb, worst);
        continue;
      }
      const Index i = particle_of(th, s.left.lo), j1 = particle_of(th, s.right.lo);
      auto env_slope = [&](Index k) { return (env(th[k + 1]) - env(th[k])) / (th[k + 1] - th[k]); };
      const double sigma = 0.5 * (env_slope(j1) - env_slope(i));
      const double eta = eta_for(p, sigma);
      const double umax = tr.initial.v.cwiseAbs().maxCoeff();
      const double gap0 = tr.initial.x[j1] - tr.initial.x[i];
      double worst = kInf, wt = 0.0, we = 0.0, wb = 0.0;
      std::vector<double> ts, ds;
      for (const auto& st : tr.samples) {
        const double d = st.x[j1] - st.x[i];
        const double bound = std::max(gap0 - opts.closing_speed * st.t * umax, std::min(st.t * sigma, eta));
        const double m = d - (bound * lo_s - alw);
        if (m < worst) {
          worst = m;
          wt = st.t;
          we = d;
          wb = bound;
        }
        if (st.t >= 0.5 * t_last) {
          ts.push_back(st.t);
          ds.push_back(d);
        }
      }
      const std::string what = label_str(s.left) + "-" + label_str(s.right);
      row(s.id, s.theorem, "separation " + what, wt, we, wb, worst);
      const double rate = fitted_decay_exponent(ts, ds);
      row(s.id, s.theorem, "no-decay " + what, t_last, rate, opts.subcritical_decay_floor, rate - opts.subcritical_decay_floor);
    }
  }
  return rep;
}

std::vector<W1Row> self_convergence(const std::vector<RunRef>& runs, const std::vector<double>& times) {
  std::vector<W1Row> out;
  for (double t : times)
    for (std::size_t k = 0; k + 1 < runs.size(); ++k) {
      const auto& a = *runs[k].traj;
      const auto& b = *runs[k + 1].traj;
      const QuantileFn Xa = QuantileFn::from_particles(a.theta, state_at(a, t).x);
      const QuantileFn Xb = QuantileFn::from_particles(b.theta, state_at(b, t).x);
      out.push_back({t, runs[k].N, runs[k + 1].N, wasserstein1(Xa, Xb)});
    }
  return out;
}

}  // namespace scs

#include "stickycs/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "stickycs/error.hpp"
#include "stickycs/rk.hpp"

namespace scs {

using Eigen::Index;
using Eigen::VectorXd;

ParticleState ParticleState::from_arrays(const VectorXd& masses, const VectorXd& x, const VectorXd& v, double t) {
  if (masses.size() != x.size() || x.size() != v.size() || x.size() == 0)
    throw ContractViolation("particle arrays must be nonempty and of equal length");
  ParticleState s;
  s.t = t;
  s.masses = masses;
  s.x = x;
  s.v = v;
  for (Index i = 0; i < x.size(); ++i) {
    if (!(masses[i] > 0.0)) throw ContractViolation("particle masses must be positive");
    if (i > 0 && x[i] < x[i - 1]) throw ContractViolation("particle positions must be nondecreasing");
    if (i > 0 && x[i] == x[i - 1]) s.groups.back().last = i;
    else s.groups.push_back({i, i});
  }
  return s;
}

ParticleState ParticleState::from_discretization(const Discretization& d) { return from_arrays(d.masses, d.x0, d.v0); }

std::size_t ParticleState::group_of(Index i) const {
  auto it = std::upper_bound(groups.begin(), groups.end(), i, [](Index v, const Group& g) { return v < g.first; });
  return static_cast<std::size_t>(it - groups.begin()) - 1;
}

namespace {

/// Group-level flow: y = [X; V] with one entry per stuck group.
struct GroupFlow {
  const Protocol& p;
  VectorXd M;
  double mtot = 0.0;
  double gap_min = 0.0;
  bool singular = false;

  Index size() const { return M.size(); }

  bool accel(const double* X, const double* V, double* A) const {
    const Index G = size();
    std::fill(A, A + G, 0.0);
    switch (p.kind()) {
      case ProtocolKind::Zero: return true;
      case ProtocolKind::Constant: {
        double P = 0.0;
        for (Index g = 0; g < G; ++g) P += M[g] * V[g];
        for (Index g = 0; g < G; ++g) A[g] = p.phi0() * (P - mtot * V[g]);
        return true;
      }
      default: break;
    }
    for (Index g = 0; g < G; ++g) {
      for (Index h = g + 1; h < G; ++h) {
        const double r = std::fabs(X[h] - X[g]);
        if (singular && r < gap_min) return false;
        const double w = p.phi(r) * (V[h] - V[g]);
        A[g] += M[h] * w;
        A[h] -= M[g] * w;
      }
    }
    return true;
  }

  bool operator()(double, const VectorXd& y, VectorXd& dy) const {
    const Index G = size();
    dy.resize(2 * G);
    dy.head(G) = y.tail(G);
    return accel(y.data(), y.data() + G, dy.data() + G);
  }

  VectorXd psi(const VectorXd& y) const {
    const Index G = size();
    VectorXd out = y.tail(G);
    if (p.kind() == ProtocolKind::Zero) return out;
    if (p.kind() == ProtocolKind::Constant) {
      const double mx = M.dot(y.head(G));
      for (Index g = 0; g < G; ++g) out[g] += p.phi0() * (mtot * y[g] - mx);
      return out;
    }
    for (Index g = 0; g < G; ++g)
      for (Index h = g + 1; h < G; ++h) {
        const double f = p.primitive(y[g] - y[h]);
        out[g] += M[h] * f;
        out[h] -= M[g] * f;
      }
    return out;
  }
};

double min_gap(const VectorXd& y, Index G) {
  double m = INFINITY;
  for (Index g = 0; g + 1 < G; ++g) m = std::min(m, y[g + 1] - y[g]);
  return m;
}

class Engine {
 public:
  Engine(const ParticleState& s0, const Protocol& p, const AdvanceOptions& opts, Trajectory& tr)
      : p_(p), opts_(opts), tr_(tr), flow_{p, {}, 0.0, 0.0, p.weakly_singular()} {
    masses_ = s0.masses;
    groups_ = s0.groups;
    t_ = s0.t;
    const double D = s0.x.maxCoeff() - s0.x.minCoeff();
    scale_ = opts.scale > 0.0 ? opts.scale : (D > 0.0 ? D : 1.0);
    merge_eps_ = opts.merge_eps_rel * scale_;
    flow_.gap_min = opts.gap_min_rel * scale_;
    flow_.mtot = masses_.sum();
    tr_.diag.merge_eps = merge_eps_;
    tr_.diag.gap_min = flow_.gap_min;
    tr_.diag.speed0 = s0.v.cwiseAbs().maxCoeff();
    tr_.diag.momentum0 = s0.momentum();
    tr_.diag.psi_scale = tr_.psi_initial.cwiseAbs().maxCoeff();
    vscale_ = std::max(tr_.diag.speed0, tr_.diag.psi_scale);
    if (!(vscale_ > 0.0)) vscale_ = 1.0;
    collapse_initial(s0);
  }

  void run(double t_end) {
    std::vector<double> sched;
    for (double s : opts_.sample_times)
      if (s > t_ && s < t_end) sched.push_back(s);
    sched.push_back(t_end);
    std::sort(sched.begin(), sched.end());
    sched.erase(std::unique(sched.begin(), sched.end()), sched.end());

    merge_close();
    record_sample();
    k_first();
    std::size_t si = 0;
    double h = t_end > t_ ? std::min(t_end - t_, 1e-2 * std::max(1.0, t_end - t_)) : 0.0;
    Dp5 rk, ev;

    while (si < sched.size()) {
      if (G() > 1 && min_gap(y_, G()) <= merge_eps_) {
        merge_close();
        k_first();
        if (!tr_.samples.empty() && tr_.samples.back().t == t_) {
          tr_.samples.pop_back();
          tr_.psi.pop_back();
          record_sample();
        }
        continue;
      }
      if (tr_.diag.accepted + tr_.diag.rejected >= opts_.max_steps)
        throw IntegrationError("substep cap reached at t = " + std::to_string(t_), t_);
      const double target = sched[si];
      double hh = std::min(h, target - t_);
      const bool landing = hh >= target - t_;
      if (landing) hh = target - t_;
      if (hh <= 1e-15 * std::max(1.0, std::fabs(t_)))
        throw IntegrationError("step size underflow at t = " + std::to_string(t_), t_);

      rk.k[0] = k1_;
      if (!rk.step(flow_, t_, y_, hh)) {
        ++tr_.diag.rejected;
        h = 0.5 * hh;
        continue;
      }
      const double err = rk.error_norm(atol_, opts_.rtol);
      if (!(err <= 1.0)) {
        ++tr_.diag.rejected;
        h = hh * (std::isfinite(err) ? std::max(0.2, 0.9 * std::pow(err, -0.2)) : 0.2);
        continue;
      }
      ++tr_.diag.accepted;
      const double fac = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
      rk.prepare_dense();

      double th_lo = 0.0, th_hit = -1.0;
      if (G() > 1) {
        for (double th : {0.25, 0.5, 0.75, 1.0}) {
          if (min_gap(rk.dense(th), G()) <= merge_eps_) {
            th_hit = th;
            break;
          }
          th_lo = th;
        }
      }
      if (th_hit < 0.0) {
        t_ = landing ? target : t_ + hh;
        y_ = rk.y1;
        k1_ = rk.k[6];
        monitor();
        const double hn = hh * fac;
        h = landing && h > hh ? std::max(h, hn) : hn;
        if (landing) {
          record_sample();
          ++si;
        }
        continue;
      }

      const double ttol = 1e-13 * std::max(1.0, std::fabs(t_));
      while ((th_hit - th_lo) * hh > ttol) {
        const double mid = 0.5 * (th_lo + th_hit);
        if (min_gap(rk.dense(mid), G()) <= merge_eps_) th_hit = mid;
        else th_lo = mid;
      }
      const VectorXd yd = rk.dense(th_hit);
      VectorXd ye = yd;
      ev.k[0] = k1_;
      if (ev.step(flow_, t_, y_, th_hit * hh)) ye = ev.y1;
      std::vector<char> link(G() - 1, 0);
      for (Index g = 0; g + 1 < G(); ++g)
        link[g] = (yd[g + 1] - yd[g] <= merge_eps_) || (ye[g + 1] - ye[g] <= merge_eps_);
      const bool at_target = landing && th_hit == 1.0;
      t_ = at_target ? target : t_ + th_hit * hh;
      y_ = ye;
      monitor(false);
      merge(link);
      k_first();
      h = std::max(hh * th_hit, 1e-6 * hh);
      if (at_target) {
        record_sample();
        ++si;
      }
    }
  }

 private:
  Index G() const { return static_cast<Index>(groups_.size()); }

  void k_first() {
    k1_.resize(2 * G());
    flow_(t_, y_, k1_);
  }

  void sync_flow() {
    const Index G = this->G();
    flow_.M.resize(G);
    for (Index g = 0; g < G; ++g) flow_.M[g] = masses_.segment(groups_[g].first, groups_[g].size()).sum();
    atol_.resize(2 * G);
    atol_.head(G).setConstant(opts_.atol_rel * scale_);
    atol_.tail(G).setConstant(opts_.atol_rel * vscale_);
    psi_ref_ = flow_.psi(y_);
  }

  // Groups handed in with unequal members stick at t0 as a logged event.
  void collapse_initial(const ParticleState& s0) {
    const Index G = static_cast<Index>(groups_.size());
    y_.resize(2 * G);
    for (Index g = 0; g < G; ++g) {
      const auto& gr = groups_[g];
      const auto m = s0.masses.segment(gr.first, gr.size());
      const double M = m.sum();
      const double X = m.dot(s0.x.segment(gr.first, gr.size())) / M;
      const double V = m.dot(s0.v.segment(gr.first, gr.size())) / M;
      y_[g] = gr.size() == 1 ? s0.x[gr.first] : X;
      y_[G + g] = gr.size() == 1 ? s0.v[gr.first] : V;
      if (gr.size() == 1) continue;
      bool uniform = true;
      for (Index i = gr.first; i <= gr.last; ++i) uniform = uniform && s0.x[i] == s0.x[gr.first] && s0.v[i] == s0.v[gr.first];
      if (uniform) {
        y_[g] = s0.x[gr.first];
        y_[G + g] = s0.v[gr.first];
        continue;
      }
      CollisionEvent e;
      e.t = t_;
      e.first = gr.first;
      e.last = gr.last;
      e.pre_v = s0.v.segment(gr.first, gr.size());
      e.pre_psi = tr_.psi_initial.segment(gr.first, gr.size());
      e.post_v = V;
      e.x = X;
      pending_.push_back(static_cast<std::size_t>(g));
      tr_.events.push_back(std::move(e));
    }
    sync_flow();
    if (!pending_.empty()) {
      const VectorXd ps = flow_.psi(y_);
      for (std::size_t k = 0; k < pending_.size(); ++k)
        tr_.events[tr_.events.size() - pending_.size() + k].post_psi = ps[static_cast<Index>(pending_[k])];
      tr_.diag.events += static_cast<long>(pending_.size());
      tr_.event_states.push_back(expand());
      pending_.clear();
    }
  }

  void merge_close() {
    if (G() < 2) return;
    std::vector<char> link(G() - 1, 0);
    bool any = false;
    for (Index g = 0; g + 1 < G(); ++g) any |= (link[g] = y_[g + 1] - y_[g] <= merge_eps_);
    if (any) merge(link);
  }

  // Merge every maximal chain of linked groups; closes chains transitively when
  // a merged barycenter lands within merge_eps of a neighbour.
  void merge(std::vector<char> link) {
    const Index G = this->G();
    const auto& M = flow_.M;
    std::vector<double> cx, cv;
    std::vector<Index> c0;
    for (;;) {
      cx.clear();
      cv.clear();
      c0.clear();
      for (Index g = 0; g < G;) {
        Index e = g;
        while (e + 1 < G && link[e]) ++e;
        double mm = 0.0, mx = 0.0, mv = 0.0;
        for (Index k = g; k <= e; ++k) {
          mm += M[k];
          mx += M[k] * y_[k];
          mv += M[k] * y_[G + k];
        }
        c0.push_back(g);
        cx.push_back(e == g ? y_[g] : mx / mm);
        cv.push_back(e == g ? y_[G + g] : mv / mm);
        g = e + 1;
      }
      bool changed = false;
      for (std::size_t c = 0; c + 1 < c0.size(); ++c)
        if (cx[c + 1] - cx[c] <= merge_eps_) {
          link[c0[c + 1] - 1] = 1;
          changed = true;
        }
      if (!changed) break;
    }

    const VectorXd pre_psi = flow_.psi(y_);
    std::vector<Group> ng;
    std::vector<std::size_t> made;
    const std::size_t C = c0.size();
    VectorXd ny(2 * static_cast<Index>(C));
    for (std::size_t c = 0; c < C; ++c) {
      const Index g = c0[c];
      const Index e = c + 1 < C ? c0[c + 1] - 1 : G - 1;
      ng.push_back({groups_[g].first, groups_[e].last});
      ny[static_cast<Index>(c)] = cx[c];
      ny[static_cast<Index>(C + c)] = cv[c];
      if (e == g) continue;
      CollisionEvent ev;
      ev.t = t_;
      ev.first = groups_[g].first;
      ev.last = groups_[e].last;
      const Index n = ev.last - ev.first + 1;
      ev.pre_v.resize(n);
      ev.pre_psi.resize(n);
      for (Index k = g; k <= e; ++k)
        for (Index i = groups_[k].first; i <= groups_[k].last; ++i) {
          ev.pre_v[i - ev.first] = y_[G + k];
          ev.pre_psi[i - ev.first] = pre_psi[k];
        }
      ev.post_v = cv[c];
      ev.x = cx[c];
      made.push_back(c);
      tr_.events.push_back(std::move(ev));
    }
    groups_ = std::move(ng);
    y_ = std::move(ny);
    sync_flow();
    for (std::size_t k = 0; k < made.size(); ++k)
      tr_.events[tr_.events.size() - made.size() + k].post_psi = psi_ref_[static_cast<Index>(made[k])];
    tr_.diag.events += static_cast<long>(made.size());
    tr_.event_states.push_back(expand());
    check_order();
  }

  void check_order() {
    for (Index g = 0; g + 1 < G(); ++g)
      if (!(y_[g + 1] > y_[g])) ++tr_.diag.ordering_violations;
  }

  void monitor(bool order = true) {
    if (order) check_order();
    if (!opts_.monitor) return;
    const Index G = this->G();
    auto& d = tr_.diag;
    const VectorXd ps = flow_.psi(y_);
    d.max_psi_drift = std::max(d.max_psi_drift, (ps - psi_ref_).cwiseAbs().maxCoeff());
    d.max_momentum_drift = std::max(d.max_momentum_drift, std::fabs(flow_.M.dot(y_.tail(G)) - d.momentum0));
    d.max_speed_excess = std::max(d.max_speed_excess, y_.tail(G).cwiseAbs().maxCoeff() - d.speed0);
  }

  ParticleState expand() const {
    ParticleState s;
    s.t = t_;
    s.masses = masses_;
    s.x.resize(masses_.size());
    s.v.resize(masses_.size());
    s.groups = groups_;
    const Index G = this->G();
    for (Index g = 0; g < G; ++g) {
      s.x.segment(groups_[g].first, groups_[g].size()).setConstant(y_[g]);
      s.v.segment(groups_[g].first, groups_[g].size()).setConstant(y_[G + g]);
    }
    return s;
  }

  void record_sample() {
    tr_.samples.push_back(expand());
    const VectorXd ps = flow_.psi(y_);
    VectorXd full(masses_.size());
    for (Index g = 0; g < G(); ++g) full.segment(groups_[g].first, groups_[g].size()).setConstant(ps[g]);
    tr_.psi.push_back(std::move(full));
    if (opts_.monitor) {
      auto& d = tr_.diag;
      d.max_momentum_drift = std::max(d.max_momentum_drift, std::fabs(flow_.M.dot(y_.tail(G())) - d.momentum0));
      d.max_speed_excess = std::max(d.max_speed_excess, y_.tail(G()).cwiseAbs().maxCoeff() - d.speed0);
    }
  }

  const Protocol& p_;
  AdvanceOptions opts_;
  Trajectory& tr_;
  GroupFlow flow_;
  VectorXd masses_;
  std::vector<Group> groups_;
  double t_ = 0.0, scale_ = 1.0, vscale_ = 1.0, merge_eps_ = 0.0;
  VectorXd y_, k1_, atol_, psi_ref_;
  std::vector<std::size_t> pending_;
};

}  // namespace

VectorXd accelerations(const ParticleState& s, const Protocol& p, double gap_min) {
  const Index G = static_cast<Index>(s.groups.size());
  GroupFlow f{p, VectorXd(G), s.masses.sum(), gap_min, p.weakly_singular()};
  VectorXd X(G), V(G), A(G);
  for (Index g = 0; g < G; ++g) {
    const auto& gr = s.groups[g];
    f.M[g] = s.masses.segment(gr.first, gr.size()).sum();
    X[g] = s.x[gr.first];
    V[g] = s.v[gr.first];
  }
  if (!f.accel(X.data(), V.data(), A.data()))
    throw ContractViolation("accelerations: inter-group gap below gap_min for a singular kernel");
  VectorXd a(s.size());
  for (Index g = 0; g < G; ++g) a.segment(s.groups[g].first, s.groups[g].size()).setConstant(A[g]);
  return a;
}

VectorXd compute_psi(const ParticleState& s, const Protocol& p) {
  VectorXd out = s.v;
  if (p.kind() == ProtocolKind::Zero) return out;
  const Index G = static_cast<Index>(s.groups.size());
  for (Index i = 0; i < s.size(); ++i) {
    double acc = 0.0;
    for (Index g = 0; g < G; ++g) {
      const auto& gr = s.groups[g];
      for (Index j = gr.first; j <= gr.last; ++j)
        if (s.x[j] != s.x[i]) acc += s.masses[j] * p.primitive(s.x[i] - s.x[j]);
    }
    out[i] += acc;
  }
  return out;
}

Trajectory advance(const ParticleState& s, const Protocol& p, double t_end, const AdvanceOptions& opts) {
  if (!(t_end >= s.t)) throw ContractViolation("advance: t_end precedes the state time");
  if (s.groups.empty() || s.groups.front().first != 0 || s.groups.back().last != s.size() - 1)
    throw ContractViolation("advance: groups must cover all particles");
  for (Index i = 1; i < s.size(); ++i)
    if (s.x[i] < s.x[i - 1]) throw ContractViolation("advance: positions must be nondecreasing");
  Trajectory tr;
  tr.protocol = p;
  tr.options = opts;
  tr.initial = s;
  tr.theta.resize(s.size() + 1);
  tr.theta[0] = -0.5;
  for (Index i = 0; i < s.size(); ++i) tr.theta[i + 1] = tr.theta[i] + s.masses[i];
  tr.psi_initial = compute_psi(s, p);
  Engine eng(s, p, opts, tr);
  eng.run(t_end);
  return tr;
}

Trajectory simulate(const Discretization& d, const Protocol& p, double t_end, const AdvanceOptions& opts) {
  Trajectory tr = advance(ParticleState::from_discretization(d), p, t_end, opts);
  tr.theta = d.theta;
  return tr;
}

ParticleState state_at(const Trajectory& traj, double t) {
  const ParticleState* best = nullptr;
  for (const auto& s : traj.samples)
    if (s.t <= t && (!best || s.t >= best->t)) best = &s;
  for (const auto& s : traj.event_states)
    if (s.t <= t && (!best || s.t >= best->t)) best = &s;
  if (!best) throw ContractViolation("state_at: time precedes the trajectory");
  if (best->t == t) return *best;
  if (!traj.samples.empty() && t > traj.samples.back().t) throw ContractViolation("state_at: time beyond the trajectory");
  AdvanceOptions o = traj.options;
  o.sample_times.clear();
  o.monitor = false;
  o.scale = traj.diag.merge_eps / o.merge_eps_rel;
  return advance(*best, traj.protocol, t, o).samples.back();
}

double eval_xn(const Trajectory& traj, double m, double t) {
  const auto& th = traj.theta;
  if (!(m > th[0] && m <= th[th.size() - 1])) throw ContractViolation("eval_xn: label out of range");
  const Index i = std::lower_bound(th.data() + 1, th.data() + th.size(), m) - (th.data() + 1);
  return state_at(traj, t).x[i];
}

}  // namespace scs

#include "stickycs/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <sstream>

#include "stickycs/csv.hpp"
#include "stickycs/error.hpp"

namespace scs {

Classification classify(const Scenario& s) {
  Classification c{build_model(s.initial, s.protocol), {}, {}, {}, s.initial.diameter()};
  c.env = lower_convex_envelope(c.model.flux);
  c.regions = classify_regions(c.model.flux, c.env, s.regions);
  c.a4 = check_a4(c.model.flux, c.regions);
  return c;
}

PredictOutcome run_predict(const Scenario& s, const Classification& c) {
  PredictOutcome out;
  try {
    out.prediction = predict(c.regions, c.model.x0, c.model.flux, c.env, s.protocol, c.D0, s.predict);
  } catch (const AssumptionError& e) {
    out.refusal = e.what();
  }
  return out;
}

std::vector<double> snap_labels(const Scenario& s, const Classification& c, const Prediction* pred) {
  std::vector<double> out = s.snap;
  auto add = [&out](double m) {
    if (m > -0.5 && m < 0.5) out.push_back(m);
  };
  for (double m : c.regions.endpoints()) add(m);
  for (const auto& [l, r] : atom_label_blocks(c.model.cdf)) {
    add(l);
    add(r);
  }
  if (pred)
    for (double m : pred->labels()) add(m);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<RunResult> run_simulations(const Scenario& s, const Classification& c, const Prediction* pred) {
  const auto snap = snap_labels(s, c, pred);
  AdvanceOptions opts = s.advance;
  opts.sample_times = s.sample_times;
  std::vector<std::future<RunResult>> jobs;
  for (int N : s.N)
    jobs.push_back(std::async(std::launch::async, [&, N] {
      RunResult r;
      r.N = N;
      r.disc = discretize(c.model, N, snap);
      require_resolved(r.disc, c.regions);
      r.traj = simulate(r.disc, s.protocol, s.horizon, opts);
      r.stickiness = stickiness_violations(r.traj);
      return r;
    }));
  std::vector<RunResult> out;
  for (auto& j : jobs) out.push_back(j.get());
  return out;
}

std::vector<RunRef> run_refs(const std::vector<RunResult>& runs) {
  std::vector<RunRef> refs;
  for (const auto& r : runs) refs.push_back({r.N, &r.traj});
  return refs;
}

std::vector<VerifyRow> conservation_rows(const std::vector<RunResult>& runs, double tol) {
  std::vector<VerifyRow> rows;
  for (const auto& r : runs) {
    const auto& d = r.traj.diag;
    const double t = r.traj.samples.back().t;
    auto add = [&](const char* check, double emp, double bound) {
      rows.push_back({"conservation", "particle-invariants", check, r.N, t, emp, bound, bound - emp, emp <= bound});
    };
    add("momentum-drift", d.max_momentum_drift, tol);
    if (r.traj.protocol.bounded()) add("psi-drift", d.max_psi_drift, 1e-8 * std::max(1.0, d.psi_scale));
    add("max-principle-excess", d.max_speed_excess, tol);
    add("ordering-violations", static_cast<double>(d.ordering_violations), 0.0);
    add("stickiness-violations", static_cast<double>(r.stickiness), 0.0);
  }
  return rows;
}

std::string interval_notation(const LabelInterval& L) {
  if (L.point) return "{" + csv_number(L.lo) + "}";
  return "(" + csv_number(L.lo) + "," + csv_number(L.hi) + (L.open ? ")" : "]");
}

void write_regions(std::ostream& os, const Classification& c) {
  CsvWriter w(os);
  w.header({"region", "lo", "hi", "interval", "eps_contact", "eps_slope", "a4_ok"});
  struct Item {
    const char* name;
    const LabelInterval* L;
  };
  std::vector<Item> items;
  for (const auto& I : c.regions.plus) items.push_back({"sigma_plus", &I});
  for (const auto& I : c.regions.zero) items.push_back({"sigma_zero", &I});
  for (const auto& I : c.regions.minus) items.push_back({"sigma_minus", &I});
  std::stable_sort(items.begin(), items.end(), [](const Item& a, const Item& b) { return a.L->lo < b.L->lo; });
  for (const auto& it : items) {
    w << it.name << it.L->lo << it.L->hi << interval_notation(*it.L) << c.regions.eps_contact << c.regions.eps_slope
      << c.a4.ok;
    w.end();
  }
  for (double m : c.a4.witnesses) {
    w << "a4_witness" << m << m << interval_notation(LabelInterval::single(m)) << c.regions.eps_contact
      << c.regions.eps_slope << false;
    w.end();
  }
}

void write_prediction(std::ostream& os, const PredictOutcome& p) {
  CsvWriter w(os);
  w.header({"id", "theorem", "kind", "verdict", "lo", "hi", "labels", "time_bound", "rate", "D0", "c0", "phi_sup",
            "seed", "flags"});
  if (!p.prediction) {
    w << "refusal" << "local-convexity" << "refusal" << "Refused" << 0.0 << 0.0 << "" << 0.0 << 0.0 << 0.0 << 0.0
      << 0.0 << 0 << p.refusal;
    w.end();
    return;
  }
  const auto& P = *p.prediction;
  std::string flags = std::string(P.bounded ? "bounded" : "unbounded") + (P.heavy_tailed ? ";heavy_tailed" : "") +
                      (P.weakly_singular ? ";weakly_singular" : "");
  for (const auto& r : P.records) {
    std::string lab = interval_notation(r.labels);
    if (r.closed) lab = "[" + csv_number(r.labels.lo) + "," + csv_number(r.labels.hi) + "]";
    w << r.id << r.theorem << "verdict" << to_string(r.verdict) << r.labels.lo << r.labels.hi << lab << r.time_bound
      << r.rate << r.D0 << 0.0 << 0.0 << static_cast<unsigned long long>(P.seed) << flags;
    w.end();
  }
  for (const auto& s : P.separations) {
    w << s.id << s.theorem << "separation"
      << (s.form == SeparationForm::BoundedExp ? "c0*exp(-phi_sup*t)" : "max(gap0-closing_speed*t*umax,min(t*sigma,eta))")
      << s.left.lo << s.right.hi << interval_notation(s.left) + " | " + interval_notation(s.right)
      << std::numeric_limits<double>::infinity() << 0.0 << P.D0 << s.c0 << s.phi_sup
      << static_cast<unsigned long long>(P.seed) << flags;
    w.end();
  }
}

void write_trajectory(std::ostream& os, const RunResult& r) {
  CsvWriter w(os);
  w.header({"t", "i", "theta_lo", "theta_hi", "mass", "x", "v", "psi", "group_id"});
  const auto& tr = r.traj;
  for (std::size_t k = 0; k < tr.samples.size(); ++k) {
    const auto& s = tr.samples[k];
    for (Eigen::Index i = 0; i < s.size(); ++i) {
      w << s.t << static_cast<long>(i) << tr.theta[i] << tr.theta[i + 1] << s.masses[i] << s.x[i] << s.v[i]
        << tr.psi[k][i] << static_cast<long>(s.group_of(i));
      w.end();
    }
  }
}

void write_events(std::ostream& os, const RunResult& r) {
  CsvWriter w(os);
  w.header({"t", "first", "last", "labels", "x", "post_v", "post_psi", "pre_v_min", "pre_v_max"});
  const auto& tr = r.traj;
  for (const auto& e : tr.events) {
    const LabelInterval L{tr.theta[e.first], tr.theta[e.last + 1]};
    w << e.t << static_cast<long>(e.first) << static_cast<long>(e.last) << interval_notation(L) << e.x << e.post_v
      << e.post_psi << e.pre_v.minCoeff() << e.pre_v.maxCoeff();
    w.end();
  }
}

void write_verdicts(std::ostream& os, const VerifyReport& rep) {
  CsvWriter w(os);
  w.header({"id", "theorem", "check", "N", "t", "empirical", "bound", "margin", "result"});
  for (const auto& r : rep.rows) {
    w << r.id << r.theorem << r.check << r.N << r.t << r.empirical << r.bound << r.margin << (r.pass ? "PASS" : "FAIL");
    w.end();
  }
}

void write_wasserstein(std::ostream& os, const std::vector<W1Row>& rows) {
  CsvWriter w(os);
  w.header({"t", "N", "N2", "w1"});
  for (const auto& r : rows) {
    w << r.t << r.N << r.N2 << r.w1;
    w.end();
  }
}

void write_diagnostics(std::ostream& os, const std::vector<RunResult>& runs) {
  CsvWriter w(os);
  w.header({"N", "accepted", "rejected", "events", "merge_eps", "gap_min", "max_psi_drift", "max_momentum_drift",
            "max_speed_excess", "ordering_violations", "stickiness_violations"});
  for (const auto& r : runs) {
    const auto& d = r.traj.diag;
    w << r.N << d.accepted << d.rejected << d.events << d.merge_eps << d.gap_min << d.max_psi_drift
      << d.max_momentum_drift << d.max_speed_excess << d.ordering_violations << r.stickiness;
    w.end();
  }
}

}  // namespace scs

#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "stickycs/analysis.hpp"
#include "stickycs/scenario.hpp"

namespace scs {

struct Classification {
  InitialModel model;
  Envelope env;
  RegionDecomposition regions;
  A4Report a4;
  double D0 = 0.0;
};

Classification classify(const Scenario& s);

/// Prediction, or the refusal message when the local convexity hypothesis fails.
struct PredictOutcome {
  std::optional<Prediction> prediction;
  std::string refusal;
};

PredictOutcome run_predict(const Scenario& s, const Classification& c);

struct RunResult {
  int N = 0;
  Discretization disc;
  Trajectory traj;
  long stickiness = 0;
};

/// Labels every discretization must contain exactly.
std::vector<double> snap_labels(const Scenario& s, const Classification& c, const Prediction* pred);

/// One simulation per N of the schedule, run concurrently, returned in schedule order.
std::vector<RunResult> run_simulations(const Scenario& s, const Classification& c, const Prediction* pred);

std::vector<RunRef> run_refs(const std::vector<RunResult>& runs);

/// Conservation, ordering, max-principle and stickiness rows for each run.
std::vector<VerifyRow> conservation_rows(const std::vector<RunResult>& runs, double tol = 1e-9);

std::string interval_notation(const LabelInterval& L);

void write_regions(std::ostream& os, const Classification& c);
void write_prediction(std::ostream& os, const PredictOutcome& p);
void write_trajectory(std::ostream& os, const RunResult& r);
void write_events(std::ostream& os, const RunResult& r);
void write_verdicts(std::ostream& os, const VerifyReport& rep);
void write_wasserstein(std::ostream& os, const std::vector<W1Row>& rows);
void write_diagnostics(std::ostream& os, const std::vector<RunResult>& runs);

}  // namespace scs

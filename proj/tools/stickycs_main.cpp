#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "stickycs/error.hpp"
#include "stickycs/pipeline.hpp"

namespace fs = std::filesystem;

namespace {

enum Exit { Ok = 0, VerifyFailed = 1, BadConfig = 2, Refused = 3, RunFailed = 4 };

template <class F>
void emit(const fs::path& out, const std::string& name, F&& write) {
  std::ofstream os(out / name, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + (out / name).string());
  write(os);
}

int run(const std::string& cmd, const std::string& config, const fs::path& out, int n_override, const std::string& seed) {
  scs::Scenario s = scs::load_scenario(config);
  if (n_override > 0) s.N = {n_override};
  if (!seed.empty()) {
    try {
      std::size_t pos = 0;
      s.predict.seed = std::stoull(seed, &pos);
      if (pos != seed.size()) throw std::invalid_argument(seed);
    } catch (const std::exception&) {
      throw scs::ConfigError("--seed", "expected an unsigned 64-bit integer");
    }
  }
  fs::create_directories(out);
  const bool all = cmd == "all";

  const scs::Classification cls = scs::classify(s);
  if (cmd == "classify" || all) emit(out, "regions.csv", [&](std::ostream& os) { scs::write_regions(os, cls); });
  if (cmd == "classify") return Ok;

  const scs::PredictOutcome pred = scs::run_predict(s, cls);
  const bool needs_pred = cmd == "predict" || cmd == "verify" || all;
  if (needs_pred) emit(out, "prediction.csv", [&](std::ostream& os) { scs::write_prediction(os, pred); });
  if (needs_pred && !pred.prediction) {
    std::cerr << "prediction refused: " << pred.refusal << "\n";
    return Refused;
  }
  if (cmd == "predict") return Ok;

  const auto runs = scs::run_simulations(s, cls, pred.prediction ? &*pred.prediction : nullptr);
  if (cmd == "simulate" || all) {
    for (const auto& r : runs) {
      emit(out, "trajectory_N" + std::to_string(r.N) + ".csv", [&](std::ostream& os) { scs::write_trajectory(os, r); });
      emit(out, "events_N" + std::to_string(r.N) + ".csv", [&](std::ostream& os) { scs::write_events(os, r); });
    }
    emit(out, "diagnostics.csv", [&](std::ostream& os) { scs::write_diagnostics(os, runs); });
  }

  int status = Ok;
  const auto refs = scs::run_refs(runs);
  if (cmd == "verify" || all) {
    scs::VerifyReport rep = scs::verify(*pred.prediction, cls.model, cls.env, refs, s.verify);
    for (auto& r : scs::conservation_rows(runs)) rep.rows.push_back(std::move(r));
    emit(out, "verdicts.csv", [&](std::ostream& os) { scs::write_verdicts(os, rep); });
    std::cout << s.name << ": " << rep.rows.size() - rep.failures() << "/" << rep.rows.size() << " checks PASS\n";
    if (!rep.all_pass()) status = VerifyFailed;
  }
  if (cmd == "converge" || all) {
    const auto w1 = scs::self_convergence(refs, s.converge_times);
    emit(out, "wasserstein.csv", [&](std::ostream& os) { scs::write_wasserstein(os, w1); });
  }
  return status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sticky-particle Cucker-Smale cluster predictor and simulator"};
  std::string cmd, config, out, seed;
  int n = 0;
  app.add_option("command", cmd, "classify | predict | simulate | verify | converge | all")
      ->required()
      ->check(CLI::IsMember({"classify", "predict", "simulate", "verify", "converge", "all"}));
  app.add_option("--config", config, "scenario YAML file")->required();
  app.add_option("--out", out, "output directory")->required();
  app.add_option("--n", n, "run a single particle count instead of the N schedule")->check(CLI::PositiveNumber);
  app.add_option("--seed", seed, "seed for randomized label pairs");
  CLI11_PARSE(app, argc, argv);
  try {
    return run(cmd, config, out, n, seed);
  } catch (const scs::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return BadConfig;
  } catch (const scs::RefineError& e) {
    std::cerr << "grid too coarse: " << e.what() << "\n";
    return RunFailed;
  } catch (const scs::IntegrationError& e) {
    std::cerr << "integration failed at t=" << e.time() << ": " << e.what() << "\n";
    return RunFailed;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return RunFailed;
  }
}

#include "stickycs/scenario.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "stickycs/error.hpp"

namespace scs {

namespace {

std::string where(const std::string& field, const YAML::Node& n) {
  const auto mk = n.Mark();
  if (mk.line < 0) return field;
  return field + " (line " + std::to_string(mk.line + 1) + ")";
}

[[noreturn]] void fail(const std::string& field, const YAML::Node& n, const std::string& what) {
  throw ConfigError(where(field, n), what);
}

void allow_keys(const YAML::Node& n, const std::string& field, std::initializer_list<const char*> keys) {
  if (!n.IsMap()) fail(field, n, "expected a mapping");
  const std::set<std::string> ok(keys.begin(), keys.end());
  for (const auto& kv : n) {
    const auto k = kv.first.as<std::string>();
    if (!ok.count(k)) fail(field.empty() ? k : field + "." + k, kv.first, "unknown key");
  }
}

double num(const YAML::Node& n, const std::string& field) {
  if (!n || !n.IsScalar()) fail(field, n, "expected a number");
  const std::string s = n.Scalar();
  std::size_t pos = 0;
  double v;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    fail(field, n, "not a number: '" + s + "'");
  }
  if (pos != s.size() || !std::isfinite(v)) fail(field, n, "not a finite number: '" + s + "'");
  return v;
}

double num_or(const YAML::Node& parent, const char* key, const std::string& field, double dflt) {
  const YAML::Node n = parent[key];
  return n ? num(n, field + "." + key) : dflt;
}

double req(const YAML::Node& parent, const char* key, const std::string& field) {
  const YAML::Node n = parent[key];
  if (!n) fail(field + "." + key, parent, "missing");
  return num(n, field + "." + key);
}

std::vector<double> num_list(const YAML::Node& n, const std::string& field) {
  if (!n.IsSequence()) fail(field, n, "expected a list");
  std::vector<double> out;
  for (std::size_t i = 0; i < n.size(); ++i) out.push_back(num(n[i], field + "[" + std::to_string(i) + "]"));
  return out;
}

Protocol parse_protocol(const YAML::Node& n) {
  const std::string f = "protocol";
  allow_keys(n, f, {"kind", "phi0", "K", "gamma", "c", "beta", "R", "tail_gamma"});
  if (!n["kind"]) fail(f + ".kind", n, "missing");
  const auto kind = n["kind"].as<std::string>();
  if (kind == "zero") return Protocol::zero();
  if (kind == "constant") return Protocol::constant(req(n, "phi0", f));
  if (kind == "smooth_bounded") return Protocol::smooth_bounded(req(n, "K", f), req(n, "gamma", f));
  if (kind == "weakly_singular") {
    WeakSingularity w;
    w.c = num_or(n, "c", f, w.c);
    w.beta = num_or(n, "beta", f, w.beta);
    w.R = num_or(n, "R", f, w.R);
    w.tail_gamma = num_or(n, "tail_gamma", f, w.tail_gamma);
    return Protocol::weakly_singular(w);
  }
  fail(f + ".kind", n["kind"], "unknown kind '" + kind + "' (zero, constant, smooth_bounded, weakly_singular)");
}

InitialData parse_initial(const YAML::Node& n) {
  const std::string f = "initial";
  allow_keys(n, f, {"mode", "atoms", "blocks"});
  InitialData d;
  if (n["mode"]) {
    const auto m = n["mode"].as<std::string>();
    if (m == "velocity") d.mode = ValueMode::Velocity;
    else if (m == "psi") d.mode = ValueMode::Psi;
    else fail(f + ".mode", n["mode"], "expected 'velocity' or 'psi'");
  }
  if (const auto as = n["atoms"]) {
    if (!as.IsSequence()) fail(f + ".atoms", as, "expected a list");
    for (std::size_t i = 0; i < as.size(); ++i) {
      const std::string fi = f + ".atoms[" + std::to_string(i) + "]";
      allow_keys(as[i], fi, {"mass", "x", "value"});
      d.atoms.push_back({req(as[i], "mass", fi), req(as[i], "x", fi), req(as[i], "value", fi)});
    }
  }
  if (const auto bs = n["blocks"]) {
    if (!bs.IsSequence()) fail(f + ".blocks", bs, "expected a list");
    for (std::size_t i = 0; i < bs.size(); ++i) {
      const std::string fi = f + ".blocks[" + std::to_string(i) + "]";
      allow_keys(bs[i], fi, {"mass", "a", "b", "value"});
      UniformBlock b;
      b.mass = req(bs[i], "mass", fi);
      b.a = req(bs[i], "a", fi);
      b.b = req(bs[i], "b", fi);
      const auto vs = bs[i]["value"];
      if (!vs) fail(fi + ".value", bs[i], "missing");
      if (vs.IsScalar()) {
        const double c = num(vs, fi + ".value");
        b.value.push_back({b.a, b.b, c, c});
      } else {
        if (!vs.IsSequence()) fail(fi + ".value", vs, "expected a number or a list of pieces");
        for (std::size_t j = 0; j < vs.size(); ++j) {
          const std::string fj = fi + ".value[" + std::to_string(j) + "]";
          allow_keys(vs[j], fj, {"a", "b", "va", "vb"});
          const double va = req(vs[j], "va", fj);
          b.value.push_back({req(vs[j], "a", fj), req(vs[j], "b", fj), va, num_or(vs[j], "vb", fj, va)});
        }
      }
      d.blocks.push_back(std::move(b));
    }
  }
  try {
    d.validate();
  } catch (const ConfigError& e) {
    throw ConfigError("initial." + e.field(), std::string(e.what()).substr(e.field().size() + 2));
  }
  return d;
}

Scenario from_node(const YAML::Node& root) {
  allow_keys(root, "", {"name", "protocol", "initial", "N", "snap", "horizon", "samples", "sample_times",
                        "converge_times", "tolerances", "K", "seed", "subcritical_pairs", "labels_per_gap"});
  Scenario s;
  if (!root["name"]) fail("name", root, "missing");
  s.name = root["name"].as<std::string>();
  if (!root["protocol"]) fail("protocol", root, "missing");
  try {
    s.protocol = parse_protocol(root["protocol"]);
  } catch (const ConfigError& e) {
    if (e.field().rfind("protocol", 0) == 0 && e.field().find("line") != std::string::npos) throw;
    throw ConfigError(where(e.field(), root["protocol"]), std::string(e.what()).substr(e.field().size() + 2));
  }
  if (!root["initial"]) fail("initial", root, "missing");
  s.initial = parse_initial(root["initial"]);

  if (!root["N"]) fail("N", root, "missing");
  for (double v : num_list(root["N"], "N")) {
    if (v < 1 || v != std::floor(v) || v > 1e7) fail("N", root["N"], "entries must be positive integers");
    if (!s.N.empty() && v <= s.N.back()) fail("N", root["N"], "schedule must be strictly increasing");
    s.N.push_back(static_cast<int>(v));
  }
  if (s.N.empty()) fail("N", root["N"], "schedule is empty");

  if (root["snap"]) s.snap = num_list(root["snap"], "snap");
  for (double m : s.snap)
    if (!(m > -0.5 && m < 0.5)) fail("snap", root["snap"], "labels must lie in (-1/2, 1/2)");

  if (!root["horizon"]) fail("horizon", root, "missing");
  s.horizon = num(root["horizon"], "horizon");
  if (!(s.horizon > 0.0)) fail("horizon", root["horizon"], "must be > 0");

  if (root["sample_times"] && root["samples"]) fail("samples", root["samples"], "give either samples or sample_times");
  if (root["sample_times"]) {
    s.sample_times = num_list(root["sample_times"], "sample_times");
    for (std::size_t i = 0; i < s.sample_times.size(); ++i) {
      const double t = s.sample_times[i];
      if (t < 0 || t > s.horizon || (i && t <= s.sample_times[i - 1]))
        fail("sample_times", root["sample_times"], "must be increasing within [0, horizon]");
    }
  } else {
    const double k = root["samples"] ? num(root["samples"], "samples") : 41;
    if (k < 2 || k != std::floor(k)) fail("samples", root["samples"], "must be an integer >= 2");
    const int n = static_cast<int>(k);
    for (int i = 0; i < n; ++i) s.sample_times.push_back(s.horizon * i / (n - 1));
  }
  if (root["converge_times"]) {
    s.converge_times = num_list(root["converge_times"], "converge_times");
    for (double t : s.converge_times)
      if (t < 0 || t > s.horizon) fail("converge_times", root["converge_times"], "must lie in [0, horizon]");
  } else {
    s.converge_times = {s.horizon};
  }

  if (const auto t = root["tolerances"]) {
    const std::string f = "tolerances";
    allow_keys(t, f, {"rtol", "atol_rel", "merge_eps_rel", "gap_min_rel", "slack", "contact_rel", "slope_rel",
                      "heavy_tail_rate_slack", "subcritical_decay_floor", "closing_speed"});
    s.advance.rtol = num_or(t, "rtol", f, s.advance.rtol);
    s.advance.atol_rel = num_or(t, "atol_rel", f, s.advance.atol_rel);
    s.advance.merge_eps_rel = num_or(t, "merge_eps_rel", f, s.advance.merge_eps_rel);
    s.advance.gap_min_rel = num_or(t, "gap_min_rel", f, s.advance.gap_min_rel);
    s.verify.slack = num_or(t, "slack", f, s.verify.slack);
    s.verify.heavy_tail_rate_slack = num_or(t, "heavy_tail_rate_slack", f, s.verify.heavy_tail_rate_slack);
    s.verify.subcritical_decay_floor = num_or(t, "subcritical_decay_floor", f, s.verify.subcritical_decay_floor);
    s.verify.closing_speed = num_or(t, "closing_speed", f, s.verify.closing_speed);
    s.regions.contact_rel = num_or(t, "contact_rel", f, s.regions.contact_rel);
    s.regions.slope_rel = num_or(t, "slope_rel", f, s.regions.slope_rel);
    if (!(s.advance.rtol > 0) || !(s.advance.atol_rel > 0) || !(s.advance.merge_eps_rel > 0) ||
        !(s.advance.gap_min_rel > 0) || s.verify.slack < 0)
      fail(f, t, "tolerances must be positive");
  }
  if (const auto k = root["K"]) {
    if (!k.IsSequence()) fail("K", k, "expected a list of [lo, hi] pairs, one per supercritical component");
    for (std::size_t i = 0; i < k.size(); ++i) {
      if (k[i].IsNull()) continue;
      const auto v = num_list(k[i], "K[" + std::to_string(i) + "]");
      if (v.size() != 2 || !(v[0] < v[1])) fail("K[" + std::to_string(i) + "]", k[i], "expected [lo, hi] with lo < hi");
      s.predict.K[i] = {v[0], v[1]};
    }
  }
  if (const auto sd = root["seed"]) {
    try {
      s.predict.seed = sd.as<std::uint64_t>();
    } catch (const YAML::Exception&) {
      fail("seed", sd, "expected an unsigned 64-bit integer");
    }
  }
  if (root["subcritical_pairs"]) s.predict.subcritical_pairs = static_cast<int>(num(root["subcritical_pairs"], "subcritical_pairs"));
  if (root["labels_per_gap"]) s.predict.labels_per_gap = static_cast<int>(num(root["labels_per_gap"], "labels_per_gap"));
  if (s.predict.subcritical_pairs < 0 || s.predict.labels_per_gap < 0)
    fail("subcritical_pairs", root, "counts must be nonnegative");
  return s;
}

}  // namespace

Scenario parse_scenario(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError("(line " + std::to_string(e.mark.line + 1) + ")", e.msg);
  }
  try {
    return from_node(root);
  } catch (const YAML::Exception& e) {
    throw ConfigError("(line " + std::to_string(e.mark.line + 1) + ")", e.msg);
  }
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

}  // namespace scs

#include "syncnet/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "syncnet/error.hpp"
#include "syncnet/verify.hpp"

namespace syncnet::io {

namespace fs = std::filesystem;

namespace {

const json& require(const json& j, const char* key, const char* context) {
  if (!j.is_object() || !j.contains(key)) {
    throw InputError(std::string(context) + ": missing field '" + key + "'");
  }
  return j.at(key);
}

// A member may hold an inline object or a path to a JSON file.
json resolve(const json& j, const fs::path& base_dir) {
  if (j.is_string()) return read_json_file(base_dir / j.get<std::string>());
  return j;
}

long require_integer(const json& j, const char* what, long min_value) {
  if (!j.is_number_integer() || j.get<long>() < min_value) {
    throw InputError(std::string(what) + " must be an integer >= " +
                     std::to_string(min_value));
  }
  return j.get<long>();
}

double require_number(const json& j, const char* what) {
  if (!j.is_number()) throw InputError(std::string(what) + " must be a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw InputError(std::string(what) + " must be finite");
  return v;
}

json complex_to_json(std::complex<double> z) { return json{{"re", z.real()}, {"im", z.imag()}}; }

json optional_matrix(const Mat& m, const std::string& name) {
  if (m.size() == 0) return nullptr;
  return matrix_to_json(m, name);
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

Mat matrix_from_json(const json& j) {
  if (!j.is_object()) throw InputError("matrix must be a JSON object");
  const long rows = require_integer(require(j, "rows", "matrix"), "rows", 1);
  const long cols = require_integer(require(j, "cols", "matrix"), "cols", 1);
  const json& data = require(j, "data", "matrix");
  if (!data.is_array() || static_cast<long>(data.size()) != rows * cols) {
    throw InputError("matrix data must be an array of rows*cols numbers");
  }
  if (j.contains("name") && !j.at("name").is_string()) {
    throw InputError("matrix name must be a string");
  }
  Mat m(rows, cols);
  for (long i = 0; i < rows; ++i) {
    for (long k = 0; k < cols; ++k) m(i, k) = require_number(data[i * cols + k], "matrix entry");
  }
  return m;
}

json matrix_to_json(const Mat& m, const std::string& name) {
  json data = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index k = 0; k < m.cols(); ++k) data.push_back(m(i, k));
  }
  json out;
  if (!name.empty()) out["name"] = name;
  out["rows"] = m.rows();
  out["cols"] = m.cols();
  out["data"] = std::move(data);
  return out;
}

json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw InputError("malformed JSON in " + path.string() + ": " + e.what());
  }
}

void write_json_file(const fs::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  out << j.dump(2) << "\n";
}

LinearSystem system_from_json(const json& j, const fs::path& base_dir) {
  const json sys = resolve(j, base_dir);
  Mat a = matrix_from_json(resolve(require(sys, "A", "system"), base_dir));
  Mat c = matrix_from_json(resolve(require(sys, "C", "system"), base_dir));
  try {
    return LinearSystem(std::move(a), std::move(c));
  } catch (const std::invalid_argument& e) {
    throw InputError(std::string("invalid system: ") + e.what());
  }
}

json system_to_json(const LinearSystem& sys) {
  return json{{"A", matrix_to_json(sys.a(), "A")}, {"C", matrix_to_json(sys.c(), "C")}};
}

Mat lambda_from_json(const json& j, const fs::path& base_dir) {
  const json resolved = resolve(j, base_dir);
  if (resolved.is_object() && resolved.contains("lambda")) {
    return matrix_from_json(resolve(resolved.at("lambda"), base_dir));
  }
  return matrix_from_json(resolved);
}

ParsedScenario scenario_from_json(const json& j, const fs::path& base_dir,
                                  const ScenarioOptions& opts) {
  if (!j.is_object()) throw InputError("scenario must be a JSON object");
  ParsedScenario parsed;
  Scenario& sc = parsed.scenario;

  const std::string mode_text =
      j.value("mode", std::string(to_string(CouplingMode::kOutputCoupled)));
  const auto mode = parse_mode(mode_text);
  if (!mode) throw InputError("unknown mode '" + mode_text + "'");
  sc.mode = *mode;

  SynthesisOptions synth;
  if (j.contains("tolerances")) {
    const json& tol = j.at("tolerances");
    if (!tol.is_object()) throw InputError("tolerances must be an object");
    if (tol.contains("unit_tol")) synth.unit_tol = require_number(tol.at("unit_tol"), "unit_tol");
    if (tol.contains("rank_tol")) synth.rank_tol = require_number(tol.at("rank_tol"), "rank_tol");
    if (tol.contains("r_tol")) synth.invariant.tol = require_number(tol.at("r_tol"), "r_tol");
    if (tol.contains("overflow_bound")) {
      sc.overflow_bound = require_number(tol.at("overflow_bound"), "overflow_bound");
    }
  }
  synth.reduce_outputs = j.value("reduce_outputs", false);

  const bool allow_disconnected = opts.allow_disconnected || j.value("allow_disconnected", false);
  Mat lambda = lambda_from_json(require(j, "topology", "scenario"), base_dir);
  sc.topology = Topology::create(std::move(lambda), allow_disconnected);

  int n = 0;
  if (sc.mode == CouplingMode::kOrthogonal) {
    Mat q = matrix_from_json(resolve(require(j, "q", "orthogonal scenario"), base_dir));
    Mat h = matrix_from_json(resolve(require(j, "h", "orthogonal scenario"), base_dir));
    if (q.rows() != q.cols() || h.cols() != q.rows()) {
      throw InputError("orthogonal scenario: Q must be n x n and H m x n");
    }
    const auto b = check_b_assumptions(q, h);
    if (!b.ok()) {
      throw InputError("orthogonal scenario: (Q, H) must satisfy Q orthogonal, "
                       "H H^T = I and (H, Q) observable");
    }
    sc.system = LinearSystem(std::move(q), std::move(h));
    n = sc.system.n();
  } else {
    sc.system = system_from_json(require(j, "system", "scenario"), base_dir);
    n = sc.system.n();
    const json gain = j.value("gain", json("synthesize"));
    if (gain.is_string() && gain.get<std::string>() == "synthesize") {
      GainSynthesis g = synthesize(sc.system, synth);
      sc.gain = sc.mode == CouplingMode::kDual ? Mat(g.l.transpose()) : g.l;
      parsed.synthesis = std::move(g);
    } else {
      sc.gain = matrix_from_json(resolve(gain, base_dir));
      const bool dual = sc.mode == CouplingMode::kDual;
      const long want_rows = dual ? sc.system.m() : sc.system.n();
      const long want_cols = dual ? sc.system.n() : sc.system.m();
      if (sc.gain.rows() != want_rows || sc.gain.cols() != want_cols) {
        throw InputError("gain has the wrong shape for this mode");
      }
    }
  }

  const int p = sc.topology.p();
  sc.horizon = require_integer(require(j, "horizon", "scenario"), "horizon", 0);
  if (j.contains("snapshot_stride")) {
    sc.snapshot_stride = require_integer(j.at("snapshot_stride"), "snapshot_stride", 1);
  }
  if (j.contains("threshold")) sc.threshold = require_number(j.at("threshold"), "threshold");
  parsed.emit_states = j.value("emit_states", false);

  const json& initial = require(j, "initial", "scenario");
  if (initial.is_object() && initial.contains("states")) {
    const json& states = initial.at("states");
    if (!states.is_array() || static_cast<int>(states.size()) != p) {
      throw InputError("initial.states must list one vector per agent");
    }
    sc.initial.states.resize(n, p);
    for (int i = 0; i < p; ++i) {
      if (!states[i].is_array() || static_cast<int>(states[i].size()) != n) {
        throw InputError("initial state vectors must have dimension n");
      }
      for (int k = 0; k < n; ++k) sc.initial.states(k, i) = require_number(states[i][k], "initial state");
    }
  } else if (initial.is_object() && initial.contains("seed")) {
    const std::string dist = initial.value("distribution", std::string("uniform"));
    if (dist != "uniform") throw InputError("only the uniform initial distribution is supported");
    sc.seed = static_cast<std::uint64_t>(require_integer(initial.at("seed"), "seed", 0));
    if (opts.seed_override) sc.seed = *opts.seed_override;
    sc.initial = random_initial_state(n, p, sc.seed);
  } else {
    throw InputError("initial must hold either 'states' or 'seed'");
  }
  return parsed;
}

void write_trace_csv(std::ostream& out, const SimulationTrace& trace,
                     const Scenario& scenario, bool emit_states) {
  const int n = scenario.system.n();
  const int p = scenario.topology.p();
  out << "k,sync_error,disagreement";
  if (emit_states) {
    for (int i = 0; i < p; ++i) {
      for (int k = 0; k < n; ++k) out << ",x" << i << "_" << k;
    }
  }
  out << "\n";
  std::size_t snap = 0;
  for (std::size_t k = 0; k < trace.sync_error.size(); ++k) {
    out << k << "," << format_double(trace.sync_error[k]) << ","
        << format_double(trace.disagreement[k]);
    if (emit_states) {
      const bool has = snap < trace.snapshots.size() &&
                       trace.snapshots[snap].k == static_cast<long>(k);
      for (int i = 0; i < p; ++i) {
        for (int c = 0; c < n; ++c) {
          out << ",";
          if (has) out << format_double(trace.snapshots[snap].states(c, i));
        }
      }
      if (has) ++snap;
    }
    out << "\n";
  }
}

json trace_summary(const SimulationTrace& trace, const Scenario& scenario) {
  const double e0 = trace.sync_error.front();
  const double ef = trace.sync_error.back();
  json out;
  out["digest"] = trace.digest;
  out["mode"] = to_string(scenario.mode);
  out["horizon"] = scenario.horizon;
  out["agents"] = scenario.topology.p();
  out["state_dim"] = scenario.system.n();
  out["seed"] = scenario.seed;
  out["initial_sync_error"] = e0;
  out["final_sync_error"] = ef;
  out["final_disagreement"] = trace.disagreement.back();
  out["threshold"] = scenario.threshold;
  out["first_below_threshold"] =
      trace.first_below_threshold ? json(*trace.first_below_threshold) : json(nullptr);
  out["converged"] = ef <= scenario.threshold * std::max(1.0, e0);
  out["conservation_residual"] =
      trace.conservation_residual ? json(*trace.conservation_residual) : json(nullptr);
  out["topology_connected"] = scenario.topology.connected();
  std::vector<double> r(scenario.topology.r().data(),
                        scenario.topology.r().data() + scenario.topology.p());
  out["r"] = r;
  return out;
}

json assumption_report_to_json(const AssumptionReport& report) {
  json eigen = json::array();
  for (const auto& d : report.neutral_stability.eigenvalues) {
    json e = complex_to_json(d.value);
    e["magnitude"] = d.magnitude;
    e["algebraic"] = d.algebraic;
    e["geometric"] = d.geometric;
    e["on_unit_circle"] = d.on_unit_circle;
    e["ok"] = d.ok;
    eigen.push_back(std::move(e));
  }
  json undetectable = json::array();
  for (const auto& z : report.detectability.undetectable) undetectable.push_back(complex_to_json(z));
  return json{
      {"neutrally_stable",
       {{"ok", report.neutral_stability.ok},
        {"eigenvalues", std::move(eigen)},
        {"unit_tol", report.neutral_stability.unit_tol},
        {"cluster_tol", report.neutral_stability.cluster_tol}}},
      {"detectable",
       {{"ok", report.detectability.ok},
        {"undetectable_eigenvalues", std::move(undetectable)},
        {"rank_tol", report.detectability.rank_tol}}},
      {"observable", report.observable},
      {"ok", report.ok()}};
}

json connectivity_report_to_json(const ConnectivityReport& report) {
  return json{{"connected", report.ok()},
              {"entries_ok", report.entries_ok},
              {"rows_ok", report.rows_ok},
              {"graph_ok", report.graph_ok},
              {"roots", report.roots},
              {"violations", report.violations}};
}

json synthesis_to_json(const GainSynthesis& g, const LinearSystem& sys,
                       const SynthesisOptions& opts) {
  json out;
  out["n"] = sys.n();
  out["m"] = sys.m();
  out["n1"] = g.n1;
  out["n2"] = g.n2;
  out["L"] = matrix_to_json(g.l, "L");
  out["R"] = optional_matrix(g.r_mat, "R");
  out["H"] = optional_matrix(g.h, "H");
  out["Q"] = optional_matrix(g.q, "Q");
  out["U"] = optional_matrix(g.split.u, "U");
  out["F"] = optional_matrix(g.split.f, "F");
  out["output_map"] = matrix_to_json(g.output_map, "T");
  out["outputs_reduced"] = g.outputs_reduced;
  if (g.n1 > 0) {
    out["residuals"] = {{"invariance", g.residuals.invariance},
                        {"orthogonality", g.residuals.orthogonality},
                        {"row_orthonormality", g.residuals.row_orthonormality},
                        {"gain_identity", g.residuals.gain_identity}};
    out["alpha"] = projection_product_norm(g.q, g.h, g.n1);
    out["invariant_form"] = {{"iterations", g.invariant.iterations},
                             {"passes", g.invariant.passes},
                             {"used_fallback", g.invariant.used_fallback}};
  } else {
    out["residuals"] = nullptr;
    out["alpha"] = nullptr;
  }
  out["tolerances"] = {{"unit_tol", opts.unit_tol},
                       {"rank_tol", opts.rank_tol},
                       {"r_tol", opts.invariant.tol},
                       {"max_iter", opts.invariant.max_iter}};
  return out;
}

}  // namespace syncnet::io

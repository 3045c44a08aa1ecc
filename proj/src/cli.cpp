#include "syncnet/cli.hpp"

#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <ostream>

#include "syncnet/corpus.hpp"
#include "syncnet/error.hpp"
#include "syncnet/io.hpp"
#include "syncnet/simulate.hpp"
#include "syncnet/topology.hpp"
#include "syncnet/verify.hpp"

namespace syncnet::cli {

namespace fs = std::filesystem;
using io::json;

namespace {

// Maps exceptions onto the exit-code contract.
int guarded(std::ostream& err, const std::function<int()>& body) {
  try {
    return body();
  } catch (const InputError& e) {
    err << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const json::exception& e) {
    err << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::invalid_argument& e) {
    err << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

void emit(const json& report, const std::optional<fs::path>& file, std::ostream& out) {
  if (file) {
    io::write_json_file(*file, report);
  } else {
    out << report.dump(2) << "\n";
  }
}

struct VerifyCase {
  std::string label;
  Mat q, h;
  std::optional<Mat> lambda;
};

std::vector<VerifyCase> verify_corpus(const VerifyArgs& args) {
  std::vector<VerifyCase> cases;
  cases.push_back({"rotation_position", rotation(1.0), Mat{{1.0, 0.0}}, corpus::ring_lambda(3)});
  corpus::Rng rng(args.seed);
  for (int i = 0; static_cast<int>(cases.size()) < args.corpus_size; ++i) {
    const int n1 = std::uniform_int_distribution<int>(1, 6)(rng);
    const int n = n1 + std::uniform_int_distribution<int>(0, 2)(rng);
    const int m = std::uniform_int_distribution<int>(1, std::min(3, n1))(rng);
    const LinearSystem sys = corpus::random_system(rng, n, n1, m);
    const GainSynthesis g = synthesize(sys);
    const int p = std::uniform_int_distribution<int>(3, 5)(rng);
    cases.push_back({"synthesized_" + std::to_string(i), g.q, g.h,
                     corpus::random_connected_lambda(rng, p)});
  }
  if (args.inject_unobservable) {
    cases.push_back({"unobservable", Mat::Identity(2, 2), Mat{{1.0, 0.0}}, corpus::ring_lambda(3)});
  }
  return cases;
}

json run_lemma2(const std::vector<VerifyCase>& cases, bool& pass) {
  json rows = json::array();
  for (const auto& c : cases) {
    const auto b = check_b_assumptions(c.q, c.h);
    const double alpha = b.ok() ? lemma2_alpha(c.q, c.h)
                                : projection_product_norm(c.q, c.h, static_cast<int>(c.q.rows()));
    const bool ok = b.ok() && alpha < 1.0;
    pass = pass && ok;
    rows.push_back({{"case", c.label},
                    {"n", c.q.rows()},
                    {"assumptions_ok", b.ok()},
                    {"observable", b.observable},
                    {"alpha", alpha},
                    {"pass", ok}});
  }
  return rows;
}

json run_partitions(const std::vector<VerifyCase>& cases, int k_top, std::uint64_t seed,
                    bool& pass) {
  json rows = json::array();
  for (const auto& c : cases) {
    json per_k = json::array();
    bool case_ok = true;
    for (int k = 1; k <= k_top; ++k) {
      const auto r = check_partition_identities(c.q, c.h, k, seed + k);
      case_ok = case_ok && r.pass;
      per_k.push_back({{"k", k},
                       {"sum_deviation", r.sum_deviation},
                       {"max_norm", r.max_norm},
                       {"energy_deviation", r.energy_deviation},
                       {"recurrence_deviation", r.recurrence_deviation},
                       {"cardinality_ok", r.cardinality_ok},
                       {"pass", r.pass}});
    }
    json row{{"case", c.label}, {"n", c.q.rows()}, {"checks", std::move(per_k)}};
    if (k_top >= 4) {
      const auto seq = make_projection_sequence(c.q, c.h, 4);
      const Mat listed = omega_2_4_listed_sum(seq);
      const auto enumerated = enumerate_m(seq, 2, 4);
      const double dev_enum = spectral_norm(listed - enumerated.sum);
      const double dev_rec = spectral_norm(listed - m_family(seq, 4)[2]);
      const bool ok = enumerated.count == 6 && dev_enum <= 1e-12 && dev_rec <= 1e-12;
      case_ok = case_ok && ok;
      row["omega_2_4"] = {{"listed_vs_enumerated", dev_enum},
                          {"listed_vs_recurrence", dev_rec},
                          {"count", enumerated.count},
                          {"pass", ok}};
    }
    row["pass"] = case_ok;
    pass = pass && case_ok;
    rows.push_back(std::move(row));
  }
  return rows;
}

json run_phi_limit(const std::vector<VerifyCase>& cases, int k_max, bool& pass) {
  json rows = json::array();
  for (const auto& c : cases) {
    const Topology topo = Topology::create(*c.lambda);
    const auto r = check_phi_limit(c.q, c.h, topo, k_max);
    pass = pass && r.pass;
    json checkpoints = json::array();
    for (const auto& [k, dev] : r.checkpoints) checkpoints.push_back({{"k", k}, {"deviation", dev}});
    rows.push_back({{"case", c.label},
                    {"n", c.q.rows()},
                    {"p", topo.p()},
                    {"final_deviation", r.final_deviation},
                    {"checkpoints", std::move(checkpoints)},
                    {"pass", r.pass}});
  }
  return rows;
}

}  // namespace

std::optional<std::uint64_t> seed_from_env() {
  const char* raw = std::getenv("SYNCNET_SEED");
  if (raw == nullptr || *raw == '\0') return std::nullopt;
  char* end = nullptr;
  errno = 0;
  const unsigned long long v = std::strtoull(raw, &end, 10);
  if (errno != 0 || *end != '\0' || raw[0] == '-') {
    throw InputError(std::string("SYNCNET_SEED is not a non-negative integer: ") + raw);
  }
  return static_cast<std::uint64_t>(v);
}

int cmd_check(const CheckArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const fs::path base = args.system.parent_path();
    const LinearSystem sys = io::system_from_json(io::read_json_file(args.system), base);
    std::optional<Mat> lambda;
    if (args.topology) {
      lambda = io::lambda_from_json(io::read_json_file(*args.topology),
                                    args.topology->parent_path());
      if (lambda->rows() != lambda->cols()) throw InputError("topology must be square");
    }

    AssumptionReport report;
    report.neutral_stability = check_neutral_stability(sys.a(), args.unit_tol, args.cluster_tol);
    report.detectability = check_detectable(sys, args.unit_tol, args.rank_tol);
    report.observable = check_observable(sys);
    json j;
    j["system"] = io::assumption_report_to_json(report);
    bool ok = report.ok();
    if (lambda) {
      const auto conn = validate_connected(*lambda);
      j["topology"] = io::connectivity_report_to_json(conn);
      ok = ok && conn.ok();
    }
    j["ok"] = ok;
    out << j.dump(2) << "\n";
    if (!report.neutral_stability.ok) err << "check failed: A is not neutrally stable\n";
    if (!report.detectability.ok) err << "check failed: (C, A) is not detectable\n";
    if (j.contains("topology") && !j["topology"]["connected"].get<bool>()) {
      err << "check failed: topology is not connected\n";
    }
    return ok ? kExitPass : kExitFailure;
  });
}

int cmd_synthesize(const SynthesizeArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const LinearSystem sys =
        io::system_from_json(io::read_json_file(args.system), args.system.parent_path());
    const GainSynthesis g = synthesize(sys, args.options);
    emit(io::synthesis_to_json(g, sys, args.options), args.out_file, out);
    return kExitPass;
  });
}

int cmd_simulate(const SimulateArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    io::ScenarioOptions opts;
    opts.allow_disconnected = args.allow_disconnected;
    opts.seed_override = args.seed_override;
    const auto parsed = io::scenario_from_json(io::read_json_file(args.scenario),
                                               args.scenario.parent_path(), opts);
    const SimulationTrace trace = run(parsed.scenario);

    const fs::path csv_path = args.out_prefix + ".csv";
    std::ofstream csv(csv_path, std::ios::binary);
    if (!csv) throw InputError("cannot write " + csv_path.string());
    io::write_trace_csv(csv, trace, parsed.scenario, parsed.emit_states);

    json summary = io::trace_summary(trace, parsed.scenario);
    if (parsed.synthesis) summary["n1"] = parsed.synthesis->n1;
    io::write_json_file(args.out_prefix + ".summary.json", summary);
    out << summary.dump(2) << "\n";
    return kExitPass;
  });
}

int cmd_verify(const VerifyArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const bool all = args.suite == "all";
    if (!all && args.suite != "lemma2" && args.suite != "partitions" &&
        args.suite != "phi-limit") {
      throw InputError("unknown suite '" + args.suite + "'");
    }
    if (args.k < 1 || args.k > kMaxEnumerationHorizon) {
      throw InputError("--k must lie in [1, " + std::to_string(kMaxEnumerationHorizon) + "]");
    }
    if (args.k_max < 1) throw InputError("--k-max must be positive");
    if (args.corpus_size < 1) throw InputError("--corpus-size must be positive");

    const auto cases = verify_corpus(args);
    json report{{"suite", args.suite}, {"seed", args.seed}, {"cases", cases.size()}};
    bool pass = true;
    if (all || args.suite == "lemma2") report["lemma2"] = run_lemma2(cases, pass);
    if (all || args.suite == "partitions") {
      report["partitions"] = run_partitions(cases, args.k, args.seed, pass);
    }
    if (all || args.suite == "phi-limit") report["phi_limit"] = run_phi_limit(cases, args.k_max, pass);
    report["pass"] = pass;
    emit(report, args.out_file, out);
    if (!pass) err << "verify: at least one identity failed\n";
    return pass ? kExitPass : kExitFailure;
  });
}

}  // namespace syncnet::cli

#include <iostream>

#include <CLI11.hpp>

#include "syncnet/cli.hpp"
#include "syncnet/error.hpp"

namespace sc = syncnet::cli;

int main(int argc, char** argv) {
  CLI::App app{"Synchronization gain synthesis, network simulation and identity checks"};
  app.require_subcommand(1);

  sc::CheckArgs check;
  std::string check_topology;
  auto* check_cmd = app.add_subcommand("check", "Check system assumptions and topology");
  check_cmd->add_option("system", check.system, "System JSON {A, C}")->required();
  check_cmd->add_option("topology", check_topology, "Coupling matrix JSON");
  check_cmd->add_option("--unit-tol", check.unit_tol, "Unit-circle band half-width")
      ->capture_default_str();
  check_cmd->add_option("--cluster-tol", check.cluster_tol, "Eigenvalue clustering distance")
      ->capture_default_str();
  check_cmd->add_option("--rank-tol", check.rank_tol, "PBH relative rank tolerance")
      ->capture_default_str();

  sc::SynthesizeArgs synth;
  std::string synth_out;
  auto* synth_cmd = app.add_subcommand("synthesize", "Synthesize the output-feedback gain");
  synth_cmd->add_option("system", synth.system, "System JSON {A, C}")->required();
  synth_cmd->add_option("-o,--out", synth_out, "Report file (stdout when omitted)");
  synth_cmd->add_flag("--reduce-outputs", synth.options.reduce_outputs,
                      "Compress C onto range(CU) when rank(CU) < m");
  synth_cmd->add_option("--unit-tol", synth.options.unit_tol, "Unit-circle band half-width")
      ->capture_default_str();
  synth_cmd->add_option("--rank-tol", synth.options.rank_tol, "Relative rank tolerance")
      ->capture_default_str();
  synth_cmd->add_option("--r-tol", synth.options.invariant.tol,
                        "Relative residual target for the invariant form R")
      ->capture_default_str();
  synth_cmd->add_option("--max-iter", synth.options.invariant.max_iter,
                        "Averaging term budget for R")
      ->capture_default_str();

  sc::SimulateArgs sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Run a network scenario");
  sim_cmd->add_option("scenario", sim.scenario, "Scenario JSON")->required();
  sim_cmd->add_option("out_prefix", sim.out_prefix, "Writes <prefix>.csv and <prefix>.summary.json")
      ->required();
  sim_cmd->add_flag("--allow-disconnected", sim.allow_disconnected,
                    "Run disconnected topologies as negative controls");

  sc::VerifyArgs ver;
  std::string ver_out;
  auto* ver_cmd = app.add_subcommand("verify", "Run the projection-product oracle suites");
  ver_cmd->add_option("suite", ver.suite, "lemma2 | partitions | phi-limit | all")
      ->check(CLI::IsMember({"lemma2", "partitions", "phi-limit", "all"}))
      ->capture_default_str();
  ver_cmd->add_option("--k", ver.k, "Largest enumeration horizon")->capture_default_str();
  ver_cmd->add_option("--k-max", ver.k_max, "Horizon of the Phi product")->capture_default_str();
  ver_cmd->add_option("--seed", ver.seed, "Corpus seed")->capture_default_str();
  ver_cmd->add_option("--corpus-size", ver.corpus_size, "Number of (Q, H) cases")
      ->capture_default_str();
  ver_cmd->add_flag("--inject-unobservable", ver.inject_unobservable,
                    "Add Q = I, H = [1 0] as a negative control");
  ver_cmd->add_option("-o,--out", ver_out, "Report file (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? sc::kExitPass : sc::kExitInput;
  }

  if (*check_cmd) {
    if (!check_topology.empty()) check.topology = check_topology;
    return sc::cmd_check(check, std::cout, std::cerr);
  }
  if (*synth_cmd) {
    if (!synth_out.empty()) synth.out_file = synth_out;
    return sc::cmd_synthesize(synth, std::cout, std::cerr);
  }
  if (*sim_cmd) {
    try {
      sim.seed_override = sc::seed_from_env();
    } catch (const syncnet::InputError& e) {
      std::cerr << "input error: " << e.what() << "\n";
      return sc::kExitInput;
    }
    return sc::cmd_simulate(sim, std::cout, std::cerr);
  }
  if (!ver_out.empty()) ver.out_file = ver_out;
  return sc::cmd_verify(ver, std::cout, std::cerr);
}

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "syncnet/synthesis.hpp"
#include "syncnet/sysmodel.hpp"

// Subcommand implementations behind the syncnet executable. Each returns the
// process exit code and never throws.
namespace syncnet::cli {

inline constexpr int kExitPass = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitInput = 2;

struct CheckArgs {
  std::filesystem::path system;
  std::optional<std::filesystem::path> topology;
  double unit_tol = kDefaultUnitTol;
  double cluster_tol = kDefaultClusterTol;
  double rank_tol = kDefaultPbhRankTol;
};

/// Prints the assumption report (and the topology verdict when a topology is
/// given) as JSON on `out`.
int cmd_check(const CheckArgs& args, std::ostream& out, std::ostream& err);

struct SynthesizeArgs {
  std::filesystem::path system;
  // Report goes to `out` when unset.
  std::optional<std::filesystem::path> out_file;
  SynthesisOptions options;
};

int cmd_synthesize(const SynthesizeArgs& args, std::ostream& out, std::ostream& err);

struct SimulateArgs {
  std::filesystem::path scenario;
  // Writes <prefix>.csv and <prefix>.summary.json.
  std::string out_prefix;
  bool allow_disconnected = false;
  // Overrides seeded initial states; the executable fills it from SYNCNET_SEED.
  std::optional<std::uint64_t> seed_override;
};

int cmd_simulate(const SimulateArgs& args, std::ostream& out, std::ostream& err);

struct VerifyArgs {
  // lemma2 | partitions | phi-limit | all
  std::string suite = "all";
  int k = 10;
  int k_max = 1000;
  std::uint64_t seed = 1;
  int corpus_size = 10;
  bool inject_unobservable = false;
  std::optional<std::filesystem::path> out_file;
};

int cmd_verify(const VerifyArgs& args, std::ostream& out, std::ostream& err);

/// Parses SYNCNET_SEED; nullopt when unset. Throws InputError when malformed.
std::optional<std::uint64_t> seed_from_env();

}  // namespace syncnet::cli

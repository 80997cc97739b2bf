#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>

namespace ebcm {

enum ExitCode : int {
  kExitOk = 0,
  kExitInternal = 1,
  kExitConfig = 2,
  kExitIo = 3,
  kExitFitFailure = 4,
};

struct CommandOptions {
  std::filesystem::path config;  // empty: built-in defaults
  std::filesystem::path out;
  std::filesystem::path in;  // records table for `fit`
  std::optional<std::uint64_t> seed;  // overrides master_seed
  int threads = 1;
};

/// Runs the full acquisition schedule; one CSV row per record plus a
/// `<out>.meta.json` sidecar holding the config and seeding scheme.
int cmd_sweep(const CommandOptions& opts, std::ostream& err);

/// Chi-square of quantum-simulated reference data against EBCM predictions
/// over the configured alpha grid, with quantum baseline rows.
int cmd_alpha_scan(const CommandOptions& opts, std::ostream& err);

/// Per-photon versus per-block random switching: both fringes, their fits
/// and the fitted phase shift per x context.
int cmd_switch_compare(const CommandOptions& opts, std::ostream& err);

/// Fits every protocol (and x context of random protocols) of a records table.
int cmd_fit(const CommandOptions& opts, std::ostream& err);

/// Command-line front end: `ebcm <sweep|alpha-scan|switch-compare|fit> ...`.
int run_cli(int argc, char** argv);

}  // namespace ebcm

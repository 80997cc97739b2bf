#pragma once

#include <array>
#include <cstdint>
#include <numbers>
#include <vector>

#include "ebcm/dlm.hpp"
#include "ebcm/instruments.hpp"
#include "ebcm/interferometer.hpp"
#include "ebcm/protocol.hpp"
#include "ebcm/rng.hpp"

namespace ebcm {

/// Index into per-x tallies: 0 for x = -1, 1 for x = +1.
constexpr int x_slot(int x) { return x < 0 ? 0 : 1; }

/// Accumulated detections for one (phi0, protocol, set) cell.
///
/// The per-x tallies split the trials and monitored-port counts by the
/// value of x that was active during each trial; for fixed protocols one
/// slot holds everything.
struct FringeRecord {
  double phi0 = 0.0;
  int phi0_index = 0;
  PhaseProtocol protocol = PhaseProtocol::random_per_photon();
  int set_index = 0;
  std::int64_t counts_port0 = 0;
  std::int64_t counts_port1 = 0;
  std::int64_t darks_recorded = 0;
  std::int64_t trials = 0;
  std::int64_t background = 0;  // uncounted ONF messengers sent
  std::uint64_t seed = 0;
  std::array<std::int64_t, 2> trials_by_x{0, 0};
  std::array<std::int64_t, 2> counts_port0_by_x{0, 0};
  bool darks_subtracted = false;
  bool dark_underflow = false;
};

/// Which trials of a record a fringe is built from: all of them, or only
/// those taken while x was -1 or +1.
enum class Context { all, x_minus, x_plus };

/// "all", "x=-1", "x=+1".
const char* context_tag(Context c);
std::int64_t trials_in(const FringeRecord& r, Context c);
std::int64_t port0_in(const FringeRecord& r, Context c);

/// Linear phase grid: `count` points from `start`, step (stop - start) / count.
struct PhaseGrid {
  int count = 16;
  double start = 0.0;
  double stop = 2.0 * std::numbers::pi;

  std::vector<double> points() const;
};

/// Everything needed to reproduce one simulated acquisition campaign.
struct ExperimentConfig {
  double alpha = 0.99;
  double beta = 0.0;
  PhaseGrid grid;
  std::int64_t photons_per_set = 5000;
  int sets_per_protocol = 10;
  std::vector<PhaseProtocol> protocols{PhaseProtocol::fixed(-1), PhaseProtocol::fixed(1),
                                       PhaseProtocol::random_per_photon()};
  SourceModel source;
  DetectorModel detector;
  std::uint64_t master_seed = 20110101;
  bool persistence = true;      // keep DLM state across cells
  std::int64_t burn_in = 0;     // uncounted photons before the first cell
  RegisterMode register_mode = RegisterMode::overwrite;
  Port input_port = Port::one;  // BS1 input fed by the source

  /// Throws ConfigError naming the offending key.
  void validate() const;
};

/// Seed-derivation domains; part of the documented seeding scheme.
enum class SeedDomain : std::uint64_t {
  cell = 1,
  burn_in = 2,
  replica = 3,
  reference = 4,
};

/// Per-cell sub-seed: derive_seed(master, {cell, phi0_index, protocol key, set}).
std::uint64_t cell_seed(std::uint64_t master, int phi0_index, const PhaseProtocol& protocol,
                        int set_index);

/// Runs `n_photons` heralded trials at one phi0 setting and tallies them.
///
/// Per trial: draw x, set the modulators, with probability `source.onf`
/// send one uncounted background messenger first, send the heralded
/// messenger, register it with probability `efficiency`, then add a dark
/// count on port 0 with probability `dark_prob_per_gate`. Every trial
/// consumes the same deviates regardless of the outcome except the two
/// extra ones of a background traversal.
FringeRecord run_point(Interferometer& ifo, const PhaseProtocol& protocol, double phi0,
                       std::int64_t n_photons, const SourceModel& source,
                       const DetectorModel& det, Port input, Rng& rng);

/// Full acquisition schedule: for each phi0 in order, `sets_per_protocol`
/// sets of each protocol in config order. One record per cell, in
/// schedule order. With persistence off, cells run on up to `threads`
/// workers and the output is identical to the sequential run.
std::vector<FringeRecord> run_sweep(const ExperimentConfig& config, int threads = 1);

struct SwitchComparison {
  std::vector<FringeRecord> per_photon;
  std::vector<FringeRecord> per_block;
};

/// Random switching once per photon versus once per `block` photons, each
/// run as its own sweep from a fresh device with the same seeding scheme.
SwitchComparison run_switch_rate_comparison(const ExperimentConfig& config, int block = 10,
                                            int threads = 1);

}  // namespace ebcm

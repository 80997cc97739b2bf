#include "ebcm/acquisition.hpp"

#include <cmath>

#include "ebcm/errors.hpp"
#include "ebcm/parallel.hpp"

namespace ebcm {

void SourceModel::validate() const {
  if (!(onf >= 0.0 && onf <= 0.05)) throw ConfigError("source.onf", "must lie in [0, 0.05]");
  if (g2_flag) throw ConfigError("source.g2_flag", "multi-photon emission is not modelled");
  if (!(switch_window_ns > 0.0)) throw ConfigError("source.switch_window_ns", "must be positive");
  if (!(dead_time_us >= 0.0)) throw ConfigError("source.dead_time_us", "must be non-negative");
}

void DetectorModel::validate() const {
  if (!(efficiency > 0.0 && efficiency <= 1.0)) {
    throw ConfigError("detector.efficiency", "must lie in (0, 1]");
  }
  if (!(dark_prob_per_gate >= 0.0 && dark_prob_per_gate <= 0.1)) {
    throw ConfigError("detector.dark_prob_per_gate", "must lie in [0, 0.1]");
  }
  if (!(gate_window_ns > 0.0)) throw ConfigError("detector.gate_window_ns", "must be positive");
}

const char* context_tag(Context c) {
  switch (c) {
    case Context::all:
      return "all";
    case Context::x_minus:
      return "x=-1";
    case Context::x_plus:
      return "x=+1";
  }
  return "";
}

std::int64_t trials_in(const FringeRecord& r, Context c) {
  if (c == Context::all) return r.trials;
  return r.trials_by_x[c == Context::x_minus ? 0 : 1];
}

std::int64_t port0_in(const FringeRecord& r, Context c) {
  if (c == Context::all) return r.counts_port0;
  return r.counts_port0_by_x[c == Context::x_minus ? 0 : 1];
}

std::vector<double> PhaseGrid::points() const {
  std::vector<double> out(static_cast<std::size_t>(count));
  const double step = (stop - start) / count;
  for (int i = 0; i < count; ++i) out[static_cast<std::size_t>(i)] = start + step * i;
  return out;
}

void ExperimentConfig::validate() const {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ConfigError("alpha", "must lie in [0, 1]");
  if (!(beta >= 0.0 && beta <= kMaxCrosstalk)) throw ConfigError("beta", "must lie in [0, 0.2]");
  if (grid.count < 1) throw ConfigError("phi0_grid.count", "must be at least 1");
  if (!std::isfinite(grid.start) || !std::isfinite(grid.stop) || !(grid.stop > grid.start)) {
    throw ConfigError("phi0_grid", "stop must be finite and greater than start");
  }
  if (photons_per_set < 1) throw ConfigError("photons_per_set", "must be at least 1");
  if (sets_per_protocol < 1) throw ConfigError("sets_per_protocol", "must be at least 1");
  if (protocols.empty()) throw ConfigError("protocols", "at least one protocol is required");
  if (burn_in < 0) throw ConfigError("burn_in", "must be non-negative");
  source.validate();
  detector.validate();
}

std::uint64_t cell_seed(std::uint64_t master, int phi0_index, const PhaseProtocol& protocol,
                        int set_index) {
  return derive_seed(master, {static_cast<std::uint64_t>(SeedDomain::cell),
                              static_cast<std::uint64_t>(phi0_index), protocol.seed_key(),
                              static_cast<std::uint64_t>(set_index)});
}

FringeRecord run_point(Interferometer& ifo, const PhaseProtocol& protocol, double phi0,
                       std::int64_t n_photons, const SourceModel& source,
                       const DetectorModel& det, Port input, Rng& rng) {
  FringeRecord rec;
  rec.phi0 = phi0;
  rec.protocol = protocol;

  XSequence xs(protocol);
  for (std::int64_t t = 0; t < n_photons; ++t) {
    const int x = xs.draw(t, rng);
    ifo.set_modulators(phi0, phi1_of(x));

    if (rng.uniform() < source.onf) {
      ifo.traverse(input, rng);
      ++rec.background;
    }

    const Port out = ifo.traverse(input, rng);
    const bool detected = rng.uniform() < det.efficiency;
    const bool dark = rng.uniform() < det.dark_prob_per_gate;

    const int slot = x_slot(x);
    ++rec.trials;
    ++rec.trials_by_x[slot];
    if (detected) {
      if (out == Port::zero) {
        ++rec.counts_port0;
        ++rec.counts_port0_by_x[slot];
      } else {
        ++rec.counts_port1;
      }
    }
    if (dark) {
      ++rec.darks_recorded;
      ++rec.counts_port0;
      ++rec.counts_port0_by_x[slot];
    }
  }
  return rec;
}

namespace {

struct Cell {
  int phi0_index;
  double phi0;
  PhaseProtocol protocol;
  int set_index;
};

std::vector<Cell> schedule(const ExperimentConfig& config) {
  std::vector<Cell> cells;
  const auto phis = config.grid.points();
  for (int i = 0; i < static_cast<int>(phis.size()); ++i) {
    for (const auto& p : config.protocols) {
      for (int s = 0; s < config.sets_per_protocol; ++s) {
        cells.push_back({i, phis[static_cast<std::size_t>(i)], p, s});
      }
    }
  }
  return cells;
}

FringeRecord run_cell(Interferometer& ifo, const ExperimentConfig& config, const Cell& c) {
  const std::uint64_t seed = cell_seed(config.master_seed, c.phi0_index, c.protocol, c.set_index);
  Rng rng(seed);
  FringeRecord rec = run_point(ifo, c.protocol, c.phi0, config.photons_per_set, config.source,
                               config.detector, config.input_port, rng);
  rec.phi0_index = c.phi0_index;
  rec.set_index = c.set_index;
  rec.seed = seed;
  return rec;
}

void burn_in(Interferometer& ifo, const ExperimentConfig& config, const Cell& c) {
  if (config.burn_in == 0) return;
  Rng rng(derive_seed(config.master_seed,
                      {static_cast<std::uint64_t>(SeedDomain::burn_in),
                       static_cast<std::uint64_t>(c.phi0_index), c.protocol.seed_key(),
                       static_cast<std::uint64_t>(c.set_index)}));
  run_point(ifo, c.protocol, c.phi0, config.burn_in, config.source, config.detector,
            config.input_port, rng);
}

}  // namespace

std::vector<FringeRecord> run_sweep(const ExperimentConfig& config, int threads) {
  config.validate();
  const auto cells = schedule(config);
  std::vector<FringeRecord> out(cells.size());
  if (cells.empty()) return out;

  if (config.persistence) {
    Interferometer ifo(config.alpha, config.beta, config.register_mode);
    burn_in(ifo, config, cells.front());
    for (std::size_t k = 0; k < cells.size(); ++k) out[k] = run_cell(ifo, config, cells[k]);
    return out;
  }

  parallel_for(cells.size(), threads, [&](std::size_t k) {
    Interferometer ifo(config.alpha, config.beta, config.register_mode);
    burn_in(ifo, config, cells[k]);
    out[k] = run_cell(ifo, config, cells[k]);
  });
  return out;
}

SwitchComparison run_switch_rate_comparison(const ExperimentConfig& config, int block,
                                            int threads) {
  ExperimentConfig per_photon = config;
  per_photon.protocols = {PhaseProtocol::random_per_photon()};
  ExperimentConfig per_block = config;
  per_block.protocols = {PhaseProtocol::random_per_n(block)};
  return {run_sweep(per_photon, threads), run_sweep(per_block, threads)};
}

}  // namespace ebcm

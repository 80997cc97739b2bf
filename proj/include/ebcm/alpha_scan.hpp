#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "ebcm/acquisition.hpp"
#include "ebcm/chi_square.hpp"
#include "ebcm/protocol.hpp"

namespace ebcm {

/// Monte Carlo estimate of the EBCM click probability per heralded trial,
/// for every phi0 of the config grid and every context.
///
/// Each replica is a fresh interferometer run through the whole grid in
/// order (burn-in first, then `photons_per_set` trials per phase). Replica
/// seeds depend on the master seed and replica index only, so predictions
/// for different alpha share their random numbers.
struct EbcmPrediction {
  double alpha = 0.0;
  PhaseProtocol protocol = PhaseProtocol::random_per_photon();
  std::vector<double> phi0;
  std::array<std::vector<double>, 3> click_prob;  // indexed by Context
  std::array<std::vector<std::int64_t>, 3> counts;
  std::array<std::vector<std::int64_t>, 3> trials;
  std::vector<std::uint64_t> replica_seeds;

  const std::vector<double>& probability(Context c) const {
    return click_prob[static_cast<std::size_t>(c)];
  }
};

EbcmPrediction predict_ebcm(const ExperimentConfig& config, double alpha,
                            const PhaseProtocol& protocol, int replicas, int threads = 1);

/// Quantum-simulated stand-in for measured data: one record per phi0 with
/// Poisson counts. For random protocols the trial split between x = -1 and
/// x = +1 is binomial and each context is drawn from its fixed-x fringe.
std::vector<FringeRecord> simulate_qm_reference(const ExperimentConfig& config,
                                                const PhaseProtocol& protocol,
                                                std::uint64_t seed);

/// Largest absolute difference over the grid between the fitted EBCM fringe
/// (click probability per trial) and the quantum fringe for `context`.
double deviation_from_qm(const EbcmPrediction& prediction, Context context,
                         const ExperimentConfig& config);

struct AlphaScanRow {
  double alpha = 0.0;  // NaN for the quantum baseline
  Context context = Context::x_minus;
  ChiSquareReport report;
};

struct AlphaScanResult {
  std::vector<AlphaScanRow> rows;  // per alpha: x=-1, x=+1; then the QM baseline rows
  int replicas = 0;
  std::vector<std::uint64_t> replica_seeds;
};

/// Reduced chi-square of random-x reference data (conditioned on x) against
/// the EBCM per-photon-switching prediction at each alpha, plus a QM
/// baseline row per context. Expected counts use each reference point's own
/// trial tally; n_free = 0 because every curve is fully specified.
/// Throws std::domain_error for an empty grid or alpha outside (0, 1].
AlphaScanResult alpha_scan(const ExperimentConfig& config, std::span<const double> alpha_grid,
                           std::span<const FringeRecord> reference, int replicas,
                           int threads = 1);

/// Chi-square of the reference against the EBCM prediction in one context.
ChiSquareReport compare_to_prediction(std::span<const FringeRecord> reference,
                                      const EbcmPrediction& prediction, Context context);

/// Chi-square of the reference against the quantum fringe in one context.
ChiSquareReport compare_to_qm(std::span<const FringeRecord> reference, Context context,
                              const ExperimentConfig& config);

}  // namespace ebcm

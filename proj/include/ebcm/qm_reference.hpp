#pragma once

#include <span>
#include <vector>

#include "ebcm/acquisition.hpp"
#include "ebcm/instruments.hpp"
#include "ebcm/protocol.hpp"

namespace ebcm {

/// Quantum prediction for the monitored port: (1 + cos delta_phi) / 2.
double qm_prob(double delta_phi);

/// Closed-form fringe A * (1 + V * cos(frequency * phi0 + phase_offset)),
/// expressed as a click probability per heralded trial.
struct QmFringeModel {
  double amplitude = 0.5;
  double visibility = 1.0;
  double phase_offset = 0.0;
  double frequency = 1.0;  // 1 + beta

  double operator()(double phi0) const;
};

/// Quantum fringe for a protocol. Fixed x gives qm_prob((1+beta)(phi0 - phi1(x)));
/// the random protocols give the equal mixture of both fixed fringes
/// because the quantum result ignores the x sequence. The detector scales
/// the fringe by its efficiency and adds the dark probability on top.
QmFringeModel qm_model(const PhaseProtocol& protocol, double beta, const DetectorModel& det);

/// Quantum fringe restricted to one context. For a random protocol the
/// x = -1 and x = +1 contexts are the fixed-x fringes.
QmFringeModel qm_model(const PhaseProtocol& protocol, Context context, double beta,
                       const DetectorModel& det);

/// qm_model evaluated on a phi0 grid.
std::vector<double> qm_fringe(std::span<const double> phi0_grid, const PhaseProtocol& protocol,
                              double beta, const DetectorModel& det);

/// Expected monitored-port counts for each record given its own trial tally.
std::vector<double> qm_expected_counts(std::span<const FringeRecord> records, Context context,
                                       double beta, const DetectorModel& det);

}  // namespace ebcm

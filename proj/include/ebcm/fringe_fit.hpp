#pragma once

#include <array>
#include <span>
#include <vector>

#include "ebcm/acquisition.hpp"
#include "ebcm/instruments.hpp"

namespace ebcm {

/// One fringe sample: counts at phi0 with their 1-sigma uncertainty.
struct FringePoint {
  double phi0 = 0.0;
  double counts = 0.0;
  double sigma = 1.0;
};

/// Sums records with equal phi0 into one point per phase, in ascending phi0.
///
/// Uncertainties are Poisson, sqrt(max(counts, 1)). When the summed trial
/// tallies differ between phases (per-x contexts of random protocols), the
/// counts and sigmas are rescaled to the mean trial tally so that the fit
/// sees heralded-count probabilities on a common scale.
std::vector<FringePoint> fringe_points(std::span<const FringeRecord> records,
                                       Context context = Context::all);

/// Weighted least-squares fit of A * (1 + V * cos(phi0 + phase_offset)).
struct FitResult {
  double amplitude = 0.0;
  double visibility = 0.0;
  double phase_offset = 0.0;  // wrapped into (-pi, pi]
  std::array<double, 3> sigma{0.0, 0.0, 0.0};  // A, V, phase; 1-sigma
  double residual_sum = 0.0;  // chi-square at the optimum
  int n_points = 0;
  int iterations = 0;
  bool converged = false;
  bool phase_identifiable = true;  // false when V is compatible with 0
  bool visibility_above_one = false;  // V - 1 exceeds 3 sigma_V

  double operator()(double phi0) const;
};

/// Levenberg-Marquardt from a discrete-Fourier initial guess; stops when
/// the chi-square gradient norm drops below 1e-10 (or chi-square cannot be
/// lowered any further at working precision), giving up after 200
/// iterations with `converged == false` and the last iterate.
///
/// Throws std::invalid_argument unless there are at least six distinct
/// phases spanning at least pi.
FitResult fit_fringe(std::span<const FringePoint> points);
FitResult fit_fringe(std::span<const FringeRecord> records, Context context = Context::all);

/// Wraps an angle into (-pi, pi].
double wrap_phase(double phi);

struct PhaseShift {
  double shift = 0.0;
  double sigma = 0.0;
};

/// a.phase_offset - b.phase_offset wrapped into (-pi, pi], with the two fit
/// uncertainties added in quadrature. Throws FitFailure if either fit did
/// not converge.
PhaseShift phase_shift_between(const FitResult& a, const FitResult& b);

/// Removes the expected dark counts (trials * dark_prob_per_gate, rounded)
/// from the monitored port, flooring at zero. Per-x tallies are corrected
/// the same way with their own trial counts.
FringeRecord subtract_darks(const FringeRecord& record, const DetectorModel& det);

}  // namespace ebcm

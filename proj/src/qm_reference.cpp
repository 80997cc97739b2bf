#include "ebcm/qm_reference.hpp"

#include <cmath>
#include <numbers>

namespace ebcm {

double qm_prob(double delta_phi) { return 0.5 * (1.0 + std::cos(delta_phi)); }

double QmFringeModel::operator()(double phi0) const {
  return amplitude * (1.0 + visibility * std::cos(frequency * phi0 + phase_offset));
}

namespace {

// Detector folding: click probability = efficiency * P + dark, with
// P = (1 + v cos(k phi0 + theta)) / 2.
QmFringeModel fold(double v, double theta, double k, const DetectorModel& det) {
  const double flat = 0.5 * det.efficiency + det.dark_prob_per_gate;
  QmFringeModel m;
  m.amplitude = flat;
  m.visibility = flat > 0.0 ? 0.5 * det.efficiency * v / flat : 0.0;
  m.phase_offset = theta;
  m.frequency = k;
  return m;
}

}  // namespace

QmFringeModel qm_model(const PhaseProtocol& protocol, double beta, const DetectorModel& det) {
  const double k = 1.0 + beta;
  if (protocol.kind() == PhaseProtocol::Kind::fixed) {
    return fold(1.0, -k * phi1_of(protocol.fixed_x()), k, det);
  }
  // cos(k phi0) + cos(k phi0 - k pi/2) = 2 cos(k pi/4) cos(k phi0 - k pi/4)
  const double half = k * std::numbers::pi / 4.0;
  double v = std::cos(half);
  double theta = -half;
  if (v < 0.0) {
    v = -v;
    theta += std::numbers::pi;
  }
  return fold(v, theta, k, det);
}

QmFringeModel qm_model(const PhaseProtocol& protocol, Context context, double beta,
                       const DetectorModel& det) {
  switch (context) {
    case Context::all:
      return qm_model(protocol, beta, det);
    case Context::x_minus:
      return qm_model(PhaseProtocol::fixed(-1), beta, det);
    case Context::x_plus:
      return qm_model(PhaseProtocol::fixed(1), beta, det);
  }
  return {};
}

std::vector<double> qm_fringe(std::span<const double> phi0_grid, const PhaseProtocol& protocol,
                              double beta, const DetectorModel& det) {
  const QmFringeModel m = qm_model(protocol, beta, det);
  std::vector<double> out;
  out.reserve(phi0_grid.size());
  for (double phi0 : phi0_grid) out.push_back(m(phi0));
  return out;
}

std::vector<double> qm_expected_counts(std::span<const FringeRecord> records, Context context,
                                       double beta, const DetectorModel& det) {
  std::vector<double> out;
  out.reserve(records.size());
  for (const auto& r : records) {
    const QmFringeModel m = qm_model(r.protocol, context, beta, det);
    out.push_back(static_cast<double>(trials_in(r, context)) * m(r.phi0));
  }
  return out;
}

}  // namespace ebcm

#pragma once

#include <cstdint>

#include "ebcm/dlm.hpp"
#include "ebcm/messenger.hpp"
#include "ebcm/rng.hpp"

namespace ebcm {

/// Largest modulator crosstalk fraction accepted.
inline constexpr double kMaxCrosstalk = 0.2;

struct ArmPhases {
  double a = 0.0;
  double b = 0.0;
};

/// Phases actually seen by the two arms when the phi0 modulator (arm A) and
/// the phi1 modulator (arm B) each leak -beta of their setting into the
/// opposite arm. Throws std::domain_error unless 0 <= beta <= 0.2.
ArmPhases effective_arm_phases(double phi0, double phi1, double beta);

/// Mach-Zehnder interferometer built from two independent memory
/// beamsplitters. BS1 output port 0 feeds arm A into BS2 input port 0,
/// BS1 output port 1 feeds arm B into BS2 input port 1.
///
/// The two beamsplitters never exchange state; all information flows
/// through the messengers. Instances are strictly sequential.
class Interferometer {
 public:
  Interferometer(double alpha, double beta, RegisterMode mode = RegisterMode::overwrite);

  /// Sets both modulators; crosstalk is applied here.
  void set_modulators(double phi0, double phi1);
  void set_arm_phases(ArmPhases phases);

  /// Runs one messenger entering BS1 at `input` through the whole device
  /// and returns the BS2 output port. Consumes two deviates from `rng`.
  Port traverse(Port input, Rng& rng);

  /// Same as `traverse` with explicit deviates for the two routings.
  Port traverse(Port input, double u1, double u2);

  const DlmState& bs1() const { return bs1_; }
  const DlmState& bs2() const { return bs2_; }
  DlmState& bs1() { return bs1_; }
  DlmState& bs2() { return bs2_; }
  ArmPhases arm_phases() const { return arms_; }
  double beta() const { return beta_; }
  /// Messengers processed since construction or the last reset.
  std::int64_t traversals() const { return traversals_; }

  /// Returns both beamsplitters to their initial state.
  void reset();

 private:
  DlmState bs1_;
  DlmState bs2_;
  ArmPhases arms_{};
  std::complex<double> rotor_a_{1.0, 0.0};
  std::complex<double> rotor_b_{1.0, 0.0};
  double beta_;
  std::int64_t traversals_ = 0;
};

}  // namespace ebcm

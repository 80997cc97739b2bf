#include "ebcm/interferometer.hpp"

#include <stdexcept>
#include <string>

namespace ebcm {

namespace {

void check_beta(double beta) {
  if (!(beta >= 0.0 && beta <= kMaxCrosstalk)) {
    throw std::domain_error("beta must lie in [0, 0.2], got " + std::to_string(beta));
  }
}

}  // namespace

ArmPhases effective_arm_phases(double phi0, double phi1, double beta) {
  check_beta(beta);
  return {phi0 - beta * phi1, phi1 - beta * phi0};
}

Interferometer::Interferometer(double alpha, double beta, RegisterMode mode)
    : bs1_(alpha, mode), bs2_(alpha, mode), beta_(beta) {
  check_beta(beta);
}

void Interferometer::set_modulators(double phi0, double phi1) {
  set_arm_phases(effective_arm_phases(phi0, phi1, beta_));
}

void Interferometer::set_arm_phases(ArmPhases phases) {
  arms_ = phases;
  rotor_a_ = std::polar(1.0, phases.a);
  rotor_b_ = std::polar(1.0, phases.b);
}

Port Interferometer::traverse(Port input, Rng& rng) {
  const double u1 = rng.uniform();
  const double u2 = rng.uniform();
  return traverse(input, u1, u2);
}

Port Interferometer::traverse(Port input, double u1, double u2) {
  ++traversals_;
  Messenger msg{{1.0, 0.0}, input};
  bs1_.update(msg);
  Routing first = bs1_.route(u1);

  // Same as phase_shift with the arm phase, using the cached rotor.
  Messenger mid = first.message;
  mid.phase *= first.port == Port::zero ? rotor_a_ : rotor_b_;

  bs2_.update(mid);
  return bs2_.route(u2).port;
}

void Interferometer::reset() {
  bs1_ = DlmState(bs1_.alpha(), bs1_.register_mode());
  bs2_ = DlmState(bs2_.alpha(), bs2_.register_mode());
  traversals_ = 0;
}

}  // namespace ebcm

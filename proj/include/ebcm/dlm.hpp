#pragma once

#include <array>
#include <complex>

#include "ebcm/messenger.hpp"

namespace ebcm {

/// How a beamsplitter stores the phase of an arriving messenger.
///
/// `overwrite` replaces the arrival-port register with the incoming phase.
/// `averaged` is experimental: the register becomes the normalized
/// alpha-weighted average of its old value and the incoming phase.
enum class RegisterMode { overwrite, averaged };

/// Result of routing a messenger through a beamsplitter.
struct Routing {
  Port port = Port::zero;
  Messenger message;
  double p0 = 0.5;  // probability that was used for the port 0 decision
};

/// Adaptive internal state of one memory beamsplitter.
///
/// Holds the port-intensity estimates x0, x1 (non-negative, summing to one)
/// and one phase register per input port. Each arrival moves the intensity
/// estimates towards the arrival port at a rate set by `alpha`; alpha = 1
/// never adapts, alpha = 0 forgets the past instantly.
class DlmState {
 public:
  /// Symmetric initial state: x = (0.5, 0.5), both registers at phase 0.
  /// Throws std::domain_error unless 0 <= alpha <= 1.
  explicit DlmState(double alpha, RegisterMode mode = RegisterMode::overwrite);

  double alpha() const { return alpha_; }
  RegisterMode register_mode() const { return mode_; }
  const std::array<double, 2>& intensity() const { return x_; }
  const std::array<std::complex<double>, 2>& registers() const { return y_; }

  /// Learning step for a messenger arriving at `msg.port`.
  void update(const Messenger& msg);

  /// Output amplitudes (w0, w1) of the 50/50 mixing applied to the stored state.
  std::array<std::complex<double>, 2> output_amplitudes() const;

  /// Probability of leaving through port 0 for the current state.
  double port0_probability() const;

  /// Picks the output port with deviate `u` in [0, 1) and builds the
  /// outgoing messenger. `update` must already have been applied for this
  /// arrival.
  Routing route(double u) const;

  /// Direct state assignment, used by tests and sensitivity studies.
  /// Throws std::domain_error if the state would break an invariant.
  void set_state(const std::array<double, 2>& x,
                 const std::array<std::complex<double>, 2>& registers);

 private:
  double alpha_;
  RegisterMode mode_;
  std::array<double, 2> x_{0.5, 0.5};
  std::array<std::complex<double>, 2> y_{std::complex<double>{1.0, 0.0},
                                         std::complex<double>{1.0, 0.0}};
};

}  // namespace ebcm

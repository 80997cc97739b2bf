#include "ebcm/dlm.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>
#include <string>

namespace ebcm {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr std::complex<double> kI{0.0, 1.0};

std::complex<double> unit(std::complex<double> z) { return z / std::sqrt(std::norm(z)); }

}  // namespace

Messenger phase_shift(const Messenger& msg, double phi) {
  Messenger out = msg;
  out.phase = unit(msg.phase * std::polar(1.0, phi));
  return out;
}

DlmState::DlmState(double alpha, RegisterMode mode) : alpha_(alpha), mode_(mode) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw std::domain_error("alpha must lie in [0, 1], got " + std::to_string(alpha));
  }
}

void DlmState::update(const Messenger& msg) {
  const int k = index(msg.port);
  const int j = 1 - k;
  // Writing the arrival component as the complement keeps x0 + x1 == 1
  // to a single rounding no matter how many updates accumulate.
  x_[j] = alpha_ * x_[j];
  x_[k] = 1.0 - x_[j];

  if (mode_ == RegisterMode::overwrite) {
    y_[k] = msg.phase;
  } else {
    const std::complex<double> mixed = alpha_ * y_[k] + (1.0 - alpha_) * msg.phase;
    y_[k] = std::abs(mixed) > 0.0 ? unit(mixed) : msg.phase;
  }
}

std::array<std::complex<double>, 2> DlmState::output_amplitudes() const {
  const std::complex<double> z0 = std::sqrt(x_[0]) * y_[0];
  const std::complex<double> z1 = std::sqrt(x_[1]) * y_[1];
  return {(z0 + kI * z1) * kInvSqrt2, (kI * z0 + z1) * kInvSqrt2};
}

double DlmState::port0_probability() const {
  const auto w = output_amplitudes();
  const double n0 = std::norm(w[0]);
  const double total = n0 + std::norm(w[1]);
  assert(std::abs(total - 1.0) < 1e-9);
  return n0 / total;
}

Routing DlmState::route(double u) const {
  const auto w = output_amplitudes();
  const double n0 = std::norm(w[0]);
  const double total = n0 + std::norm(w[1]);
  assert(std::abs(total - 1.0) < 1e-9);

  Routing r;
  r.p0 = n0 / total;
  r.port = u < r.p0 ? Port::zero : Port::one;
  const std::complex<double> chosen = w[index(r.port)];
  // u < p0 can only pick port 0 when |w0| > 0, and u >= p0 with u < 1
  // can only pick port 1 when |w1| > 0.
  assert(std::abs(chosen) > 0.0);
  r.message.phase = unit(chosen);
  r.message.port = r.port;
  return r;
}

void DlmState::set_state(const std::array<double, 2>& x,
                         const std::array<std::complex<double>, 2>& registers) {
  if (x[0] < 0.0 || x[1] < 0.0 || std::abs(x[0] + x[1] - 1.0) > 1e-12) {
    throw std::domain_error("intensity estimates must be non-negative and sum to 1");
  }
  for (const auto& y : registers) {
    if (std::abs(std::abs(y) - 1.0) > 1e-12) {
      throw std::domain_error("phase registers must have unit norm");
    }
  }
  x_ = x;
  y_ = registers;
}

}  // namespace ebcm

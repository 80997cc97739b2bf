#pragma once

#include <complex>
#include <cstdint>

namespace ebcm {

/// Beamsplitter port label. Input and output ports share the same two labels.
enum class Port : std::uint8_t { zero = 0, one = 1 };

constexpr int index(Port p) { return static_cast<int>(p); }
constexpr Port other(Port p) { return p == Port::zero ? Port::one : Port::zero; }
constexpr Port port_from_index(int i) { return i == 0 ? Port::zero : Port::one; }

/// A single photon event. The phase is carried as a unit complex number
/// (cos psi, sin psi); the port is where the messenger currently sits.
struct Messenger {
  std::complex<double> phase{1.0, 0.0};
  Port port = Port::zero;
};

/// Rotates the messenger's phase vector by `phi` radians.
Messenger phase_shift(const Messenger& msg, double phi);

}  // namespace ebcm

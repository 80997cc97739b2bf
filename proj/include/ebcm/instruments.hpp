#pragma once

namespace ebcm {

/// Heralded single-photon source. Only the output noise fraction has a
/// simulated effect; the timing fields are carried as run metadata.
struct SourceModel {
  double onf = 0.0047;  // probability of one unheralded photon per trial
  bool g2_flag = false;  // multi-photon emission, not modelled
  double switch_window_ns = 4.0;
  double dead_time_us = 20.0;

  /// Throws ConfigError naming the offending field.
  void validate() const;
};

/// Single-photon detector watching output port 0.
struct DetectorModel {
  double efficiency = 1.0;
  double dark_prob_per_gate = 0.0;
  double gate_window_ns = 50.0;

  void validate() const;
};

}  // namespace ebcm

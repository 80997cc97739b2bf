#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "ebcm/rng.hpp"

namespace ebcm {

/// Switched phase for the random variable x: x = -1 -> 0, x = +1 -> pi/2.
double phi1_of(int x);

/// Rule assigning x to each heralded trial.
class PhaseProtocol {
 public:
  enum class Kind { fixed, random_per_photon, random_per_n };

  /// Throws std::domain_error unless x is -1 or +1.
  static PhaseProtocol fixed(int x);
  static PhaseProtocol random_per_photon();
  /// Throws std::domain_error unless n >= 1.
  static PhaseProtocol random_per_n(int n);

  Kind kind() const { return kind_; }
  int fixed_x() const { return x_; }
  /// Number of consecutive trials sharing one draw (1 for per-photon).
  int block() const { return n_; }
  bool is_random() const { return kind_ != Kind::fixed; }

  /// Stable text tag used in CSV output: "fixed-1", "fixed+1", "random",
  /// "random-per-N".
  std::string tag() const;
  static std::optional<PhaseProtocol> parse(const std::string& tag);

  /// Key used when deriving per-cell seeds. Behaviourally identical
  /// protocols (random-per-1 and random) share a key.
  std::uint64_t seed_key() const;

  friend bool operator==(const PhaseProtocol&, const PhaseProtocol&) = default;

 private:
  PhaseProtocol(Kind kind, int x, int n) : kind_(kind), x_(x), n_(n) {}
  Kind kind_;
  int x_;
  int n_;
};

/// Stateful x source for one protocol. Random protocols draw a fresh fair
/// coin whenever trial_index is a multiple of the block length and hold the
/// previous value otherwise.
class XSequence {
 public:
  explicit XSequence(PhaseProtocol protocol) : protocol_(protocol) {}

  int draw(std::int64_t trial_index, Rng& rng);

 private:
  PhaseProtocol protocol_;
  int held_ = -1;
};

}  // namespace ebcm

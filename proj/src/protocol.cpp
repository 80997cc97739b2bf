#include "ebcm/protocol.hpp"

#include <numbers>
#include <stdexcept>

namespace ebcm {

double phi1_of(int x) { return x == 1 ? std::numbers::pi / 2.0 : 0.0; }

PhaseProtocol PhaseProtocol::fixed(int x) {
  if (x != -1 && x != 1) throw std::domain_error("fixed protocol needs x = -1 or +1");
  return {Kind::fixed, x, 1};
}

PhaseProtocol PhaseProtocol::random_per_photon() { return {Kind::random_per_photon, 0, 1}; }

PhaseProtocol PhaseProtocol::random_per_n(int n) {
  if (n < 1) throw std::domain_error("random-per-N protocol needs N >= 1");
  return {Kind::random_per_n, 0, n};
}

std::string PhaseProtocol::tag() const {
  switch (kind_) {
    case Kind::fixed:
      return x_ < 0 ? "fixed-1" : "fixed+1";
    case Kind::random_per_photon:
      return "random";
    case Kind::random_per_n:
      return "random-per-" + std::to_string(n_);
  }
  return {};
}

std::optional<PhaseProtocol> PhaseProtocol::parse(const std::string& tag) {
  if (tag == "fixed-1") return fixed(-1);
  if (tag == "fixed+1") return fixed(1);
  if (tag == "random") return random_per_photon();
  const std::string prefix = "random-per-";
  if (tag.rfind(prefix, 0) == 0 && tag.size() > prefix.size()) {
    const std::string digits = tag.substr(prefix.size());
    if (digits.find_first_not_of("0123456789") != std::string::npos || digits.size() > 9) {
      return std::nullopt;
    }
    const int n = std::stoi(digits);
    if (n < 1) return std::nullopt;
    return random_per_n(n);
  }
  return std::nullopt;
}

std::uint64_t PhaseProtocol::seed_key() const {
  switch (kind_) {
    case Kind::fixed:
      return x_ < 0 ? 1 : 2;
    case Kind::random_per_photon:
      return 3;
    case Kind::random_per_n:
      return n_ == 1 ? 3 : 0x100 + static_cast<std::uint64_t>(n_);
  }
  return 0;
}

int XSequence::draw(std::int64_t trial_index, Rng& rng) {
  if (protocol_.kind() == PhaseProtocol::Kind::fixed) return protocol_.fixed_x();
  if (trial_index % protocol_.block() == 0) held_ = rng.coin() ? 1 : -1;
  return held_;
}

}  // namespace ebcm

#include <doctest.h>

#include <cmath>
#include <numbers>

#include "ebcm/acquisition.hpp"
#include "ebcm/errors.hpp"
#include "ebcm/fringe_fit.hpp"

using namespace ebcm;
using std::numbers::pi;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig c;
  c.photons_per_set = 400;
  c.sets_per_protocol = 2;
  c.grid.count = 8;
  return c;
}

bool same(const FringeRecord& a, const FringeRecord& b) {
  return a.phi0 == b.phi0 && a.phi0_index == b.phi0_index && a.set_index == b.set_index &&
         a.counts_port0 == b.counts_port0 && a.counts_port1 == b.counts_port1 &&
         a.darks_recorded == b.darks_recorded && a.trials == b.trials && a.seed == b.seed &&
         a.trials_by_x == b.trials_by_x && a.counts_port0_by_x == b.counts_port0_by_x &&
         a.background == b.background;
}

// Fixed-x fringe on a 16-point grid from one persistent device.
std::vector<FringeRecord> fixed_fringe(double efficiency, double dark, std::uint64_t seed) {
  ExperimentConfig c;
  c.protocols = {PhaseProtocol::fixed(-1)};
  c.sets_per_protocol = 1;
  c.photons_per_set = 20000;
  c.burn_in = 5000;
  c.detector.efficiency = efficiency;
  c.detector.dark_prob_per_gate = dark;
  c.master_seed = seed;
  return run_sweep(c);
}

}  // namespace

TEST_SUITE("protocols") {

TEST_CASE("phi1 map") {
  CHECK(phi1_of(-1) == 0.0);
  CHECK(phi1_of(1) == pi / 2);
}

TEST_CASE("protocol tags and seed keys") {
  for (const auto& p : {PhaseProtocol::fixed(-1), PhaseProtocol::fixed(1),
                        PhaseProtocol::random_per_photon(), PhaseProtocol::random_per_n(10)}) {
    const auto back = PhaseProtocol::parse(p.tag());
    REQUIRE(back.has_value());
    CHECK(*back == p);
  }
  CHECK(PhaseProtocol::fixed(-1).tag() == "fixed-1");
  CHECK(PhaseProtocol::fixed(1).tag() == "fixed+1");
  CHECK(PhaseProtocol::random_per_photon().tag() == "random");
  CHECK(PhaseProtocol::random_per_n(10).tag() == "random-per-10");
  CHECK_FALSE(PhaseProtocol::parse("fixed0").has_value());
  CHECK_FALSE(PhaseProtocol::parse("random-per-0").has_value());
  CHECK(PhaseProtocol::random_per_n(1).seed_key() == PhaseProtocol::random_per_photon().seed_key());
  CHECK(PhaseProtocol::random_per_n(2).seed_key() != PhaseProtocol::random_per_n(3).seed_key());
  CHECK_THROWS_AS(PhaseProtocol::fixed(0), std::domain_error);
  CHECK_THROWS_AS(PhaseProtocol::random_per_n(0), std::domain_error);
}

TEST_CASE("draw_x examples") {
  Rng rng(3);
  XSequence fixed(PhaseProtocol::fixed(1));
  for (int t = 0; t < 100; ++t) CHECK(fixed.draw(t, rng) == 1);

  XSequence block(PhaseProtocol::random_per_n(10));
  for (int b = 0; b < 50; ++b) {
    const int first = block.draw(10 * b, rng);
    for (int t = 1; t < 10; ++t) CHECK(block.draw(10 * b + t, rng) == first);
  }

  XSequence per(PhaseProtocol::random_per_photon());
  const int n = 100000;
  long sum = 0;
  for (int t = 0; t < n; ++t) sum += per.draw(t, rng);
  CHECK(std::abs(static_cast<double>(sum) / n) < 4.0 / std::sqrt(n));
}

TEST_CASE("run_point at the constructive extremum") {
  Interferometer ifo(0.99, 0.0);
  Rng rng(8);
  const FringeRecord r = run_point(ifo, PhaseProtocol::fixed(-1), 0.0, 1000000, SourceModel{0.0},
                                   DetectorModel{}, Port::one, rng);
  CHECK(r.trials == 1000000);
  CHECK(r.counts_port0 + r.counts_port1 == r.trials);
  CHECK(std::abs(static_cast<double>(r.counts_port0) / r.trials - 1.0) < 0.005);
}

TEST_CASE("background accounting") {
  SUBCASE("onf = 0: one device update per trial") {
    Interferometer ifo(0.99, 0.0);
    Rng rng(1);
    const auto r = run_point(ifo, PhaseProtocol::random_per_photon(), 1.0, 20000, SourceModel{0.0},
                             DetectorModel{}, Port::one, rng);
    CHECK(r.background == 0);
    CHECK(ifo.traversals() == r.trials);
  }
  SUBCASE("onf > 0: background trains the device but is never counted") {
    Interferometer ifo(0.99, 0.0);
    Rng rng(2);
    const auto r = run_point(ifo, PhaseProtocol::random_per_photon(), 1.0, 100000,
                             SourceModel{0.05}, DetectorModel{}, Port::one, rng);
    CHECK(ifo.traversals() == r.trials + r.background);
    CHECK(r.counts_port0 + r.counts_port1 == r.trials);
    const double sd = std::sqrt(100000 * 0.05 * 0.95);
    CHECK(std::abs(static_cast<double>(r.background) - 5000.0) < 4.0 * sd);
  }
}

TEST_CASE("detector linearity at half efficiency") {
  // The detection deviate is drawn on every trial, so the same seed gives
  // the same port sequence and the counts thin binomially.
  for (int i = 0; i < 8; ++i) {
    const double phi0 = 2.0 * pi * i / 8.0;
    auto run = [&](double eff) {
      Interferometer ifo(0.99, 0.0);
      Rng rng(derive_seed(4, {static_cast<std::uint64_t>(i)}));
      return run_point(ifo, PhaseProtocol::random_per_photon(), phi0, 20000, SourceModel{},
                       DetectorModel{eff}, Port::one, rng);
    };
    const auto full = run(1.0);
    const auto half = run(0.5);
    const double c = static_cast<double>(full.counts_port0);
    CAPTURE(phi0);
    CHECK(std::abs(static_cast<double>(half.counts_port0) - 0.5 * c) <= 4.0 * std::sqrt(0.25 * c) + 1.0);
  }
}

TEST_CASE("record count invariant") {
  ExperimentConfig c = small_config();
  c.detector.efficiency = 0.6;
  c.detector.dark_prob_per_gate = 0.05;
  c.source.onf = 0.02;
  for (const auto& r : run_sweep(c)) {
    CHECK(r.counts_port0 + r.counts_port1 <= r.trials + r.darks_recorded);
    CHECK(r.counts_port0 >= 0);
    CHECK(r.counts_port1 >= 0);
    CHECK(r.trials_by_x[0] + r.trials_by_x[1] == r.trials);
    CHECK(r.counts_port0_by_x[0] + r.counts_port0_by_x[1] == r.counts_port0);
  }
}

TEST_CASE("efficiency does not move the fringe phase") {
  const auto f1 = fit_fringe(fixed_fringe(1.0, 0.0, 11), Context::all);
  const auto f01 = fit_fringe(fixed_fringe(0.1, 0.0, 11), Context::all);
  REQUIRE(f1.converged);
  REQUIRE(f01.converged);
  const auto s = phase_shift_between(f1, f01);
  CHECK(std::abs(s.shift) < 2.0 * s.sigma);
  CHECK(f01.amplitude == doctest::Approx(0.1 * f1.amplitude).epsilon(0.05));
}

TEST_CASE("dark counts lower the visibility but keep the phase") {
  const auto clean = fit_fringe(fixed_fringe(1.0, 0.0, 12), Context::all);
  const auto dark = fit_fringe(fixed_fringe(1.0, 0.05, 12), Context::all);
  REQUIRE(clean.converged);
  REQUIRE(dark.converged);
  CHECK(dark.visibility < clean.visibility);
  const auto s = phase_shift_between(clean, dark);
  CHECK(std::abs(s.shift) < 2.0 * s.sigma);
}

TEST_CASE("default schedule") {
  ExperimentConfig c;
  c.photons_per_set = 50;
  const auto recs = run_sweep(c);
  REQUIRE(recs.size() == 480);
  const auto phis = c.grid.points();
  std::size_t k = 0;
  for (int i = 0; i < 16; ++i) {
    for (const char* tag : {"fixed-1", "fixed+1", "random"}) {
      for (int s = 0; s < 10; ++s, ++k) {
        CHECK(recs[k].phi0_index == i);
        CHECK(recs[k].phi0 == phis[static_cast<std::size_t>(i)]);
        CHECK(recs[k].protocol.tag() == tag);
        CHECK(recs[k].set_index == s);
        CHECK(recs[k].seed == cell_seed(c.master_seed, i, recs[k].protocol, s));
      }
    }
  }
}

TEST_CASE("sweep determinism") {
  const auto c = small_config();
  const auto a = run_sweep(c);
  const auto b = run_sweep(c);
  REQUIRE(a.size() == b.size());
  for (std::size_t k = 0; k < a.size(); ++k) CHECK(same(a[k], b[k]));

  auto other = c;
  other.master_seed += 1;
  const auto d = run_sweep(other);
  bool any_diff = false;
  for (std::size_t k = 0; k < a.size(); ++k) any_diff = any_diff || !same(a[k], d[k]);
  CHECK(any_diff);
}

TEST_CASE("per-cell streams are isolated without persistence") {
  auto c = small_config();
  c.persistence = false;
  c.burn_in = 100;
  const auto full = run_sweep(c);

  auto reduced = c;
  reduced.protocols = {PhaseProtocol::random_per_photon()};
  const auto part = run_sweep(reduced);
  std::size_t matched = 0;
  for (const auto& r : part) {
    for (const auto& f : full) {
      if (f.protocol == r.protocol && f.phi0_index == r.phi0_index && f.set_index == r.set_index) {
        CHECK(same(f, r));
        ++matched;
      }
    }
  }
  CHECK(matched == part.size());

  const auto threaded = run_sweep(c, 4);
  REQUIRE(threaded.size() == full.size());
  for (std::size_t k = 0; k < full.size(); ++k) CHECK(same(full[k], threaded[k]));
}

TEST_CASE("random-per-1 behaves exactly like per-photon random") {
  auto a = small_config();
  a.protocols = {PhaseProtocol::random_per_photon()};
  auto b = a;
  b.protocols = {PhaseProtocol::random_per_n(1)};
  const auto ra = run_sweep(a);
  const auto rb = run_sweep(b);
  REQUIRE(ra.size() == rb.size());
  for (std::size_t k = 0; k < ra.size(); ++k) CHECK(same(ra[k], rb[k]));
}

TEST_CASE("switch comparison builds both fringes") {
  auto c = small_config();
  const auto cmp = run_switch_rate_comparison(c, 10);
  CHECK(cmp.per_photon.size() == 16);
  CHECK(cmp.per_block.size() == 16);
  CHECK(cmp.per_photon.front().protocol.tag() == "random");
  CHECK(cmp.per_block.front().protocol.tag() == "random-per-10");
}

TEST_CASE("config validation names the key") {
  auto expect_key = [](ExperimentConfig c, const std::string& key) {
    try {
      c.validate();
      FAIL("no error for " << key);
    } catch (const ConfigError& e) {
      CHECK(e.key() == key);
    }
  };
  ExperimentConfig c;
  CHECK_NOTHROW(c.validate());
  auto bad = c;
  bad.alpha = 1.5;
  expect_key(bad, "alpha");
  bad = c;
  bad.beta = 0.3;
  expect_key(bad, "beta");
  bad = c;
  bad.grid.count = 0;
  expect_key(bad, "phi0_grid.count");
  bad = c;
  bad.detector.efficiency = 0.0;
  expect_key(bad, "detector.efficiency");
  bad = c;
  bad.detector.dark_prob_per_gate = 0.2;
  expect_key(bad, "detector.dark_prob_per_gate");
  bad = c;
  bad.source.onf = -0.1;
  expect_key(bad, "source.onf");
  bad = c;
  bad.photons_per_set = 0;
  expect_key(bad, "photons_per_set");
}

}  // TEST_SUITE

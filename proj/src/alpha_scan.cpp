#include "ebcm/alpha_scan.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

#include "ebcm/fringe_fit.hpp"
#include "ebcm/parallel.hpp"
#include "ebcm/qm_reference.hpp"

namespace ebcm {

namespace {

constexpr std::array<Context, 3> kContexts{Context::all, Context::x_minus, Context::x_plus};

std::size_t slot(Context c) { return static_cast<std::size_t>(c); }

std::string ebcm_tag(double alpha) {
  std::ostringstream os;
  os << "EBCM(" << alpha << ")";
  return os.str();
}

// Reference records summed per phi0 index, ordered by index.
std::vector<FringeRecord> per_phase(std::span<const FringeRecord> records) {
  std::map<int, FringeRecord> sums;
  for (const auto& r : records) {
    auto [it, fresh] = sums.try_emplace(r.phi0_index, r);
    if (fresh) continue;
    auto& s = it->second;
    s.counts_port0 += r.counts_port0;
    s.counts_port1 += r.counts_port1;
    s.darks_recorded += r.darks_recorded;
    s.trials += r.trials;
    for (int k = 0; k < 2; ++k) {
      s.trials_by_x[k] += r.trials_by_x[k];
      s.counts_port0_by_x[k] += r.counts_port0_by_x[k];
    }
  }
  std::vector<FringeRecord> out;
  for (auto& [i, r] : sums) out.push_back(r);
  return out;
}

}  // namespace

EbcmPrediction predict_ebcm(const ExperimentConfig& config, double alpha,
                            const PhaseProtocol& protocol, int replicas, int threads) {
  if (replicas < 1) throw std::domain_error("prediction needs at least one replica");
  ExperimentConfig cfg = config;
  cfg.alpha = alpha;
  cfg.validate();

  EbcmPrediction pred;
  pred.alpha = alpha;
  pred.protocol = protocol;
  pred.phi0 = cfg.grid.points();
  const std::size_t n = pred.phi0.size();
  for (auto c : kContexts) {
    pred.counts[slot(c)].assign(n, 0);
    pred.trials[slot(c)].assign(n, 0);
  }
  for (int r = 0; r < replicas; ++r) {
    pred.replica_seeds.push_back(derive_seed(
        cfg.master_seed,
        {static_cast<std::uint64_t>(SeedDomain::replica), static_cast<std::uint64_t>(r)}));
  }

  std::vector<std::vector<FringeRecord>> per_replica(static_cast<std::size_t>(replicas));
  parallel_for(per_replica.size(), threads, [&](std::size_t r) {
    const std::uint64_t seed = pred.replica_seeds[r];
    Interferometer ifo(alpha, cfg.beta, cfg.register_mode);
    if (cfg.burn_in > 0) {
      Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(SeedDomain::burn_in)}));
      run_point(ifo, protocol, pred.phi0.front(), cfg.burn_in, cfg.source, cfg.detector,
                cfg.input_port, rng);
    }
    auto& recs = per_replica[r];
    for (std::size_t i = 0; i < n; ++i) {
      Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(SeedDomain::cell), i}));
      recs.push_back(run_point(ifo, protocol, pred.phi0[i], cfg.photons_per_set, cfg.source,
                               cfg.detector, cfg.input_port, rng));
    }
  });

  for (const auto& recs : per_replica) {
    for (std::size_t i = 0; i < n; ++i) {
      for (auto c : kContexts) {
        pred.counts[slot(c)][i] += port0_in(recs[i], c);
        pred.trials[slot(c)][i] += trials_in(recs[i], c);
      }
    }
  }
  for (auto c : kContexts) {
    auto& p = pred.click_prob[slot(c)];
    p.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto t = pred.trials[slot(c)][i];
      p[i] = t > 0 ? static_cast<double>(pred.counts[slot(c)][i]) / static_cast<double>(t)
                   : std::numeric_limits<double>::quiet_NaN();
    }
  }
  return pred;
}

std::vector<FringeRecord> simulate_qm_reference(const ExperimentConfig& config,
                                                const PhaseProtocol& protocol,
                                                std::uint64_t seed) {
  config.validate();
  const auto phis = config.grid.points();
  const auto& det = config.detector;
  std::vector<FringeRecord> out;
  for (std::size_t i = 0; i < phis.size(); ++i) {
    Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(SeedDomain::reference), i,
                               protocol.seed_key()}));
    FringeRecord rec;
    rec.phi0 = phis[i];
    rec.phi0_index = static_cast<int>(i);
    rec.protocol = protocol;
    rec.trials = config.photons_per_set;
    rec.seed = seed;

    std::array<std::int64_t, 2> split{0, 0};
    if (protocol.is_random()) {
      std::binomial_distribution<std::int64_t> coin(rec.trials, 0.5);
      split[1] = coin(rng);
      split[0] = rec.trials - split[1];
    } else {
      split[static_cast<std::size_t>(x_slot(protocol.fixed_x()))] = rec.trials;
    }

    for (int k = 0; k < 2; ++k) {
      const auto trials = static_cast<double>(split[static_cast<std::size_t>(k)]);
      rec.trials_by_x[k] = split[static_cast<std::size_t>(k)];
      if (trials == 0.0) continue;
      const int x = k == 0 ? -1 : 1;
      const double p = qm_prob((1.0 + config.beta) * (rec.phi0 - phi1_of(x)));
      const auto draw = [&rng](double mean) {
        return mean > 0.0 ? std::poisson_distribution<std::int64_t>(mean)(rng) : std::int64_t{0};
      };
      const std::int64_t signal = draw(trials * det.efficiency * p);
      const std::int64_t darks = draw(trials * det.dark_prob_per_gate);
      rec.counts_port1 += draw(trials * det.efficiency * (1.0 - p));
      rec.counts_port0_by_x[k] = signal + darks;
      rec.counts_port0 += signal + darks;
      rec.darks_recorded += darks;
    }
    out.push_back(rec);
  }
  return out;
}

double deviation_from_qm(const EbcmPrediction& prediction, Context context,
                         const ExperimentConfig& config) {
  std::vector<FringeRecord> recs;
  for (std::size_t i = 0; i < prediction.phi0.size(); ++i) {
    FringeRecord r;
    r.phi0 = prediction.phi0[i];
    r.phi0_index = static_cast<int>(i);
    r.trials = prediction.trials[slot(context)][i];
    r.counts_port0 = prediction.counts[slot(context)][i];
    recs.push_back(r);
  }
  const auto pts = fringe_points(recs, Context::all);
  double mean_trials = 0.0;
  for (const auto& r : recs) mean_trials += static_cast<double>(r.trials);
  mean_trials /= static_cast<double>(recs.size());

  const FitResult fit = fit_fringe(pts);
  const QmFringeModel qm = qm_model(prediction.protocol, context, config.beta, config.detector);
  double worst = 0.0;
  for (double phi : prediction.phi0) {
    worst = std::max(worst, std::abs(fit(phi) / mean_trials - qm(phi)));
  }
  return worst;
}

ChiSquareReport compare_to_prediction(std::span<const FringeRecord> reference,
                                      const EbcmPrediction& prediction, Context context) {
  const auto ref = per_phase(reference);
  std::vector<double> observed;
  std::vector<double> expected;
  const auto& prob = prediction.probability(context);
  for (const auto& r : ref) {
    if (r.phi0_index < 0 || static_cast<std::size_t>(r.phi0_index) >= prob.size()) {
      throw std::domain_error("reference phase index outside the prediction grid");
    }
    observed.push_back(static_cast<double>(port0_in(r, context)));
    expected.push_back(static_cast<double>(trials_in(r, context)) *
                       prob[static_cast<std::size_t>(r.phi0_index)]);
  }
  return chi2_reduced(observed, expected, 0, ebcm_tag(prediction.alpha));
}

ChiSquareReport compare_to_qm(std::span<const FringeRecord> reference, Context context,
                              const ExperimentConfig& config) {
  const auto ref = per_phase(reference);
  std::vector<double> observed;
  for (const auto& r : ref) observed.push_back(static_cast<double>(port0_in(r, context)));
  const auto expected = qm_expected_counts(ref, context, config.beta, config.detector);
  return chi2_reduced(observed, expected, 0, "QM");
}

AlphaScanResult alpha_scan(const ExperimentConfig& config, std::span<const double> alpha_grid,
                           std::span<const FringeRecord> reference, int replicas, int threads) {
  if (alpha_grid.empty()) throw std::domain_error("alpha grid is empty");
  for (double a : alpha_grid) {
    if (!(a > 0.0 && a <= 1.0)) throw std::domain_error("alpha grid values must lie in (0, 1]");
  }
  std::vector<FringeRecord> random_ref;
  for (const auto& r : reference) {
    if (r.protocol.is_random()) random_ref.push_back(r);
  }
  if (random_ref.empty()) throw std::domain_error("alpha scan needs random-x reference records");

  AlphaScanResult result;
  result.replicas = replicas;
  for (double a : alpha_grid) {
    const auto pred =
        predict_ebcm(config, a, PhaseProtocol::random_per_photon(), replicas, threads);
    if (result.replica_seeds.empty()) result.replica_seeds = pred.replica_seeds;
    for (auto c : {Context::x_minus, Context::x_plus}) {
      result.rows.push_back({a, c, compare_to_prediction(random_ref, pred, c)});
    }
  }
  for (auto c : {Context::x_minus, Context::x_plus}) {
    result.rows.push_back(
        {std::numeric_limits<double>::quiet_NaN(), c, compare_to_qm(random_ref, c, config)});
  }
  return result;
}

}  // namespace ebcm

#include "ebcm/fringe_fit.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <stdexcept>

#include "ebcm/errors.hpp"

namespace ebcm {

namespace {

constexpr int kMaxIterations = 200;
constexpr double kGradientTolerance = 1e-10;

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

double model(const Vec3& p, double phi) { return p[0] * (1.0 + p[1] * std::cos(phi + p[2])); }

double chi_square(std::span<const FringePoint> pts, const Vec3& p) {
  double sum = 0.0;
  for (const auto& pt : pts) {
    const double r = (pt.counts - model(p, pt.phi0)) / pt.sigma;
    sum += r * r;
  }
  return sum;
}

// Normal equations of the weighted problem: H = J^T J, g = J^T r with
// r = (counts - model) / sigma and J = d model / dp / sigma.
void normal_equations(std::span<const FringePoint> pts, const Vec3& p, Mat3& h, Vec3& g) {
  h.setZero();
  g.setZero();
  for (const auto& pt : pts) {
    const double c = std::cos(pt.phi0 + p[2]);
    const double s = std::sin(pt.phi0 + p[2]);
    const Vec3 j = Vec3(1.0 + p[1] * c, p[0] * c, -p[0] * p[1] * s) / pt.sigma;
    const double r = (pt.counts - model(p, pt.phi0)) / pt.sigma;
    h += j * j.transpose();
    g += j * r;
  }
}

void check_points(std::span<const FringePoint> pts) {
  std::vector<double> phis;
  for (const auto& pt : pts) phis.push_back(pt.phi0);
  std::sort(phis.begin(), phis.end());
  phis.erase(std::unique(phis.begin(), phis.end()), phis.end());
  if (phis.size() < 6) {
    throw std::invalid_argument("fringe fit needs at least 6 distinct phi0 points, got " +
                                std::to_string(phis.size()));
  }
  if (phis.back() - phis.front() < std::numbers::pi - 1e-12) {
    throw std::invalid_argument("fringe fit needs phi0 points spanning at least pi");
  }
}

Vec3 fourier_guess(std::span<const FringePoint> pts) {
  double mean = 0.0;
  double cs = 0.0;
  double sn = 0.0;
  for (const auto& pt : pts) {
    mean += pt.counts;
    cs += pt.counts * std::cos(pt.phi0);
    sn += pt.counts * std::sin(pt.phi0);
  }
  const double n = static_cast<double>(pts.size());
  mean /= n;
  cs *= 2.0 / n;
  sn *= 2.0 / n;
  // A V cos(phi + theta) = A V cos(theta) cos(phi) - A V sin(theta) sin(phi)
  const double a = mean != 0.0 ? mean : 1.0;
  return {a, std::hypot(cs, sn) / std::abs(a), std::atan2(-sn, cs)};
}

}  // namespace

std::vector<FringePoint> fringe_points(std::span<const FringeRecord> records, Context context) {
  struct Sum {
    double counts = 0.0;
    double trials = 0.0;
  };
  std::map<double, Sum> by_phase;
  for (const auto& r : records) {
    auto& s = by_phase[r.phi0];
    s.counts += static_cast<double>(port0_in(r, context));
    s.trials += static_cast<double>(trials_in(r, context));
  }

  double mean_trials = 0.0;
  bool uniform = true;
  for (const auto& [phi, s] : by_phase) {
    mean_trials += s.trials;
    uniform = uniform && s.trials == by_phase.begin()->second.trials;
  }
  mean_trials /= static_cast<double>(std::max<std::size_t>(by_phase.size(), 1));

  std::vector<FringePoint> out;
  out.reserve(by_phase.size());
  for (const auto& [phi, s] : by_phase) {
    const double scale = (uniform || s.trials <= 0.0) ? 1.0 : mean_trials / s.trials;
    out.push_back({phi, s.counts * scale, std::sqrt(std::max(s.counts, 1.0)) * scale});
  }
  return out;
}

double FitResult::operator()(double phi0) const {
  return amplitude * (1.0 + visibility * std::cos(phi0 + phase_offset));
}

double wrap_phase(double phi) {
  const double two_pi = 2.0 * std::numbers::pi;
  double w = std::fmod(phi, two_pi);
  if (w <= -std::numbers::pi) w += two_pi;
  if (w > std::numbers::pi) w -= two_pi;
  return w;
}

FitResult fit_fringe(std::span<const FringePoint> points) {
  check_points(points);

  Vec3 p = fourier_guess(points);
  double chi2 = chi_square(points, p);
  double lambda = 1e-3;
  Mat3 h;
  Vec3 g;

  FitResult fit;
  fit.n_points = static_cast<int>(points.size());

  if (!std::isfinite(chi2)) {
    fit.amplitude = p[0];
    fit.visibility = p[1];
    fit.phase_offset = p[2];
    fit.residual_sum = chi2;
    fit.phase_identifiable = false;
    return fit;
  }

  int it = 0;
  for (; it < kMaxIterations; ++it) {
    normal_equations(points, p, h, g);
    if (g.norm() < kGradientTolerance) {
      fit.converged = true;
      break;
    }
    bool improved = false;
    while (lambda < 1e16) {
      Mat3 damped = h;
      damped.diagonal() += lambda * h.diagonal().cwiseMax(1e-300);
      const Vec3 step = damped.ldlt().solve(g);
      const Vec3 trial = p + step;
      const double trial_chi2 = chi_square(points, trial);
      if (std::isfinite(trial_chi2) && trial_chi2 < chi2) {
        p = trial;
        chi2 = trial_chi2;
        lambda = std::max(lambda * 0.1, 1e-12);
        improved = true;
        break;
      }
      lambda *= 10.0;
    }
    if (!improved) {
      // No step lowers chi-square: at the minimum to working precision.
      fit.converged = true;
      break;
    }
  }
  fit.iterations = it;

  if (p[1] < 0.0) {
    p[1] = -p[1];
    p[2] += std::numbers::pi;
  }
  fit.amplitude = p[0];
  fit.visibility = p[1];
  fit.phase_offset = wrap_phase(p[2]);
  fit.residual_sum = chi_square(points, p);

  normal_equations(points, p, h, g);
  const double inf = std::numeric_limits<double>::infinity();
  Eigen::FullPivLU<Mat3> lu(h);
  if (lu.isInvertible() && lu.rcond() > 1e-14) {
    const Mat3 cov = lu.inverse();
    for (int k = 0; k < 3; ++k) fit.sigma[static_cast<std::size_t>(k)] = std::sqrt(std::max(cov(k, k), 0.0));
  } else {
    // Phase column degenerate (V == 0): use the (A, V) block alone.
    const Eigen::Matrix2d cov = h.topLeftCorner<2, 2>().inverse();
    fit.sigma = {std::sqrt(std::max(cov(0, 0), 0.0)), std::sqrt(std::max(cov(1, 1), 0.0)), inf};
  }
  fit.phase_identifiable = std::isfinite(fit.sigma[2]) && fit.visibility > 2.0 * fit.sigma[1];
  fit.visibility_above_one = fit.visibility - 1.0 > 3.0 * fit.sigma[1];
  return fit;
}

FitResult fit_fringe(std::span<const FringeRecord> records, Context context) {
  const auto pts = fringe_points(records, context);
  return fit_fringe(pts);
}

PhaseShift phase_shift_between(const FitResult& a, const FitResult& b) {
  if (!a.converged || !b.converged) throw FitFailure("phase shift needs two converged fits");
  return {wrap_phase(a.phase_offset - b.phase_offset), std::hypot(a.sigma[2], b.sigma[2])};
}

FringeRecord subtract_darks(const FringeRecord& record, const DetectorModel& det) {
  FringeRecord out = record;
  auto reduce = [&](std::int64_t& counts, std::int64_t trials) {
    const auto expected =
        static_cast<std::int64_t>(std::llround(static_cast<double>(trials) * det.dark_prob_per_gate));
    if (expected > counts) {
      out.dark_underflow = true;
      counts = 0;
    } else {
      counts -= expected;
    }
  };
  reduce(out.counts_port0, out.trials);
  reduce(out.counts_port0_by_x[0], out.trials_by_x[0]);
  reduce(out.counts_port0_by_x[1], out.trials_by_x[1]);
  out.darks_subtracted = true;
  return out;
}

}  // namespace ebcm

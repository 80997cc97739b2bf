#pragma once

#include <span>
#include <string>
#include <vector>

namespace ebcm {

struct ChiSquareReport {
  double chi2 = 0.0;
  int dof = 0;
  double reduced_chi2 = 0.0;
  int n_free = 0;
  std::string model_tag;  // "QM" or "EBCM(alpha)"
  std::vector<double> residuals;  // (O - E) / sigma per point
};

/// Pearson chi-square of observed counts against expected counts with
/// Poisson sigma_i = sqrt(max(E_i, 1)); dof = n - n_free.
/// Throws std::domain_error when dof <= 0 or the inputs differ in length.
ChiSquareReport chi2_reduced(std::span<const double> observed, std::span<const double> expected,
                             int n_free, std::string model_tag = "");

}  // namespace ebcm

#include "ebcm/chi_square.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ebcm {

ChiSquareReport chi2_reduced(std::span<const double> observed, std::span<const double> expected,
                             int n_free, std::string model_tag) {
  if (observed.size() != expected.size()) {
    throw std::domain_error("observed and expected series differ in length");
  }
  const int dof = static_cast<int>(observed.size()) - n_free;
  if (dof <= 0) throw std::domain_error("chi-square needs a positive number of degrees of freedom");

  ChiSquareReport rep;
  rep.dof = dof;
  rep.n_free = n_free;
  rep.model_tag = std::move(model_tag);
  rep.residuals.reserve(observed.size());
  for (std::size_t i = 0; i < observed.size(); ++i) {
    const double sigma = std::sqrt(std::max(expected[i], 1.0));
    const double r = (observed[i] - expected[i]) / sigma;
    rep.residuals.push_back(r);
    rep.chi2 += r * r;
  }
  rep.reduced_chi2 = rep.chi2 / dof;
  return rep;
}

}  // namespace ebcm

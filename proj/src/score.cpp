#include "ages/score.hpp"

#include <algorithm>
#include <cmath>

#include "ages/errors.hpp"

namespace ages {

Penalty::Penalty(double lambda) : lambda_(lambda) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw DomainError("lambda must be finite and nonnegative");
}

Penalty::Penalty(double lambda, const CovarianceSource& src) : Penalty(lambda) {
  if (auto n = src.sample_size()) {
    const double bic = bic_lambda(*n);
    if (lambda < bic * (1.0 - 1e-12)) {
      throw DomainError("lambda below the BIC penalty log(n)/(2n) for n = " + std::to_string(*n));
    }
  }
}

namespace {

double log_one_minus_sq(double rho) {
  const double r = std::clamp(rho, -1.0 + kRhoClip, 1.0 - kRhoClip);
  return std::log1p(-r * r);
}

}  // namespace

double score_diff_rho(double rho, double lambda) { return 0.5 * log_one_minus_sq(rho) + lambda; }

double score_diff(const CovarianceSource& src, VertexId i, VertexId j, const VertexSet& parents_of_j,
                  double lambda) {
  if (contains(parents_of_j, i)) throw PreconditionError("i is already a parent of j");
  return score_diff_rho(partial_correlation(src, i, j, parents_of_j), lambda);
}

double critical_lambda(double rho) {
  if (!(std::abs(rho) < 1.0)) throw DomainError("critical_lambda needs |rho| < 1");
  return -0.5 * log_one_minus_sq(rho);
}

double delta_of_lambda(double lambda) {
  if (!(lambda >= 0.0)) throw DomainError("delta_of_lambda needs lambda >= 0");
  if (std::isinf(lambda)) return 1.0;
  return std::sqrt(-std::expm1(-2.0 * lambda));
}

double bic_lambda(long n) {
  if (n < 2) throw DomainError("bic_lambda needs n >= 2");
  const double x = static_cast<double>(n);
  return std::log(x) / (2.0 * x);
}

double bic_lambda(double n) {
  if (!std::isfinite(n) || n != std::floor(n)) throw DomainError("bic_lambda needs an integer sample size");
  return bic_lambda(static_cast<long>(n));
}

}  // namespace ages

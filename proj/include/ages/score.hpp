#pragma once

#include "ages/graph.hpp"
#include "ages/sem.hpp"

namespace ages {

// Penalty per edge. Sample mode requires lambda >= bic_lambda(n).
class Penalty {
 public:
  explicit Penalty(double lambda);
  // Validates lambda against the source: >= 0 always, >= BIC in sample mode.
  Penalty(double lambda, const CovarianceSource& src);
  double lambda() const { return lambda_; }

 private:
  double lambda_;
};

// |rho| is clipped to 1 - kRhoClip before taking logs.
inline constexpr double kRhoClip = 1e-12;

// Change in penalized score from adding i -> j to a DAG where j has parents
// `parents_of_j`: 0.5 * log(1 - rho^2) + lambda. Negative means the edge helps.
double score_diff(const CovarianceSource& src, VertexId i, VertexId j, const VertexSet& parents_of_j,
                  double lambda);
// Same quantity from a precomputed partial correlation.
double score_diff_rho(double rho, double lambda);

// Smallest lambda at which an edge with partial correlation rho is no longer
// added: -0.5 * log(1 - rho^2). Throws DomainError for |rho| >= 1.
double critical_lambda(double rho);
// Inverse of critical_lambda on |rho|: sqrt(1 - exp(-2 lambda)).
double delta_of_lambda(double lambda);

// log(n) / (2n). The double overload rejects non-integer values.
double bic_lambda(long n);
double bic_lambda(double n);

}  // namespace ages

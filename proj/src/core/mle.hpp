#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "model_matrix.hpp"

namespace quasix {

struct FitOptions {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  int max_sweeps = 50000;
};

struct FitResult {
  std::vector<double> fitted;
  bool converged = false;
  int iterations = 0;
  double max_discrepancy = 0.0;
  // Cells forced to zero because some sufficient statistic vanished
  // (extended MLE on the boundary of the toric model).
  std::vector<char> forced_zero;
};

// Maximum likelihood fit by cyclic iterative proportional scaling over the
// 0/1 columns of the model matrix. Requires the all-ones vector in the
// column span (every built-in model has the mu column). Non-convergence is
// reported in the result, not thrown.
FitResult fit(const ModelMatrix& matrix, std::span<const std::int64_t> observed,
              const FitOptions& options = {});

struct G2Report {
  double statistic = 0.0;
  int df = 0;
  double p_asymptotic = 1.0;
  // Observed count positive on a cell the fit forces to zero; the statistic
  // is infinite and reported as this distinguished outcome.
  bool boundary = false;
};

// Goodness of fit against the saturated model:
//   G2 = 2 sum_k f_k log(f_k / fhat_k), with 0 log(0/x) = 0,
// df = cells - rank(A).
G2Report g2_gof(std::span<const std::int64_t> observed, const FitResult& fit,
                const ModelMatrix& matrix);

// Nested-model statistic, oriented to be nonnegative:
//   G2 = 2 sum_k f_k log(fhat1_k / fhat0_k) = 2 [l(fhat1) - l(fhat0)].
G2Report g2_nested(std::span<const std::int64_t> observed,
                   const FitResult& null_fit, const FitResult& alt_fit,
                   int df);

// Upper tail of the chi-square distribution via the regularized incomplete
// gamma function (series for small x, continued fraction otherwise).
double chi_square_sf(double x, int df);

}  // namespace quasix

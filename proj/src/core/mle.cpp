#include "mle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "error.hpp"

namespace quasix {

FitResult fit(const ModelMatrix& matrix, std::span<const std::int64_t> observed,
              const FitOptions& options) {
  if (static_cast<int>(observed.size()) != matrix.rows()) {
    throw InvalidArgument("observed table has " +
                          std::to_string(observed.size()) +
                          " cells, matrix has " +
                          std::to_string(matrix.rows()) + " rows");
  }
  if (!matrix.is_zero_one()) {
    throw Unsupported("proportional scaling requires a 0/1 model matrix");
  }
  for (std::int64_t f : observed) {
    if (f < 0) throw InvalidArgument("observed counts must be nonnegative");
  }

  const int cells = matrix.rows();
  const int cols = matrix.cols();
  const auto& support = matrix.column_support();

  std::vector<std::int64_t> target(cols, 0);
  std::int64_t total = 0;
  for (std::int64_t f : observed) total += f;
  for (int c = 0; c < cols; ++c) {
    for (int k : support[c]) target[c] += observed[k];
  }

  FitResult result;
  result.forced_zero.assign(cells, 0);
  for (int c = 0; c < cols; ++c) {
    if (target[c] == 0) {
      for (int k : support[c]) result.forced_zero[k] = 1;
    }
  }

  result.fitted.assign(cells, 0.0);
  const double start = static_cast<double>(total) / cells;
  for (int k = 0; k < cells; ++k) {
    if (!result.forced_zero[k]) result.fitted[k] = start;
  }
  if (total == 0) {
    result.converged = true;
    return result;
  }

  for (int sweep = 1; sweep <= options.max_sweeps; ++sweep) {
    for (int c = 0; c < cols; ++c) {
      if (target[c] == 0) continue;
      double current = 0.0;
      for (int k : support[c]) current += result.fitted[k];
      if (current <= 0.0) {
        // Cannot happen for consistent targets; bail out as non-converged.
        result.iterations = sweep;
        result.max_discrepancy = std::numeric_limits<double>::infinity();
        return result;
      }
      const double factor = static_cast<double>(target[c]) / current;
      for (int k : support[c]) result.fitted[k] *= factor;
    }

    double max_abs = 0.0;
    double max_rel = 0.0;
    for (int c = 0; c < cols; ++c) {
      if (target[c] == 0) continue;
      double current = 0.0;
      for (int k : support[c]) current += result.fitted[k];
      const double diff = std::fabs(current - static_cast<double>(target[c]));
      max_abs = std::max(max_abs, diff);
      max_rel = std::max(max_rel, diff / static_cast<double>(target[c]));
    }
    result.iterations = sweep;
    result.max_discrepancy = max_abs;
    if (max_rel < options.rel_tol || max_abs < options.abs_tol) {
      result.converged = true;
      return result;
    }
  }
  return result;
}

namespace {

double tail_or_one(double statistic, int df, bool boundary) {
  if (boundary) return 0.0;
  if (df <= 0) return 1.0;
  return chi_square_sf(statistic, df);
}

}  // namespace

G2Report g2_gof(std::span<const std::int64_t> observed, const FitResult& fit,
                const ModelMatrix& matrix) {
  if (static_cast<int>(observed.size()) != matrix.rows() ||
      observed.size() != fit.fitted.size()) {
    throw InvalidArgument("g2_gof: table, fit and matrix sizes disagree");
  }
  G2Report report;
  double g2 = 0.0;
  for (std::size_t k = 0; k < observed.size(); ++k) {
    const auto f = static_cast<double>(observed[k]);
    if (f <= 0.0) continue;
    if (fit.fitted[k] <= 0.0) {
      report.boundary = true;
      g2 = std::numeric_limits<double>::infinity();
      break;
    }
    g2 += f * std::log(f / fit.fitted[k]);
  }
  report.statistic = report.boundary ? g2 : std::max(0.0, 2.0 * g2);
  report.df = matrix.rows() - matrix.rank();
  report.p_asymptotic = tail_or_one(report.statistic, report.df, report.boundary);
  return report;
}

G2Report g2_nested(std::span<const std::int64_t> observed,
                   const FitResult& null_fit, const FitResult& alt_fit,
                   int df) {
  if (observed.size() != null_fit.fitted.size() ||
      observed.size() != alt_fit.fitted.size()) {
    throw InvalidArgument("g2_nested: table and fit sizes disagree");
  }
  G2Report report;
  report.df = df;
  double g2 = 0.0;
  for (std::size_t k = 0; k < observed.size(); ++k) {
    const auto f = static_cast<double>(observed[k]);
    if (f <= 0.0) continue;
    if (null_fit.fitted[k] <= 0.0 || alt_fit.fitted[k] <= 0.0) {
      report.boundary = true;
      g2 = std::numeric_limits<double>::infinity();
      break;
    }
    g2 += f * std::log(alt_fit.fitted[k] / null_fit.fitted[k]);
  }
  report.statistic = report.boundary ? g2 : std::max(0.0, 2.0 * g2);
  report.p_asymptotic = tail_or_one(report.statistic, report.df, report.boundary);
  return report;
}

namespace {

constexpr int kMaxIter = 1000;
constexpr double kEps = 1e-16;

// Regularized lower incomplete gamma P(a, x) by power series.
double gamma_p_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  double ap = a;
  for (int n = 0; n < kMaxIter; ++n) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::fabs(term) < std::fabs(sum) * kEps) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Regularized upper incomplete gamma Q(a, x) by continued fraction
// (modified Lentz).
double gamma_q_cf(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= kMaxIter; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < kEps) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double chi_square_sf(double x, int df) {
  if (df < 1) throw InvalidArgument("chi_square_sf requires df >= 1");
  if (x < 0.0) throw InvalidArgument("chi_square_sf requires x >= 0");
  if (x == 0.0) return 1.0;
  const double a = 0.5 * df;
  const double z = 0.5 * x;
  if (z < a + 1.0) return 1.0 - gamma_p_series(a, z);
  return gamma_q_cf(a, z);
}

}  // namespace quasix

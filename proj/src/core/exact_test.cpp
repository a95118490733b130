#include "exact_test.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "error.hpp"

namespace quasix {

void WalkConfig::validate() const {
  if (burn_in < 0) throw InvalidArgument("burn-in must be >= 0");
  if (thinning < 1) throw InvalidArgument("thinning interval must be >= 1");
  if (samples < 1) throw InvalidArgument("sample count must be >= 1");
}

double log_hypergeometric_ratio(std::span<const std::int64_t> table,
                                const Move& move) {
  if (table.size() != move.entries.size()) {
    throw InvalidArgument("table and move sizes disagree");
  }
  double log_ratio = 0.0;
  for (std::size_t k = 0; k < table.size(); ++k) {
    const int m = move.entries[k];
    if (m == 0) continue;
    const std::int64_t f = table[k];
    if (f + m < 0) {
      throw InvalidArgument("candidate entry would be negative; moves must be "
                            "pre-filtered for nonnegativity");
    }
    log_ratio += std::lgamma(static_cast<double>(f) + 1.0) -
                 std::lgamma(static_cast<double>(f + m) + 1.0);
  }
  return log_ratio;
}

FiberWalk::FiberWalk(std::vector<std::int64_t> initial, const MarkovBasis& basis,
                     Rng rng)
    : state_(std::move(initial)), basis_(&basis), rng_(rng) {
  if (basis_->moves.empty()) {
    throw InvalidArgument("Markov basis is empty");
  }
  if (state_.size() != basis_->moves.front().entries.size()) {
    throw InvalidArgument("table and basis dimensions disagree");
  }
  support_.reserve(basis_->moves.size());
  for (const Move& move : basis_->moves) {
    std::vector<std::pair<int, int>> cells;
    for (std::size_t k = 0; k < move.entries.size(); ++k) {
      if (move.entries[k] != 0) {
        cells.emplace_back(static_cast<int>(k), move.entries[k]);
      }
    }
    support_.push_back(std::move(cells));
  }
}

void FiberWalk::step() {
  const auto& support = support_[rng_.next_index(support_.size())];
  const int sign = rng_.next_sign();
  const double u = rng_.next_unit();
  ++steps_;

  double log_ratio = 0.0;
  for (const auto& [cell, entry] : support) {
    const std::int64_t candidate = state_[cell] + sign * entry;
    if (candidate < 0) return;
    log_ratio += std::lgamma(static_cast<double>(state_[cell]) + 1.0) -
                 std::lgamma(static_cast<double>(candidate) + 1.0);
  }
  if (log_ratio < 0.0 && std::exp(log_ratio) <= u) return;

  for (const auto& [cell, entry] : support) {
    state_[cell] += sign * entry;
  }
  ++accepted_;
}

void FiberWalk::run(std::int64_t steps) {
  for (std::int64_t s = 0; s < steps; ++s) step();
}

G2Evaluator::G2Evaluator(const ModelMatrix& null_matrix,
                         const ModelMatrix* alt_matrix)
    : null_(&null_matrix), alt_(alt_matrix) {
  if (alt_ == nullptr) {
    df_ = null_->rows() - null_->rank();
  } else {
    df_ = nested_df(*null_, *alt_);
  }
}

double G2Evaluator::operator()(std::span<const std::int64_t> table) const {
  const FitResult null_fit = fit(*null_, table);
  if (!null_fit.converged) return std::numeric_limits<double>::infinity();
  G2Report report;
  if (alt_ == nullptr) {
    report = g2_gof(table, null_fit, *null_);
  } else {
    const FitResult alt_fit = fit(*alt_, table);
    if (!alt_fit.converged) return std::numeric_limits<double>::infinity();
    report = g2_nested(table, null_fit, alt_fit, df_);
  }
  if (report.boundary) return std::numeric_limits<double>::infinity();
  return report.statistic;
}

double G2Evaluator::asymptotic_tail(double statistic) const {
  if (df_ < 1) return 1.0;
  if (!std::isfinite(statistic)) return 0.0;
  return chi_square_sf(statistic, df_);
}

TestResult exact_pvalue(const StackedTable& observed, const ModelSpec& null_spec,
                        const std::optional<ModelSpec>& alt_spec,
                        const MarkovBasis& basis, const WalkConfig& config) {
  config.validate();
  null_spec.validate();
  if (observed.size() != null_spec.size ||
      observed.layers() != null_spec.layers) {
    throw InvalidArgument("table dimensions do not match the null model spec");
  }

  const ModelMatrix null_matrix = build_model_matrix(null_spec);
  std::optional<ModelMatrix> alt_matrix;
  if (alt_spec.has_value()) {
    alt_spec->validate();
    if (alt_spec->size != null_spec.size ||
        alt_spec->layers != null_spec.layers) {
      throw InvalidArgument("null and alternative specs have different shapes");
    }
    alt_matrix = build_model_matrix(*alt_spec);
  }

  // Refuse to sample with a basis that does not preserve the null
  // sufficient statistic.
  for (const Move& move : basis.moves) {
    if (!verify_move(null_matrix, move)) {
      throw InvalidArgument(
          "basis/model mismatch: a basis move does not preserve the null "
          "model's sufficient statistic");
    }
  }

  const G2Evaluator evaluator(null_matrix,
                              alt_matrix ? &*alt_matrix : nullptr);
  const std::span<const std::int64_t> cells = observed.counts();
  const double observed_stat = evaluator(cells);

  TestResult result;
  result.df = evaluator.df();
  result.statistic = observed_stat;
  result.observed_boundary = !std::isfinite(observed_stat);
  result.samples = config.samples;
  result.seed = config.seed;
  result.p_asymptotic = evaluator.asymptotic_tail(observed_stat);

  FiberWalk walk(std::vector<std::int64_t>(cells.begin(), cells.end()), basis,
                 Rng(config.seed));
  walk.run(config.burn_in);

  // Sampled statistics >= observed, with a hair of slack for roundoff;
  // boundary tables count as extreme.
  const double threshold =
      observed_stat - 1e-9 * std::max(1.0, std::fabs(observed_stat));
  std::vector<double> stats;
  stats.reserve(static_cast<std::size_t>(config.samples));
  std::int64_t extreme = 0;
  for (std::int64_t s = 0; s < config.samples; ++s) {
    walk.run(config.thinning);
    const double stat = evaluator(walk.state());
    stats.push_back(stat);
    if (stat >= threshold) ++extreme;
  }

  result.p_exact =
      static_cast<double>(extreme) / static_cast<double>(config.samples);
  result.mc_se = std::sqrt(result.p_exact * (1.0 - result.p_exact) /
                           static_cast<double>(config.samples));
  result.acceptance_rate = walk.acceptance_rate();

  std::sort(stats.begin(), stats.end());
  result.sampled.min = stats.front();
  result.sampled.max = stats.back();
  const std::size_t n = stats.size();
  result.sampled.median = (n % 2 == 1)
                              ? stats[n / 2]
                              : 0.5 * (stats[n / 2 - 1] + stats[n / 2]);
  return result;
}

TestResult gof_test(const SquareTable& table, BaseModel model,
                    const WalkConfig& config) {
  if (model != BaseModel::quasi_independence &&
      model != BaseModel::quasi_symmetry) {
    throw Unsupported(
        "goodness-of-fit walks are provided for quasi-independence and "
        "quasi-symmetry");
  }
  const ModelSpec spec = ModelSpec::single_table(model, table.size());
  const MarkovBasis basis = build_markov_basis(spec);
  return exact_pvalue(StackedTable::from_square(table), spec, std::nullopt,
                      basis, config);
}

}  // namespace quasix

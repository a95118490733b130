#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "markov_basis.hpp"
#include "mle.hpp"
#include "model_matrix.hpp"
#include "rng.hpp"
#include "table.hpp"

namespace quasix {

struct WalkConfig {
  std::int64_t burn_in = 50000;
  std::int64_t thinning = 50;
  std::int64_t samples = 10000;
  std::uint64_t seed = 1;

  void validate() const;
};

struct StatSummary {
  double min = 0.0;
  double median = 0.0;
  double max = 0.0;
};

struct TestResult {
  double statistic = 0.0;
  int df = 0;
  double p_exact = 0.0;
  double mc_se = 0.0;
  double p_asymptotic = 0.0;
  double acceptance_rate = 0.0;
  StatSummary sampled;
  std::int64_t samples = 0;
  std::uint64_t seed = 0;
  bool observed_boundary = false;
};

// log[ H(f+m) / H(f) ] for the hypergeometric weight H(f) ~ 1 / prod f_k!,
// summed over the move's support only. The caller guarantees f + m >= 0.
double log_hypergeometric_ratio(std::span<const std::int64_t> table,
                                const Move& move);

// Metropolis walk over the fiber of the initial table: pick a basis move
// and a sign uniformly, stay if the candidate goes negative, otherwise
// accept with probability min{1, H(f+m)/H(f)}. Rejections advance the step
// counter too.
class FiberWalk {
 public:
  FiberWalk(std::vector<std::int64_t> initial, const MarkovBasis& basis,
            Rng rng);

  void step();
  void run(std::int64_t steps);

  const std::vector<std::int64_t>& state() const { return state_; }
  std::int64_t steps() const { return steps_; }
  std::int64_t accepted() const { return accepted_; }
  double acceptance_rate() const {
    return steps_ == 0 ? 0.0
                       : static_cast<double>(accepted_) / static_cast<double>(steps_);
  }

 private:
  std::vector<std::int64_t> state_;
  const MarkovBasis* basis_;
  std::vector<std::vector<std::pair<int, int>>> support_;  // (cell, entry)
  Rng rng_;
  std::int64_t steps_ = 0;
  std::int64_t accepted_ = 0;
};

// Fits a table under the null matrix and (unless saturated) the alternative
// matrix and returns the nonnegative G2 statistic; +infinity for boundary
// or non-converged fits.
class G2Evaluator {
 public:
  // alt == nullptr means the saturated model (goodness of fit).
  G2Evaluator(const ModelMatrix& null_matrix, const ModelMatrix* alt_matrix);

  double operator()(std::span<const std::int64_t> table) const;
  int df() const { return df_; }
  double asymptotic_tail(double statistic) const;

 private:
  const ModelMatrix* null_;
  const ModelMatrix* alt_;
  int df_;
};

// Monte Carlo exact p-value: the proportion of sampled tables whose
// statistic is at least the observed one. `alt_spec` empty = saturated.
TestResult exact_pvalue(const StackedTable& observed, const ModelSpec& null_spec,
                        const std::optional<ModelSpec>& alt_spec,
                        const MarkovBasis& basis, const WalkConfig& config);

// Single-table goodness-of-fit wrapper (quasi-independence or
// quasi-symmetry) with the model's own Markov basis.
TestResult gof_test(const SquareTable& table, BaseModel model,
                    const WalkConfig& config);

}  // namespace quasix

#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include "core/error.hpp"
#include "core/mle.hpp"
#include "core/model_matrix.hpp"
#include "core/table.hpp"

using namespace quasix;

namespace {

const std::string kData = QUASIX_DATA_DIR;

// Deterministic pseudo-random counts for property checks.
std::vector<std::int64_t> random_counts(int cells, std::uint64_t seed,
                                        int max_count = 20) {
  std::vector<std::int64_t> counts(cells);
  std::uint64_t state = seed;
  for (auto& c : counts) {
    state = state * 6364136223846793005ull + 1442695040888963407ull;
    c = static_cast<std::int64_t>((state >> 33) % (max_count + 1));
  }
  return counts;
}

// Quadrature oracle for the chi-square upper tail: integrate the density of
// the lower tail with the substitution x = t^2, which removes the endpoint
// singularity for df = 1, then subtract from one.
double chi_square_sf_quadrature(double x, int df) {
  const double upper = std::sqrt(x);
  const int n = 200000;  // even
  const double h = upper / n;
  const double a = 0.5 * df;
  auto integrand = [&](double t) {
    if (t == 0.0) return 0.0;
    // 2 t^(df-1) exp(-t^2/2) / (2^(df/2) Gamma(df/2))
    return std::exp((df - 1) * std::log(t) - 0.5 * t * t -
                    a * std::log(2.0) - std::lgamma(a) + std::log(2.0));
  };
  double sum = integrand(0.0) + integrand(upper);
  for (int k = 1; k < n; ++k) {
    sum += integrand(k * h) * ((k % 2) ? 4.0 : 2.0);
  }
  return 1.0 - sum * h / 3.0;
}

double max_statistic_gap(const ModelMatrix& matrix,
                         std::span<const std::int64_t> observed,
                         const FitResult& result) {
  double worst = 0.0;
  for (int c = 0; c < matrix.cols(); ++c) {
    double fitted_stat = 0.0;
    std::int64_t observed_stat = 0;
    for (int k : matrix.column_support()[c]) {
      fitted_stat += result.fitted[k];
      observed_stat += observed[k];
    }
    const double gap = std::fabs(fitted_stat - observed_stat) /
                       std::max(1.0, static_cast<double>(observed_stat));
    worst = std::max(worst, gap);
  }
  return worst;
}

}  // namespace

TEST_CASE("independence fit equals the closed form row*col/N") {
  for (std::uint64_t seed : {1u, 2u, 3u, 4u}) {
    for (int size : {3, 4, 5}) {
      const std::vector<std::int64_t> counts =
          random_counts(size * size, seed * 97 + size);
      const SquareTable table(size, counts);
      const ModelMatrix matrix = independence_matrix(size);
      const FitResult result = fit(matrix, counts);
      REQUIRE(result.converged);
      const Margins margins = table.margins();
      const double total = static_cast<double>(table.total());
      if (total == 0) continue;
      for (int i = 0; i < size; ++i) {
        for (int j = 0; j < size; ++j) {
          const double expected = margins.rows[i] * margins.cols[j] / total;
          CHECK(std::fabs(result.fitted[i * size + j] - expected) <= 1e-10);
        }
      }
    }
  }
}

TEST_CASE("in-model tables fit exactly with zero deviance") {
  // A symmetric table satisfies every quasi-symmetry constraint.
  const std::vector<std::int64_t> symmetric{5, 2, 1,  //
                                            2, 7, 3,  //
                                            1, 3, 4};
  const ModelMatrix qs3 = quasi_symmetry_matrix(3);
  const FitResult result = fit(qs3, symmetric);
  REQUIRE(result.converged);
  const G2Report report = g2_gof(symmetric, result, qs3);
  CHECK(std::fabs(report.statistic) <= 1e-10);
  CHECK_FALSE(report.boundary);
  for (int k = 0; k < 9; ++k) {
    CHECK(std::fabs(result.fitted[k] - static_cast<double>(symmetric[k])) <=
          1e-7);
  }
}

TEST_CASE("goodness-of-fit deviances on the shipped data") {
  const StackedTable rater = read_csv_file(kData + "/rater_agreement.csv");
  const ModelMatrix qs5 = quasi_symmetry_matrix(5);

  const SquareTable before = rater.layer(1);
  const FitResult fit_before = fit(qs5, before.counts());
  REQUIRE(fit_before.converged);
  const G2Report g2_before = g2_gof(before.counts(), fit_before, qs5);
  CHECK(std::fabs(g2_before.statistic - 1.578) <= 0.001);
  CHECK(g2_before.df == 6);

  const SquareTable after = rater.layer(2);
  const FitResult fit_after = fit(qs5, after.counts());
  const G2Report g2_after = g2_gof(after.counts(), fit_after, qs5);
  CHECK(std::fabs(g2_after.statistic - 4.303) <= 0.001);

  const StackedTable mobility = read_csv_file(kData + "/social_mobility.csv");
  const ModelMatrix qs4 = quasi_symmetry_matrix(4);

  const SquareTable men = mobility.layer(1);
  const G2Report g2_men = g2_gof(men.counts(), fit(qs4, men.counts()), qs4);
  CHECK(std::fabs(g2_men.statistic - 6.703) <= 0.001);
  CHECK(g2_men.df == 3);

  const SquareTable women = mobility.layer(2);
  const G2Report g2_women =
      g2_gof(women.counts(), fit(qs4, women.counts()), qs4);
  CHECK(std::fabs(g2_women.statistic - 8.279) <= 0.001);
}

TEST_CASE("nested-model deviances on the shipped data") {
  const StackedTable rater = read_csv_file(kData + "/rater_agreement.csv");
  const ModelMatrix a0 = build_model_matrix(
      ModelSpec::stacked(BaseModel::quasi_symmetry, Stacking::m0, 5, 2));
  const ModelMatrix a1 = build_model_matrix(
      ModelSpec::stacked(BaseModel::quasi_symmetry, Stacking::m1, 5, 2));
  const FitResult f0 = fit(a0, rater.counts());
  const FitResult f1 = fit(a1, rater.counts());
  REQUIRE(f0.converged);
  REQUIRE(f1.converged);
  const G2Report nested = g2_nested(rater.counts(), f0, f1, nested_df(a0, a1));
  CHECK(std::fabs(nested.statistic - 30.589) <= 0.005);
  CHECK(nested.df == 18);

  const StackedTable mobility = read_csv_file(kData + "/social_mobility.csv");
  const ModelMatrix b0 = build_model_matrix(
      ModelSpec::stacked(BaseModel::quasi_symmetry, Stacking::m0, 4, 2));
  const ModelMatrix b1 = build_model_matrix(
      ModelSpec::stacked(BaseModel::quasi_symmetry, Stacking::m1, 4, 2));
  const G2Report nested2 =
      g2_nested(mobility.counts(), fit(b0, mobility.counts()),
                fit(b1, mobility.counts()), nested_df(b0, b1));
  CHECK(std::fabs(nested2.statistic - 112.687) <= 0.005);
  CHECK(nested2.df == 12);
}

TEST_CASE("duplicated layers fit the common model exactly") {
  const StackedTable rater = read_csv_file(kData + "/rater_agreement.csv");
  const SquareTable layer = rater.layer(1);
  const StackedTable duplicated = StackedTable::from_layers({layer, layer});
  const ModelMatrix a0 = build_model_matrix(
      ModelSpec::stacked(BaseModel::quasi_symmetry, Stacking::m0, 5, 2));
  const ModelMatrix a1 = build_model_matrix(
      ModelSpec::stacked(BaseModel::quasi_symmetry, Stacking::m1, 5, 2));
  const G2Report nested =
      g2_nested(duplicated.counts(), fit(a0, duplicated.counts()),
                fit(a1, duplicated.counts()), nested_df(a0, a1));
  CHECK(std::fabs(nested.statistic) < 1e-8);
}

TEST_CASE("sufficient statistics are matched at convergence") {
  const StackedTable rater = read_csv_file(kData + "/rater_agreement.csv");
  std::vector<std::pair<ModelMatrix, std::vector<std::int64_t>>> cases;
  cases.emplace_back(quasi_symmetry_matrix(5),
                     std::vector<std::int64_t>(rater.layer(1).counts().begin(),
                                               rater.layer(1).counts().end()));
  cases.emplace_back(quasi_independence_matrix(4), random_counts(16, 11));
  cases.emplace_back(independence_matrix(4), random_counts(16, 12));
  cases.emplace_back(
      build_model_matrix(
          ModelSpec::stacked(BaseModel::quasi_symmetry, Stacking::m0, 5, 2)),
      std::vector<std::int64_t>(rater.counts().begin(), rater.counts().end()));
  for (const auto& [matrix, counts] : cases) {
    const FitResult result = fit(matrix, counts);
    REQUIRE(result.converged);
    CHECK(max_statistic_gap(matrix, counts, result) <= 1e-8);
  }
}

TEST_CASE("fitted log-values lie in the model's column space") {
  // Gram-Schmidt projection of log(fitted) onto span(A); the residual must
  // vanish on strictly positive fits.
  const StackedTable mobility = read_csv_file(kData + "/social_mobility.csv");
  const SquareTable men = mobility.layer(1);
  const ModelMatrix qs4 = quasi_symmetry_matrix(4);
  const FitResult result = fit(qs4, men.counts());
  REQUIRE(result.converged);

  std::vector<std::vector<double>> basis;
  for (int c = 0; c < qs4.cols(); ++c) {
    std::vector<double> v(16);
    for (int k = 0; k < 16; ++k) v[k] = qs4.entry(k, c);
    for (const auto& b : basis) {
      double dot = 0.0, norm = 0.0;
      for (int k = 0; k < 16; ++k) {
        dot += v[k] * b[k];
        norm += b[k] * b[k];
      }
      for (int k = 0; k < 16; ++k) v[k] -= dot / norm * b[k];
    }
    double norm = 0.0;
    for (double x : v) norm += x * x;
    if (norm > 1e-18) basis.push_back(v);
  }
  std::vector<double> residual(16);
  for (int k = 0; k < 16; ++k) {
    REQUIRE(result.fitted[k] > 0.0);
    residual[k] = std::log(result.fitted[k]);
  }
  for (const auto& b : basis) {
    double dot = 0.0, norm = 0.0;
    for (int k = 0; k < 16; ++k) {
      dot += residual[k] * b[k];
      norm += b[k] * b[k];
    }
    for (int k = 0; k < 16; ++k) residual[k] -= dot / norm * b[k];
  }
  double residual_norm = 0.0;
  for (double x : residual) residual_norm += x * x;
  CHECK(std::sqrt(residual_norm) <= 1e-6);
}

TEST_CASE("the statistic depends only on the column space") {
  const std::vector<std::int64_t> counts = random_counts(9, 21);
  const ModelMatrix qs3 = quasi_symmetry_matrix(3);
  const G2Report base = g2_gof(counts, fit(qs3, counts), qs3);

  // Duplicate every column and prepend an extra copy of mu.
  const int d = qs3.cols();
  std::vector<int> entries;
  std::vector<std::string> labels;
  for (int r = 0; r < 9; ++r) {
    entries.push_back(1);
    for (int rep = 0; rep < 2; ++rep) {
      for (int c = 0; c < d; ++c) entries.push_back(qs3.entry(r, c));
    }
  }
  labels.push_back("ones");
  for (int rep = 0; rep < 2; ++rep) {
    for (int c = 0; c < d; ++c) {
      labels.push_back(qs3.column_label(c) + (rep ? "_copy" : ""));
    }
  }
  const ModelMatrix padded(9, 1 + 2 * d, std::move(entries), std::move(labels));
  REQUIRE(padded.rank() == qs3.rank());
  const G2Report same = g2_gof(counts, fit(padded, counts), padded);
  CHECK(std::fabs(same.statistic - base.statistic) <= 1e-8);
  CHECK(same.df == base.df);
}

TEST_CASE("likelihood decomposition and monotonicity over the stackings") {
  const StackedTable mobility = read_csv_file(kData + "/social_mobility.csv");
  const auto spec = [&](Stacking s) {
    return ModelSpec::stacked(BaseModel::quasi_symmetry, s, 4, 2);
  };
  const ModelMatrix a0 = build_model_matrix(spec(Stacking::m0));
  const ModelMatrix a1 = build_model_matrix(spec(Stacking::m1));
  const ModelMatrix a2 = build_model_matrix(spec(Stacking::m2));
  const FitResult f0 = fit(a0, mobility.counts());
  const FitResult f1 = fit(a1, mobility.counts());
  const FitResult f2 = fit(a2, mobility.counts());
  const G2Report gof0 = g2_gof(mobility.counts(), f0, a0);
  const G2Report gof1 = g2_gof(mobility.counts(), f1, a1);
  const G2Report gof2 = g2_gof(mobility.counts(), f2, a2);
  const G2Report nested =
      g2_nested(mobility.counts(), f0, f1, nested_df(a0, a1));

  CHECK(std::fabs(nested.statistic + gof1.statistic - gof0.statistic) <= 1e-6);
  CHECK(gof0.statistic >= gof1.statistic - 1e-9);
  CHECK(gof1.statistic >= gof2.statistic - 1e-9);
}

TEST_CASE("vanishing sufficient statistics force zero cells") {
  const StackedTable rater = read_csv_file(kData + "/rater_agreement.csv");
  const SquareTable before = rater.layer(1);
  // Cells (1,5) and (5,1) are both zero, so their pair statistic vanishes.
  REQUIRE(before.at(1, 5) == 0);
  REQUIRE(before.at(5, 1) == 0);
  const ModelMatrix qs5 = quasi_symmetry_matrix(5);
  const FitResult result = fit(qs5, before.counts());
  REQUIRE(result.converged);
  CHECK(result.forced_zero[linearize({1, 5, 1}, 5, 1)] == 1);
  CHECK(result.forced_zero[linearize({5, 1, 1}, 5, 1)] == 1);
  CHECK(result.fitted[linearize({1, 5, 1}, 5, 1)] == 0.0);
  const G2Report report = g2_gof(before.counts(), result, qs5);
  CHECK_FALSE(report.boundary);
  CHECK(std::isfinite(report.statistic));
}

TEST_CASE("all-zero tables fit trivially") {
  const std::vector<std::int64_t> zeros(9, 0);
  const ModelMatrix qs3 = quasi_symmetry_matrix(3);
  const FitResult result = fit(qs3, zeros);
  CHECK(result.converged);
  for (double f : result.fitted) CHECK(f == 0.0);
  CHECK(g2_gof(zeros, result, qs3).statistic == 0.0);
}

TEST_CASE("boundary outcome is distinguished") {
  FitResult fake;
  fake.converged = true;
  fake.fitted = {0.0, 2.0, 1.0, 3.0};
  fake.forced_zero = {1, 0, 0, 0};
  const std::vector<std::int64_t> observed{1, 2, 1, 2};
  const ModelMatrix ind2 = independence_matrix(2);
  const G2Report report = g2_gof(observed, fake, ind2);
  CHECK(report.boundary);
  CHECK(std::isinf(report.statistic));
  CHECK(report.p_asymptotic == 0.0);
}

TEST_CASE("non-convergence is flagged, not thrown") {
  const StackedTable rater = read_csv_file(kData + "/rater_agreement.csv");
  FitOptions strict;
  strict.max_sweeps = 0;
  const FitResult result =
      fit(quasi_symmetry_matrix(5), rater.layer(1).counts(), strict);
  CHECK_FALSE(result.converged);
}

TEST_CASE("fit input validation") {
  const ModelMatrix qs3 = quasi_symmetry_matrix(3);
  CHECK_THROWS_AS(fit(qs3, std::vector<std::int64_t>(4, 1)), InvalidArgument);
  std::vector<int> entries(9 * 2, 0);
  entries[0] = 2;
  const ModelMatrix non01(9, 2, std::move(entries), {"a", "b"});
  CHECK_THROWS_AS(fit(non01, std::vector<std::int64_t>(9, 1)), Unsupported);
}

TEST_CASE("chi-square upper tail") {
  CHECK(chi_square_sf(0.0, 1) == 1.0);
  CHECK(chi_square_sf(0.0, 7) == 1.0);

  // Classical 5% critical value of the 1-df distribution.
  CHECK(std::fabs(chi_square_sf(3.841, 1) - 0.0500) <= 0.0005);

  // Quadrature oracle across a grid of arguments.
  for (int df : {1, 2, 3, 6, 12, 18}) {
    for (double x : {0.5, 1.0, 2.5, 5.0, 10.0, 20.0, 40.0}) {
      CHECK(std::fabs(chi_square_sf(x, df) - chi_square_sf_quadrature(x, df)) <=
            1e-9);
    }
  }

  // Deep tail.
  CHECK(chi_square_sf(112.687, 12) < 1e-15);
  CHECK(chi_square_sf(112.687, 12) > 0.0);

  CHECK_THROWS_AS(chi_square_sf(-1.0, 3), InvalidArgument);
  CHECK_THROWS_AS(chi_square_sf(1.0, 0), InvalidArgument);
}

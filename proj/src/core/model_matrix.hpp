#pragma once

#include <span>
#include <string>
#include <vector>

namespace quasix {

enum class BaseModel { independence, quasi_independence, quasi_symmetry };
enum class Stacking { single, m0, m1, m2 };

std::string to_string(BaseModel base);
std::string to_string(Stacking stacking);

// Which log-linear model, on what dimensions. `single` requires layers == 1,
// the stacked variants require layers >= 2.
struct ModelSpec {
  BaseModel base = BaseModel::quasi_symmetry;
  Stacking stacking = Stacking::single;
  int size = 3;
  int layers = 1;

  static ModelSpec single_table(BaseModel base, int size);
  static ModelSpec stacked(BaseModel base, Stacking stacking, int size,
                           int layers);
  void validate() const;
  int cells() const { return size * size * layers; }
  std::string name() const;
};

// Rows index cells in the global cell order, columns index log-linear
// parameters. All built-in builders emit 0/1 entries; the rank is computed
// exactly over the rationals at construction and cached.
//
// Parametrizations are kept redundant on purpose: fitting and testing depend
// only on the column space, and degrees of freedom always come from the rank.
class ModelMatrix {
 public:
  ModelMatrix(int rows, int cols, std::vector<int> entries,
              std::vector<std::string> column_labels);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int rank() const { return rank_; }
  int entry(int row, int col) const { return entries_[static_cast<std::size_t>(row) * cols_ + col]; }
  std::span<const int> row(int r) const;
  const std::string& column_label(int col) const { return column_labels_[col]; }
  const std::vector<int>& entries() const { return entries_; }
  bool is_zero_one() const;

  // Cell indices of the 1-entries of each column; precomputed for fitting.
  const std::vector<std::vector<int>>& column_support() const {
    return column_support_;
  }

 private:
  int rows_;
  int cols_;
  int rank_;
  std::vector<int> entries_;  // row-major
  std::vector<std::string> column_labels_;
  std::vector<std::vector<int>> column_support_;
};

// mu + row indicators + column indicators; rank 2I-1.
ModelMatrix independence_matrix(int size);

// Independence plus one indicator per main-diagonal cell, so the diagonal is
// fitted exactly. The overload fixes an arbitrary cell pattern instead.
ModelMatrix quasi_independence_matrix(int size);
class CellPattern;
ModelMatrix quasi_independence_matrix(int size, const CellPattern& fixed);

// Independence plus one indicator per unordered cell pair {(i,j),(j,i)}.
ModelMatrix quasi_symmetry_matrix(int size);

// Stack a single-table matrix over `layers` layers:
//   m0 - common base columns plus one indicator per layer,
//   m1 - block-diagonal copies of the base,
//   m2 - m1 plus one indicator per cell position shared across layers
//        (the Lawrence lifting; fixes cell-wise sums over the layers).
ModelMatrix stack_matrix(const ModelMatrix& base, int layers, Stacking mode);

ModelMatrix build_model_matrix(const ModelSpec& spec);

// Exact rank over the rationals of the columns of `alt` spanned check:
// requires span(null) contained in span(alt); returns rank(alt) - rank(null).
int nested_df(const ModelMatrix& null_matrix, const ModelMatrix& alt_matrix);

// True iff every column of `inner` lies in the column space of `outer`.
bool column_space_contains(const ModelMatrix& outer, const ModelMatrix& inner);

// Plain-text export: first line `n d`, then n lines of d integers.
std::string format_matrix(const ModelMatrix& matrix);

}  // namespace quasix

#include "model_matrix.hpp"

#include <boost/multiprecision/cpp_int.hpp>
#include <sstream>
#include <utility>

#include "error.hpp"
#include "table.hpp"

namespace quasix {

namespace {

using BigInt = boost::multiprecision::cpp_int;

// Fraction-free (Bareiss) elimination; exact rank over the rationals,
// no floating point anywhere.
int exact_rank(std::vector<std::vector<BigInt>> m) {
  if (m.empty() || m[0].empty()) return 0;
  const std::size_t rows = m.size();
  const std::size_t cols = m[0].size();
  BigInt prev_pivot = 1;
  std::size_t rank = 0;
  for (std::size_t col = 0; col < cols && rank < rows; ++col) {
    std::size_t pivot_row = rank;
    while (pivot_row < rows && m[pivot_row][col] == 0) ++pivot_row;
    if (pivot_row == rows) continue;
    std::swap(m[rank], m[pivot_row]);
    const BigInt pivot = m[rank][col];
    for (std::size_t r = rank + 1; r < rows; ++r) {
      for (std::size_t c = col + 1; c < cols; ++c) {
        m[r][c] = (pivot * m[r][c] - m[r][col] * m[rank][c]) / prev_pivot;
      }
      m[r][col] = 0;
    }
    prev_pivot = pivot;
    ++rank;
  }
  return static_cast<int>(rank);
}

std::vector<std::vector<BigInt>> to_bigint_rows(const ModelMatrix& a) {
  std::vector<std::vector<BigInt>> rows(a.rows());
  for (int r = 0; r < a.rows(); ++r) {
    rows[r].resize(a.cols());
    for (int c = 0; c < a.cols(); ++c) rows[r][c] = a.entry(r, c);
  }
  return rows;
}

}  // namespace

std::string to_string(BaseModel base) {
  switch (base) {
    case BaseModel::independence: return "independence";
    case BaseModel::quasi_independence: return "quasi-independence";
    case BaseModel::quasi_symmetry: return "quasi-symmetry";
  }
  return "?";
}

std::string to_string(Stacking stacking) {
  switch (stacking) {
    case Stacking::single: return "single";
    case Stacking::m0: return "m0";
    case Stacking::m1: return "m1";
    case Stacking::m2: return "m2";
  }
  return "?";
}

ModelSpec ModelSpec::single_table(BaseModel base, int size) {
  ModelSpec spec{base, Stacking::single, size, 1};
  spec.validate();
  return spec;
}

ModelSpec ModelSpec::stacked(BaseModel base, Stacking stacking, int size,
                             int layers) {
  ModelSpec spec{base, stacking, size, layers};
  spec.validate();
  return spec;
}

void ModelSpec::validate() const {
  const int min_size = base == BaseModel::independence ? 2 : 3;
  if (size < min_size || size > kMaxTableSize) {
    throw InvalidArgument(to_string(base) + " requires size in " +
                          std::to_string(min_size) + ".." +
                          std::to_string(kMaxTableSize) + ", got " +
                          std::to_string(size));
  }
  if (stacking == Stacking::single) {
    if (layers != 1) {
      throw InvalidArgument("single-table model requires exactly 1 layer, got " +
                            std::to_string(layers));
    }
  } else {
    if (layers < 2 || layers > kMaxLayers) {
      throw InvalidArgument(to_string(stacking) + " requires 2.." +
                            std::to_string(kMaxLayers) + " layers, got " +
                            std::to_string(layers));
    }
  }
}

std::string ModelSpec::name() const {
  std::string n = to_string(base);
  if (stacking != Stacking::single) n += "/" + to_string(stacking);
  n += " I=" + std::to_string(size);
  if (layers > 1) n += " H=" + std::to_string(layers);
  return n;
}

ModelMatrix::ModelMatrix(int rows, int cols, std::vector<int> entries,
                         std::vector<std::string> column_labels)
    : rows_(rows),
      cols_(cols),
      rank_(0),
      entries_(std::move(entries)),
      column_labels_(std::move(column_labels)) {
  if (rows_ < 0 || cols_ < 0 ||
      entries_.size() != static_cast<std::size_t>(rows_) * cols_) {
    throw InvalidArgument("model matrix entries do not match dimensions");
  }
  if (column_labels_.size() != static_cast<std::size_t>(cols_)) {
    throw InvalidArgument("model matrix labels do not match column count");
  }
  column_support_.resize(cols_);
  for (int r = 0; r < rows_; ++r) {
    for (int c = 0; c < cols_; ++c) {
      if (entry(r, c) != 0) column_support_[c].push_back(r);
    }
  }
  rank_ = exact_rank(to_bigint_rows(*this));
}

std::span<const int> ModelMatrix::row(int r) const {
  return std::span<const int>(entries_.data() +
                                  static_cast<std::size_t>(r) * cols_,
                              static_cast<std::size_t>(cols_));
}

bool ModelMatrix::is_zero_one() const {
  for (int e : entries_) {
    if (e != 0 && e != 1) return false;
  }
  return true;
}

namespace {

// Shared builder: independence columns, optionally extended per model.
struct Builder {
  int rows;
  std::vector<std::vector<int>> columns;
  std::vector<std::string> labels;

  explicit Builder(int rows_in) : rows(rows_in) {}

  std::vector<int>& add(const std::string& label) {
    columns.emplace_back(rows, 0);
    labels.push_back(label);
    return columns.back();
  }

  ModelMatrix finish() const {
    std::vector<int> entries(static_cast<std::size_t>(rows) * columns.size());
    for (std::size_t c = 0; c < columns.size(); ++c) {
      for (int r = 0; r < rows; ++r) {
        entries[static_cast<std::size_t>(r) * columns.size() + c] =
            columns[c][r];
      }
    }
    return ModelMatrix(rows, static_cast<int>(columns.size()),
                       std::move(entries),
                       std::vector<std::string>(labels));
  }
};

void add_independence_columns(Builder& b, int size) {
  std::vector<int>& mu = b.add("mu");
  for (int& e : mu) e = 1;
  for (int i = 1; i <= size; ++i) {
    std::vector<int>& col = b.add("row" + std::to_string(i));
    for (int j = 1; j <= size; ++j) {
      col[linearize({i, j, 1}, size, 1)] = 1;
    }
  }
  for (int j = 1; j <= size; ++j) {
    std::vector<int>& col = b.add("col" + std::to_string(j));
    for (int i = 1; i <= size; ++i) {
      col[linearize({i, j, 1}, size, 1)] = 1;
    }
  }
}

}  // namespace

ModelMatrix independence_matrix(int size) {
  if (size < 2 || size > kMaxTableSize) {
    throw InvalidArgument("independence model requires size in 2.." +
                          std::to_string(kMaxTableSize));
  }
  Builder b(size * size);
  add_independence_columns(b, size);
  return b.finish();
}

ModelMatrix quasi_independence_matrix(int size) {
  if (size < 3 || size > kMaxTableSize) {
    throw InvalidArgument("quasi-independence requires size in 3.." +
                          std::to_string(kMaxTableSize) +
                          " (saturated or trivial below)");
  }
  Builder b(size * size);
  add_independence_columns(b, size);
  for (int i = 1; i <= size; ++i) {
    std::vector<int>& col = b.add("diag" + std::to_string(i));
    col[linearize({i, i, 1}, size, 1)] = 1;
  }
  return b.finish();
}

ModelMatrix quasi_independence_matrix(int size, const CellPattern& fixed) {
  if (size < 3 || size > kMaxTableSize) {
    throw InvalidArgument("quasi-independence requires size in 3.." +
                          std::to_string(kMaxTableSize));
  }
  if (fixed.size() != size) {
    throw InvalidArgument("fixed-cell pattern size does not match table size");
  }
  Builder b(size * size);
  add_independence_columns(b, size);
  for (int i = 1; i <= size; ++i) {
    for (int j = 1; j <= size; ++j) {
      if (!fixed.contains(i, j)) continue;
      std::vector<int>& col =
          b.add("fix" + std::to_string(i) + "_" + std::to_string(j));
      col[linearize({i, j, 1}, size, 1)] = 1;
    }
  }
  return b.finish();
}

ModelMatrix quasi_symmetry_matrix(int size) {
  if (size < 3 || size > kMaxTableSize) {
    throw InvalidArgument("quasi-symmetry requires size in 3.." +
                          std::to_string(kMaxTableSize) +
                          " (saturated or trivial below)");
  }
  Builder b(size * size);
  add_independence_columns(b, size);
  for (int i = 1; i <= size; ++i) {
    for (int j = i; j <= size; ++j) {
      std::vector<int>& col =
          b.add("sym" + std::to_string(i) + "_" + std::to_string(j));
      col[linearize({i, j, 1}, size, 1)] = 1;
      if (i != j) col[linearize({j, i, 1}, size, 1)] = 1;
    }
  }
  return b.finish();
}

ModelMatrix stack_matrix(const ModelMatrix& base, int layers, Stacking mode) {
  if (mode == Stacking::single) {
    throw InvalidArgument("stack_matrix requires a stacked mode (m0/m1/m2)");
  }
  if (layers < 2 || layers > kMaxLayers) {
    throw InvalidArgument("stacking requires 2.." + std::to_string(kMaxLayers) +
                          " layers, got " + std::to_string(layers));
  }
  const int cells = base.rows();
  const int total_rows = cells * layers;
  Builder b(total_rows);

  if (mode == Stacking::m0) {
    for (int c = 0; c < base.cols(); ++c) {
      std::vector<int>& col = b.add(base.column_label(c));
      for (int h = 0; h < layers; ++h) {
        for (int r = 0; r < cells; ++r) {
          col[h * cells + r] = base.entry(r, c);
        }
      }
    }
    for (int h = 1; h <= layers; ++h) {
      std::vector<int>& col = b.add("layer" + std::to_string(h));
      for (int r = 0; r < cells; ++r) col[(h - 1) * cells + r] = 1;
    }
    return b.finish();
  }

  // m1 and m2 share the block-diagonal part.
  for (int h = 1; h <= layers; ++h) {
    for (int c = 0; c < base.cols(); ++c) {
      std::vector<int>& col =
          b.add("L" + std::to_string(h) + "." + base.column_label(c));
      for (int r = 0; r < cells; ++r) {
        col[(h - 1) * cells + r] = base.entry(r, c);
      }
    }
  }
  if (mode == Stacking::m2) {
    for (int r = 0; r < cells; ++r) {
      std::vector<int>& col = b.add("cell" + std::to_string(r));
      for (int h = 0; h < layers; ++h) col[h * cells + r] = 1;
    }
  }
  return b.finish();
}

ModelMatrix build_model_matrix(const ModelSpec& spec) {
  spec.validate();
  ModelMatrix base = [&] {
    switch (spec.base) {
      case BaseModel::independence: return independence_matrix(spec.size);
      case BaseModel::quasi_independence:
        return quasi_independence_matrix(spec.size);
      case BaseModel::quasi_symmetry: return quasi_symmetry_matrix(spec.size);
    }
    throw InvalidArgument("unknown base model");
  }();
  if (spec.stacking == Stacking::single) return base;
  return stack_matrix(base, spec.layers, spec.stacking);
}

namespace {

std::vector<std::vector<BigInt>> concat_columns(const ModelMatrix& a,
                                                const ModelMatrix& b) {
  if (a.rows() != b.rows()) {
    throw InvalidArgument("matrices act on different cell sets (" +
                          std::to_string(a.rows()) + " vs " +
                          std::to_string(b.rows()) + " rows)");
  }
  std::vector<std::vector<BigInt>> rows(a.rows());
  for (int r = 0; r < a.rows(); ++r) {
    rows[r].resize(static_cast<std::size_t>(a.cols()) + b.cols());
    for (int c = 0; c < a.cols(); ++c) rows[r][c] = a.entry(r, c);
    for (int c = 0; c < b.cols(); ++c) rows[r][a.cols() + c] = b.entry(r, c);
  }
  return rows;
}

}  // namespace

bool column_space_contains(const ModelMatrix& outer, const ModelMatrix& inner) {
  return exact_rank(concat_columns(outer, inner)) == outer.rank();
}

int nested_df(const ModelMatrix& null_matrix, const ModelMatrix& alt_matrix) {
  if (!column_space_contains(alt_matrix, null_matrix)) {
    throw InvalidArgument(
        "models are not nested: null column space is not contained in the "
        "alternative's");
  }
  return alt_matrix.rank() - null_matrix.rank();
}

std::string format_matrix(const ModelMatrix& matrix) {
  std::ostringstream out;
  out << matrix.rows() << ' ' << matrix.cols() << '\n';
  for (int r = 0; r < matrix.rows(); ++r) {
    for (int c = 0; c < matrix.cols(); ++c) {
      if (c) out << ' ';
      out << matrix.entry(r, c);
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace quasix

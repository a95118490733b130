#include "markov_basis.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <numeric>
#include <sstream>

#include "error.hpp"

namespace quasix {

namespace {

// Flip sign so the first nonzero entry is positive.
void canonicalize_sign(Move& move) {
  for (int e : move.entries) {
    if (e > 0) return;
    if (e < 0) {
      for (int& x : move.entries) x = -x;
      return;
    }
  }
}

void sort_and_dedupe(std::vector<Move>& moves) {
  std::sort(moves.begin(), moves.end(),
            [](const Move& a, const Move& b) { return a.entries < b.entries; });
  moves.erase(std::unique(moves.begin(), moves.end()), moves.end());
}

void verify_all(const std::vector<Move>& moves, const ModelMatrix& matrix,
                const std::string& what) {
  for (const Move& move : moves) {
    if (!verify_move(matrix, move)) {
      throw Error("internal: generated " + what +
                  " move does not lie in the kernel of the model matrix");
    }
  }
}

void check_loop(const Loop& loop, int size) {
  const int r = loop.degree();
  if (r < 2 || loop.cols.size() != static_cast<std::size_t>(r)) {
    throw InvalidArgument("loop needs equal row/column counts of length >= 2");
  }
  auto check_axis = [&](const std::vector<int>& v, const char* name) {
    for (int x : v) {
      if (x < 1 || x > size) {
        throw InvalidArgument(std::string(name) + " index " +
                              std::to_string(x) + " out of range 1.." +
                              std::to_string(size));
      }
    }
    std::vector<int> sorted = v;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw InvalidArgument(std::string("repeated ") + name +
                            " index in loop");
    }
  };
  check_axis(loop.rows, "row");
  check_axis(loop.cols, "column");
}

// Enumerate r-subsets of {1..n} in lexicographic order.
template <typename Fn>
void for_each_subset(int n, int r, Fn&& fn) {
  std::vector<int> subset(r);
  std::iota(subset.begin(), subset.end(), 1);
  while (true) {
    fn(static_cast<const std::vector<int>&>(subset));
    int i = r - 1;
    while (i >= 0 && subset[i] == n - (r - 1 - i)) --i;
    if (i < 0) return;
    ++subset[i];
    for (int k = i + 1; k < r; ++k) subset[k] = subset[k - 1] + 1;
  }
}

}  // namespace

Move loop_move(const Loop& loop, int size) {
  check_loop(loop, size);
  const int r = loop.degree();
  Move move{size, 1, std::vector<int>(size * size, 0)};
  for (int k = 0; k < r; ++k) {
    const int next = (k + 1) % r;
    move.entries[linearize({loop.rows[k], loop.cols[k], 1}, size, 1)] += 1;
    move.entries[linearize({loop.rows[k], loop.cols[next], 1}, size, 1)] -= 1;
  }
  return move;
}

bool is_df1(const Loop& loop, const CellPattern& fixed) {
  const int size = fixed.size();
  check_loop(loop, size);
  const int r = loop.degree();
  for (int k = 0; k < r; ++k) {
    const int next = (k + 1) % r;
    if (fixed.contains(loop.rows[k], loop.cols[k]) ||
        fixed.contains(loop.rows[k], loop.cols[next])) {
      throw InvalidArgument("loop support must be disjoint from the fixed cells");
    }
  }
  // The loop occupies 2r of the grid cells; any further allowed cell is a
  // chord of the support cycle and creates a second loop.
  int allowed = 0;
  for (int i : loop.rows) {
    for (int j : loop.cols) {
      if (!fixed.contains(i, j)) ++allowed;
    }
  }
  return allowed == 2 * r;
}

namespace {

// Bipartite allowed-cell graph on an r x r grid; rows 0..r-1, cols 0..r-1.
struct Grid {
  int r;
  std::vector<std::vector<char>> allowed;  // [row][col]
  std::vector<int> row_degree, col_degree;
  int edges = 0;

  Grid(const std::vector<int>& rows, const std::vector<int>& cols,
       const CellPattern& fixed)
      : r(static_cast<int>(rows.size())),
        allowed(rows.size(), std::vector<char>(cols.size(), 0)),
        row_degree(rows.size(), 0),
        col_degree(cols.size(), 0) {
    for (int a = 0; a < r; ++a) {
      for (int b = 0; b < r; ++b) {
        if (!fixed.contains(rows[a], cols[b])) {
          allowed[a][b] = 1;
          ++row_degree[a];
          ++col_degree[b];
          ++edges;
        }
      }
    }
  }
};

// Alternating-sign move from a closed row-col walk. `cycle` lists vertices
// row0, col0, row1, col1, ...; edge k joins cycle[k] and cycle[k+1].
Move move_from_cycle(const std::vector<int>& rows, const std::vector<int>& cols,
                     const std::vector<std::pair<bool, int>>& cycle, int size) {
  Move move{size, 1, std::vector<int>(size * size, 0)};
  const int len = static_cast<int>(cycle.size());
  for (int k = 0; k < len; ++k) {
    const auto& a = cycle[k];
    const auto& b = cycle[(k + 1) % len];
    const int row = a.first ? rows[a.second] : rows[b.second];
    const int col = a.first ? cols[b.second] : cols[a.second];
    move.entries[linearize({row, col, 1}, size, 1)] += (k % 2 == 0) ? 1 : -1;
  }
  canonicalize_sign(move);
  return move;
}

// All Hamiltonian cycles of the grid graph, one representative per
// undirected cycle. Vertices are (is_row, index) pairs; the walk starts at
// row 0 and the first column visited is kept smaller than the last to kill
// reflections.
void hamiltonian_cycles(const Grid& grid,
                        const std::function<void(const std::vector<std::pair<bool, int>>&)>& emit) {
  const int r = grid.r;
  for (int d : grid.row_degree) {
    if (d < 2) return;
  }
  for (int d : grid.col_degree) {
    if (d < 2) return;
  }
  std::vector<std::pair<bool, int>> path;
  std::vector<char> row_used(r, 0), col_used(r, 0);
  path.reserve(2 * r);
  path.emplace_back(true, 0);
  row_used[0] = 1;

  auto dfs = [&](auto&& self) -> void {
    const auto [at_row, idx] = path.back();
    if (static_cast<int>(path.size()) == 2 * r) {
      // Close back to row 0 and keep one direction only.
      if (!at_row && grid.allowed[0][idx] && path[1].second < idx) {
        emit(path);
      }
      return;
    }
    if (at_row) {
      for (int j = 0; j < r; ++j) {
        if (!col_used[j] && grid.allowed[idx][j]) {
          col_used[j] = 1;
          path.emplace_back(false, j);
          self(self);
          path.pop_back();
          col_used[j] = 0;
        }
      }
    } else {
      for (int i = 1; i < r; ++i) {
        if (!row_used[i] && grid.allowed[i][idx]) {
          row_used[i] = 1;
          path.emplace_back(true, i);
          self(self);
          path.pop_back();
          row_used[i] = 0;
        }
      }
    }
  };
  dfs(dfs);
}

}  // namespace

MarkovBasis qi_markov_basis(int size) {
  return qi_markov_basis(size, CellPattern::diagonal(size));
}

MarkovBasis qi_markov_basis(int size, const CellPattern& fixed) {
  if (size < 3) {
    throw InvalidArgument("quasi-independence basis requires size >= 3");
  }
  if (fixed.size() != size) {
    throw InvalidArgument("fixed-cell pattern size does not match table size");
  }
  const ModelMatrix matrix = quasi_independence_matrix(size, fixed);
  std::vector<Move> moves;
  for (int r = 2; r <= size; ++r) {
    for_each_subset(size, r, [&](const std::vector<int>& rows) {
      for_each_subset(size, r, [&](const std::vector<int>& cols) {
        const Grid grid(rows, cols, fixed);
        // A df-1 loop exists on this grid exactly when the allowed cells
        // form a single spanning cycle.
        if (grid.edges != 2 * r) return;
        bool regular = true;
        for (int d : grid.row_degree) regular = regular && d == 2;
        for (int d : grid.col_degree) regular = regular && d == 2;
        if (!regular) return;
        hamiltonian_cycles(grid, [&](const std::vector<std::pair<bool, int>>& cycle) {
          moves.push_back(move_from_cycle(rows, cols, cycle, size));
        });
      });
    });
  }
  sort_and_dedupe(moves);
  verify_all(moves, matrix, "quasi-independence Markov");
  MarkovBasis basis{ModelSpec::single_table(BaseModel::quasi_independence, size),
                    std::move(moves)};
  return basis;
}

MarkovBasis qi_graver_basis(int size) {
  return qi_graver_basis(size, CellPattern::diagonal(size));
}

MarkovBasis qi_graver_basis(int size, const CellPattern& fixed) {
  if (size < 3) {
    throw InvalidArgument("quasi-independence basis requires size >= 3");
  }
  if (fixed.size() != size) {
    throw InvalidArgument("fixed-cell pattern size does not match table size");
  }
  const ModelMatrix matrix = quasi_independence_matrix(size, fixed);
  std::vector<Move> moves;
  for (int r = 2; r <= size; ++r) {
    for_each_subset(size, r, [&](const std::vector<int>& rows) {
      for_each_subset(size, r, [&](const std::vector<int>& cols) {
        const Grid grid(rows, cols, fixed);
        if (grid.edges < 2 * r) return;
        hamiltonian_cycles(grid, [&](const std::vector<std::pair<bool, int>>& cycle) {
          moves.push_back(move_from_cycle(rows, cols, cycle, size));
        });
      });
    });
  }
  sort_and_dedupe(moves);
  verify_all(moves, matrix, "quasi-independence Graver");
  MarkovBasis basis{ModelSpec::single_table(BaseModel::quasi_independence, size),
                    std::move(moves)};
  return basis;
}

MarkovBasis qs_markov_basis(int size) {
  if (size < 3) {
    throw InvalidArgument("quasi-symmetry basis requires size >= 3");
  }
  const ModelMatrix matrix = quasi_symmetry_matrix(size);
  std::vector<Move> moves;
  // One move per undirected cycle on an r-subset of categories: +1 along
  // the cycle, -1 along the reverse. Fixing the smallest category first and
  // orienting towards the smaller neighbour kills rotations and reflections.
  for (int r = 3; r <= size; ++r) {
    for_each_subset(size, r, [&](const std::vector<int>& subset) {
      std::vector<int> rest(subset.begin() + 1, subset.end());
      std::sort(rest.begin(), rest.end());
      do {
        if (rest.front() > rest.back()) continue;
        Move move{size, 1, std::vector<int>(size * size, 0)};
        int prev = subset[0];
        for (std::size_t k = 0; k <= rest.size(); ++k) {
          const int next = k < rest.size() ? rest[k] : subset[0];
          move.entries[linearize({prev, next, 1}, size, 1)] += 1;
          move.entries[linearize({next, prev, 1}, size, 1)] -= 1;
          prev = next;
        }
        canonicalize_sign(move);
        moves.push_back(std::move(move));
      } while (std::next_permutation(rest.begin(), rest.end()));
    });
  }
  sort_and_dedupe(moves);
  verify_all(moves, matrix, "quasi-symmetry");
  MarkovBasis basis{ModelSpec::single_table(BaseModel::quasi_symmetry, size),
                    std::move(moves)};
  return basis;
}

MarkovBasis independence_markov_basis(int size) {
  if (size < 2) {
    throw InvalidArgument("independence basis requires size >= 2");
  }
  const ModelMatrix matrix = independence_matrix(size);
  std::vector<Move> moves;
  for_each_subset(size, 2, [&](const std::vector<int>& rows) {
    for_each_subset(size, 2, [&](const std::vector<int>& cols) {
      moves.push_back(loop_move({rows, cols}, size));
    });
  });
  sort_and_dedupe(moves);
  verify_all(moves, matrix, "independence");
  MarkovBasis basis{ModelSpec::single_table(BaseModel::independence, size),
                    std::move(moves)};
  return basis;
}

std::vector<Move> type2_moves(int size, int layers) {
  if (layers < 2) {
    throw InvalidArgument("type-2 moves require at least 2 layers");
  }
  const int cells = size * size;
  std::vector<Move> moves;
  moves.reserve(static_cast<std::size_t>(cells) * (cells - 1) / 2 *
                layers * (layers - 1) / 2);
  for (int c1 = 0; c1 < cells; ++c1) {
    for (int c2 = c1 + 1; c2 < cells; ++c2) {
      for (int h1 = 0; h1 < layers; ++h1) {
        for (int h2 = h1 + 1; h2 < layers; ++h2) {
          Move move{size, layers, std::vector<int>(cells * layers, 0)};
          move.entries[h1 * cells + c1] = 1;
          move.entries[h1 * cells + c2] = -1;
          move.entries[h2 * cells + c1] = -1;
          move.entries[h2 * cells + c2] = 1;
          moves.push_back(std::move(move));
        }
      }
    }
  }
  return moves;
}

MarkovBasis m0_basis(const MarkovBasis& base, int size, int layers) {
  if (base.spec.stacking != Stacking::single || base.spec.size != size) {
    throw InvalidArgument("m0_basis needs the single-table basis of the model");
  }
  if (base.spec.base == BaseModel::independence) {
    throw Unsupported(
        "stacked bases are constructed for quasi-independence and "
        "quasi-symmetry only");
  }
  if (layers < 2 || layers > kMaxLayers) {
    throw InvalidArgument("m0 requires 2.." + std::to_string(kMaxLayers) +
                          " layers");
  }
  const ModelSpec spec =
      ModelSpec::stacked(base.spec.base, Stacking::m0, size, layers);
  const ModelMatrix matrix = build_model_matrix(spec);
  const int cells = size * size;
  std::vector<Move> moves;

  // Type 1: distribute the nonzero rows of each base move over the layers,
  // including the assignments that keep every row in one layer.
  for (const Move& m : base.moves) {
    std::vector<int> nz_rows;
    for (int i = 0; i < size; ++i) {
      for (int j = 0; j < size; ++j) {
        if (m.entries[i * size + j] != 0) {
          nz_rows.push_back(i);
          break;
        }
      }
    }
    const int r = static_cast<int>(nz_rows.size());
    std::vector<int> assign(r, 0);
    while (true) {
      Move split{size, layers, std::vector<int>(cells * layers, 0)};
      for (int k = 0; k < r; ++k) {
        const int i = nz_rows[k];
        const int h = assign[k];
        for (int j = 0; j < size; ++j) {
          split.entries[h * cells + i * size + j] = m.entries[i * size + j];
        }
      }
      canonicalize_sign(split);
      moves.push_back(std::move(split));
      int k = r - 1;
      while (k >= 0 && assign[k] == layers - 1) assign[k--] = 0;
      if (k < 0) break;
      ++assign[k];
    }
  }

  // Type 2: cross-layer swaps on arbitrary pairs of distinct cells.
  std::vector<Move> swaps = type2_moves(size, layers);
  moves.insert(moves.end(), std::make_move_iterator(swaps.begin()),
               std::make_move_iterator(swaps.end()));

  sort_and_dedupe(moves);
  verify_all(moves, matrix, "m0");
  return MarkovBasis{spec, std::move(moves)};
}

MarkovBasis m1_basis(const MarkovBasis& base, int layers) {
  if (base.spec.stacking != Stacking::single) {
    throw InvalidArgument("m1_basis needs a single-table basis");
  }
  if (base.spec.base == BaseModel::independence) {
    throw Unsupported(
        "stacked bases are constructed for quasi-independence and "
        "quasi-symmetry only");
  }
  if (layers < 2 || layers > kMaxLayers) {
    throw InvalidArgument("m1 requires 2.." + std::to_string(kMaxLayers) +
                          " layers");
  }
  const int size = base.spec.size;
  const ModelSpec spec =
      ModelSpec::stacked(base.spec.base, Stacking::m1, size, layers);
  const ModelMatrix matrix = build_model_matrix(spec);
  const int cells = size * size;
  std::vector<Move> moves;
  moves.reserve(base.moves.size() * layers);
  for (const Move& m : base.moves) {
    for (int h = 0; h < layers; ++h) {
      Move embedded{size, layers, std::vector<int>(cells * layers, 0)};
      std::copy(m.entries.begin(), m.entries.end(),
                embedded.entries.begin() + static_cast<std::ptrdiff_t>(h) * cells);
      moves.push_back(std::move(embedded));
    }
  }
  sort_and_dedupe(moves);
  verify_all(moves, matrix, "m1");
  return MarkovBasis{spec, std::move(moves)};
}

MarkovBasis m2_basis_two_layers(const MarkovBasis& graver) {
  if (graver.spec.stacking != Stacking::single) {
    throw InvalidArgument("m2_basis_two_layers needs a single-table Graver basis");
  }
  const int size = graver.spec.size;
  const ModelSpec spec =
      ModelSpec::stacked(graver.spec.base, Stacking::m2, size, 2);
  const ModelMatrix matrix = build_model_matrix(spec);
  const int cells = size * size;
  std::vector<Move> moves;
  moves.reserve(graver.moves.size());
  for (const Move& m : graver.moves) {
    Move lifted{size, 2, std::vector<int>(cells * 2, 0)};
    for (int k = 0; k < cells; ++k) {
      lifted.entries[k] = m.entries[k];
      lifted.entries[cells + k] = -m.entries[k];
    }
    moves.push_back(std::move(lifted));
  }
  sort_and_dedupe(moves);
  verify_all(moves, matrix, "m2");
  return MarkovBasis{spec, std::move(moves)};
}

bool verify_move(const ModelMatrix& matrix, const Move& move) {
  if (matrix.rows() != move.cells()) {
    throw InvalidArgument("move has " + std::to_string(move.cells()) +
                          " cells, matrix has " +
                          std::to_string(matrix.rows()) + " rows");
  }
  for (int c = 0; c < matrix.cols(); ++c) {
    std::int64_t dot = 0;
    for (int k : matrix.column_support()[c]) dot += move.entries[k];
    if (dot != 0) return false;
  }
  return true;
}

MarkovBasis build_markov_basis(const ModelSpec& spec) {
  spec.validate();
  if (spec.stacking == Stacking::single) {
    switch (spec.base) {
      case BaseModel::independence:
        return independence_markov_basis(spec.size);
      case BaseModel::quasi_independence:
        return qi_markov_basis(spec.size);
      case BaseModel::quasi_symmetry:
        return qs_markov_basis(spec.size);
    }
    throw InvalidArgument("unknown base model");
  }
  if (spec.base == BaseModel::independence) {
    throw Unsupported(
        "stacked bases are constructed for quasi-independence and "
        "quasi-symmetry only");
  }
  const MarkovBasis single = spec.base == BaseModel::quasi_independence
                                 ? qi_markov_basis(spec.size)
                                 : qs_markov_basis(spec.size);
  switch (spec.stacking) {
    case Stacking::m0:
      return m0_basis(single, spec.size, spec.layers);
    case Stacking::m1:
      return m1_basis(single, spec.layers);
    case Stacking::m2: {
      if (spec.layers != 2) {
        throw Unsupported(
            "unsupported: the m2 (Lawrence lifting) basis is constructed for "
            "H=2 only");
      }
      // For quasi-symmetry the Markov basis is already a Graver basis; for
      // quasi-independence the Graver basis takes all loop degrees.
      const MarkovBasis graver = spec.base == BaseModel::quasi_independence
                                     ? qi_graver_basis(spec.size)
                                     : single;
      return m2_basis_two_layers(graver);
    }
    case Stacking::single:
      break;
  }
  throw InvalidArgument("unknown stacking");
}

std::string format_basis(const MarkovBasis& basis, BasisFormat format) {
  std::ostringstream out;
  const int cells = basis.spec.cells();
  if (format == BasisFormat::matrix) {
    out << basis.moves.size() << ' ' << cells << '\n';
  }
  for (const Move& move : basis.moves) {
    for (int k = 0; k < cells; ++k) {
      if (k) out << ' ';
      out << move.entries[k];
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace quasix

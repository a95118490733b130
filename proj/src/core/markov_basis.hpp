#pragma once

#include <string>
#include <vector>

#include "model_matrix.hpp"
#include "table.hpp"

namespace quasix {

// Integer-valued table of the same shape as the data whose sufficient
// statistic is zero; entries in the global cell order.
struct Move {
  int size = 0;
  int layers = 1;
  std::vector<int> entries;

  int cells() const { return size * size * layers; }
  bool operator==(const Move&) const = default;
};

// +1 at (rows[k], cols[k]), -1 at (rows[k], cols[k+1]) cyclically; degree 2
// is the basic move. Row indices are pairwise distinct, likewise columns.
struct Loop {
  std::vector<int> rows;
  std::vector<int> cols;

  int degree() const { return static_cast<int>(rows.size()); }
};

Move loop_move(const Loop& loop, int size);

// A loop has df 1 when its row-by-column grid, restricted to the allowed
// cells (off `fixed`), supports no loop besides the given one. Equivalently:
// the grid carries exactly one degree of freedom, so the only allowed grid
// cells are the loop's own 2r support cells.
bool is_df1(const Loop& loop, const CellPattern& fixed);

struct MarkovBasis {
  ModelSpec spec;
  std::vector<Move> moves;  // each stored once; sign closure implied

  std::size_t count() const { return moves.size(); }
};

// Unique minimal Markov basis for quasi-independence with fixed cells on
// `fixed`: all df-1 loops of degree 2..I with support off the fixed cells.
// With the default diagonal pattern only degrees 2 and 3 survive.
MarkovBasis qi_markov_basis(int size);
MarkovBasis qi_markov_basis(int size, const CellPattern& fixed);

// Graver basis for quasi-independence: all loops of degree 2..I with support
// off the fixed cells.
MarkovBasis qi_graver_basis(int size);
MarkovBasis qi_graver_basis(int size, const CellPattern& fixed);

// Markov (= Graver) basis for quasi-symmetry: one move per undirected cycle
// on an r-subset of categories, 3 <= r <= I, with +1 along the cycle and -1
// along its reverse; (r-1)!/2 moves per r-subset.
MarkovBasis qs_markov_basis(int size);

// Markov basis for the independence model: all basic moves.
MarkovBasis independence_markov_basis(int size);

// Cross-layer swaps: +1/-1 at two distinct cells of one layer and the
// opposite signs at the same cells of another layer.
std::vector<Move> type2_moves(int size, int layers);

// Basis for the common-model stacking m0: every assignment of the nonzero
// rows of every base move to layers (type 1), plus the cross-layer swaps
// (type 2).
MarkovBasis m0_basis(const MarkovBasis& base, int size, int layers);

// Basis for the per-layer stacking m1: each base move embedded in each layer.
MarkovBasis m1_basis(const MarkovBasis& base, int layers);

// Graver (hence Markov) basis for the Lawrence lifting m2 with two layers:
// (m, -m) for every Graver element of the base model.
MarkovBasis m2_basis_two_layers(const MarkovBasis& graver);

// True iff every column of the model matrix has zero inner product with the
// move, i.e. the move preserves the sufficient statistic.
bool verify_move(const ModelMatrix& matrix, const Move& move);

// Dispatch on the spec; stacked bases are constructed for
// quasi-independence and quasi-symmetry (m2 additionally requires exactly
// two layers).
MarkovBasis build_markov_basis(const ModelSpec& spec);

enum class BasisFormat { moves, matrix };

// One move per line as K' space-separated integers; `matrix` prepends the
// `n d` header so the output doubles as an integer-matrix file.
std::string format_basis(const MarkovBasis& basis, BasisFormat format);

}  // namespace quasix

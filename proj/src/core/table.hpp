#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace quasix {

// Largest supported table side. Basis sizes grow combinatorially with the
// side, so anything beyond this is refused up front with a clear message.
inline constexpr int kMaxTableSize = 12;
inline constexpr int kMaxLayers = 8;

// 1-based cell address: row i, column j, layer h.
struct CellIndex {
  int row = 1;
  int col = 1;
  int layer = 1;
};

// Global cell order: layer-major, then row-major. Every model matrix row,
// move entry and CSV layout in this library uses this one order.
int linearize(const CellIndex& cell, int size, int layers);
CellIndex delinearize(int index, int size, int layers);

struct Margins {
  std::vector<std::int64_t> rows;
  std::vector<std::int64_t> cols;
};

// Immutable I x I table of nonnegative counts.
class SquareTable {
 public:
  SquareTable(int size, std::vector<std::int64_t> counts);

  static SquareTable zeros(int size);

  int size() const { return size_; }
  std::int64_t at(int row, int col) const;  // 1-based
  std::int64_t total() const;
  Margins margins() const;
  SquareTable transposed() const;
  SquareTable plus(std::span<const int> move) const;

  std::span<const std::int64_t> counts() const { return counts_; }

 private:
  int size_;
  std::vector<std::int64_t> counts_;  // row-major
};

// Immutable stack of H square tables of common size (H = 1 is allowed and
// covers the single-table case).
class StackedTable {
 public:
  StackedTable(int size, int layers, std::vector<std::int64_t> counts);

  static StackedTable from_layers(const std::vector<SquareTable>& layers);
  static StackedTable from_square(const SquareTable& table);

  int size() const { return size_; }
  int layers() const { return layers_; }
  std::int64_t at(int row, int col, int layer) const;  // 1-based
  std::int64_t layer_total(int layer) const;
  std::int64_t total() const;
  SquareTable layer(int layer) const;

  std::span<const std::int64_t> counts() const { return counts_; }

 private:
  int size_;
  int layers_;
  std::vector<std::int64_t> counts_;  // layer-major, row-major inside a layer
};

// Set of distinguished cells of a single layer (the fixed-count /
// structural-zero pattern S).
class CellPattern {
 public:
  explicit CellPattern(int size);
  static CellPattern diagonal(int size);
  static CellPattern none(int size);

  int size() const { return size_; }
  void add(int row, int col);
  bool contains(int row, int col) const;
  int count() const;

 private:
  int size_;
  std::vector<char> mask_;
};

// CSV ingestion. First non-blank line is the header `I,H`, followed by H*I
// data lines of I comma-separated nonnegative integers, layers in order,
// rows in order. Whitespace-tolerant; blank lines and `#` comment lines are
// ignored. Parse errors carry `source:line`.
StackedTable read_csv(std::istream& in, const std::string& source);
StackedTable read_csv_file(const std::string& path);

}  // namespace quasix

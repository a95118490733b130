#include "table.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <numeric>
#include <sstream>

#include "error.hpp"

namespace quasix {

namespace {

void check_dims(int size, int layers) {
  if (size < 1 || size > kMaxTableSize) {
    throw InvalidArgument("table size must be in 1.." +
                          std::to_string(kMaxTableSize) + ", got " +
                          std::to_string(size));
  }
  if (layers < 1 || layers > kMaxLayers) {
    throw InvalidArgument("layer count must be in 1.." +
                          std::to_string(kMaxLayers) + ", got " +
                          std::to_string(layers));
  }
}

void check_counts(std::span<const std::int64_t> counts, std::size_t expected) {
  if (counts.size() != expected) {
    throw InvalidArgument("expected " + std::to_string(expected) +
                          " counts, got " + std::to_string(counts.size()));
  }
  for (std::int64_t c : counts) {
    if (c < 0) {
      throw InvalidArgument("cell counts must be nonnegative, got " +
                            std::to_string(c));
    }
  }
}

}  // namespace

int linearize(const CellIndex& cell, int size, int layers) {
  check_dims(size, layers);
  if (cell.row < 1 || cell.row > size || cell.col < 1 || cell.col > size ||
      cell.layer < 1 || cell.layer > layers) {
    throw InvalidArgument("cell index (" + std::to_string(cell.row) + "," +
                          std::to_string(cell.col) + "," +
                          std::to_string(cell.layer) +
                          ") out of range for size " + std::to_string(size) +
                          ", layers " + std::to_string(layers));
  }
  return (cell.layer - 1) * size * size + (cell.row - 1) * size +
         (cell.col - 1);
}

CellIndex delinearize(int index, int size, int layers) {
  check_dims(size, layers);
  const int cells = size * size * layers;
  if (index < 0 || index >= cells) {
    throw InvalidArgument("linear index " + std::to_string(index) +
                          " out of range 0.." + std::to_string(cells - 1));
  }
  CellIndex cell;
  cell.layer = index / (size * size) + 1;
  const int within = index % (size * size);
  cell.row = within / size + 1;
  cell.col = within % size + 1;
  return cell;
}

SquareTable::SquareTable(int size, std::vector<std::int64_t> counts)
    : size_(size), counts_(std::move(counts)) {
  check_dims(size_, 1);
  check_counts(counts_, static_cast<std::size_t>(size_) * size_);
}

SquareTable SquareTable::zeros(int size) {
  return SquareTable(size, std::vector<std::int64_t>(
                               static_cast<std::size_t>(size) * size, 0));
}

std::int64_t SquareTable::at(int row, int col) const {
  return counts_[linearize({row, col, 1}, size_, 1)];
}

std::int64_t SquareTable::total() const {
  return std::accumulate(counts_.begin(), counts_.end(), std::int64_t{0});
}

Margins SquareTable::margins() const {
  Margins m;
  m.rows.assign(size_, 0);
  m.cols.assign(size_, 0);
  for (int i = 0; i < size_; ++i) {
    for (int j = 0; j < size_; ++j) {
      const std::int64_t c = counts_[i * size_ + j];
      m.rows[i] += c;
      m.cols[j] += c;
    }
  }
  return m;
}

SquareTable SquareTable::transposed() const {
  std::vector<std::int64_t> t(counts_.size());
  for (int i = 0; i < size_; ++i) {
    for (int j = 0; j < size_; ++j) {
      t[j * size_ + i] = counts_[i * size_ + j];
    }
  }
  return SquareTable(size_, std::move(t));
}

SquareTable SquareTable::plus(std::span<const int> move) const {
  if (move.size() != counts_.size()) {
    throw InvalidArgument("move has " + std::to_string(move.size()) +
                          " entries, table has " +
                          std::to_string(counts_.size()));
  }
  std::vector<std::int64_t> out(counts_.size());
  for (std::size_t k = 0; k < counts_.size(); ++k) {
    out[k] = counts_[k] + move[k];
    if (out[k] < 0) {
      throw InvalidArgument("applying move yields a negative count at cell " +
                            std::to_string(k));
    }
  }
  return SquareTable(size_, std::move(out));
}

StackedTable::StackedTable(int size, int layers,
                           std::vector<std::int64_t> counts)
    : size_(size), layers_(layers), counts_(std::move(counts)) {
  check_dims(size_, layers_);
  check_counts(counts_, static_cast<std::size_t>(size_) * size_ * layers_);
}

StackedTable StackedTable::from_layers(const std::vector<SquareTable>& layers) {
  if (layers.empty()) {
    throw InvalidArgument("at least one layer required");
  }
  const int size = layers.front().size();
  std::vector<std::int64_t> counts;
  counts.reserve(static_cast<std::size_t>(size) * size * layers.size());
  for (const SquareTable& layer : layers) {
    if (layer.size() != size) {
      throw InvalidArgument("all layers must have the same size; got " +
                            std::to_string(layer.size()) + " and " +
                            std::to_string(size));
    }
    counts.insert(counts.end(), layer.counts().begin(), layer.counts().end());
  }
  return StackedTable(size, static_cast<int>(layers.size()),
                      std::move(counts));
}

StackedTable StackedTable::from_square(const SquareTable& table) {
  return StackedTable(table.size(), 1,
                      std::vector<std::int64_t>(table.counts().begin(),
                                                table.counts().end()));
}

std::int64_t StackedTable::at(int row, int col, int layer) const {
  return counts_[linearize({row, col, layer}, size_, layers_)];
}

std::int64_t StackedTable::layer_total(int layer) const {
  if (layer < 1 || layer > layers_) {
    throw InvalidArgument("layer " + std::to_string(layer) +
                          " out of range 1.." + std::to_string(layers_));
  }
  const int cells = size_ * size_;
  const auto begin = counts_.begin() + static_cast<std::ptrdiff_t>(layer - 1) * cells;
  return std::accumulate(begin, begin + cells, std::int64_t{0});
}

std::int64_t StackedTable::total() const {
  return std::accumulate(counts_.begin(), counts_.end(), std::int64_t{0});
}

SquareTable StackedTable::layer(int layer) const {
  if (layer < 1 || layer > layers_) {
    throw InvalidArgument("layer " + std::to_string(layer) +
                          " out of range 1.." + std::to_string(layers_));
  }
  const int cells = size_ * size_;
  const auto begin = counts_.begin() + static_cast<std::ptrdiff_t>(layer - 1) * cells;
  return SquareTable(size_, std::vector<std::int64_t>(begin, begin + cells));
}

CellPattern::CellPattern(int size) : size_(size) {
  check_dims(size, 1);
  mask_.assign(static_cast<std::size_t>(size) * size, 0);
}

CellPattern CellPattern::diagonal(int size) {
  CellPattern p(size);
  for (int i = 1; i <= size; ++i) p.add(i, i);
  return p;
}

CellPattern CellPattern::none(int size) { return CellPattern(size); }

void CellPattern::add(int row, int col) {
  mask_[linearize({row, col, 1}, size_, 1)] = 1;
}

bool CellPattern::contains(int row, int col) const {
  return mask_[linearize({row, col, 1}, size_, 1)] != 0;
}

int CellPattern::count() const {
  int n = 0;
  for (char m : mask_) n += m != 0;
  return n;
}

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> fields;
  std::string::size_type start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(trim(line.substr(start)));
      break;
    }
    fields.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return fields;
}

std::int64_t parse_count(const std::string& field, const std::string& where) {
  std::int64_t value = 0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end || field.empty()) {
    throw ParseError(where + ": expected an integer, got '" + field + "'");
  }
  if (value < 0) {
    throw ParseError(where + ": counts must be nonnegative, got " + field);
  }
  return value;
}

}  // namespace

StackedTable read_csv(std::istream& in, const std::string& source) {
  std::string line;
  int line_no = 0;
  int size = 0;
  int layers = 0;
  bool have_header = false;
  std::vector<std::int64_t> counts;
  std::size_t rows_needed = 0;
  std::size_t rows_read = 0;

  while (std::getline(in, line)) {
    ++line_no;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped.front() == '#') continue;
    const std::string where = source + ":" + std::to_string(line_no);
    const std::vector<std::string> fields = split_commas(stripped);

    if (!have_header) {
      if (fields.size() != 2) {
        throw ParseError(where + ": header must be 'I,H', got '" + stripped +
                         "'");
      }
      size = static_cast<int>(parse_count(fields[0], where));
      layers = static_cast<int>(parse_count(fields[1], where));
      if (size < 1 || size > kMaxTableSize) {
        throw ParseError(where + ": table size must be in 1.." +
                         std::to_string(kMaxTableSize) + ", got " +
                         std::to_string(size));
      }
      if (layers < 1 || layers > kMaxLayers) {
        throw ParseError(where + ": layer count must be in 1.." +
                         std::to_string(kMaxLayers) + ", got " +
                         std::to_string(layers));
      }
      rows_needed = static_cast<std::size_t>(size) * layers;
      counts.reserve(rows_needed * size);
      have_header = true;
      continue;
    }

    if (rows_read == rows_needed) {
      throw ParseError(where + ": unexpected extra data line (expected " +
                       std::to_string(rows_needed) + " rows)");
    }
    if (fields.size() != static_cast<std::size_t>(size)) {
      throw ParseError(where + ": expected " + std::to_string(size) +
                       " values, got " + std::to_string(fields.size()));
    }
    for (const std::string& field : fields) {
      counts.push_back(parse_count(field, where));
    }
    ++rows_read;
  }

  if (!have_header) {
    throw ParseError(source + ": empty input, missing 'I,H' header");
  }
  if (rows_read != rows_needed) {
    throw ParseError(source + ": expected " + std::to_string(rows_needed) +
                     " data rows, got " + std::to_string(rows_read));
  }
  return StackedTable(size, layers, std::move(counts));
}

StackedTable read_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ParseError(path + ": cannot open file");
  }
  return read_csv(in, path);
}

}  // namespace quasix

#include "fiber.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>

#include "error.hpp"

namespace quasix {

Fiber enumerate_fiber(const ModelMatrix& matrix,
                      std::span<const std::int64_t> table,
                      std::int64_t node_cap) {
  const int cells = matrix.rows();
  const int cols = matrix.cols();
  if (static_cast<int>(table.size()) != cells) {
    throw InvalidArgument("table has " + std::to_string(table.size()) +
                          " cells, matrix has " + std::to_string(cells) +
                          " rows");
  }
  if (!matrix.is_zero_one()) {
    throw Unsupported("fiber enumeration requires a 0/1 model matrix");
  }

  // Columns covering each cell, and the columns whose support ends at each
  // cell (their running statistic must be exact once the cell is assigned).
  std::vector<std::vector<int>> covering(cells);
  std::vector<std::vector<int>> ending_at(cells);
  for (int c = 0; c < cols; ++c) {
    const auto& support = matrix.column_support()[c];
    if (support.empty()) continue;
    for (int k : support) covering[k].push_back(c);
    ending_at[support.back()].push_back(c);
  }
  for (int k = 0; k < cells; ++k) {
    if (covering[k].empty()) {
      throw InvalidArgument(
          "cell " + std::to_string(k) +
          " is covered by no column; the fiber would be unbounded");
    }
  }

  std::vector<std::int64_t> residual(cols, 0);
  for (int c = 0; c < cols; ++c) {
    for (int k : matrix.column_support()[c]) residual[c] += table[k];
  }

  Fiber fiber;
  std::vector<std::int64_t> current(cells, 0);
  std::vector<double> log_weights;
  std::int64_t nodes = 0;

  auto dfs = [&](auto&& self, int k) -> void {
    if (k == cells) {
      fiber.members.push_back(current);
      double log_w = 0.0;
      for (std::int64_t f : current) {
        log_w -= std::lgamma(static_cast<double>(f) + 1.0);
      }
      log_weights.push_back(log_w);
      return;
    }
    std::int64_t ub = residual[covering[k].front()];
    for (int c : covering[k]) ub = std::min(ub, residual[c]);
    for (std::int64_t v = 0; v <= ub; ++v) {
      if (++nodes > node_cap) {
        throw CapExceeded("fiber enumeration exceeded the node cap of " +
                          std::to_string(node_cap));
      }
      current[k] = v;
      for (int c : covering[k]) residual[c] -= v;
      bool feasible = true;
      for (int c : ending_at[k]) {
        if (residual[c] != 0) {
          feasible = false;
          break;
        }
      }
      if (feasible) self(self, k + 1);
      for (int c : covering[k]) residual[c] += v;
    }
    current[k] = 0;
  };
  dfs(dfs, 0);

  // Normalize the hypergeometric weights in log space.
  const double top = *std::max_element(log_weights.begin(), log_weights.end());
  double sum = 0.0;
  fiber.weights.resize(log_weights.size());
  for (std::size_t i = 0; i < log_weights.size(); ++i) {
    fiber.weights[i] = std::exp(log_weights[i] - top);
    sum += fiber.weights[i];
  }
  for (double& w : fiber.weights) w /= sum;
  return fiber;
}

bool check_connectivity(const Fiber& fiber, const MarkovBasis& basis) {
  if (fiber.members.empty()) {
    throw InvalidArgument("fiber is empty");
  }
  if (fiber.size() == 1) return true;

  std::map<std::vector<std::int64_t>, int> index;
  for (std::size_t i = 0; i < fiber.members.size(); ++i) {
    index.emplace(fiber.members[i], static_cast<int>(i));
  }

  std::vector<char> seen(fiber.size(), 0);
  std::queue<int> frontier;
  frontier.push(0);
  seen[0] = 1;
  std::size_t reached = 1;
  std::vector<std::int64_t> neighbour;
  while (!frontier.empty()) {
    const int at = frontier.front();
    frontier.pop();
    for (const Move& move : basis.moves) {
      for (int sign : {1, -1}) {
        neighbour = fiber.members[at];
        bool ok = true;
        for (std::size_t k = 0; k < neighbour.size(); ++k) {
          neighbour[k] += sign * move.entries[k];
          if (neighbour[k] < 0) {
            ok = false;
            break;
          }
        }
        if (!ok) continue;
        const auto it = index.find(neighbour);
        if (it != index.end() && !seen[it->second]) {
          seen[it->second] = 1;
          ++reached;
          frontier.push(it->second);
        }
      }
    }
  }
  return reached == fiber.size();
}

double exact_pvalue_enumeration(
    const Fiber& fiber,
    const std::function<double(std::span<const std::int64_t>)>& statistic,
    double observed) {
  const double threshold = observed - 1e-9 * std::max(1.0, std::fabs(observed));
  double p = 0.0;
  for (std::size_t i = 0; i < fiber.members.size(); ++i) {
    if (statistic(fiber.members[i]) >= threshold) p += fiber.weights[i];
  }
  return p;
}

}  // namespace quasix

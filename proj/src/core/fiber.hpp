#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "markov_basis.hpp"
#include "model_matrix.hpp"

namespace quasix {

// A fully enumerated fiber: every nonnegative integer table sharing the
// observed sufficient statistic, with normalized hypergeometric weights.
struct Fiber {
  std::vector<std::vector<std::int64_t>> members;
  std::vector<double> weights;

  std::size_t size() const { return members.size(); }
};

inline constexpr std::int64_t kDefaultNodeCap = 1000000;

// Exhaustive depth-first enumeration over cells in the global order,
// pruning on the running column statistics. Throws CapExceeded when the
// search visits more than `node_cap` nodes.
Fiber enumerate_fiber(const ModelMatrix& matrix,
                      std::span<const std::int64_t> table,
                      std::int64_t node_cap = kDefaultNodeCap);

// Graph connectivity of the fiber under moves of the basis (both signs).
bool check_connectivity(const Fiber& fiber, const MarkovBasis& basis);

// Exact conditional p-value by total enumeration: the hypergeometric
// probability of a statistic at least as large as the observed one.
double exact_pvalue_enumeration(
    const Fiber& fiber,
    const std::function<double(std::span<const std::int64_t>)>& statistic,
    double observed);

}  // namespace quasix

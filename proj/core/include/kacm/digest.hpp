#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "kacm/kernels.hpp"
#include "kacm/measures.hpp"
#include "kacm/terminal.hpp"

namespace kacm {

std::uint64_t fnv1a64(std::string_view bytes);
std::string hex_digest(std::uint64_t d);

/// Identity of a symmetric moment problem E_x[f(X_t) prod_i A_i(t)^{k_i}]:
/// kernel, the multiset {(mu_i, k_i)}, terminal, x and t. The engine and the
/// Monte Carlo oracle both compute it; equal digests mean comparable numbers.
std::uint64_t product_problem_digest(const TransitionKernel& k,
                                     const std::vector<std::pair<RevuzMeasure, int>>& factors,
                                     const TerminalFunction& terminal, double x, double t);

/// Collapses a list of measures into (measure, multiplicity) pairs.
std::vector<std::pair<RevuzMeasure, int>> group_measures(const std::vector<RevuzMeasure>& measures);

}  // namespace kacm

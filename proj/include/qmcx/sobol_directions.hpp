#pragma once

#include <cstdint>
#include <vector>

namespace qmcx::detail {

int sobol_max_dim();

/// Direction integers v_1..v_depth for one Sobol coordinate, as fixed-point
/// integers with `depth` fractional bits (digit k sits at bit depth-k).
std::vector<std::uint64_t> sobol_direction_integers(int dim, int depth);

}  // namespace qmcx::detail

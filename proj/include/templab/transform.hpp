#pragma once

#include <vector>

#include "templab/grid.hpp"
#include "templab/system.hpp"

namespace templab {

// Per-family coordinate warp y = X_i(x) = int_{x0}^x mu_i(u(z))^{-1/2} dz and
// the pushforward T(f)_i(y) = f_i(X_i^{-1}(y)): X_i is computed by trapezoid
// cumulative integration, inverted by monotone linear interpolation, and the
// result is emitted on a uniform y-grid with the input's node count. The
// pushforward satisfies ||T(f)||_Lp <= c0^(-1/2p) ||f||_Lp (tight when mu is
// constant and c0 = mu).
std::vector<GridField> transform_T(const SystemSpec& sys, const GridField& u,
                                   const std::vector<GridField>& f);

} // namespace templab

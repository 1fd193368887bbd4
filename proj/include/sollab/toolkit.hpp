#pragma once

#include "sollab/field.hpp"

namespace sollab {

// f_(l)(r) = l^-2 f(r/l) and f_[l](r) = l^-3 f(r/l), resampled on f's grid.
RadialField rescale_h1(const RadialField& f, double lambda);
RadialField rescale_l2(const RadialField& f, double lambda);

// Extension of exterior data at R to (0, inf):
//   u_R(r) = 3 u(2R - r) - 2 u(3R - 2r) for r < R, u_R = u for r >= R.
// Matches value and first derivative at R. Throws when R > r_max / 2.
RadialField extend_inward(const RadialField& f);

} // namespace sollab

#pragma once

#include "hhoea/mesh.hpp"

namespace hhoea::test {

inline const Rect kFluidSquare{0, 1, 0, 1};
inline const Rect kSolidLeft{-1, 0, 0, 1};
inline const Rect kSolidBelow{0, 1, -1, 0};

inline Mesh coupled_squares(int level) { return build_cartesian_mesh(level, kFluidSquare, kSolidLeft); }

} // namespace hhoea::test

#pragma once

// The 24-element single-qubit Clifford group, ordered as in the usual
// axis/angle table: identity, π about x/y/z, ±π/2 about x/y/z, π about the
// six edge axes, ±2π/3 about the four body diagonals.

#include <string>
#include <vector>

#include "sage/types.hpp"

namespace sage {

struct CliffordElement {
  int index = 0;
  Eigen::Matrix2cd target;
  Eigen::Vector3d axis = Eigen::Vector3d::Zero();  // unit, zero for identity
  double angle = 0.0;                               // radians
  std::string description;                          // "pi about (x+y)/sqrt2"
  /// Primitive names as written in the AGE decomposition column, e.g. {"X", "S"}.
  std::vector<std::string> age_gates;
};

/// exp(-i angle n·σ / 2)
Eigen::Matrix2cd rotation(const Eigen::Vector3d& axis, double angle);

const std::vector<CliffordElement>& clifford_group();

/// Element equal to `u` up to global phase, or -1.
int clifford_index_of(const Eigen::Matrix2cd& u, double tol = 1e-7);

/// Index of U_a · U_b.
int clifford_multiply(int a, int b);
int clifford_inverse(int a);

}  // namespace sage

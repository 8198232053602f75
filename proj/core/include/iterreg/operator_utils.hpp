#pragma once

#include <Eigen/Core>
#include <cstdint>

#include "iterreg/linear_operator.hpp"

namespace iterreg {

/// Dense matrix of `op`: column j is apply(e_j). Testing oracle and SVD
/// feedstock; guarded to small domains.
/// Throws if the domain has more than `kMaterializeColumnLimit` columns.
inline constexpr int kMaterializeColumnLimit = 10000;
Eigen::MatrixXd materialize_matrix(const LinearOperator& op);

struct NormEstimate {
  double value = 0.0;
  bool zero_operator = false;
};

/// Power-iteration estimate of the largest singular value. The Rayleigh
/// quotient is nondecreasing in the iteration count and never exceeds the
/// true norm. Deterministic for a fixed seed.
NormEstimate estimate_operator_norm(const LinearOperator& op, int iterations,
                                    std::uint64_t seed = 0x5eed);

}  // namespace iterreg

#include "iterreg/operator_utils.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "iterreg/rng.hpp"

namespace iterreg {

Eigen::MatrixXd materialize_matrix(const LinearOperator& op) {
  const int n = op.domain_size();
  const int m = op.range_size();
  if (n > kMaterializeColumnLimit) {
    throw std::invalid_argument("materialize_matrix: domain has " + std::to_string(n) +
                                " columns, limit is " + std::to_string(kMaterializeColumnLimit));
  }
  Eigen::MatrixXd mat(m, n);
  GridImage basis = op.zero_domain();
  for (int j = 0; j < n; ++j) {
    basis.values[j] = 1.0;
    mat.col(j) = op.apply(basis).values;
    basis.values[j] = 0.0;
  }
  return mat;
}

NormEstimate estimate_operator_norm(const LinearOperator& op, int iterations, std::uint64_t seed) {
  if (iterations < 1) {
    throw std::invalid_argument("estimate_operator_norm: iterations must be >= 1");
  }
  Rng rng(seed);
  GridImage v = op.zero_domain();
  for (Eigen::Index i = 0; i < v.values.size(); ++i) v.values[i] = rng.gaussian();
  double vn = norm(v);
  if (vn == 0.0) v.values[0] = 1.0, vn = 1.0;
  v.values /= vn;

  double estimate = 0.0;
  for (int it = 0; it < iterations; ++it) {
    Sinogram av = op.apply(v);
    const double av_norm = norm(av);
    if (av_norm == 0.0) {
      return {0.0, true};
    }
    estimate = av_norm;  // ||Av|| / ||v|| with ||v|| == 1
    GridImage w = op.apply_adjoint(av);
    const double wn = norm(w);
    if (wn == 0.0) {
      return {estimate, false};
    }
    w.values /= wn;
    v = std::move(w);
  }
  return {estimate, false};
}

}  // namespace iterreg

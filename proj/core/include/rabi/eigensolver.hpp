#pragma once

// Lowest eigenpairs of real symmetric banded operators.

#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "rabi/model.hpp"

namespace rabi {

struct EigenPairs {
  std::vector<double> values;  ///< ascending
  Eigen::MatrixXd vectors;     ///< one unit column per requested vector
  int iterations = 0;          ///< Lanczos steps or inverse-iteration sweeps
  double max_residual = 0.0;   ///< max ||A v - lambda v|| over returned vectors
};

/// Band reduction plus bisection (LAPACK dsbevx) for the values, inverse
/// iteration on a banded LU factorization for the vectors. Cost is linear in
/// the dimension for fixed bandwidth.
/// `count` values are returned and the first `vectors` of them get vectors.
EigenPairs banded_lowest(const BandedSymmetric& a, int count, int vectors);

struct LanczosOptions {
  double tol = 1e-10;        ///< Ritz residual bound relative to the operator scale
  int max_iterations = 0;    ///< 0: up to the dimension
  std::uint64_t seed = 0x5eed;
};

using LinearOperator = std::function<void(const double* x, double* y)>;

/// Lanczos with full reorthogonalization. `scale` is an estimate of the
/// operator norm used to make `tol` relative.
/// Throws std::runtime_error if the wanted pairs do not converge.
EigenPairs lanczos_lowest(const LinearOperator& op, std::size_t dim, double scale, int count,
                          int vectors, const LanczosOptions& opts = {});

EigenPairs lanczos_lowest(const BandedSymmetric& a, int count, int vectors,
                          const LanczosOptions& opts = {});

}  // namespace rabi

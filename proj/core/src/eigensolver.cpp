#include "rabi/eigensolver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

#include <lapacke.h>

namespace rabi {

namespace {

double residual_norm(const BandedSymmetric& a, const Eigen::VectorXd& v, double lambda) {
  Eigen::VectorXd av(v.size());
  a.multiply(v.data(), av.data());
  return (av - lambda * v).norm();
}

void check_request(std::size_t dim, int count, int vectors) {
  if (count < 1) throw std::invalid_argument("eigensolver: count must be >= 1");
  if (vectors < 0 || vectors > count) {
    throw std::invalid_argument("eigensolver: vectors must lie in [0, count]");
  }
  if (static_cast<std::size_t>(count) > dim) {
    throw std::invalid_argument("eigensolver: more eigenpairs requested than the dimension");
  }
}

std::vector<double> banded_values(const BandedSymmetric& a, int count) {
  const auto n = static_cast<lapack_int>(a.n);
  const lapack_int kd = a.bandwidth();
  const lapack_int ldab = kd + 1;
  // Column-major upper storage: ab[(kd + i - j) + j * ldab] = A(i, j), i <= j.
  std::vector<double> ab(static_cast<std::size_t>(ldab) * a.n, 0.0);
  for (lapack_int k = 0; k <= kd; ++k) {
    const auto& band = a.bands[static_cast<std::size_t>(k)];
    for (std::size_t i = 0; i + static_cast<std::size_t>(k) < a.n; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(k);
      ab[static_cast<std::size_t>(kd - k) + j * static_cast<std::size_t>(ldab)] = band[i];
    }
  }

  std::vector<double> w(a.n);
  std::vector<lapack_int> ifail(a.n);
  double q_dummy = 0.0;
  double z_dummy = 0.0;
  lapack_int found = 0;
  const double abstol = 2.0 * LAPACKE_dlamch('S');
  const lapack_int info =
      LAPACKE_dsbevx(LAPACK_COL_MAJOR, 'N', 'I', 'U', n, kd, ab.data(), ldab, &q_dummy, 1, 0.0,
                     0.0, 1, count, abstol, &found, w.data(), &z_dummy, 1, ifail.data());
  if (info != 0 || found != count) {
    throw std::runtime_error("dsbevx failed (info = " + std::to_string(info) + ")");
  }
  w.resize(static_cast<std::size_t>(count));
  return w;
}

// Inverse iteration for the eigenvector of `lambda`, orthogonal to `prev`.
Eigen::VectorXd inverse_iteration(const BandedSymmetric& a, double lambda,
                                  const Eigen::MatrixXd& prev, int n_prev, int& sweeps) {
  const auto n = static_cast<lapack_int>(a.n);
  const lapack_int kl = a.bandwidth();
  const lapack_int ku = kl;
  const lapack_int ldab = 2 * kl + ku + 1;
  const double scale = std::max(a.norm_bound(), 1.0);
  const double eps = std::numeric_limits<double>::epsilon();

  std::vector<double> ab;
  std::vector<lapack_int> ipiv(a.n);
  double shift = lambda;
  for (int attempt = 0;; ++attempt) {
    ab.assign(static_cast<std::size_t>(ldab) * a.n, 0.0);
    auto at = [&](std::size_t i, std::size_t j) -> double& {
      return ab[static_cast<std::size_t>(kl + ku) + i - j + j * static_cast<std::size_t>(ldab)];
    };
    for (std::size_t i = 0; i < a.n; ++i) at(i, i) = a.bands[0][i] - shift;
    for (std::size_t k = 1; k < a.bands.size(); ++k) {
      for (std::size_t i = 0; i + k < a.n; ++i) {
        at(i, i + k) = a.bands[k][i];
        at(i + k, i) = a.bands[k][i];
      }
    }
    const lapack_int info = LAPACKE_dgbtrf(LAPACK_COL_MAJOR, n, n, kl, ku, ab.data(), ldab, ipiv.data());
    if (info == 0) break;
    if (info < 0 || attempt >= 8) {
      throw std::runtime_error("dgbtrf failed (info = " + std::to_string(info) + ")");
    }
    shift = lambda + scale * eps * std::pow(10.0, attempt + 1);
  }

  Eigen::VectorXd x(static_cast<Eigen::Index>(a.n));
  for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = 1.0 + 0.01 * static_cast<double>(i % 7);
  x.normalize();

  const double target = 64.0 * eps * scale * std::sqrt(static_cast<double>(a.n));
  for (sweeps = 1; sweeps <= 12; ++sweeps) {
    const lapack_int info = LAPACKE_dgbtrs(LAPACK_COL_MAJOR, 'N', n, kl, ku, 1, ab.data(), ldab,
                                           ipiv.data(), x.data(), n);
    if (info != 0) throw std::runtime_error("dgbtrs failed");
    for (int pass = 0; pass < 2; ++pass) {
      for (int k = 0; k < n_prev; ++k) x -= prev.col(k).dot(x) * prev.col(k);
    }
    const double nrm = x.norm();
    if (!(nrm > 0.0) || !std::isfinite(nrm)) throw std::runtime_error("inverse iteration broke down");
    x /= nrm;
    if (sweeps >= 2 && residual_norm(a, x, lambda) <= target) break;
  }
  return x;
}

}  // namespace

EigenPairs banded_lowest(const BandedSymmetric& a, int count, int vectors) {
  check_request(a.n, count, vectors);
  EigenPairs out;
  out.values = banded_values(a, count);
  out.vectors.resize(static_cast<Eigen::Index>(a.n), vectors);
  for (int k = 0; k < vectors; ++k) {
    int sweeps = 0;
    out.vectors.col(k) = inverse_iteration(a, out.values[static_cast<std::size_t>(k)], out.vectors, k, sweeps);
    out.iterations = std::max(out.iterations, sweeps);
    out.max_residual = std::max(out.max_residual,
                                residual_norm(a, out.vectors.col(k), out.values[static_cast<std::size_t>(k)]));
  }
  return out;
}

EigenPairs lanczos_lowest(const LinearOperator& op, std::size_t dim, double scale, int count,
                          int vectors, const LanczosOptions& opts) {
  check_request(dim, count, vectors);
  const auto n = static_cast<Eigen::Index>(dim);
  const int max_it = opts.max_iterations > 0 ? std::min<int>(opts.max_iterations, static_cast<int>(dim))
                                             : static_cast<int>(dim);
  scale = std::max(scale, std::numeric_limits<double>::min());

  Eigen::MatrixXd q(n, max_it);
  std::vector<double> alpha;
  std::vector<double> beta;  // beta[j] couples q_j and q_{j+1}
  alpha.reserve(static_cast<std::size_t>(max_it));
  beta.reserve(static_cast<std::size_t>(max_it));

  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = uni(rng);
  v.normalize();

  Eigen::VectorXd w(n);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ritz;
  int m = 0;
  bool converged = false;
  for (int j = 0; j < max_it; ++j) {
    q.col(j) = v;
    op(v.data(), w.data());
    alpha.push_back(v.dot(w));
    // Projecting out the whole basis also removes alpha q_j and beta q_{j-1};
    // the second pass is the usual reorthogonalization.
    for (int pass = 0; pass < 2; ++pass) {
      const Eigen::VectorXd c = q.leftCols(j + 1).transpose() * w;
      w -= q.leftCols(j + 1) * c;
    }
    m = j + 1;
    const double b = w.norm();
    const bool exhausted = b <= 1e-14 * scale || m == max_it;

    if (m >= count && (exhausted || m % 8 == 0 || m == count)) {
      Eigen::VectorXd d = Eigen::Map<Eigen::VectorXd>(alpha.data(), m);
      Eigen::VectorXd e = Eigen::VectorXd::Zero(std::max(m - 1, 0));
      for (int k = 0; k + 1 < m; ++k) e(k) = beta[static_cast<std::size_t>(k)];
      ritz.computeFromTridiagonal(d, e, Eigen::ComputeEigenvectors);
      double worst = 0.0;
      for (int k = 0; k < count; ++k) worst = std::max(worst, b * std::abs(ritz.eigenvectors()(m - 1, k)));
      if (worst <= opts.tol * scale || exhausted) {
        converged = worst <= opts.tol * scale || b <= 1e-14 * scale || m == static_cast<int>(dim);
        break;
      }
    }
    beta.push_back(b);
    v = w / b;
  }
  if (!converged) {
    throw std::runtime_error("Lanczos did not converge in " + std::to_string(m) + " iterations");
  }

  EigenPairs out;
  out.iterations = m;
  out.values.assign(ritz.eigenvalues().data(), ritz.eigenvalues().data() + count);
  out.vectors = q.leftCols(m) * ritz.eigenvectors().leftCols(vectors);
  for (int k = 0; k < vectors; ++k) {
    out.vectors.col(k).normalize();
    Eigen::VectorXd av(n);
    op(out.vectors.col(k).data(), av.data());
    out.max_residual = std::max(out.max_residual, (av - out.values[static_cast<std::size_t>(k)] * out.vectors.col(k)).norm());
  }
  return out;
}

EigenPairs lanczos_lowest(const BandedSymmetric& a, int count, int vectors, const LanczosOptions& opts) {
  const LinearOperator op = [&a](const double* x, double* y) { a.multiply(x, y); };
  return lanczos_lowest(op, a.n, a.norm_bound(), count, vectors, opts);
}

}  // namespace rabi

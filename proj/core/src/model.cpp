#include "rabi/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace rabi {

namespace {

void require_finite(double v, const char* name) {
  if (!std::isfinite(v)) {
    throw std::invalid_argument(std::string("non-finite parameter: ") + name);
  }
}

void check_couplings(const RabiCouplings& c) {
  require_finite(c.omega, "omega");
  require_finite(c.delta, "delta");
  require_finite(c.g_rot, "g_rot");
  require_finite(c.g_crot, "g_crot");
  require_finite(c.a2, "a2");
  require_finite(c.offset, "offset");
}

}  // namespace

double ModelParams::gtilde() const { return 2.0 * g / std::sqrt(omega * delta); }

void ModelParams::validate() const {
  require_finite(omega, "omega");
  require_finite(delta, "delta");
  require_finite(g, "g");
  require_finite(tau, "tau");
  require_finite(kappa, "kappa");
  if (omega <= 0.0) throw std::invalid_argument("omega must be > 0");
  if (delta <= 0.0) throw std::invalid_argument("delta must be > 0");
  if (g < 0.0) throw std::invalid_argument("g must be >= 0");
  if (kappa < 0.0) throw std::invalid_argument("kappa must be >= 0");
}

ModelParams params_from_rescaled(double gtilde, double tau, double kappa, double eta,
                                 double omega) {
  if (!(eta > 0.0) || !std::isfinite(eta)) throw std::invalid_argument("eta must be > 0");
  if (!(omega > 0.0) || !std::isfinite(omega)) throw std::invalid_argument("omega must be > 0");
  if (!(gtilde >= 0.0) || !std::isfinite(gtilde)) {
    throw std::invalid_argument("gtilde must be >= 0");
  }
  ModelParams p;
  p.omega = omega;
  p.delta = eta * omega;
  p.g = 0.5 * gtilde * std::sqrt(omega * p.delta);
  p.tau = tau;
  p.kappa = kappa;
  p.validate();
  return p;
}

RescaledParams rescaled_coupling(const ModelParams& params) {
  return {params.gtilde(), params.tau, params.kappa, params.eta(), params.omega};
}

double HamiltonianMatrix::coeff(std::size_t i, std::size_t j) const {
  return m_.coeff(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
}

double HamiltonianMatrix::max_abs() const {
  double m = 0.0;
  for (Eigen::Index k = 0; k < m_.outerSize(); ++k) {
    for (Sparse::InnerIterator it(m_, k); it; ++it) m = std::max(m, std::abs(it.value()));
  }
  return m;
}

Eigen::MatrixXd HamiltonianMatrix::to_dense() const { return Eigen::MatrixXd(m_); }

HamiltonianMatrix HamiltonianMatrix::with_entry_shift(std::size_t i, std::size_t j,
                                                      double shift) const {
  Sparse copy = m_;
  copy.coeffRef(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) += shift;
  copy.makeCompressed();
  return HamiltonianMatrix(std::move(copy));
}

HamiltonianMatrix build_rabi_matrix(const RabiCouplings& c, FockTruncation trunc) {
  check_couplings(c);
  if (trunc.n_max < 1) throw std::invalid_argument("n_max must be >= 1");

  const int nm = trunc.n_max;
  const auto dim = static_cast<Eigen::Index>(trunc.dim());
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(static_cast<std::size_t>(dim) * 4);

  auto add_sym = [&](std::size_t i, std::size_t j, double v) {
    if (v == 0.0) return;
    entries.emplace_back(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j), v);
    entries.emplace_back(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i), v);
  };

  for (int n = 0; n <= nm; ++n) {
    const double dn = n;
    for (int s = 0; s < 2; ++s) {
      const double sz = s == 1 ? 1.0 : -1.0;
      const double diag = c.offset + c.omega * dn + 0.5 * c.delta * sz + c.a2 * (2.0 * dn + 1.0);
      entries.emplace_back(static_cast<Eigen::Index>(basis_index(n, s)),
                           static_cast<Eigen::Index>(basis_index(n, s)), diag);
    }
    // a s_+ |n,-> = sqrt(n) |n-1,+>  (with its conjugate a^+ s_-)
    if (n >= 1) add_sym(basis_index(n - 1, 1), basis_index(n, 0), c.g_rot * std::sqrt(dn));
    // a^+ s_+ |n,-> = sqrt(n+1) |n+1,+>  (with its conjugate a s_-)
    if (n + 1 <= nm) {
      add_sym(basis_index(n + 1, 1), basis_index(n, 0), c.g_crot * std::sqrt(dn + 1.0));
    }
    // (a + a^+)^2 couples n <-> n+2 within each qubit state
    if (n + 2 <= nm) {
      const double v = c.a2 * std::sqrt((dn + 1.0) * (dn + 2.0));
      add_sym(basis_index(n + 2, 0), basis_index(n, 0), v);
      add_sym(basis_index(n + 2, 1), basis_index(n, 1), v);
    }
  }

  HamiltonianMatrix::Sparse m(dim, dim);
  m.setFromTriplets(entries.begin(), entries.end());
  m.makeCompressed();
  return HamiltonianMatrix(std::move(m));
}

HamiltonianMatrix build_hamiltonian(const ModelParams& params, FockTruncation trunc) {
  params.validate();
  return build_rabi_matrix(RabiCouplings::from(params), trunc);
}

HamiltonianMatrix parity_operator(FockTruncation trunc) {
  if (trunc.n_max < 0) throw std::invalid_argument("n_max must be >= 0");
  const auto dim = static_cast<Eigen::Index>(trunc.dim());
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(static_cast<std::size_t>(dim));
  for (int n = 0; n <= trunc.n_max; ++n) {
    const double boson = (n % 2 == 0) ? 1.0 : -1.0;
    for (int s = 0; s < 2; ++s) {
      const double sz = s == 1 ? 1.0 : -1.0;
      const auto i = static_cast<Eigen::Index>(basis_index(n, s));
      entries.emplace_back(i, i, -boson * sz);
    }
  }
  HamiltonianMatrix::Sparse m(dim, dim);
  m.setFromTriplets(entries.begin(), entries.end());
  return HamiltonianMatrix(std::move(m));
}

double hermiticity_defect(const HamiltonianMatrix& h) {
  const auto& m = h.sparse();
  HamiltonianMatrix::Sparse t = m.transpose();
  HamiltonianMatrix::Sparse diff = m - t;
  double worst = 0.0;
  for (Eigen::Index k = 0; k < diff.outerSize(); ++k) {
    for (HamiltonianMatrix::Sparse::InnerIterator it(diff, k); it; ++it) {
      worst = std::max(worst, std::abs(it.value()));
    }
  }
  const double scale = h.max_abs();
  return scale > 0.0 ? worst / scale : worst;
}

double commutator_max_abs(const HamiltonianMatrix& a, const HamiltonianMatrix& b) {
  HamiltonianMatrix::Sparse c = a.sparse() * b.sparse() - b.sparse() * a.sparse();
  double worst = 0.0;
  for (Eigen::Index k = 0; k < c.outerSize(); ++k) {
    for (HamiltonianMatrix::Sparse::InnerIterator it(c, k); it; ++it) {
      worst = std::max(worst, std::abs(it.value()));
    }
  }
  return worst;
}

// ---------------------------------------------------------------------------

void BandedSymmetric::multiply(const double* x, double* y) const {
  const auto& d = bands[0];
  for (std::size_t i = 0; i < n; ++i) y[i] = d[i] * x[i];
  for (std::size_t k = 1; k < bands.size(); ++k) {
    const auto& b = bands[k];
    for (std::size_t i = 0; i + k < n; ++i) {
      y[i] += b[i] * x[i + k];
      y[i + k] += b[i] * x[i];
    }
  }
}

Eigen::MatrixXd BandedSymmetric::to_dense() const {
  const auto dim = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim, dim);
  for (std::size_t k = 0; k < bands.size(); ++k) {
    for (std::size_t i = 0; i + k < n; ++i) {
      const auto r = static_cast<Eigen::Index>(i);
      const auto col = static_cast<Eigen::Index>(i + k);
      m(r, col) = bands[k][i];
      m(col, r) = bands[k][i];
    }
  }
  return m;
}

double BandedSymmetric::norm_bound() const {
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double row = std::abs(bands[0][i]);
    for (std::size_t k = 1; k < bands.size(); ++k) {
      if (i + k < n) row += std::abs(bands[k][i]);
      if (i >= k) row += std::abs(bands[k][i - k]);
    }
    worst = std::max(worst, row);
  }
  return worst;
}

BandedSymmetric sector_hamiltonian(const RabiCouplings& c, int n_max, Parity parity) {
  check_couplings(c);
  if (n_max < 1) throw std::invalid_argument("n_max must be >= 1");
  const auto size = static_cast<std::size_t>(n_max) + 1;

  BandedSymmetric h;
  h.n = size;
  h.bands.resize(c.a2 != 0.0 ? 3 : 2);
  h.bands[0].resize(size);
  h.bands[1].resize(size - 1);
  if (h.bands.size() == 3) h.bands[2].resize(size >= 2 ? size - 2 : 0);

  for (std::size_t i = 0; i < size; ++i) {
    const int n = static_cast<int>(i);
    const double dn = n;
    const double sz = sector_spin(n, parity) == 1 ? 1.0 : -1.0;
    h.bands[0][i] = c.offset + c.omega * dn + 0.5 * c.delta * sz + c.a2 * (2.0 * dn + 1.0);
    if (i + 1 < size) {
      // |n,-> -> |n+1,+> is the counter-rotating channel; |n,+> -> |n+1,-> the rotating one.
      const double g = sector_spin(n, parity) == 0 ? c.g_crot : c.g_rot;
      h.bands[1][i] = g * std::sqrt(dn + 1.0);
    }
    if (h.bands.size() == 3 && i + 2 < size) {
      h.bands[2][i] = c.a2 * std::sqrt((dn + 1.0) * (dn + 2.0));
    }
  }
  return h;
}

}  // namespace rabi

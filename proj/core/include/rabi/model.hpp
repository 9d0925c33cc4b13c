#pragma once

// Anisotropic quantum Rabi model with a diamagnetic (A^2) term:
//
//   H = omega a^+a + (delta/2) s_z + g[(a s_+ + a^+ s_-) + tau (a s_- + a^+ s_+)]
//       + d (a + a^+)^2,    d = kappa g^2 / delta
//
// in a truncated Fock space. Basis index = 2n + s with n the boson
// occupation and s = 0 for the qubit ground state |->, s = 1 for |+>.

#include <cstddef>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

namespace rabi {

/// Physical parameters. The A^2 strength is parameterized relative to the
/// sum-rule minimum g^2/delta, so `kappa = 1` is the minimal physical value.
struct ModelParams {
  double omega = 1.0;  ///< cavity frequency
  double delta = 1.0;  ///< qubit splitting
  double g = 0.0;      ///< coupling strength
  double tau = 1.0;    ///< counter-rotating / rotating coupling ratio
  double kappa = 0.0;  ///< A^2 strength in units of g^2/delta

  double d_strength() const { return kappa * g * g / delta; }
  double gtilde() const;
  double eta() const { return delta / omega; }

  /// Throws std::invalid_argument on non-finite values, omega <= 0,
  /// delta <= 0, g < 0 or kappa < 0.
  void validate() const;
};

/// Dimensionless control parameters of a ModelParams.
struct RescaledParams {
  double gtilde = 0.0;
  double tau = 1.0;
  double kappa = 0.0;
  double eta = 1.0;
  double omega = 1.0;
};

ModelParams params_from_rescaled(double gtilde, double tau, double kappa, double eta,
                                 double omega = 1.0);
RescaledParams rescaled_coupling(const ModelParams& params);

struct FockTruncation {
  int n_max = 32;
  std::size_t dim() const { return 2 * (static_cast<std::size_t>(n_max) + 1); }
};

inline std::size_t basis_index(int n, int s) { return 2 * static_cast<std::size_t>(n) + s; }

/// Generic Rabi-type matrix elements. Both the lab-frame model and its
/// squeezed (Bogoliubov) frame reduce to this form; the two coupling
/// channels are kept separate so that a vanishing rotating coupling never
/// needs a ratio.
struct RabiCouplings {
  double omega = 1.0;
  double delta = 1.0;
  double g_rot = 0.0;   ///< coefficient of (a s_+ + a^+ s_-)
  double g_crot = 0.0;  ///< coefficient of (a s_- + a^+ s_+)
  double a2 = 0.0;      ///< coefficient of (a + a^+)^2
  double offset = 0.0;  ///< constant added to every diagonal element

  static RabiCouplings from(const ModelParams& p) {
    return {p.omega, p.delta, p.g, p.g * p.tau, p.d_strength(), 0.0};
  }
};

/// Real symmetric sparse matrix on the interleaved basis. Immutable once built.
class HamiltonianMatrix {
 public:
  using Sparse = Eigen::SparseMatrix<double, Eigen::RowMajor>;

  HamiltonianMatrix() = default;
  explicit HamiltonianMatrix(Sparse m) : m_(std::move(m)) {}

  std::size_t dim() const { return static_cast<std::size_t>(m_.rows()); }
  const Sparse& sparse() const { return m_; }
  double coeff(std::size_t i, std::size_t j) const;
  double max_abs() const;
  Eigen::MatrixXd to_dense() const;
  Eigen::VectorXd apply(const Eigen::VectorXd& v) const { return m_ * v; }

  /// Copy with one entry shifted; used by fault-injection checks only.
  HamiltonianMatrix with_entry_shift(std::size_t i, std::size_t j, double shift) const;

 private:
  Sparse m_;
};

/// Throws std::invalid_argument for non-finite parameters or n_max < 1.
HamiltonianMatrix build_hamiltonian(const ModelParams& params, FockTruncation trunc);
HamiltonianMatrix build_rabi_matrix(const RabiCouplings& c, FockTruncation trunc);

/// Parity P = -s_z exp(i pi a^+a); diagonal with entries -(-1)^n (+/-1).
/// Accepts n_max = 0.
HamiltonianMatrix parity_operator(FockTruncation trunc);

/// max |H_ij - H_ji| / max |H_ij|.
double hermiticity_defect(const HamiltonianMatrix& h);
/// max |[A, B]_ij|.
double commutator_max_abs(const HamiltonianMatrix& a, const HamiltonianMatrix& b);

// ---------------------------------------------------------------------------
// Parity sectors

enum class Parity : int { Even = 1, Odd = -1 };

/// Qubit state paired with occupation n inside a parity sector.
inline int sector_spin(int n, Parity p) {
  // -(-1)^n * sz = p  =>  sz = -p (-1)^n
  const int sz = -static_cast<int>(p) * ((n % 2 == 0) ? 1 : -1);
  return sz > 0 ? 1 : 0;
}

/// Symmetric banded matrix stored by upper diagonals: bands[k][i] = A(i, i+k).
/// bands[k] needs at least n - k entries; anything past that is ignored.
struct BandedSymmetric {
  std::size_t n = 0;
  std::vector<std::vector<double>> bands;

  int bandwidth() const { return static_cast<int>(bands.size()) - 1; }
  void multiply(const double* x, double* y) const;
  Eigen::MatrixXd to_dense() const;
  /// Gershgorin bound on the spectral radius.
  double norm_bound() const;
};

/// Sector block indexed by occupation n = 0..n_max. Pentadiagonal when the
/// A^2 coefficient is nonzero, tridiagonal otherwise.
BandedSymmetric sector_hamiltonian(const RabiCouplings& c, int n_max, Parity parity);

}  // namespace rabi

#pragma once

// Small dense complex linear algebra for density-operator simulation.
//
// Everything here works on exact dense matrices of dimension at most
// kMaxDim. Matrices are row-major std::complex<double>. Values are immutable
// from the caller's point of view: every operation returns a new matrix.

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "qors/errors.hpp"

namespace qors {

using Complex = std::complex<double>;

inline constexpr std::size_t kMaxDim = 64;

// Tolerances for the density-operator invariants.
inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kTraceTol = 1e-10;
inline constexpr double kPsdTol = 1e-10;
inline constexpr double kUnitaryTol = 1e-10;

class ComplexMatrix {
 public:
  // Zero matrix.
  ComplexMatrix(std::size_t rows, std::size_t cols);
  ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries);

  static ComplexMatrix identity(std::size_t n);
  static ComplexMatrix from_rows(std::initializer_list<std::initializer_list<Complex>> rows);
  // |v><v|
  static ComplexMatrix outer(std::span<const Complex> ket);
  // |u><v|
  static ComplexMatrix outer(std::span<const Complex> ket, std::span<const Complex> bra);
  static ComplexMatrix diagonal(std::span<const double> values);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool is_square() const { return rows_ == cols_; }

  const Complex& operator()(std::size_t r, std::size_t c) const { return entries_[r * cols_ + c]; }
  Complex& operator()(std::size_t r, std::size_t c) { return entries_[r * cols_ + c]; }

  std::span<const Complex> entries() const { return entries_; }

  ComplexMatrix adjoint() const;
  Complex trace() const;
  // Largest absolute entry.
  double max_abs() const;
  bool all_finite() const;

  ComplexMatrix& operator+=(const ComplexMatrix& other);
  ComplexMatrix& operator-=(const ComplexMatrix& other);
  ComplexMatrix& operator*=(Complex scalar);

  friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
  friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
  friend ComplexMatrix operator*(ComplexMatrix a, Complex s) { return a *= s; }
  friend ComplexMatrix operator*(Complex s, ComplexMatrix a) { return a *= s; }
  friend ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);

  friend bool operator==(const ComplexMatrix&, const ComplexMatrix&) = default;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<Complex> entries_;
};

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b);
bool is_hermitian(const ComplexMatrix& m, double tol = kHermitianTol);
bool is_unitary(const ComplexMatrix& m, double tol = kUnitaryTol);

// Kronecker product a (x) b.
ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b);

// Operator acting as `op` on subsystem `target` and as identity elsewhere.
ComplexMatrix embed(const ComplexMatrix& op, std::span<const std::size_t> dims, std::size_t target);

struct HermitianEigen {
  std::vector<double> values;  // ascending
  ComplexMatrix vectors;       // columns are eigenvectors
};

// Eigen-decomposition of a Hermitian matrix. The input is symmetrised first,
// so tiny anti-Hermitian round-off does not leak into the spectrum.
HermitianEigen eigh(const ComplexMatrix& m);
std::vector<double> hermitian_eigenvalues(const ComplexMatrix& m);

// Partial trace over the complement of `keep`. Works on any square operator,
// normalised or not.
ComplexMatrix partial_trace(const ComplexMatrix& m, std::span<const std::size_t> dims,
                            std::span<const std::size_t> keep);

class DensityMatrix {
 public:
  // Validates Hermiticity, unit trace and positivity. Throws InvalidStateError.
  explicit DensityMatrix(ComplexMatrix m);

  // Hermitises and rescales to unit trace before validating. Used after
  // heralding projections, where the unnormalised operator is the natural
  // intermediate.
  static DensityMatrix normalized(ComplexMatrix m);
  static DensityMatrix pure(std::span<const Complex> ket);
  static DensityMatrix maximally_mixed(std::size_t dim);
  static DensityMatrix basis(std::size_t dim, std::size_t index);

  std::size_t dim() const { return m_.rows(); }
  const ComplexMatrix& matrix() const { return m_; }
  const Complex& operator()(std::size_t r, std::size_t c) const { return m_(r, c); }

  double min_eigenvalue() const;

  // Empty string if `m` satisfies every density-operator invariant,
  // otherwise a description of the first violation.
  static std::string check(const ComplexMatrix& m);

 private:
  ComplexMatrix m_;
};

DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b);
DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const std::size_t> dims,
                            std::span<const std::size_t> keep);

// Uhlmann fidelity (tr sqrt(sqrt(rho) sigma sqrt(rho)))^2, clamped to [0, 1].
double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma);
// <psi|rho|psi> for a normalised ket.
double fidelity(const DensityMatrix& rho, std::span<const Complex> ket);

// U rho U^dagger. Rejects non-square, mismatched or non-unitary U.
DensityMatrix apply_unitary(const DensityMatrix& rho, const ComplexMatrix& u);

namespace pauli {
ComplexMatrix I();
ComplexMatrix X();
ComplexMatrix Y();
ComplexMatrix Z();
}  // namespace pauli

enum class Bell { kPhiPlus, kPhiMinus, kPsiPlus, kPsiMinus };

std::vector<Complex> bell_ket(Bell which);
DensityMatrix bell_state(Bell which);

// w |Phi+><Phi+| + (1 - w) I/4 with w = (4F - 1)/3, so that <Phi+|rho|Phi+> = F.
DensityMatrix werner_state(double fidelity_to_phi_plus);
double werner_parameter(double fidelity_to_phi_plus);

}  // namespace qors

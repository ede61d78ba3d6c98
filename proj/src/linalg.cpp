#include "qors/linalg.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace qors {

namespace {

void check_dim(std::size_t rows, std::size_t cols) {
  if (rows == 0 || cols == 0) {
    throw DimensionError("matrix dimensions must be positive");
  }
  if (rows > kMaxDim * kMaxDim || cols > kMaxDim * kMaxDim) {
    throw DimensionError("matrix dimension " + std::to_string(std::max(rows, cols)) +
                         " exceeds supported size");
  }
}

Eigen::MatrixXcd to_eigen(const ComplexMatrix& m) {
  Eigen::MatrixXcd out(m.rows(), m.cols());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
      out(r, c) = m(r, c);
    }
  }
  return out;
}

std::size_t product(std::span<const std::size_t> dims) {
  return std::accumulate(dims.begin(), dims.end(), std::size_t{1}, std::multiplies<>());
}

}  // namespace

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), entries_(rows * cols) {
  check_dim(rows, cols);
}

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
  check_dim(rows, cols);
  if (entries_.size() != rows * cols) {
    throw DimensionError("entry count " + std::to_string(entries_.size()) + " != " +
                         std::to_string(rows) + "x" + std::to_string(cols));
  }
  if (!all_finite()) {
    throw std::invalid_argument("matrix entries must be finite");
  }
}

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
  ComplexMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    m(i, i) = 1.0;
  }
  return m;
}

ComplexMatrix ComplexMatrix::from_rows(std::initializer_list<std::initializer_list<Complex>> rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r == 0 ? 0 : rows.begin()->size();
  std::vector<Complex> entries;
  entries.reserve(r * c);
  for (const auto& row : rows) {
    if (row.size() != c) {
      throw DimensionError("ragged matrix literal");
    }
    entries.insert(entries.end(), row.begin(), row.end());
  }
  return ComplexMatrix(r, c, std::move(entries));
}

ComplexMatrix ComplexMatrix::outer(std::span<const Complex> ket) { return outer(ket, ket); }

ComplexMatrix ComplexMatrix::outer(std::span<const Complex> ket, std::span<const Complex> bra) {
  ComplexMatrix m(ket.size(), bra.size());
  for (std::size_t r = 0; r < ket.size(); ++r) {
    for (std::size_t c = 0; c < bra.size(); ++c) {
      m(r, c) = ket[r] * std::conj(bra[c]);
    }
  }
  return m;
}

ComplexMatrix ComplexMatrix::diagonal(std::span<const double> values) {
  ComplexMatrix m(values.size(), values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    m(i, i) = values[i];
  }
  return m;
}

ComplexMatrix ComplexMatrix::adjoint() const {
  ComplexMatrix out(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t c = 0; c < cols_; ++c) {
      out(c, r) = std::conj((*this)(r, c));
    }
  }
  return out;
}

Complex ComplexMatrix::trace() const {
  Complex t = 0.0;
  for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) {
    t += (*this)(i, i);
  }
  return t;
}

double ComplexMatrix::max_abs() const {
  double m = 0.0;
  for (const auto& z : entries_) {
    m = std::max(m, std::abs(z));
  }
  return m;
}

bool ComplexMatrix::all_finite() const {
  return std::all_of(entries_.begin(), entries_.end(), [](const Complex& z) {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
  });
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& other) {
  if (rows_ != other.rows_ || cols_ != other.cols_) {
    throw DimensionError("matrix sum shape mismatch");
  }
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    entries_[i] += other.entries_[i];
  }
  return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& other) {
  if (rows_ != other.rows_ || cols_ != other.cols_) {
    throw DimensionError("matrix difference shape mismatch");
  }
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    entries_[i] -= other.entries_[i];
  }
  return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(Complex scalar) {
  for (auto& z : entries_) {
    z *= scalar;
  }
  return *this;
}

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.cols_ != b.rows_) {
    throw DimensionError("matrix product shape mismatch: " + std::to_string(a.rows_) + "x" +
                         std::to_string(a.cols_) + " * " + std::to_string(b.rows_) + "x" +
                         std::to_string(b.cols_));
  }
  ComplexMatrix out(a.rows_, b.cols_);
  for (std::size_t r = 0; r < a.rows_; ++r) {
    for (std::size_t k = 0; k < a.cols_; ++k) {
      const Complex lhs = a(r, k);
      if (lhs == Complex{}) {
        continue;
      }
      for (std::size_t c = 0; c < b.cols_; ++c) {
        out(r, c) += lhs * b(k, c);
      }
    }
  }
  return out;
}

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) { return (a - b).max_abs(); }

bool is_hermitian(const ComplexMatrix& m, double tol) {
  if (!m.is_square()) {
    return false;
  }
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = r; c < m.cols(); ++c) {
      if (std::abs(m(r, c) - std::conj(m(c, r))) > tol) {
        return false;
      }
    }
  }
  return true;
}

bool is_unitary(const ComplexMatrix& m, double tol) {
  if (!m.is_square()) {
    return false;
  }
  return max_abs_diff(m.adjoint() * m, ComplexMatrix::identity(m.rows())) <= tol;
}

ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t ar = 0; ar < a.rows(); ++ar) {
    for (std::size_t ac = 0; ac < a.cols(); ++ac) {
      const Complex s = a(ar, ac);
      if (s == Complex{}) {
        continue;
      }
      for (std::size_t br = 0; br < b.rows(); ++br) {
        for (std::size_t bc = 0; bc < b.cols(); ++bc) {
          out(ar * b.rows() + br, ac * b.cols() + bc) = s * b(br, bc);
        }
      }
    }
  }
  return out;
}

ComplexMatrix embed(const ComplexMatrix& op, std::span<const std::size_t> dims, std::size_t target) {
  if (target >= dims.size()) {
    throw DimensionError("embed target out of range");
  }
  if (!op.is_square() || op.rows() != dims[target]) {
    throw DimensionError("embedded operator does not match subsystem dimension");
  }
  std::size_t before = 1;
  std::size_t after = 1;
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (i < target) {
      before *= dims[i];
    } else if (i > target) {
      after *= dims[i];
    }
  }
  ComplexMatrix out = op;
  if (before > 1) {
    out = tensor(ComplexMatrix::identity(before), out);
  }
  if (after > 1) {
    out = tensor(out, ComplexMatrix::identity(after));
  }
  return out;
}

HermitianEigen eigh(const ComplexMatrix& m) {
  if (!m.is_square()) {
    throw DimensionError("eigh requires a square matrix");
  }
  Eigen::MatrixXcd e = to_eigen(m);
  e = (0.5 * (e + e.adjoint())).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(e);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("Hermitian eigensolver did not converge");
  }
  HermitianEigen out{{}, ComplexMatrix(m.rows(), m.cols())};
  out.values.resize(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    out.values[i] = solver.eigenvalues()(static_cast<Eigen::Index>(i));
    for (std::size_t r = 0; r < m.rows(); ++r) {
      out.vectors(r, i) = solver.eigenvectors()(static_cast<Eigen::Index>(r),
                                                static_cast<Eigen::Index>(i));
    }
  }
  return out;
}

std::vector<double> hermitian_eigenvalues(const ComplexMatrix& m) {
  if (!m.is_square()) {
    throw DimensionError("eigenvalues require a square matrix");
  }
  Eigen::MatrixXcd e = to_eigen(m);
  e = (0.5 * (e + e.adjoint())).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(e, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("Hermitian eigensolver did not converge");
  }
  const auto& v = solver.eigenvalues();
  return {v.data(), v.data() + v.size()};
}

ComplexMatrix partial_trace(const ComplexMatrix& m, std::span<const std::size_t> dims,
                            std::span<const std::size_t> keep) {
  if (!m.is_square()) {
    throw DimensionError("partial trace requires a square operator");
  }
  if (dims.empty() || product(dims) != m.rows()) {
    throw DimensionError("subsystem dimensions multiply to " + std::to_string(product(dims)) +
                         ", operator has dimension " + std::to_string(m.rows()));
  }
  if (keep.empty()) {
    throw DimensionError("partial trace must keep at least one subsystem");
  }
  const std::size_t n = dims.size();
  std::vector<bool> kept(n, false);
  for (std::size_t k : keep) {
    if (k >= n || kept[k]) {
      throw DimensionError("invalid or repeated subsystem index in keep list");
    }
    kept[k] = true;
  }

  // Strides of each subsystem inside the full index.
  std::vector<std::size_t> stride(n);
  std::size_t s = 1;
  for (std::size_t i = n; i-- > 0;) {
    stride[i] = s;
    s *= dims[i];
  }

  std::vector<std::size_t> kept_axes;
  std::vector<std::size_t> traced_axes;
  for (std::size_t i = 0; i < n; ++i) {
    (kept[i] ? kept_axes : traced_axes).push_back(i);
  }

  // Full-space offset for every multi-index over a group of axes, enumerated
  // with the last axis fastest.
  auto offsets = [&](const std::vector<std::size_t>& axes) {
    std::vector<std::size_t> out{0};
    for (std::size_t axis : axes) {
      std::vector<std::size_t> next;
      next.reserve(out.size() * dims[axis]);
      for (std::size_t base : out) {
        for (std::size_t v = 0; v < dims[axis]; ++v) {
          next.push_back(base + v * stride[axis]);
        }
      }
      out = std::move(next);
    }
    return out;
  };
  const std::vector<std::size_t> kept_off = offsets(kept_axes);
  const std::vector<std::size_t> traced_off = offsets(traced_axes);

  ComplexMatrix out(kept_off.size(), kept_off.size());
  for (std::size_t r = 0; r < kept_off.size(); ++r) {
    for (std::size_t c = 0; c < kept_off.size(); ++c) {
      Complex acc = 0.0;
      for (std::size_t t : traced_off) {
        acc += m(kept_off[r] + t, kept_off[c] + t);
      }
      out(r, c) = acc;
    }
  }
  return out;
}

namespace {

void require_state_dim(std::size_t dim) {
  if (dim == 0 || dim > kMaxDim) {
    throw DimensionError("state dimension " + std::to_string(dim) + " outside 1.." +
                         std::to_string(kMaxDim));
  }
}

// Eigenvalues of sqrt(rho) sigma sqrt(rho) at or below this are rounding noise
// (the operator has norm <= 1). Their square roots would otherwise add errors
// of order 1e-8 to the fidelity of rank-deficient states.
constexpr double kFidelityEigenFloor = 1e-14;

}  // namespace

DensityMatrix::DensityMatrix(ComplexMatrix m) : m_(std::move(m)) {
  const std::string problem = check(m_);
  if (!problem.empty()) {
    throw InvalidStateError(problem);
  }
}

std::string DensityMatrix::check(const ComplexMatrix& m) {
  if (!m.is_square()) {
    return "density matrix must be square";
  }
  if (m.rows() > kMaxDim) {
    return "density matrix dimension " + std::to_string(m.rows()) + " exceeds " +
           std::to_string(kMaxDim);
  }
  if (!m.all_finite()) {
    return "density matrix has non-finite entries";
  }
  if (!is_hermitian(m, kHermitianTol)) {
    return "density matrix is not Hermitian";
  }
  const Complex tr = m.trace();
  if (std::abs(tr - 1.0) > kTraceTol) {
    std::ostringstream os;
    os << "density matrix trace " << tr.real() << " differs from 1";
    return os.str();
  }
  const double min_eig = hermitian_eigenvalues(m).front();
  if (min_eig < -kPsdTol) {
    std::ostringstream os;
    os << "density matrix has negative eigenvalue " << min_eig;
    return os.str();
  }
  return {};
}

DensityMatrix DensityMatrix::normalized(ComplexMatrix m) {
  if (!m.is_square()) {
    throw InvalidStateError("density matrix must be square");
  }
  ComplexMatrix h = 0.5 * (m + m.adjoint());
  const double tr = h.trace().real();
  if (!(tr > 0.0) || !std::isfinite(tr)) {
    throw InvalidStateError("cannot normalise an operator with non-positive trace");
  }
  h *= 1.0 / tr;
  return DensityMatrix(std::move(h));
}

DensityMatrix DensityMatrix::pure(std::span<const Complex> ket) {
  double norm2 = 0.0;
  for (const auto& z : ket) {
    norm2 += std::norm(z);
  }
  if (!(norm2 > 0.0)) {
    throw InvalidStateError("zero ket");
  }
  ComplexMatrix m = ComplexMatrix::outer(ket);
  m *= 1.0 / norm2;
  return DensityMatrix(std::move(m));
}

DensityMatrix DensityMatrix::maximally_mixed(std::size_t dim) {
  require_state_dim(dim);
  ComplexMatrix m = ComplexMatrix::identity(dim);
  m *= 1.0 / static_cast<double>(dim);
  return DensityMatrix(std::move(m));
}

DensityMatrix DensityMatrix::basis(std::size_t dim, std::size_t index) {
  require_state_dim(dim);
  if (index >= dim) {
    throw DimensionError("basis index out of range");
  }
  ComplexMatrix m(dim, dim);
  m(index, index) = 1.0;
  return DensityMatrix(std::move(m));
}

double DensityMatrix::min_eigenvalue() const { return hermitian_eigenvalues(m_).front(); }

DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b) {
  if (a.dim() * b.dim() > kMaxDim) {
    throw DimensionError("tensor product dimension exceeds " + std::to_string(kMaxDim));
  }
  return DensityMatrix(tensor(a.matrix(), b.matrix()));
}

DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const std::size_t> dims,
                            std::span<const std::size_t> keep) {
  return DensityMatrix::normalized(partial_trace(rho.matrix(), dims, keep));
}

double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (rho.dim() != sigma.dim()) {
    throw DimensionError("fidelity of states with different dimensions");
  }
  const HermitianEigen e = eigh(rho.matrix());
  std::vector<double> roots(e.values.size());
  for (std::size_t i = 0; i < roots.size(); ++i) {
    roots[i] = std::sqrt(std::max(0.0, e.values[i]));
  }
  const ComplexMatrix sqrt_rho =
      e.vectors * ComplexMatrix::diagonal(roots) * e.vectors.adjoint();
  const ComplexMatrix inner = sqrt_rho * sigma.matrix() * sqrt_rho;
  double acc = 0.0;
  for (double v : hermitian_eigenvalues(inner)) {
    if (v > kFidelityEigenFloor) {
      acc += std::sqrt(v);
    }
  }
  return std::clamp(acc * acc, 0.0, 1.0);
}

double fidelity(const DensityMatrix& rho, std::span<const Complex> ket) {
  if (ket.size() != rho.dim()) {
    throw DimensionError("fidelity of state and ket with different dimensions");
  }
  Complex acc = 0.0;
  for (std::size_t r = 0; r < ket.size(); ++r) {
    for (std::size_t c = 0; c < ket.size(); ++c) {
      acc += std::conj(ket[r]) * rho(r, c) * ket[c];
    }
  }
  return std::clamp(acc.real(), 0.0, 1.0);
}

DensityMatrix apply_unitary(const DensityMatrix& rho, const ComplexMatrix& u) {
  if (!u.is_square() || u.rows() != rho.dim()) {
    throw DimensionError("unitary dimension does not match state");
  }
  if (!is_unitary(u, kUnitaryTol)) {
    throw InvalidChannelError("operator is not unitary within tolerance");
  }
  return DensityMatrix::normalized(u * rho.matrix() * u.adjoint());
}

namespace pauli {
ComplexMatrix I() { return ComplexMatrix::identity(2); }
ComplexMatrix X() { return ComplexMatrix::from_rows({{0.0, 1.0}, {1.0, 0.0}}); }
ComplexMatrix Y() {
  return ComplexMatrix::from_rows({{0.0, Complex(0.0, -1.0)}, {Complex(0.0, 1.0), 0.0}});
}
ComplexMatrix Z() { return ComplexMatrix::from_rows({{1.0, 0.0}, {0.0, -1.0}}); }
}  // namespace pauli

std::vector<Complex> bell_ket(Bell which) {
  const double h = 1.0 / std::sqrt(2.0);
  switch (which) {
    case Bell::kPhiPlus:
      return {h, 0.0, 0.0, h};
    case Bell::kPhiMinus:
      return {h, 0.0, 0.0, -h};
    case Bell::kPsiPlus:
      return {0.0, h, h, 0.0};
    case Bell::kPsiMinus:
      return {0.0, h, -h, 0.0};
  }
  throw std::invalid_argument("unknown Bell state");
}

DensityMatrix bell_state(Bell which) { return DensityMatrix::pure(bell_ket(which)); }

double werner_parameter(double fidelity_to_phi_plus) { return (4.0 * fidelity_to_phi_plus - 1.0) / 3.0; }

DensityMatrix werner_state(double fidelity_to_phi_plus) {
  if (!(fidelity_to_phi_plus >= 0.0 && fidelity_to_phi_plus <= 1.0)) {
    throw ParameterError("Werner fidelity must lie in [0, 1]");
  }
  const double w = werner_parameter(fidelity_to_phi_plus);
  ComplexMatrix m = ComplexMatrix::outer(bell_ket(Bell::kPhiPlus)) * w;
  m += ComplexMatrix::identity(4) * ((1.0 - w) / 4.0);
  return DensityMatrix(std::move(m));
}

}  // namespace qors

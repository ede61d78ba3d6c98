#include "qors/gaussian.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <array>
#include <cmath>

namespace qors {

namespace {

constexpr double kHamiltonianTol = 1e-12;
constexpr double kPassiveTol = 1e-9;

}  // namespace

void GaussianHamiltonian::validate() const {
  if (modes == 0) {
    throw DimensionError("Gaussian Hamiltonian needs at least one mode");
  }
  if (K.rows() != modes || K.cols() != modes || Delta.rows() != modes || Delta.cols() != modes) {
    throw DimensionError("K and Delta must be modes x modes");
  }
  if (!is_hermitian(K, kHamiltonianTol)) {
    throw InvalidChannelError("K must be Hermitian");
  }
  for (std::size_t i = 0; i < modes; ++i) {
    for (std::size_t j = i + 1; j < modes; ++j) {
      if (std::abs(Delta(i, j) - Delta(j, i)) > kHamiltonianTol) {
        throw InvalidChannelError("Delta must be symmetric");
      }
    }
  }
  if (!std::isfinite(t)) {
    throw ParameterError("evolution time must be finite");
  }
}

Eigen::MatrixXd symplectic_form(std::size_t modes) {
  const auto n = static_cast<Eigen::Index>(modes);
  Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  omega.topRightCorner(n, n) = Eigen::MatrixXd::Identity(n, n);
  omega.bottomLeftCorner(n, n) = -Eigen::MatrixXd::Identity(n, n);
  return omega;
}

double symplectic_residual(const SymplecticTransform& s) {
  const Eigen::MatrixXd omega = symplectic_form(s.modes);
  return (s.S.transpose() * omega * s.S - omega).cwiseAbs().maxCoeff();
}

SymplecticTransform gaussian_evolve(const GaussianHamiltonian& h) {
  h.validate();
  const auto n = static_cast<Eigen::Index>(h.modes);
  Eigen::MatrixXd kr(n, n), ki(n, n), dr(n, n), di(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const auto ui = static_cast<std::size_t>(i);
      const auto uj = static_cast<std::size_t>(j);
      kr(i, j) = h.K(ui, uj).real();
      ki(i, j) = h.K(ui, uj).imag();
      dr(i, j) = h.Delta(ui, uj).real();
      di(i, j) = h.Delta(ui, uj).imag();
    }
  }
  // da/dt = -i K a - i Delta a^dagger, split into real quadratures.
  Eigen::MatrixXd generator(2 * n, 2 * n);
  generator.topLeftCorner(n, n) = ki + di;
  generator.topRightCorner(n, n) = kr - dr;
  generator.bottomLeftCorner(n, n) = -kr - dr;
  generator.bottomRightCorner(n, n) = ki - di;
  const Eigen::MatrixXd scaled = generator * h.t;
  return {h.modes, scaled.exp()};
}

ComplexMatrix passive_mode_matrix(const SymplecticTransform& s) {
  const auto n = static_cast<Eigen::Index>(s.modes);
  const Eigen::MatrixXd x = s.S.topLeftCorner(n, n);
  const Eigen::MatrixXd y = s.S.bottomLeftCorner(n, n);
  // Passive transforms have the block structure [[X, -Y], [Y, X]].
  const double active = std::max((s.S.bottomRightCorner(n, n) - x).cwiseAbs().maxCoeff(),
                                 (s.S.topRightCorner(n, n) + y).cwiseAbs().maxCoeff());
  if (active > kPassiveTol) {
    throw InvalidChannelError("transform is not passive (it squeezes)");
  }
  ComplexMatrix u(s.modes, s.modes);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      u(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = Complex(x(i, j), y(i, j));
    }
  }
  return u;
}

ComplexMatrix beamsplitter_rail_unitary(double eta) {
  if (!(eta >= 0.0 && eta <= 1.0)) {
    throw ParameterError("transmittance must lie in [0, 1]");
  }
  // Modes: system H, system V, environment H, environment V. Each
  // polarisation couples to its environment partner with unit rate for
  // time t = arccos(sqrt(eta)), so |u_00|^2 = cos^2 t = eta.
  ComplexMatrix k(4, 4);
  k(0, 2) = k(2, 0) = 1.0;
  k(1, 3) = k(3, 1) = 1.0;
  const GaussianHamiltonian h{4, k, ComplexMatrix(4, 4), std::acos(std::sqrt(eta))};
  const ComplexMatrix u = passive_mode_matrix(gaussian_evolve(h));

  // One-photon states |mode m> as (system level, environment level) in the
  // rail (x) rail basis, index = sys * 3 + env.
  constexpr std::array<std::size_t, 4> kModeState{1 * kRailDim + 0, 2 * kRailDim + 0,
                                                  0 * kRailDim + 1, 0 * kRailDim + 2};
  constexpr std::size_t kJointDim = kRailDim * kRailDim;

  ComplexMatrix joint = ComplexMatrix::identity(kJointDim);
  for (std::size_t j = 0; j < 4; ++j) {
    joint(kModeState[j], kModeState[j]) = 0.0;
  }
  // U a_j^dagger |0> = sum_k u_kj a_k^dagger |0>
  for (std::size_t j = 0; j < 4; ++j) {
    for (std::size_t m = 0; m < 4; ++m) {
      joint(kModeState[m], kModeState[j]) = u(m, j);
    }
  }
  return joint;
}

DensityMatrix beamsplitter_dilation(double eta, const DensityMatrix& rail_state) {
  if (rail_state.dim() != kRailDim) {
    throw DimensionError("beam-splitter dilation acts on the rail space");
  }
  const DensityMatrix env = DensityMatrix::basis(kRailDim, kRailVacuum);
  const DensityMatrix joint = apply_unitary(tensor(rail_state, env), beamsplitter_rail_unitary(eta));
  const std::array<std::size_t, 2> dims{kRailDim, kRailDim};
  const std::array<std::size_t, 1> keep{0};
  return partial_trace(joint, dims, keep);
}

KrausChannel beamsplitter_to_kraus(double eta) {
  const ComplexMatrix joint = beamsplitter_rail_unitary(eta);
  std::vector<ComplexMatrix> ops;
  for (std::size_t e = 0; e < kRailDim; ++e) {
    ComplexMatrix k(kRailDim, kRailDim);
    for (std::size_t out = 0; out < kRailDim; ++out) {
      for (std::size_t in = 0; in < kRailDim; ++in) {
        k(out, in) = joint(out * kRailDim + e, in * kRailDim + kRailVacuum);
      }
    }
    if (k.max_abs() > 1e-15) {
      ops.push_back(std::move(k));
    }
  }
  return KrausChannel(std::move(ops), "beamsplitter");
}

}  // namespace qors

#pragma once

// Quadratic bosonic Hamiltonians and their phase-space (symplectic) action,
// plus the Stinespring bridge from a beam splitter to a Kraus loss channel.
//
// H = sum_ij [ K_ij a_i^dagger a_j + 1/2 (Delta_ij a_i^dagger a_j^dagger + h.c.) ]
//
// Quadratures are x = (a + a^dagger)/sqrt(2), p = (a - a^dagger)/(i sqrt(2)),
// ordered (x_1..x_N, p_1..p_N). The symplectic form is Omega = [[0, I], [-I, 0]].

#include <Eigen/Dense>

#include "qors/channel.hpp"
#include "qors/linalg.hpp"

namespace qors {

inline constexpr double kSymplecticTol = 1e-9;

struct GaussianHamiltonian {
  std::size_t modes;
  ComplexMatrix K;      // passive block, Hermitian (rad/s)
  ComplexMatrix Delta;  // squeezing block, symmetric (rad/s)
  double t;             // evolution time (s)

  // Throws InvalidChannelError on non-Hermitian K or non-symmetric Delta.
  void validate() const;
};

struct SymplecticTransform {
  std::size_t modes;
  Eigen::MatrixXd S;  // 2N x 2N
};

Eigen::MatrixXd symplectic_form(std::size_t modes);

// max |S^T Omega S - Omega|
double symplectic_residual(const SymplecticTransform& s);

// Heisenberg evolution of the quadratures for time t: S = exp(A t), with A
// the Hamiltonian's phase-space generator.
SymplecticTransform gaussian_evolve(const GaussianHamiltonian& h);

// For a passive (number-preserving) transform, the mode matrix u with
// a_k -> sum_j u_kj a_j. Throws if S mixes creation and annihilation parts.
ComplexMatrix passive_mode_matrix(const SymplecticTransform& s);

// Joint unitary on rail (x) rail (system (x) environment, 9 dimensions) for a
// polarisation-independent beam splitter of transmittance eta, truncated to at
// most one photon. The two-photon sector, unreachable from a vacuum
// environment, is left as identity.
ComplexMatrix beamsplitter_rail_unitary(double eta);

// Stinespring form: tr_E[U (rho (x) |vac><vac|) U^dagger] on the rail space.
DensityMatrix beamsplitter_dilation(double eta, const DensityMatrix& rail_state);

// Kraus operators <e|U|vac>_E of the dilation above, one per environment level.
KrausChannel beamsplitter_to_kraus(double eta);

}  // namespace qors

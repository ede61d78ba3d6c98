#pragma once

// Quantum channels in operator-sum (Kraus) form.
//
// A channel E(rho) = sum_i K_i rho K_i^dagger is stored as its ordered list of
// Kraus operators. Trace-preserving channels satisfy sum_i K_i^dagger K_i = I.
// Heralded channels are the post-selected, trace-decreasing variant used for
// photon loss: sum_i K_i^dagger K_i <= I, and the missing weight is the
// probability that the herald did not fire.
//
// Photonic states live in a three-level "rail" space {vacuum, |0>, |1>}
// (polarisation qubit plus the no-photon level). Qubit channels are lifted to
// the rail space with to_rail(), which leaves the vacuum untouched.

#include <array>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "qors/linalg.hpp"

namespace qors {

inline constexpr double kCompletenessTol = 1e-10;
inline constexpr double kChoiTol = 1e-10;

// Index of the vacuum level in the rail space; |0> and |1> follow.
inline constexpr std::size_t kRailVacuum = 0;
inline constexpr std::size_t kRailDim = 3;

class KrausChannel {
 public:
  enum class Kind { kTracePreserving, kHeralded };

  // Validates shapes and completeness (equality for trace-preserving
  // channels, sum K^dagger K <= I for heralded ones).
  KrausChannel(std::vector<ComplexMatrix> operators, std::string label,
               Kind kind = Kind::kTracePreserving);

  // Shape checks only. Lets diagnostics build and inspect invalid sets.
  static KrausChannel unchecked(std::vector<ComplexMatrix> operators, std::string label,
                                Kind kind = Kind::kTracePreserving);

  std::size_t in_dim() const { return in_dim_; }
  std::size_t out_dim() const { return out_dim_; }
  const std::vector<ComplexMatrix>& operators() const { return operators_; }
  const std::string& label() const { return label_; }
  Kind kind() const { return kind_; }
  bool heralded() const { return kind_ == Kind::kHeralded; }

 private:
  struct Unchecked {};
  KrausChannel(Unchecked, std::vector<ComplexMatrix> operators, std::string label, Kind kind);

  std::size_t in_dim_ = 0;
  std::size_t out_dim_ = 0;
  std::vector<ComplexMatrix> operators_;
  std::string label_;
  Kind kind_;
};

struct CptpReport {
  // Trace-preserving: max |sum K^dagger K - I|.
  // Heralded: how far sum K^dagger K overshoots I (0 when it does not).
  double completeness_residual = 0.0;
  double choi_min_eigenvalue = 0.0;
  bool heralded = false;
  bool valid = false;
};

CptpReport verify_cptp(const KrausChannel& ch);

// Choi matrix sum_{ab} |a><b| (x) E(|a><b|), dimension in_dim * out_dim.
ComplexMatrix choi_matrix(const KrausChannel& ch);

// sum_i K_i rho K_i^dagger without any renormalisation.
ComplexMatrix apply_kraus(const KrausChannel& ch, const ComplexMatrix& rho);

// Applies the channel. Heralded channels are renormalised onto the surviving
// branch; throws InvalidStateError if that branch has zero probability.
DensityMatrix apply_channel(const KrausChannel& ch, const DensityMatrix& rho);

struct HeraldedState {
  double probability = 0.0;
  std::optional<DensityMatrix> state;  // empty when probability is zero
};

// Success probability tr(E(rho)) and the conditional state.
HeraldedState apply_heralded(const KrausChannel& ch, const DensityMatrix& rho);

// `second` after `first`: operators {B_j A_i}.
KrausChannel compose(const KrausChannel& first, const KrausChannel& second);

// The channel acting on subsystem `target` of a composite with `dims`.
KrausChannel lift(const KrausChannel& ch, std::span<const std::size_t> dims, std::size_t target);

DensityMatrix apply_local(const KrausChannel& ch, const DensityMatrix& rho,
                          std::span<const std::size_t> dims, std::size_t target);

KrausChannel identity_channel(std::size_t dim);

// {sqrt(1-3p/4) I, sqrt(p/4) X, sqrt(p/4) Y, sqrt(p/4) Z}: rho -> (1-p) rho + p I/2.
KrausChannel depolarizing_channel(double p);

// Pauli channel with the given probabilities for I, X, Y, Z.
KrausChannel pauli_channel(const std::array<double, 4>& probabilities, std::string label);

// {sqrt(1-p) I, sqrt(p) Z}: coherences scale by (1 - 2p).
KrausChannel dephasing_channel(double p);

struct SopSampled {
  std::array<double, 3> axis;  // need not be normalised
};
struct SopAveraged {};
using SopMode = std::variant<SopSampled, SopAveraged>;

// Residual polarisation rotation angle accumulated between recalibrations.
double sop_rotation_angle(double omega_rad_per_s, double delta_t_s);

// Mean Phi+ fidelity over uniformly random rotation axes at angle theta.
double sop_averaged_fidelity(double theta);

// Sampled: the unitary exp(-i theta/2 n.sigma) with theta = omega * delta_t.
// Averaged: the axis average of the sampled channel, which is the Pauli
// channel {cos^2(theta/2), sin^2(theta/2)/3 x 3}.
KrausChannel sop_rotation_channel(double omega_rad_per_s, double delta_t_s, const SopMode& mode);

// Photon loss on the rail space: with probability 1 - eta the photon is
// replaced by vacuum; the polarisation of surviving photons is untouched.
KrausChannel loss_channel(double eta);

// Lifts a qubit channel to the rail space (vacuum is left alone).
KrausChannel to_rail(const KrausChannel& qubit_channel);

// Post-selects a rail channel on a photon arriving: the qubit-to-qubit block
// of each operator, as a heralded channel.
KrausChannel herald_photon(const KrausChannel& rail_channel);

// Embeds a qubit state into the rail space (one photon, no vacuum weight).
DensityMatrix qubit_to_rail(const DensityMatrix& qubit);

}  // namespace qors

#pragma once

// Entanglement-distribution repeater chains.
//
// Topology: site A -- span 0 -- node 1 -- span 1 -- ... -- node N-1 -- span N-1 -- site B.
// Every span has a pair source at its right-hand end. The near photon goes
// into the local memory, the far photon crosses the span and is written into
// the memory at the left-hand end (or measured directly when that end is an
// endpoint site). End sites never store qubits: BBM92 measures on arrival and
// Pauli-frame corrections from the swaps are applied to the recorded bits.
//
// Each delivery round runs as follows. All spans attempt in parallel. An
// attempt on span i occupies one slot of length max(1/attempt_rate,
// 2 L_i / v), so the herald round trip fits inside it. Swaps happen left to
// right as soon as the segment to the left of a node and the node's right
// span are both ready. A round is abandoned when a span has not heralded by
// memory_cutoff (chains with memories only) or when a swap fails; the next
// round then starts from scratch.

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "qors/fiber.hpp"
#include "qors/linalg.hpp"

namespace qors {

struct MemorySpec {
  double coherence_time_s = 10.0;
  double write_efficiency = 0.9;
  double read_efficiency = 0.9;
  bool cryogenic_required = false;

  void validate() const;
};

// A site that measures photons as they arrive.
MemorySpec direct_detection();

struct QorsNode {
  MemorySpec memory;
  double bsm_success_prob = 0.5;
  double bsm_visibility_penalty = 0.02;
  double detector_efficiency = 0.9;
  double position_km = 0.0;

  void validate() const;
};

struct RepeaterChain {
  std::vector<FiberSpan> spans;
  std::vector<QorsNode> nodes;  // spans.size() - 1 of them
  double attempt_rate_hz = 1e6;
  double memory_cutoff_s = 10.0;
  double endpoint_detector_efficiency = 0.9;
  // Deployment attestations checked by the feasibility assessment.
  bool coexistence = true;
  bool existing_sites_only = true;

  void validate() const;
  double total_length_km() const;
};

struct EndToEndResult {
  double werner_fidelity = 0.0;  // fidelity of delivered pairs to Phi+
  double pair_rate_hz = 0.0;
  double mean_latency_s = 0.0;  // round start to delivery, delivered rounds only
  std::uint64_t trials = 0;     // delivery rounds simulated (0 for the analytic model)
  std::uint64_t successes = 0;
  double success_probability = 0.0;  // per round
  double fidelity_stderr = 0.0;
  double rate_stderr = 0.0;
  double latency_stderr = 0.0;
  // Mean state of delivered pairs; empty when nothing was delivered.
  std::optional<DensityMatrix> mean_state;
};

struct SpanAttempt {
  double success_probability;
  DensityMatrix state;  // qubit 0 is the far (left) end
};

// p = write_efficiency * detector_efficiency * transmittance. The heralded
// state is the span stack applied to qubit 0 of Phi+, mixed with I/4 with
// weight noise / (p + noise).
SpanAttempt span_entanglement_attempt(const FiberSpan& span, double detector_efficiency,
                                      const MemorySpec& memory);

// Depolarises the stored qubit so that the Werner parameter decays by
// exp(-dwell / coherence_time).
DensityMatrix memory_decay(const DensityMatrix& state, double dwell_s, const MemorySpec& memory,
                           std::size_t stored_qubit = 0);

struct SwapOutcome {
  double success_probability;
  DensityMatrix state;
};

// Bell measurement on left qubit 1 and right qubit 0, resolving the two Psi
// outcomes, each followed by the Pauli correction on right qubit 1. The
// visibility penalty dephases left qubit 1 before the projection.
SwapOutcome entanglement_swap(const DensityMatrix& left, const DensityMatrix& right,
                              const QorsNode& node);

// Full Bell-measurement teleportation, averaged over the four outcomes.
// Resource qubit 0 is at the sender.
DensityMatrix teleport(const DensityMatrix& input, const DensityMatrix& resource);

// Worker count 0 means one per hardware thread. Results do not depend on it.
EndToEndResult simulate_chain_mc(const RepeaterChain& chain, std::uint64_t trials,
                                 std::uint64_t seed, unsigned workers = 1);

// Expected-value model over the same round protocol: Bell-diagonal state
// algebra for the delivered pair and a prefix-maximum recursion over the span
// ready times for memory decay, timeouts and round duration.
EndToEndResult simulate_chain_analytic(const RepeaterChain& chain);

// Helpers shared by both engines.
namespace chain_model {

// Attempt slot of span i.
double slot_seconds(const RepeaterChain& chain, std::size_t span);
// Largest slot count that still heralds within the cutoff.
std::uint64_t max_slots(double cutoff_s, double slot_s);
// Node at the left/right end of span i, nullptr for end sites.
const QorsNode* left_node(const RepeaterChain& chain, std::size_t span);
const QorsNode* right_node(const RepeaterChain& chain, std::size_t span);
SpanAttempt attempt_for_span(const RepeaterChain& chain, std::size_t span);
// BSM success times the two memory reads at node j (1-based).
double swap_success(const QorsNode& node);
bool uses_cutoff(const RepeaterChain& chain);

}  // namespace chain_model

// Bell-diagonal two-qubit state in the Pauli-frame picture:
// sum_P q_P (I (x) P) |Phi+><Phi+| (I (x) P)^dagger, with P in {I, X, Z, Y}
// indexed by (x bit) | (z bit) << 1.
struct BellDiagonal {
  std::array<double, 4> q{1.0, 0.0, 0.0, 0.0};

  static BellDiagonal from_state(const DensityMatrix& rho);
  static BellDiagonal werner(double fidelity);
  DensityMatrix to_state() const;
  double fidelity() const { return q[0]; }
};

// Distribution of the product of two independent Pauli errors.
BellDiagonal convolve(const BellDiagonal& a, const BellDiagonal& b);
// Depolarising with Werner-parameter factor `factor` (1 = no change).
BellDiagonal depolarize(const BellDiagonal& a, double factor);

}  // namespace qors

#include "qors/repeater.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>

#include "qors/channel.hpp"

namespace qors {

namespace {

void require(bool ok, const std::string& message) {
  if (!ok) {
    throw ParameterError(message);
  }
}

bool in_unit_interval(double v) { return v >= 0.0 && v <= 1.0; }

constexpr std::array<std::size_t, 2> kPairDims{2, 2};

// Pauli correction that maps each Bell outcome back to Phi+.
ComplexMatrix bell_correction(Bell outcome) {
  switch (outcome) {
    case Bell::kPhiPlus:
      return pauli::I();
    case Bell::kPhiMinus:
      return pauli::Z();
    case Bell::kPsiPlus:
      return pauli::X();
    case Bell::kPsiMinus:
      return pauli::Z() * pauli::X();
  }
  throw std::invalid_argument("unknown Bell outcome");
}

// Bell state labelled by the Pauli-frame index used in BellDiagonal.
constexpr std::array<Bell, 4> kFrameBell{Bell::kPhiPlus, Bell::kPsiPlus, Bell::kPhiMinus,
                                         Bell::kPsiMinus};

}  // namespace

void MemorySpec::validate() const {
  require(coherence_time_s > 0.0 && !std::isnan(coherence_time_s),
          "memory coherence time must be > 0");
  require(in_unit_interval(write_efficiency), "memory write efficiency must lie in [0, 1]");
  require(in_unit_interval(read_efficiency), "memory read efficiency must lie in [0, 1]");
}

MemorySpec direct_detection() {
  return {std::numeric_limits<double>::infinity(), 1.0, 1.0, false};
}

void QorsNode::validate() const {
  memory.validate();
  require(in_unit_interval(bsm_success_prob), "BSM success probability must lie in [0, 1]");
  require(in_unit_interval(bsm_visibility_penalty), "BSM visibility penalty must lie in [0, 1]");
  require(in_unit_interval(detector_efficiency), "detector efficiency must lie in [0, 1]");
  require(position_km >= 0.0 && std::isfinite(position_km), "node position must be >= 0");
}

void RepeaterChain::validate() const {
  require(!spans.empty(), "repeater chain needs at least one span");
  require(nodes.size() + 1 == spans.size(), "repeater chain needs exactly spans - 1 nodes");
  for (const auto& s : spans) {
    s.validate();
  }
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    nodes[i].validate();
    if (i > 0) {
      require(nodes[i].position_km >= nodes[i - 1].position_km,
              "node positions must be nondecreasing along the chain");
    }
  }
  require(attempt_rate_hz > 0.0 && std::isfinite(attempt_rate_hz), "attempt rate must be > 0");
  require(memory_cutoff_s > 0.0 && !std::isnan(memory_cutoff_s), "memory cutoff must be > 0");
  require(in_unit_interval(endpoint_detector_efficiency),
          "endpoint detector efficiency must lie in [0, 1]");
}

double RepeaterChain::total_length_km() const {
  return std::accumulate(spans.begin(), spans.end(), 0.0,
                         [](double acc, const FiberSpan& s) { return acc + s.length_km; });
}

SpanAttempt span_entanglement_attempt(const FiberSpan& span, double detector_efficiency,
                                      const MemorySpec& memory) {
  require(in_unit_interval(detector_efficiency), "detector efficiency must lie in [0, 1]");
  memory.validate();
  const SpanChannel stack = span_channel_stack(span);
  const double p = memory.write_efficiency * detector_efficiency * stack.survival_probability;
  const double noise = stack.noise_probability;

  const DensityMatrix mixed = DensityMatrix::maximally_mixed(4);
  if (stack.survival_probability <= 0.0) {
    return {p, mixed};
  }
  const DensityMatrix signal =
      apply_local(stack.heralded, bell_state(Bell::kPhiPlus), kPairDims, 0);
  const double accidental = (p + noise) > 0.0 ? noise / (p + noise) : 0.0;
  if (accidental == 0.0) {
    return {p, signal};
  }
  return {p, DensityMatrix::normalized(signal.matrix() * (1.0 - accidental) +
                                       mixed.matrix() * accidental)};
}

DensityMatrix memory_decay(const DensityMatrix& state, double dwell_s, const MemorySpec& memory,
                           std::size_t stored_qubit) {
  require(state.dim() == 4, "memory decay acts on two-qubit states");
  require(stored_qubit < 2, "stored qubit index must be 0 or 1");
  require(dwell_s >= 0.0 && !std::isnan(dwell_s), "dwell time must be >= 0");
  memory.validate();
  if (std::isinf(memory.coherence_time_s)) {
    return state;
  }
  const double keep = std::exp(-dwell_s / memory.coherence_time_s);
  if (keep >= 1.0) {
    return state;
  }
  return apply_local(depolarizing_channel(1.0 - keep), state, kPairDims, stored_qubit);
}

SwapOutcome entanglement_swap(const DensityMatrix& left, const DensityMatrix& right,
                              const QorsNode& node) {
  if (left.dim() != 4 || right.dim() != 4) {
    throw DimensionError("entanglement swap needs two two-qubit states");
  }
  node.validate();
  constexpr std::array<std::size_t, 4> dims{2, 2, 2, 2};
  constexpr std::array<std::size_t, 2> outer{0, 3};

  ComplexMatrix joint = tensor(left.matrix(), right.matrix());
  if (node.bsm_visibility_penalty > 0.0) {
    joint = apply_kraus(lift(dephasing_channel(node.bsm_visibility_penalty), dims, 1), joint);
  }

  const ComplexMatrix id2 = ComplexMatrix::identity(2);
  ComplexMatrix acc(4, 4);
  // Linear optics resolves the two Psi outcomes only.
  for (Bell outcome : {Bell::kPsiPlus, Bell::kPsiMinus}) {
    const ComplexMatrix projector =
        tensor(tensor(id2, ComplexMatrix::outer(bell_ket(outcome))), id2);
    const ComplexMatrix reduced = partial_trace(projector * joint * projector, dims, outer);
    const ComplexMatrix fix = tensor(id2, bell_correction(outcome));
    acc += fix * reduced * fix.adjoint();
  }
  if (!(acc.trace().real() > 0.0)) {
    throw InvalidStateError("Bell measurement has zero probability on these inputs");
  }
  return {node.bsm_success_prob, DensityMatrix::normalized(acc)};
}

DensityMatrix teleport(const DensityMatrix& input, const DensityMatrix& resource) {
  if (input.dim() != 2 || resource.dim() != 4) {
    throw DimensionError("teleport needs a qubit input and a two-qubit resource");
  }
  constexpr std::array<std::size_t, 3> dims{2, 2, 2};
  constexpr std::array<std::size_t, 1> receiver{2};
  const ComplexMatrix joint = tensor(input.matrix(), resource.matrix());
  const ComplexMatrix id2 = ComplexMatrix::identity(2);
  ComplexMatrix acc(2, 2);
  for (Bell outcome : {Bell::kPhiPlus, Bell::kPhiMinus, Bell::kPsiPlus, Bell::kPsiMinus}) {
    const ComplexMatrix projector = tensor(ComplexMatrix::outer(bell_ket(outcome)), id2);
    const ComplexMatrix reduced = partial_trace(projector * joint * projector, dims, receiver);
    const ComplexMatrix fix = bell_correction(outcome);
    acc += fix * reduced * fix.adjoint();
  }
  return DensityMatrix::normalized(acc);
}

BellDiagonal BellDiagonal::from_state(const DensityMatrix& rho) {
  if (rho.dim() != 4) {
    throw DimensionError("Bell-diagonal view needs a two-qubit state");
  }
  BellDiagonal out;
  for (std::size_t i = 0; i < 4; ++i) {
    out.q[i] = qors::fidelity(rho, bell_ket(kFrameBell[i]));
  }
  return out;
}

BellDiagonal BellDiagonal::werner(double f) {
  const double e = (1.0 - f) / 3.0;
  return {{f, e, e, e}};
}

DensityMatrix BellDiagonal::to_state() const {
  ComplexMatrix m(4, 4);
  for (std::size_t i = 0; i < 4; ++i) {
    m += ComplexMatrix::outer(bell_ket(kFrameBell[i])) * q[i];
  }
  return DensityMatrix::normalized(std::move(m));
}

BellDiagonal convolve(const BellDiagonal& a, const BellDiagonal& b) {
  BellDiagonal out{{0.0, 0.0, 0.0, 0.0}};
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 4; ++j) {
      out.q[i ^ j] += a.q[i] * b.q[j];
    }
  }
  return out;
}

BellDiagonal depolarize(const BellDiagonal& a, double factor) {
  BellDiagonal out;
  for (std::size_t i = 0; i < 4; ++i) {
    out.q[i] = factor * a.q[i] + (1.0 - factor) / 4.0;
  }
  return out;
}

namespace chain_model {

double slot_seconds(const RepeaterChain& chain, std::size_t span) {
  return std::max(1.0 / chain.attempt_rate_hz, 2.0 * photon_dwell_time(chain.spans[span]));
}

std::uint64_t max_slots(double cutoff_s, double slot_s) {
  const double k = std::floor(cutoff_s / slot_s);
  if (!(k < 9.0e18)) {
    return std::numeric_limits<std::uint64_t>::max();
  }
  return static_cast<std::uint64_t>(k);
}

const QorsNode* left_node(const RepeaterChain& chain, std::size_t span) {
  return span == 0 ? nullptr : &chain.nodes[span - 1];
}

const QorsNode* right_node(const RepeaterChain& chain, std::size_t span) {
  return span + 1 >= chain.spans.size() ? nullptr : &chain.nodes[span];
}

SpanAttempt attempt_for_span(const RepeaterChain& chain, std::size_t span) {
  const QorsNode* receiver = left_node(chain, span);
  const double detector =
      receiver != nullptr ? receiver->detector_efficiency : chain.endpoint_detector_efficiency;
  const MemorySpec memory = receiver != nullptr ? receiver->memory : direct_detection();
  return span_entanglement_attempt(chain.spans[span], detector, memory);
}

double swap_success(const QorsNode& node) {
  return node.bsm_success_prob * node.memory.read_efficiency * node.memory.read_efficiency;
}

bool uses_cutoff(const RepeaterChain& chain) { return chain.spans.size() > 1; }

}  // namespace chain_model

}  // namespace qors

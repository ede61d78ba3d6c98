#include <gtest/gtest.h>

#include <array>
#include <cmath>

#include "qors/errors.hpp"
#include "qors/repeater.hpp"
#include "test_support.hpp"

namespace qors {
namespace {

constexpr std::array<std::size_t, 2> kQubitPair{2, 2};

QorsNode ideal_node() {
  QorsNode n;
  n.memory = MemorySpec{std::numeric_limits<double>::infinity(), 1.0, 1.0, false};
  n.bsm_success_prob = 1.0;
  n.bsm_visibility_penalty = 0.0;
  n.detector_efficiency = 1.0;
  return n;
}

FiberSpan lossless_span() {
  FiberSpan s;
  s.length_km = 0.0;
  return s;
}

// Independent swap reference: explicit index sums over the middle qubits for
// every Bell outcome, each corrected on the last qubit and summed.
ComplexMatrix reference_swap(const DensityMatrix& left, const DensityMatrix& right,
                             bool psi_only) {
  const std::array<Bell, 4> outcomes{Bell::kPhiPlus, Bell::kPhiMinus, Bell::kPsiPlus,
                                     Bell::kPsiMinus};
  ComplexMatrix acc(4, 4);
  for (Bell outcome : outcomes) {
    if (psi_only && (outcome == Bell::kPhiPlus || outcome == Bell::kPhiMinus)) {
      continue;
    }
    const auto beta = bell_ket(outcome);
    ComplexMatrix reduced(4, 4);
    for (std::size_t a = 0; a < 2; ++a) {
      for (std::size_t d = 0; d < 2; ++d) {
        for (std::size_t a2 = 0; a2 < 2; ++a2) {
          for (std::size_t d2 = 0; d2 < 2; ++d2) {
            Complex sum = 0.0;
            for (std::size_t b = 0; b < 2; ++b) {
              for (std::size_t c = 0; c < 2; ++c) {
                for (std::size_t b2 = 0; b2 < 2; ++b2) {
                  for (std::size_t c2 = 0; c2 < 2; ++c2) {
                    sum += std::conj(beta[b * 2 + c]) * left(a * 2 + b, a2 * 2 + b2) *
                           right(c * 2 + d, c2 * 2 + d2) * beta[b2 * 2 + c2];
                  }
                }
              }
            }
            reduced(a * 2 + d, a2 * 2 + d2) = sum;
          }
        }
      }
    }
    ComplexMatrix fix = pauli::I();
    if (outcome == Bell::kPhiMinus) {
      fix = pauli::Z();
    } else if (outcome == Bell::kPsiPlus) {
      fix = pauli::X();
    } else if (outcome == Bell::kPsiMinus) {
      fix = pauli::Z() * pauli::X();
    }
    const ComplexMatrix full = tensor(pauli::I(), fix);
    acc += full * reduced * full.adjoint();
  }
  return acc * (1.0 / acc.trace().real());
}

double swap_closed_form(double f1, double f2) { return f1 * f2 + (1.0 - f1) * (1.0 - f2) / 3.0; }

TEST(MemorySpec, Validation) {
  EXPECT_NO_THROW(MemorySpec{}.validate());
  EXPECT_THROW((MemorySpec{0.0, 0.9, 0.9, false}.validate()), ParameterError);
  EXPECT_THROW((MemorySpec{1.0, 1.1, 0.9, false}.validate()), ParameterError);
  EXPECT_NO_THROW(direct_detection().validate());
}

TEST(RepeaterChain, Validation) {
  RepeaterChain chain;
  EXPECT_THROW(chain.validate(), ParameterError);
  chain.spans = {lossless_span(), lossless_span()};
  EXPECT_THROW(chain.validate(), ParameterError);
  chain.nodes = {QorsNode{}};
  EXPECT_NO_THROW(chain.validate());
  chain.memory_cutoff_s = 0.0;
  EXPECT_THROW(chain.validate(), ParameterError);
}

TEST(SpanAttempt, ReferenceExamples) {
  const SpanAttempt ideal =
      span_entanglement_attempt(lossless_span(), 1.0, MemorySpec{1.0, 1.0, 1.0, false});
  EXPECT_DOUBLE_EQ(ideal.success_probability, 1.0);
  EXPECT_NEAR(fidelity(ideal.state, bell_ket(Bell::kPhiPlus)), 1.0, 1e-12);

  // eta = 0.5 via insertion loss 10 log10(2) dB.
  FiberSpan half = lossless_span();
  half.mux_insertion_loss_db = 10.0 * std::log10(2.0);
  const SpanAttempt a = span_entanglement_attempt(half, 0.8, MemorySpec{1.0, 0.9, 0.9, false});
  EXPECT_NEAR(a.success_probability, 0.36, 1e-12);

  FiberSpan c15;
  c15.length_km = 15.0;
  c15.quantum_band = Band::kC;
  const SpanAttempt c = span_entanglement_attempt(c15, 1.0, MemorySpec{1.0, 1.0, 1.0, false});
  EXPECT_NEAR(c.success_probability, 0.501, 1e-3);
  EXPECT_NEAR(fidelity(c.state, bell_ket(Bell::kPhiPlus)), 1.0, 1e-12);
}

TEST(SpanAttempt, NoiseMixesTowardsMaximallyMixed) {
  FiberSpan span = lossless_span();
  span.mux_insertion_loss_db = 10.0;  // eta = 0.1
  span.coexistence_noise_prob = 0.1;
  const SpanAttempt a = span_entanglement_attempt(span, 1.0, MemorySpec{1.0, 1.0, 1.0, false});
  // lambda = n / (p + n) = 0.5 -> F = 0.5 * 1 + 0.5 * 0.25
  EXPECT_NEAR(fidelity(a.state, bell_ket(Bell::kPhiPlus)), 0.625, 1e-12);
}

TEST(SpanAttempt, HeraldedStateIsValidOnRandomSpans) {
  for (int trial = 0; trial < 1000; ++trial) {
    FiberSpan span;
    span.length_km = testing::uniform(0.0, 120.0);
    span.dephasing_p = testing::uniform(0.0, 0.5);
    span.sop_drift_rate_rad_s = testing::uniform(0.0, 1e6);
    span.sop_recalibration_interval_s = testing::uniform(0.0, 1e-5);
    span.coexistence_noise_prob = testing::uniform(0.0, 1e-4);
    const SpanAttempt a = span_entanglement_attempt(span, testing::uniform(), MemorySpec{});
    EXPECT_EQ(DensityMatrix::check(a.state.matrix()), "");
    EXPECT_GE(a.success_probability, 0.0);
    EXPECT_LE(a.success_probability, 1.0);
  }
}

TEST(MemoryDecay, ReferenceExamples) {
  const MemorySpec mem{2.0, 0.9, 0.9, false};
  const DensityMatrix phi = bell_state(Bell::kPhiPlus);
  EXPECT_LT(max_abs_diff(memory_decay(phi, 0.0, mem).matrix(), phi.matrix()), 1e-15);
  EXPECT_NEAR(fidelity(memory_decay(phi, 1e6, mem), bell_ket(Bell::kPhiPlus)), 0.25, 1e-12);
  const double f = fidelity(memory_decay(phi, 2.0, mem), bell_ket(Bell::kPhiPlus));
  EXPECT_NEAR(f, (3.0 * std::exp(-1.0) + 1.0) / 4.0, 1e-12);
  EXPECT_NEAR(f, 0.526, 1e-3);
  EXPECT_THROW(memory_decay(phi, -1.0, mem), ParameterError);
  EXPECT_THROW(memory_decay(DensityMatrix::maximally_mixed(2), 1.0, mem), ParameterError);
}

TEST(MemoryDecay, ScalesWernerParameterOnEitherQubit) {
  for (int trial = 0; trial < 200; ++trial) {
    const double f = testing::uniform(0.25, 1.0);
    const MemorySpec mem{testing::uniform(0.1, 10.0), 1.0, 1.0, false};
    const double dwell = testing::uniform(0.0, 5.0);
    const double w = werner_parameter(f) * std::exp(-dwell / mem.coherence_time_s);
    for (std::size_t q : {0u, 1u}) {
      const DensityMatrix out = memory_decay(werner_state(f), dwell, mem, q);
      EXPECT_NEAR(fidelity(out, bell_ket(Bell::kPhiPlus)), (3.0 * w + 1.0) / 4.0, 1e-12);
    }
  }
}

TEST(EntanglementSwap, ReferenceExamples) {
  const QorsNode node = ideal_node();
  const SwapOutcome perfect =
      entanglement_swap(bell_state(Bell::kPhiPlus), bell_state(Bell::kPhiPlus), node);
  EXPECT_NEAR(fidelity(perfect.state, bell_ket(Bell::kPhiPlus)), 1.0, 1e-12);

  const SwapOutcome w = entanglement_swap(werner_state(0.95), werner_state(0.95), node);
  EXPECT_NEAR(fidelity(w.state, bell_ket(Bell::kPhiPlus)), 0.9033333333333333, 1e-10);

  const SwapOutcome absorbed = entanglement_swap(werner_state(1.0), werner_state(0.25), node);
  EXPECT_NEAR(fidelity(absorbed.state, bell_ket(Bell::kPhiPlus)), 0.25, 1e-12);
}

TEST(EntanglementSwap, ReportsNodeSuccessProbability) {
  QorsNode node;
  node.bsm_success_prob = 0.5;
  const SwapOutcome out = entanglement_swap(werner_state(0.9), werner_state(0.9), node);
  EXPECT_DOUBLE_EQ(out.success_probability, 0.5);
  EXPECT_THROW(entanglement_swap(werner_state(0.9), DensityMatrix::maximally_mixed(2), node),
               DimensionError);
}

TEST(EntanglementSwap, WernerGridMatchesClosedForm) {
  const QorsNode node = ideal_node();
  for (int i = 0; i < 10; ++i) {
    for (int j = 0; j < 10; ++j) {
      const double f1 = 0.25 + 0.75 * i / 9.0;
      const double f2 = 0.25 + 0.75 * j / 9.0;
      const DensityMatrix out = entanglement_swap(werner_state(f1), werner_state(f2), node).state;
      const BellDiagonal bd = BellDiagonal::from_state(out);
      EXPECT_NEAR(bd.q[0], swap_closed_form(f1, f2), 1e-10);
      // Werner in, Werner out.
      EXPECT_NEAR(bd.q[1], bd.q[2], 1e-12);
      EXPECT_NEAR(bd.q[2], bd.q[3], 1e-12);
      EXPECT_LT(max_abs_diff(out.matrix(), werner_state(bd.q[0]).matrix()), 1e-12);
    }
  }
}

TEST(EntanglementSwap, MatchesIndexSumReferenceOnRandomStates) {
  const QorsNode node = ideal_node();
  for (int trial = 0; trial < 1000; ++trial) {
    const DensityMatrix left = testing::random_density(4);
    const DensityMatrix right = testing::random_density(4);
    const DensityMatrix out = entanglement_swap(left, right, node).state;
    EXPECT_EQ(DensityMatrix::check(out.matrix()), "");
    EXPECT_LT(max_abs_diff(out.matrix(), reference_swap(left, right, true)), 1e-10);
  }
}

TEST(EntanglementSwap, BellDiagonalInputsAgreeWithFullBellMeasurement) {
  const QorsNode node = ideal_node();
  for (int trial = 0; trial < 200; ++trial) {
    BellDiagonal a;
    BellDiagonal b;
    double ta = 0.0;
    double tb = 0.0;
    for (std::size_t k = 0; k < 4; ++k) {
      a.q[k] = testing::uniform();
      b.q[k] = testing::uniform();
      ta += a.q[k];
      tb += b.q[k];
    }
    for (std::size_t k = 0; k < 4; ++k) {
      a.q[k] /= ta;
      b.q[k] /= tb;
    }
    const DensityMatrix out = entanglement_swap(a.to_state(), b.to_state(), node).state;
    EXPECT_LT(max_abs_diff(out.matrix(), reference_swap(a.to_state(), b.to_state(), false)), 1e-10);
    // The Pauli-frame convolution predicts the same state.
    EXPECT_LT(max_abs_diff(out.matrix(), convolve(a, b).to_state().matrix()), 1e-10);
  }
}

TEST(EntanglementSwap, VisibilityPenaltyActsAsDephasing) {
  QorsNode node = ideal_node();
  node.bsm_visibility_penalty = 0.1;
  const DensityMatrix out =
      entanglement_swap(bell_state(Bell::kPhiPlus), bell_state(Bell::kPhiPlus), node).state;
  EXPECT_NEAR(fidelity(out, bell_ket(Bell::kPhiPlus)), 0.9, 1e-12);
  EXPECT_NEAR(fidelity(out, bell_ket(Bell::kPhiMinus)), 0.1, 1e-12);
}

TEST(Teleport, IdealResourceIsIdentity) {
  const DensityMatrix phi = bell_state(Bell::kPhiPlus);
  for (int trial = 0; trial < 20; ++trial) {
    const auto ket = testing::random_ket(2);
    EXPECT_NEAR(fidelity(teleport(DensityMatrix::pure(ket), phi), ket), 1.0, 1e-10);
  }
  for (int trial = 0; trial < 100; ++trial) {
    const DensityMatrix rho = testing::random_density(2);
    EXPECT_LT(max_abs_diff(teleport(rho, phi).matrix(), rho.matrix()), 1e-10);
  }
}

TEST(Teleport, WernerResourceAverageFidelity) {
  for (double f : {0.25, 0.5, 0.8, 0.95, 1.0}) {
    const DensityMatrix resource = werner_state(f);
    for (int trial = 0; trial < 50; ++trial) {
      const auto ket = testing::random_ket(2);
      // Werner resources give a depolarising channel, so every pure input
      // already achieves the average.
      EXPECT_NEAR(fidelity(teleport(DensityMatrix::pure(ket), resource), ket),
                  (2.0 * f + 1.0) / 3.0, 1e-9);
    }
  }
}

TEST(Teleport, MaximallyMixedInputIsInvariant) {
  for (int trial = 0; trial < 20; ++trial) {
    const DensityMatrix out = teleport(DensityMatrix::maximally_mixed(2), testing::random_density(4));
    EXPECT_LT(max_abs_diff(out.matrix(), DensityMatrix::maximally_mixed(2).matrix()), 1e-12);
  }
  EXPECT_THROW(teleport(DensityMatrix::maximally_mixed(4), bell_state(Bell::kPhiPlus)),
               DimensionError);
}

TEST(BellDiagonal, RoundTripAndAlgebra) {
  const BellDiagonal w = BellDiagonal::werner(0.8);
  EXPECT_LT(max_abs_diff(w.to_state().matrix(), werner_state(0.8).matrix()), 1e-15);
  const BellDiagonal back = BellDiagonal::from_state(werner_state(0.8));
  for (std::size_t k = 0; k < 4; ++k) {
    EXPECT_NEAR(back.q[k], w.q[k], 1e-12);
  }
  EXPECT_NEAR(convolve(BellDiagonal::werner(0.9), BellDiagonal::werner(0.8)).fidelity(),
              swap_closed_form(0.9, 0.8), 1e-15);
  const BellDiagonal d = depolarize(BellDiagonal::werner(1.0), std::exp(-1.0));
  EXPECT_NEAR(d.fidelity(), (3.0 * std::exp(-1.0) + 1.0) / 4.0, 1e-15);
  // Frame labels: X error -> Psi+, Z error -> Phi-, Y error -> Psi-.
  EXPECT_NEAR(BellDiagonal::from_state(bell_state(Bell::kPsiPlus)).q[1], 1.0, 1e-12);
  EXPECT_NEAR(BellDiagonal::from_state(bell_state(Bell::kPhiMinus)).q[2], 1.0, 1e-12);
  EXPECT_NEAR(BellDiagonal::from_state(bell_state(Bell::kPsiMinus)).q[3], 1.0, 1e-12);
}

}  // namespace
}  // namespace qors

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "qors/errors.hpp"
#include "qors/repeater.hpp"

namespace qors {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

FiberSpan span_of(double km, double mux_db = 0.0) {
  FiberSpan s;
  s.length_km = km;
  s.mux_insertion_loss_db = mux_db;
  return s;
}

QorsNode ideal_node() {
  QorsNode n;
  n.memory = MemorySpec{kInf, 1.0, 1.0, false};
  n.bsm_success_prob = 1.0;
  n.bsm_visibility_penalty = 0.0;
  n.detector_efficiency = 1.0;
  return n;
}

RepeaterChain chain_of(const std::vector<FiberSpan>& spans, const QorsNode& node) {
  RepeaterChain c;
  c.spans = spans;
  c.nodes.assign(spans.size() - 1, node);
  c.endpoint_detector_efficiency = 1.0;
  c.memory_cutoff_s = kInf;
  return c;
}

RepeaterChain realistic_chain() {
  RepeaterChain c;
  for (int i = 0; i < 3; ++i) {
    FiberSpan s = span_of(40.0, 1.0);
    s.dephasing_p = 0.01;
    s.sop_drift_rate_rad_s = 1e4;
    s.sop_recalibration_interval_s = 1e-5;
    s.coexistence_noise_prob = 1e-5;
    c.spans.push_back(s);
  }
  QorsNode node;
  node.memory = MemorySpec{0.05, 0.9, 0.9, false};
  c.nodes.assign(2, node);
  c.memory_cutoff_s = 0.02;
  return c;
}

// E[max(N1, N2)] for i.i.d. geometric attempt counts, by tail summation.
double expected_max_of_two(double p) {
  double sum = 0.0;
  double q_n = 1.0;
  for (int n = 0; n < 100000; ++n) {
    sum += 1.0 - (1.0 - q_n) * (1.0 - q_n);
    q_n *= 1.0 - p;
  }
  return sum;
}

void expect_identical(const EndToEndResult& a, const EndToEndResult& b) {
  EXPECT_EQ(a.werner_fidelity, b.werner_fidelity);
  EXPECT_EQ(a.pair_rate_hz, b.pair_rate_hz);
  EXPECT_EQ(a.mean_latency_s, b.mean_latency_s);
  EXPECT_EQ(a.successes, b.successes);
  EXPECT_EQ(a.fidelity_stderr, b.fidelity_stderr);
  EXPECT_EQ(a.rate_stderr, b.rate_stderr);
  EXPECT_EQ(a.latency_stderr, b.latency_stderr);
  ASSERT_EQ(a.mean_state.has_value(), b.mean_state.has_value());
  if (a.mean_state) {
    EXPECT_EQ(a.mean_state->matrix(), b.mean_state->matrix());
  }
}

TEST(Chain, SingleLosslessSpanRunsAtAttemptRate) {
  RepeaterChain c = chain_of({span_of(0.0)}, ideal_node());
  c.attempt_rate_hz = 2.5e5;
  const EndToEndResult mc = simulate_chain_mc(c, 1000, 1);
  EXPECT_NEAR(mc.pair_rate_hz, 2.5e5, 2.5e5 * 1e-12);
  EXPECT_DOUBLE_EQ(mc.success_probability, 1.0);
  EXPECT_NEAR(mc.werner_fidelity, 1.0, 1e-12);
  const EndToEndResult an = simulate_chain_analytic(c);
  EXPECT_DOUBLE_EQ(an.pair_rate_hz, 2.5e5);
  EXPECT_NEAR(an.werner_fidelity, 1.0, 1e-12);
}

TEST(Chain, SlotCoversHeraldRoundTrip) {
  RepeaterChain c = chain_of({span_of(50.0)}, ideal_node());
  const double v_km_s = 299792.458 / c.spans[0].fiber.group_index;
  EXPECT_NEAR(chain_model::slot_seconds(c, 0), 100.0 / v_km_s, 1e-15);
  c.spans[0].length_km = 0.01;
  EXPECT_DOUBLE_EQ(chain_model::slot_seconds(c, 0), 1e-6);
}

TEST(Chain, TwoIdealSpansMatchSwapOfSpanStates) {
  FiberSpan noisy = span_of(0.0, 10.0 * std::log10(2.0));  // p = 0.5
  noisy.dephasing_p = 0.05;
  noisy.coexistence_noise_prob = 1e-3;
  const RepeaterChain c = chain_of({noisy, noisy}, ideal_node());
  const SpanAttempt a = chain_model::attempt_for_span(c, 0);
  const SpanAttempt b = chain_model::attempt_for_span(c, 1);
  ASSERT_NEAR(a.success_probability, 0.5, 1e-12);
  const DensityMatrix expected = entanglement_swap(a.state, b.state, c.nodes[0]).state;
  const double f = fidelity(expected, bell_ket(Bell::kPhiPlus));

  const EndToEndResult mc = simulate_chain_mc(c, 20000, 7);
  EXPECT_NEAR(mc.werner_fidelity, f, 1e-12);
  EXPECT_LT(max_abs_diff(mc.mean_state->matrix(), expected.matrix()), 1e-12);
  const EndToEndResult an = simulate_chain_analytic(c);
  EXPECT_NEAR(an.werner_fidelity, f, 1e-12);

  const double rate = 1.0 / (1e-6 * expected_max_of_two(0.5));
  EXPECT_NEAR(an.pair_rate_hz, rate, 1e-9 * rate);
  EXPECT_NEAR(mc.pair_rate_hz, rate, 4.0 * mc.rate_stderr);
  EXPECT_NEAR(an.mean_latency_s, 1e-6 * expected_max_of_two(0.5), 1e-15);
}

TEST(Chain, IdealFidelityIsIteratedSwap) {
  FiberSpan s = span_of(20.0);
  s.dephasing_p = 0.02;
  s.sop_drift_rate_rad_s = 2e4;
  s.sop_recalibration_interval_s = 1e-5;
  for (std::size_t n = 1; n <= 5; ++n) {
    const RepeaterChain c = chain_of(std::vector<FiberSpan>(n, s), ideal_node());
    DensityMatrix seg = chain_model::attempt_for_span(c, 0).state;
    for (std::size_t j = 1; j < n; ++j) {
      seg = entanglement_swap(seg, chain_model::attempt_for_span(c, j).state, c.nodes[j - 1]).state;
    }
    const double f = fidelity(seg, bell_ket(Bell::kPhiPlus));
    EXPECT_NEAR(simulate_chain_analytic(c).werner_fidelity, f, 1e-12) << n << " spans";
    EXPECT_NEAR(simulate_chain_mc(c, 200, 3).werner_fidelity, f, 1e-12) << n << " spans";
  }
}

TEST(Chain, ResultsDoNotDependOnWorkerCount) {
  const RepeaterChain c = realistic_chain();
  const EndToEndResult one = simulate_chain_mc(c, 3000, 99, 1);
  expect_identical(one, simulate_chain_mc(c, 3000, 99, 3));
  expect_identical(one, simulate_chain_mc(c, 3000, 99, 0));
  const EndToEndResult other = simulate_chain_mc(c, 3000, 100, 1);
  EXPECT_NE(one.pair_rate_hz, other.pair_rate_hz);
}

TEST(Chain, AnalyticAgreesWithMonteCarlo) {
  const RepeaterChain c = realistic_chain();
  const EndToEndResult mc = simulate_chain_mc(c, 40000, 2024);
  const EndToEndResult an = simulate_chain_analytic(c);
  ASSERT_GT(mc.successes, 1000u);
  // Some rounds time out, so the cutoff is doing work.
  ASSERT_LT(an.success_probability, 0.95 * chain_model::swap_success(c.nodes[0]) *
                                        chain_model::swap_success(c.nodes[1]));
  const double sp_se = std::sqrt(mc.success_probability * (1.0 - mc.success_probability) /
                                 static_cast<double>(mc.trials));
  EXPECT_NEAR(an.werner_fidelity, mc.werner_fidelity, 3.0 * mc.fidelity_stderr);
  EXPECT_NEAR(an.pair_rate_hz, mc.pair_rate_hz, 3.0 * mc.rate_stderr);
  EXPECT_NEAR(an.mean_latency_s, mc.mean_latency_s, 3.0 * mc.latency_stderr);
  EXPECT_NEAR(an.success_probability, mc.success_probability, 3.0 * sp_se);
}

TEST(Chain, ShortCutoffLowersSuccess) {
  RepeaterChain c = realistic_chain();
  const double long_cut = simulate_chain_analytic(c).success_probability;
  c.memory_cutoff_s = 2e-3;
  const EndToEndResult an = simulate_chain_analytic(c);
  EXPECT_LT(an.success_probability, long_cut);
  const EndToEndResult mc = simulate_chain_mc(c, 20000, 5);
  const double se = std::sqrt(mc.success_probability * (1.0 - mc.success_probability) / 20000.0);
  EXPECT_NEAR(an.success_probability, mc.success_probability, 3.0 * se);
  EXPECT_NEAR(an.pair_rate_hz, mc.pair_rate_hz, 3.0 * mc.rate_stderr);
}

TEST(Chain, RepeatersBeatDirectTransmissionBeyond200Km) {
  for (double total : {240.0, 300.0, 400.0}) {
    RepeaterChain direct = chain_of({span_of(total, 1.0)}, QorsNode{});
    direct.endpoint_detector_efficiency = 0.9;
    RepeaterChain rep;
    rep.spans.assign(4, span_of(total / 4.0, 1.0));
    rep.nodes.assign(3, QorsNode{});
    rep.memory_cutoff_s = 10.0;
    const double direct_rate = simulate_chain_analytic(direct).pair_rate_hz;
    const double rep_rate = simulate_chain_analytic(rep).pair_rate_hz;
    EXPECT_GT(rep_rate, direct_rate) << total << " km";
    EXPECT_GT(simulate_chain_mc(rep, 2000, 11).pair_rate_hz, direct_rate) << total << " km";
  }
}

TEST(Chain, DeadSpanDeliversNothing) {
  RepeaterChain c = chain_of({span_of(10.0), span_of(10.0)}, ideal_node());
  c.nodes[0].detector_efficiency = 0.0;
  const EndToEndResult mc = simulate_chain_mc(c, 10, 1);
  EXPECT_EQ(mc.successes, 0u);
  EXPECT_EQ(mc.pair_rate_hz, 0.0);
  EXPECT_FALSE(mc.mean_state.has_value());
  EXPECT_EQ(simulate_chain_analytic(c).pair_rate_hz, 0.0);
}

TEST(Chain, Validation) {
  const RepeaterChain c = chain_of({span_of(10.0)}, ideal_node());
  EXPECT_THROW(simulate_chain_mc(c, 0, 1), ParameterError);
  RepeaterChain bad = c;
  bad.attempt_rate_hz = 0.0;
  EXPECT_THROW(simulate_chain_analytic(bad), ParameterError);
  bad = realistic_chain();
  bad.nodes[1].position_km = -1.0;
  EXPECT_THROW(simulate_chain_mc(bad, 10, 1), ParameterError);
}

}  // namespace
}  // namespace qors

#include <gtest/gtest.h>

#include <cmath>

#include "qors/errors.hpp"
#include "qors/fiber.hpp"
#include "test_support.hpp"

namespace qors {
namespace {

using testing::matrix_unit;

constexpr std::array<std::size_t, 2> kQubitPair{2, 2};

double map_distance(const KrausChannel& a, const KrausChannel& b) {
  double worst = 0.0;
  for (std::size_t r = 0; r < a.in_dim(); ++r) {
    for (std::size_t c = 0; c < a.in_dim(); ++c) {
      const ComplexMatrix e = matrix_unit(a.in_dim(), r, c);
      worst = std::max(worst, max_abs_diff(apply_kraus(a, e), apply_kraus(b, e)));
    }
  }
  return worst;
}

FiberSpan span_of(double km, Band band, double mux_db = 0.0) {
  FiberSpan s;
  s.length_km = km;
  s.quantum_band = band;
  s.mux_insertion_loss_db = mux_db;
  return s;
}

TEST(Band, NamesAndParsing) {
  EXPECT_EQ(band_name(Band::kO), "O");
  EXPECT_EQ(parse_band("c"), Band::kC);
  EXPECT_EQ(parse_band("L"), Band::kL);
  EXPECT_FALSE(parse_band("X").has_value());
  EXPECT_FALSE(parse_band("OC").has_value());
  EXPECT_DOUBLE_EQ(band_center_nm(Band::kO), 1310.0);
}

TEST(FiberSpec, ValidationAndLookup) {
  FiberSpec spec = ndsf_fiber();
  EXPECT_DOUBLE_EQ(spec.attenuation(Band::kC), 0.20);
  EXPECT_DOUBLE_EQ(spec.attenuation(Band::kO), 0.35);
  spec.attenuation_db_per_km.erase(Band::kL);
  EXPECT_THROW(spec.attenuation(Band::kL), ParameterError);
  spec.attenuation_db_per_km[Band::kC] = 0.0;
  EXPECT_THROW(spec.validate(), ParameterError);
}

TEST(Transmittance, ReferenceValues) {
  EXPECT_NEAR(transmittance(span_of(15.0, Band::kC)), std::pow(10.0, -0.3), 1e-15);
  EXPECT_NEAR(transmittance(span_of(15.0, Band::kC)), 0.501, 1e-3);
  EXPECT_DOUBLE_EQ(transmittance(span_of(0.0, Band::kO)), 1.0);
  EXPECT_NEAR(transmittance(span_of(100.0, Band::kO)), 3.1623e-4, 1e-8);
  EXPECT_NEAR(transmittance(span_of(10.0, Band::kC, 1.0)), std::pow(10.0, -0.3), 1e-15);
}

TEST(Transmittance, RejectsInvalidSpans) {
  EXPECT_THROW(transmittance(span_of(-1.0, Band::kO)), ParameterError);
  EXPECT_THROW(transmittance(span_of(1.0, Band::kO, -0.5)), ParameterError);
  FiberSpan bad = span_of(1.0, Band::kO);
  bad.dephasing_p = 1.5;
  EXPECT_THROW(transmittance(bad), ParameterError);
}

TEST(Transmittance, DecreasesWithLengthAndAttenuation) {
  double previous = 1.0;
  for (double km = 1.0; km <= 300.0; km += 7.0) {
    const double eta = transmittance(span_of(km, Band::kO));
    EXPECT_LT(eta, previous);
    previous = eta;
  }
  for (int trial = 0; trial < 100; ++trial) {
    FiberSpan a = span_of(testing::uniform(1.0, 200.0), Band::kC);
    FiberSpan b = a;
    b.fiber.attenuation_db_per_km[Band::kC] = a.fiber.attenuation(Band::kC) + testing::uniform(0.01, 0.2);
    EXPECT_LT(transmittance(b), transmittance(a));
  }
}

TEST(PhotonDwellTime, ReferenceValues) {
  EXPECT_DOUBLE_EQ(photon_dwell_time(span_of(0.0, Band::kO)), 0.0);
  const double t100 = photon_dwell_time(span_of(100.0, Band::kO));
  EXPECT_NEAR(t100, 100e3 * 1.468 / 2.99792458e8, 1e-18);
  EXPECT_NEAR(t100, 4.90e-4, 1e-6);
  EXPECT_DOUBLE_EQ(photon_dwell_time(span_of(50.0, Band::kO)), t100 / 2.0);
}

TEST(SpanChannelStack, ZeroLengthIsIdentity) {
  const SpanChannel stack = span_channel_stack(span_of(0.0, Band::kO));
  EXPECT_DOUBLE_EQ(stack.survival_probability, 1.0);
  EXPECT_LT(map_distance(stack.rail, identity_channel(kRailDim)), 1e-15);
  EXPECT_LT(map_distance(stack.heralded, identity_channel(2)), 1e-15);
}

TEST(SpanChannelStack, LossOnlyEqualsLossChannel) {
  for (double km : {1.0, 15.0, 80.0}) {
    const FiberSpan span = span_of(km, Band::kC, 0.5);
    const SpanChannel stack = span_channel_stack(span);
    EXPECT_LT(map_distance(stack.rail, loss_channel(transmittance(span))), 1e-15);
  }
}

TEST(SpanChannelStack, SurvivalEqualsTransmittance) {
  for (int trial = 0; trial < 200; ++trial) {
    FiberSpan span = span_of(testing::uniform(0.0, 150.0), trial % 2 ? Band::kO : Band::kC,
                             testing::uniform(0.0, 2.0));
    span.dephasing_p = testing::uniform();
    span.sop_drift_rate_rad_s = testing::uniform(0.0, 1e7);
    span.sop_recalibration_interval_s = testing::uniform(0.0, 1e-6);
    span.coexistence_noise_prob = testing::uniform(0.0, 1e-3);
    const SpanChannel stack = span_channel_stack(span);
    EXPECT_NEAR(stack.survival_probability, transmittance(span), 1e-12);
    EXPECT_DOUBLE_EQ(stack.noise_probability, span.coexistence_noise_prob);
    const HeraldedState h = apply_heralded(stack.heralded, testing::random_density(2));
    EXPECT_NEAR(h.probability, transmittance(span), 1e-12);
    EXPECT_TRUE(verify_cptp(stack.rail).valid);
  }
}

// Phi+ fidelity after the stack versus a Monte Carlo over rotation axes with
// the dephasing applied exactly per sample.
TEST(SpanChannelStack, DriftAndDephasingMatchMonteCarlo) {
  FiberSpan span = span_of(100.0, Band::kO);
  span.sop_drift_rate_rad_s = 5e6;
  span.sop_recalibration_interval_s = 1e-6;
  span.dephasing_p = 0.05;
  const SpanChannel stack = span_channel_stack(span);
  EXPECT_DOUBLE_EQ(stack.sop_angle_rad, 5.0);

  const DensityMatrix out = apply_local(stack.heralded, bell_state(Bell::kPhiPlus), kQubitPair, 0);
  const double f = fidelity(out, bell_ket(Bell::kPhiPlus));

  const double theta = 5.0;
  const double p = span.dephasing_p;
  const double c2 = std::pow(std::cos(theta / 2.0), 2);
  const double s2 = 1.0 - c2;
  EXPECT_NEAR(f, c2 * (1.0 - p) + s2 * p / 3.0, 1e-12);

  constexpr int kSamples = 100000;
  double sum = 0.0;
  double sum_sq = 0.0;
  for (int s = 0; s < kSamples; ++s) {
    auto n = testing::random_axis();
    const KrausChannel u = sop_rotation_channel(theta, 1.0, SopSampled{n});
    const DensityMatrix rotated = apply_local(u, bell_state(Bell::kPhiPlus), kQubitPair, 0);
    const DensityMatrix dephased =
        apply_local(dephasing_channel(p), rotated, kQubitPair, 0);
    const double fs = fidelity(dephased, bell_ket(Bell::kPhiPlus));
    sum += fs;
    sum_sq += fs * fs;
  }
  const double mean = sum / kSamples;
  const double se = std::sqrt(std::max(0.0, sum_sq / kSamples - mean * mean) / kSamples);
  EXPECT_LE(std::abs(f - mean), 3.0 * se) << "mean " << mean << " se " << se;
}

}  // namespace
}  // namespace qors

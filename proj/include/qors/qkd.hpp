#pragma once

// BBM92 key rates from delivered entangled pairs.

#include "qors/linalg.hpp"

namespace qors {

// Fraction of pairs whose bases match in BBM92.
inline constexpr double kBbm92SiftingFactor = 0.5;

struct QkdMetrics {
  double qber = 0.0;
  double sifted_rate_hz = 0.0;
  double secret_key_rate_hz = 0.0;
  double secret_fraction = 0.0;
  bool secure = false;
};

// Error probabilities of Z(x)Z and X(x)X measurements on a Phi+-target pair,
// computed from the measurement statistics of rho.
double z_basis_error(const DensityMatrix& rho);
double x_basis_error(const DensityMatrix& rho);

// Q = (Q_state * signal + 0.5 * noise) / (signal + noise), where Q_state is the
// mean of the Z and X basis error probabilities.
double qber_from_state(const DensityMatrix& rho, double noise_prob, double signal_prob);

double binary_entropy(double q);
// max(0, 1 - 2 h2(q))
double bbm92_secret_fraction(double q);
// Zero crossing of 1 - 2 h2(q) on (0, 0.5), found by bisection.
double bbm92_qber_threshold();

// Throws ParameterError when q is outside [0, 0.5] or the rate is negative.
QkdMetrics bbm92_key_rate(double q, double sifted_rate_hz);

}  // namespace qors

#include "qors/qkd.hpp"

#include <cmath>

#include "qors/errors.hpp"

namespace qors {

namespace {

// Probability that the two parties' outcomes differ after rotating both
// qubits by `basis` and measuring in the computational basis.
double disagreement(const DensityMatrix& rho, const ComplexMatrix& basis) {
  if (rho.dim() != 4) {
    throw DimensionError("QBER needs a two-qubit state");
  }
  const ComplexMatrix u = tensor(basis, basis);
  const ComplexMatrix rotated = u * rho.matrix() * u.adjoint();
  return rotated(1, 1).real() + rotated(2, 2).real();
}

ComplexMatrix hadamard() {
  const double s = 1.0 / std::sqrt(2.0);
  return ComplexMatrix::from_rows({{s, s}, {s, -s}});
}

}  // namespace

double z_basis_error(const DensityMatrix& rho) {
  return disagreement(rho, ComplexMatrix::identity(2));
}

double x_basis_error(const DensityMatrix& rho) { return disagreement(rho, hadamard()); }

double qber_from_state(const DensityMatrix& rho, double noise_prob, double signal_prob) {
  if (!(noise_prob >= 0.0 && noise_prob <= 1.0)) {
    throw ParameterError("noise probability must lie in [0, 1]");
  }
  if (!(signal_prob > 0.0 && signal_prob <= 1.0)) {
    throw ParameterError("signal probability must lie in (0, 1]");
  }
  const double state_qber = 0.5 * (z_basis_error(rho) + x_basis_error(rho));
  return (state_qber * signal_prob + 0.5 * noise_prob) / (signal_prob + noise_prob);
}

double binary_entropy(double q) {
  if (q <= 0.0 || q >= 1.0) {
    return 0.0;
  }
  return -q * std::log2(q) - (1.0 - q) * std::log2(1.0 - q);
}

double bbm92_secret_fraction(double q) { return std::max(0.0, 1.0 - 2.0 * binary_entropy(q)); }

double bbm92_qber_threshold() {
  static const double threshold = [] {
    double lo = 0.0;
    double hi = 0.5;
    while (hi - lo > 1e-15) {
      const double mid = 0.5 * (lo + hi);
      (1.0 - 2.0 * binary_entropy(mid) > 0.0 ? lo : hi) = mid;
    }
    return lo;
  }();
  return threshold;
}

QkdMetrics bbm92_key_rate(double q, double sifted_rate_hz) {
  if (!(q >= 0.0 && q <= 0.5)) {
    throw ParameterError("QBER must lie in [0, 0.5]");
  }
  if (!(sifted_rate_hz >= 0.0) || !std::isfinite(sifted_rate_hz)) {
    throw ParameterError("sifted rate must be finite and >= 0");
  }
  QkdMetrics m;
  m.qber = q;
  m.sifted_rate_hz = sifted_rate_hz;
  m.secret_fraction = bbm92_secret_fraction(q);
  m.secret_key_rate_hz = sifted_rate_hz * m.secret_fraction;
  m.secure = m.secret_key_rate_hz > 0.0;
  return m;
}

}  // namespace qors

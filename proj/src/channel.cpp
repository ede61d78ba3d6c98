#include "qors/channel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace qors {

namespace {

constexpr double kZeroOperatorTol = 1e-15;

ComplexMatrix gram_sum(const std::vector<ComplexMatrix>& ops) {
  ComplexMatrix acc(ops.front().cols(), ops.front().cols());
  for (const auto& k : ops) {
    acc += k.adjoint() * k;
  }
  return acc;
}

void check_probability(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) {
    std::ostringstream os;
    os << what << " must lie in [0, 1], got " << p;
    throw ParameterError(os.str());
  }
}

// Drops operators that are identically zero (they contribute nothing).
std::vector<ComplexMatrix> prune(std::vector<ComplexMatrix> ops) {
  std::vector<ComplexMatrix> out;
  out.reserve(ops.size());
  for (auto& k : ops) {
    if (k.max_abs() > kZeroOperatorTol) {
      out.push_back(std::move(k));
    }
  }
  if (out.empty()) {
    out.push_back(ComplexMatrix(ops.front().rows(), ops.front().cols()));
  }
  return out;
}

}  // namespace

KrausChannel::KrausChannel(Unchecked, std::vector<ComplexMatrix> operators, std::string label,
                           Kind kind)
    : operators_(std::move(operators)), label_(std::move(label)), kind_(kind) {
  if (operators_.empty()) {
    throw InvalidChannelError("Kraus channel needs at least one operator");
  }
  out_dim_ = operators_.front().rows();
  in_dim_ = operators_.front().cols();
  for (const auto& k : operators_) {
    if (k.rows() != out_dim_ || k.cols() != in_dim_) {
      throw DimensionError("Kraus operators of channel '" + label_ + "' have mixed shapes");
    }
  }
  if (in_dim_ > kMaxDim || out_dim_ > kMaxDim) {
    throw DimensionError("channel dimension exceeds " + std::to_string(kMaxDim));
  }
}

KrausChannel::KrausChannel(std::vector<ComplexMatrix> operators, std::string label, Kind kind)
    : KrausChannel(Unchecked{}, std::move(operators), std::move(label), kind) {
  const CptpReport report = verify_cptp(*this);
  if (!report.valid) {
    std::ostringstream os;
    os << "channel '" << label_ << "' fails completeness (residual "
       << report.completeness_residual << ", Choi min eigenvalue " << report.choi_min_eigenvalue
       << ")";
    throw InvalidChannelError(os.str());
  }
}

KrausChannel KrausChannel::unchecked(std::vector<ComplexMatrix> operators, std::string label,
                                     Kind kind) {
  return KrausChannel(Unchecked{}, std::move(operators), std::move(label), kind);
}

ComplexMatrix choi_matrix(const KrausChannel& ch) {
  const std::size_t din = ch.in_dim();
  const std::size_t dout = ch.out_dim();
  ComplexMatrix choi(din * dout, din * dout);
  // Each operator contributes v v^dagger with v_{a*dout + o} = K(o, a).
  for (const auto& k : ch.operators()) {
    std::vector<Complex> v(din * dout);
    for (std::size_t a = 0; a < din; ++a) {
      for (std::size_t o = 0; o < dout; ++o) {
        v[a * dout + o] = k(o, a);
      }
    }
    choi += ComplexMatrix::outer(v);
  }
  return choi;
}

CptpReport verify_cptp(const KrausChannel& ch) {
  CptpReport report;
  report.heralded = ch.heralded();
  const ComplexMatrix gram = gram_sum(ch.operators());
  const ComplexMatrix id = ComplexMatrix::identity(ch.in_dim());
  if (ch.heralded()) {
    const double min_defect = hermitian_eigenvalues(id - gram).front();
    report.completeness_residual = std::max(0.0, -min_defect);
  } else {
    report.completeness_residual = max_abs_diff(gram, id);
  }
  // Choi spectra beyond 256 dimensions are too costly to run on every
  // construction; larger channels only arise from lift(), which preserves
  // complete positivity exactly.
  if (ch.in_dim() * ch.out_dim() <= 256) {
    report.choi_min_eigenvalue = hermitian_eigenvalues(choi_matrix(ch)).front();
  }
  report.valid = report.completeness_residual <= kCompletenessTol &&
                 report.choi_min_eigenvalue >= -kChoiTol;
  return report;
}

ComplexMatrix apply_kraus(const KrausChannel& ch, const ComplexMatrix& rho) {
  if (rho.rows() != ch.in_dim() || rho.cols() != ch.in_dim()) {
    throw DimensionError("state dimension " + std::to_string(rho.rows()) +
                         " does not match channel input " + std::to_string(ch.in_dim()));
  }
  ComplexMatrix out(ch.out_dim(), ch.out_dim());
  for (const auto& k : ch.operators()) {
    out += k * rho * k.adjoint();
  }
  return out;
}

HeraldedState apply_heralded(const KrausChannel& ch, const DensityMatrix& rho) {
  const ComplexMatrix out = apply_kraus(ch, rho.matrix());
  const double p = std::max(0.0, out.trace().real());
  if (p <= 0.0) {
    return {0.0, std::nullopt};
  }
  return {p, DensityMatrix::normalized(out)};
}

DensityMatrix apply_channel(const KrausChannel& ch, const DensityMatrix& rho) {
  if (ch.heralded()) {
    HeraldedState h = apply_heralded(ch, rho);
    if (!h.state) {
      throw InvalidStateError("heralded channel '" + ch.label() +
                              "' has zero success probability on this input");
    }
    return std::move(*h.state);
  }
  return DensityMatrix(apply_kraus(ch, rho.matrix()));
}

KrausChannel compose(const KrausChannel& first, const KrausChannel& second) {
  if (first.out_dim() != second.in_dim()) {
    throw DimensionError("cannot compose '" + first.label() + "' (out " +
                         std::to_string(first.out_dim()) + ") with '" + second.label() + "' (in " +
                         std::to_string(second.in_dim()) + ")");
  }
  std::vector<ComplexMatrix> ops;
  ops.reserve(first.operators().size() * second.operators().size());
  for (const auto& b : second.operators()) {
    for (const auto& a : first.operators()) {
      ops.push_back(b * a);
    }
  }
  const bool heralded = first.heralded() || second.heralded();
  return KrausChannel(prune(std::move(ops)), first.label() + ";" + second.label(),
                      heralded ? KrausChannel::Kind::kHeralded
                               : KrausChannel::Kind::kTracePreserving);
}

KrausChannel lift(const KrausChannel& ch, std::span<const std::size_t> dims, std::size_t target) {
  if (ch.in_dim() != ch.out_dim()) {
    throw DimensionError("only dimension-preserving channels can be lifted");
  }
  std::vector<ComplexMatrix> ops;
  ops.reserve(ch.operators().size());
  for (const auto& k : ch.operators()) {
    ops.push_back(embed(k, dims, target));
  }
  return KrausChannel::unchecked(std::move(ops), ch.label() + "@" + std::to_string(target),
                                 ch.kind());
}

DensityMatrix apply_local(const KrausChannel& ch, const DensityMatrix& rho,
                          std::span<const std::size_t> dims, std::size_t target) {
  return apply_channel(lift(ch, dims, target), rho);
}

KrausChannel identity_channel(std::size_t dim) {
  return KrausChannel({ComplexMatrix::identity(dim)}, "identity");
}

KrausChannel pauli_channel(const std::array<double, 4>& probabilities, std::string label) {
  double total = 0.0;
  for (double p : probabilities) {
    check_probability(p, "Pauli probability");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw ParameterError("Pauli channel probabilities must sum to 1");
  }
  const std::array<ComplexMatrix, 4> paulis{pauli::I(), pauli::X(), pauli::Y(), pauli::Z()};
  std::vector<ComplexMatrix> ops;
  for (std::size_t i = 0; i < 4; ++i) {
    ops.push_back(paulis[i] * std::sqrt(probabilities[i]));
  }
  return KrausChannel(prune(std::move(ops)), std::move(label));
}

KrausChannel depolarizing_channel(double p) {
  check_probability(p, "depolarizing probability");
  const double q = p / 4.0;
  return pauli_channel({1.0 - 3.0 * q, q, q, q}, "depolarize");
}

KrausChannel dephasing_channel(double p) {
  check_probability(p, "dephasing probability");
  return pauli_channel({1.0 - p, 0.0, 0.0, p}, "dephase");
}

double sop_rotation_angle(double omega_rad_per_s, double delta_t_s) {
  return omega_rad_per_s * delta_t_s;
}

double sop_averaged_fidelity(double theta) {
  const double c = std::cos(theta / 2.0);
  return c * c;
}

KrausChannel sop_rotation_channel(double omega_rad_per_s, double delta_t_s, const SopMode& mode) {
  if (!(omega_rad_per_s >= 0.0) || !(delta_t_s >= 0.0) || !std::isfinite(omega_rad_per_s) ||
      !std::isfinite(delta_t_s)) {
    throw ParameterError("SOP drift rate and exposure time must be finite and non-negative");
  }
  const double theta = sop_rotation_angle(omega_rad_per_s, delta_t_s);
  const double c = std::cos(theta / 2.0);
  const double s = std::sin(theta / 2.0);

  if (const auto* sampled = std::get_if<SopSampled>(&mode)) {
    const auto& a = sampled->axis;
    const double norm = std::sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2]);
    if (!(norm > 0.0)) {
      if (theta == 0.0) {
        return KrausChannel({pauli::I()}, "sop");
      }
      throw ParameterError("SOP rotation axis must be non-zero");
    }
    const Complex mi(0.0, -s / norm);
    ComplexMatrix u = pauli::I() * c;
    u += pauli::X() * (mi * a[0]);
    u += pauli::Y() * (mi * a[1]);
    u += pauli::Z() * (mi * a[2]);
    return KrausChannel({u}, "sop");
  }
  const double err = s * s / 3.0;
  return pauli_channel({c * c, err, err, err}, "sop_avg");
}

KrausChannel loss_channel(double eta) {
  check_probability(eta, "transmittance");
  const double survive = std::sqrt(eta);
  const double lost = std::sqrt(1.0 - eta);
  ComplexMatrix keep(kRailDim, kRailDim);
  keep(kRailVacuum, kRailVacuum) = 1.0;
  keep(1, 1) = survive;
  keep(2, 2) = survive;
  ComplexMatrix lose0(kRailDim, kRailDim);
  lose0(kRailVacuum, 1) = lost;
  ComplexMatrix lose1(kRailDim, kRailDim);
  lose1(kRailVacuum, 2) = lost;
  return KrausChannel(prune({keep, lose0, lose1}), "loss");
}

KrausChannel to_rail(const KrausChannel& qubit_channel) {
  if (qubit_channel.in_dim() != 2 || qubit_channel.out_dim() != 2) {
    throw DimensionError("to_rail expects a qubit channel");
  }
  std::vector<ComplexMatrix> ops;
  bool first = true;
  for (const auto& k : qubit_channel.operators()) {
    ComplexMatrix r(kRailDim, kRailDim);
    // Vacuum passes through on the first operator only, which keeps
    // sum K^dagger K block diagonal with a unit vacuum entry.
    if (first) {
      r(kRailVacuum, kRailVacuum) = 1.0;
      first = false;
    }
    for (std::size_t i = 0; i < 2; ++i) {
      for (std::size_t j = 0; j < 2; ++j) {
        r(i + 1, j + 1) = k(i, j);
      }
    }
    ops.push_back(std::move(r));
  }
  return KrausChannel(std::move(ops), qubit_channel.label(), qubit_channel.kind());
}

KrausChannel herald_photon(const KrausChannel& rail_channel) {
  if (rail_channel.in_dim() != kRailDim || rail_channel.out_dim() != kRailDim) {
    throw DimensionError("herald_photon expects a rail-space channel");
  }
  std::vector<ComplexMatrix> ops;
  for (const auto& k : rail_channel.operators()) {
    ComplexMatrix q(2, 2);
    for (std::size_t i = 0; i < 2; ++i) {
      for (std::size_t j = 0; j < 2; ++j) {
        q(i, j) = k(i + 1, j + 1);
      }
    }
    ops.push_back(std::move(q));
  }
  return KrausChannel(prune(std::move(ops)), rail_channel.label() + "|click",
                      KrausChannel::Kind::kHeralded);
}

DensityMatrix qubit_to_rail(const DensityMatrix& qubit) {
  if (qubit.dim() != 2) {
    throw DimensionError("qubit_to_rail expects a qubit state");
  }
  ComplexMatrix r(kRailDim, kRailDim);
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < 2; ++j) {
      r(i + 1, j + 1) = qubit(i, j);
    }
  }
  return DensityMatrix(std::move(r));
}

}  // namespace qors

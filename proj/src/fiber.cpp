#include "qors/fiber.hpp"

#include <cctype>
#include <cmath>
#include <sstream>

namespace qors {

namespace {

void require(bool ok, const std::string& message) {
  if (!ok) {
    throw ParameterError(message);
  }
}

bool in_unit_interval(double v) { return v >= 0.0 && v <= 1.0; }

}  // namespace

std::string_view band_name(Band band) {
  switch (band) {
    case Band::kO:
      return "O";
    case Band::kC:
      return "C";
    case Band::kL:
      return "L";
  }
  return "?";
}

double band_center_nm(Band band) {
  switch (band) {
    case Band::kO:
      return 1310.0;
    case Band::kC:
      return 1550.0;
    case Band::kL:
      return 1590.0;
  }
  return 0.0;
}

std::optional<Band> parse_band(std::string_view name) {
  if (name.size() != 1) {
    return std::nullopt;
  }
  switch (std::toupper(static_cast<unsigned char>(name.front()))) {
    case 'O':
      return Band::kO;
    case 'C':
      return Band::kC;
    case 'L':
      return Band::kL;
    default:
      return std::nullopt;
  }
}

void FiberSpec::validate() const {
  require(!type_name.empty(), "fiber type name must not be empty");
  require(!attenuation_db_per_km.empty(), "fiber '" + type_name + "' lists no bands");
  for (const auto& [band, att] : attenuation_db_per_km) {
    std::ostringstream os;
    os << "fiber '" << type_name << "' attenuation in " << band_name(band)
       << " band must be positive, got " << att;
    require(att > 0.0 && std::isfinite(att), os.str());
  }
  require(group_index >= 1.0 && std::isfinite(group_index),
          "fiber '" + type_name + "' group index must be >= 1");
}

double FiberSpec::attenuation(Band band) const {
  const auto it = attenuation_db_per_km.find(band);
  if (it == attenuation_db_per_km.end()) {
    throw ParameterError("fiber '" + type_name + "' has no attenuation for " +
                         std::string(band_name(band)) + " band");
  }
  return it->second;
}

FiberSpec ndsf_fiber() {
  return FiberSpec{"NDSF", {{Band::kO, 0.35}, {Band::kC, 0.20}, {Band::kL, 0.22}}, 1.468};
}

void FiberSpan::validate() const {
  fiber.validate();
  fiber.attenuation(quantum_band);
  require(length_km >= 0.0 && std::isfinite(length_km), "span length must be >= 0");
  require(sop_drift_rate_rad_s >= 0.0 && std::isfinite(sop_drift_rate_rad_s),
          "SOP drift rate must be >= 0");
  require(sop_recalibration_interval_s >= 0.0 && std::isfinite(sop_recalibration_interval_s),
          "SOP recalibration interval must be >= 0");
  require(in_unit_interval(dephasing_p), "dephasing probability must lie in [0, 1]");
  require(in_unit_interval(coexistence_noise_prob),
          "coexistence noise probability must lie in [0, 1]");
  require(mux_insertion_loss_db >= 0.0 && std::isfinite(mux_insertion_loss_db),
          "mux insertion loss must be >= 0 dB");
}

double span_loss_db(const FiberSpan& span) {
  return span.fiber.attenuation(span.quantum_band) * span.length_km + span.mux_insertion_loss_db;
}

double transmittance(const FiberSpan& span) {
  span.validate();
  return std::pow(10.0, -span_loss_db(span) / 10.0);
}

double photon_dwell_time(const FiberSpan& span) {
  span.validate();
  return span.length_km * 1e3 / (kSpeedOfLight / span.fiber.group_index);
}

SpanChannel span_channel_stack(const FiberSpan& span) {
  const double eta = transmittance(span);
  const double theta =
      sop_rotation_angle(span.sop_drift_rate_rad_s, span.sop_recalibration_interval_s);
  const KrausChannel qubit_noise =
      compose(sop_rotation_channel(span.sop_drift_rate_rad_s, span.sop_recalibration_interval_s,
                                   SopAveraged{}),
              dephasing_channel(span.dephasing_p));
  KrausChannel rail = compose(loss_channel(eta), to_rail(qubit_noise));
  KrausChannel heralded = herald_photon(rail);
  return {std::move(rail), std::move(heralded), eta, span.coexistence_noise_prob, theta};
}

}  // namespace qors

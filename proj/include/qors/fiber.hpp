#pragma once

// Physical-layer description of fiber spans and the per-span channel stack.

#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "qors/channel.hpp"

namespace qors {

inline constexpr double kSpeedOfLight = 2.99792458e8;  // m/s

enum class Band { kO, kC, kL };

std::string_view band_name(Band band);
// Center wavelength in nm.
double band_center_nm(Band band);
// Accepts "O", "C", "L" (case-insensitive).
std::optional<Band> parse_band(std::string_view name);

struct FiberSpec {
  std::string type_name;
  std::map<Band, double> attenuation_db_per_km;
  double group_index = 1.468;

  // Throws ParameterError when an attenuation is not positive or the index is < 1.
  void validate() const;
  // Throws ParameterError if the band is missing.
  double attenuation(Band band) const;
};

// NDSF with 0.35 dB/km (O), 0.20 dB/km (C), 0.22 dB/km (L).
FiberSpec ndsf_fiber();

struct FiberSpan {
  double length_km = 0.0;
  FiberSpec fiber = ndsf_fiber();
  Band quantum_band = Band::kO;
  double sop_drift_rate_rad_s = 0.0;
  double sop_recalibration_interval_s = 0.0;
  double dephasing_p = 0.0;
  // Raman/FWM background photon probability per detection gate.
  double coexistence_noise_prob = 0.0;
  double mux_insertion_loss_db = 0.0;

  void validate() const;
};

double span_loss_db(const FiberSpan& span);

// 10^(-(attenuation * length + insertion loss) / 10)
double transmittance(const FiberSpan& span);

// One-way flight time of a photon through the span.
double photon_dwell_time(const FiberSpan& span);

struct SpanChannel {
  // loss o averaged SOP o dephasing on the rail space (trace preserving).
  KrausChannel rail;
  // The same stack post-selected on the photon arriving (qubit, heralded).
  KrausChannel heralded;
  double survival_probability;
  double noise_probability;
  double sop_angle_rad;
};

SpanChannel span_channel_stack(const FiberSpan& span);

}  // namespace qors

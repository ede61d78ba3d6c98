#pragma once

// Route ingestion, chain construction and report generation for the CLI.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "qors/feasibility.hpp"
#include "qors/fiber.hpp"
#include "qors/qkd.hpp"
#include "qors/repeater.hpp"

namespace qors {

inline constexpr int kRouteSchemaVersion = 1;
inline constexpr int kFiberSchemaVersion = 1;
inline constexpr int kReportSchemaVersion = 1;
inline constexpr std::string_view kToolVersion = "0.1.0";

// Tunable device and deployment parameters. A route's "defaults" object and
// --set flags override these by key.
struct PlanParameters {
  double mux_insertion_loss_db = 1.0;
  double coexistence_noise_prob = 1e-5;
  double sop_drift_rate_rad_s = 1e4;
  double sop_recalibration_interval_s = 1e-5;
  double dephasing_p = 0.01;
  double memory_coherence_time_s = 10.0;
  double memory_write_efficiency = 0.9;
  double memory_read_efficiency = 0.9;
  bool memory_cryogenic_required = false;
  double bsm_success_prob = 0.5;
  double bsm_visibility_penalty = 0.02;
  double detector_efficiency = 0.9;
  double endpoint_detector_efficiency = 0.9;
  double attempt_rate_hz = 1e6;
  // Unset means equal to the memory coherence time.
  std::optional<double> memory_cutoff_s;
  double max_heralding_distance_km = 100.0;
  double qec_loss_threshold_db = 3.0;
  // Replaces qec_loss_threshold_db with 10 log10(2) dB.
  bool qec_exact_half_loss = false;
  bool qec_cryogenic_required = false;

  static const std::vector<std::string>& keys();
  // Throws ParameterError for unknown keys, wrong types and out-of-range values.
  void set(std::string_view key, const nlohmann::json& value);
  // Parses "key=value" with a JSON value (bare numbers and true/false).
  void set_from_string(std::string_view assignment);

  double cutoff_s() const { return memory_cutoff_s.value_or(memory_coherence_time_s); }
  TechnologySpecs technology_specs() const;
  nlohmann::json to_json() const;
};

using FiberTable = std::map<std::string, FiberSpec>;

// NDSF only.
FiberTable default_fiber_table();
FiberTable parse_fiber_table(std::string_view text, const std::string& file);
FiberTable load_fiber_table(const std::string& path);
nlohmann::json fiber_table_to_json(const FiberTable& table);

enum class SiteKind { kEndpoint, kIla };

struct Site {
  std::string name;
  double position_km;
  SiteKind kind;
};

struct RouteConfig {
  std::string name;
  std::vector<Site> sites;
  std::string fiber_type;
  Band quantum_band = Band::kO;
  bool coexistence = true;
  // Built-in defaults with the route's overrides applied.
  PlanParameters parameters;
  // Parsed source document, used for the config hash.
  nlohmann::json source;
};

// Errors are ConfigError with the file name and line of the offending value.
RouteConfig parse_route(std::string_view text, const std::string& file, const FiberTable& fibers);
RouteConfig load_route(const std::string& path, const FiberTable& fibers);

// One span per consecutive site gap and one node per ILA site.
RepeaterChain build_chain(const RouteConfig& route, const FiberTable& fibers);

struct SpanRow {
  std::size_t index;
  double length_km;
  double loss_db;
  double transmittance;
  double fidelity;  // heralded span pair vs Phi+
  double sop_angle_rad;
};

std::vector<SpanRow> span_table(const RepeaterChain& chain);

struct Provenance {
  std::uint64_t seed = 0;
  std::uint64_t trials = 0;
  std::string config_hash;
  std::string version{kToolVersion};
};

struct Report {
  std::string route;
  Technology technology = Technology::kEntanglement;
  std::vector<SpanRow> spans;
  // Entanglement technology only.
  std::optional<EndToEndResult> end_to_end;
  std::optional<EndToEndResult> analytic;
  std::optional<QkdMetrics> qkd;
  FeasibilityVerdict verdict;
  Provenance provenance;
};

struct PlanOptions {
  std::vector<Technology> technologies{Technology::kEntanglement};
  std::uint64_t trials = 10000;
  std::uint64_t seed = 42;
  unsigned workers = 1;
};

// Hex SHA-256 over the canonical JSON of route, fiber table and effective
// parameters.
std::string config_hash(const RouteConfig& route, const FiberTable& fibers);

// QBER from the mean delivered state, sifted rate = sifting factor * pair rate.
QkdMetrics qkd_from_result(const EndToEndResult& result);

std::vector<Report> run_plan(const RouteConfig& route, const FiberTable& fibers,
                             const PlanOptions& options);

nlohmann::json result_to_json(const EndToEndResult& result);
nlohmann::json report_to_json(const Report& report);
// Per-span table with a technology column.
std::string reports_to_csv(const std::vector<Report>& reports);
std::string spans_to_csv(const std::vector<SpanRow>& rows);

// Shortest decimal text that round-trips to v.
std::string format_number(double v);

}  // namespace qors

#include "qors/feasibility.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "qors/errors.hpp"

namespace qors {

namespace {

std::string format_km(double km) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.1f km", km);
  return buf;
}

}  // namespace

OneWayRepeaterSpec OneWayRepeaterSpec::half_loss() {
  return {10.0 * std::log10(2.0), false};
}

double qec_max_span(double attenuation_db_per_km, const OneWayRepeaterSpec& spec,
                    double fixed_losses_db) {
  if (!(attenuation_db_per_km > 0.0) || !std::isfinite(attenuation_db_per_km)) {
    throw ParameterError("attenuation must be finite and > 0");
  }
  if (!(spec.loss_threshold_db > 0.0)) {
    throw ParameterError("loss threshold must be > 0");
  }
  if (!(fixed_losses_db >= 0.0)) {
    throw ParameterError("fixed losses must be >= 0");
  }
  if (fixed_losses_db >= spec.loss_threshold_db) {
    throw ParameterError("fixed losses use up the whole loss threshold; no span length remains");
  }
  return (spec.loss_threshold_db - fixed_losses_db) / attenuation_db_per_km;
}

std::string_view technology_name(Technology t) {
  return t == Technology::kEntanglement ? "entanglement" : "oneway";
}

std::optional<Technology> parse_technology(std::string_view name) {
  if (name == "entanglement") {
    return Technology::kEntanglement;
  }
  if (name == "oneway" || name == "one_way") {
    return Technology::kOneWay;
  }
  return std::nullopt;
}

std::string_view requirement_name(Requirement r) {
  switch (r) {
    case Requirement::kR1:
      return "R1";
    case Requirement::kR2:
      return "R2";
    case Requirement::kR3:
      return "R3";
    case Requirement::kR4:
      return "R4";
  }
  return "?";
}

FeasibilityVerdict assess_chain(const RepeaterChain& chain, Technology technology,
                                const TechnologySpecs& specs) {
  chain.validate();
  FeasibilityVerdict v;
  v.technology = technology;

  if (!chain.coexistence) {
    v.violations.push_back({Requirement::kR1, std::nullopt,
                            "quantum channel does not share the fiber with classical traffic"});
  }

  double max_span = 0.0;
  for (std::size_t i = 0; i < chain.spans.size(); ++i) {
    const FiberSpan& span = chain.spans[i];
    double limit = specs.max_heralding_distance_km;
    if (technology == Technology::kOneWay) {
      const double fixed = span.mux_insertion_loss_db;
      limit = fixed >= specs.one_way.loss_threshold_db
                  ? 0.0
                  : qec_max_span(span.fiber.attenuation(span.quantum_band), specs.one_way, fixed);
    }
    max_span = i == 0 ? limit : std::min(max_span, limit);
    if (span.length_km > limit) {
      v.violations.push_back(
          {Requirement::kR2, i,
           "span length " + format_km(span.length_km) + " exceeds maximum " + format_km(limit) +
               " for " + std::string(technology_name(technology)) + " in " +
               std::string(band_name(span.quantum_band)) + " band"});
    }
  }
  v.max_span_km = max_span;

  if (!chain.existing_sites_only) {
    v.violations.push_back(
        {Requirement::kR3, std::nullopt, "chain requires sites beyond the existing ILA huts"});
  }

  if (technology == Technology::kOneWay) {
    if (specs.one_way.cryogenic_required) {
      v.violations.push_back(
          {Requirement::kR4, std::nullopt, "one-way repeater requires cryogenic cooling"});
    }
  } else {
    for (std::size_t j = 0; j < chain.nodes.size(); ++j) {
      if (chain.nodes[j].memory.cryogenic_required) {
        v.violations.push_back({Requirement::kR4, std::nullopt,
                                "memory at node " + std::to_string(j + 1) +
                                    " requires cryogenic cooling"});
      }
    }
  }

  std::stable_sort(v.violations.begin(), v.violations.end(),
                   [](const Violation& a, const Violation& b) {
                     return a.requirement < b.requirement;
                   });
  v.feasible = v.violations.empty();
  return v;
}

}  // namespace qors

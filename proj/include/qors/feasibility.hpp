#pragma once

// Deployment feasibility of repeater technologies on a planned chain.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qors/repeater.hpp"

namespace qors {

struct OneWayRepeaterSpec {
  double loss_threshold_db = 3.0;
  bool cryogenic_required = false;

  // Threshold at exactly 50% loss, 10 log10(2) dB.
  static OneWayRepeaterSpec half_loss();
};

// Span length at which fiber loss plus fixed losses reach the threshold.
// Throws ParameterError if fixed losses already use up the threshold.
double qec_max_span(double attenuation_db_per_km, const OneWayRepeaterSpec& spec,
                    double fixed_losses_db);

enum class Technology { kEntanglement, kOneWay };
std::string_view technology_name(Technology t);
std::optional<Technology> parse_technology(std::string_view name);

// R1 coexistence on shared fiber, R2 span coverage, R3 existing sites only,
// R4 no cryogenics.
enum class Requirement { kR1, kR2, kR3, kR4 };
std::string_view requirement_name(Requirement r);

struct Violation {
  Requirement requirement;
  std::optional<std::size_t> span_index;
  std::string detail;
};

struct FeasibilityVerdict {
  Technology technology;
  bool feasible = true;
  std::vector<Violation> violations;
  // Largest span length the technology can cover on the chain's band.
  double max_span_km = 0.0;
};

struct TechnologySpecs {
  OneWayRepeaterSpec one_way;
  double max_heralding_distance_km = 100.0;
};

FeasibilityVerdict assess_chain(const RepeaterChain& chain, Technology technology,
                                const TechnologySpecs& specs = {});

}  // namespace qors

#include "qors/planner.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <variant>

#include "qors/errors.hpp"
#include "qors/json_locator.hpp"

namespace qors {

namespace {

using nlohmann::json;

enum class Range { kNonNegative, kPositive, kUnit };

struct ParamInfo {
  std::string_view key;
  std::variant<double PlanParameters::*, bool PlanParameters::*,
               std::optional<double> PlanParameters::*>
      member;
  Range range;
};

const std::vector<ParamInfo>& param_table() {
  using P = PlanParameters;
  static const std::vector<ParamInfo> table{
      {"mux_insertion_loss_db", &P::mux_insertion_loss_db, Range::kNonNegative},
      {"coexistence_noise_prob", &P::coexistence_noise_prob, Range::kUnit},
      {"sop_drift_rate_rad_s", &P::sop_drift_rate_rad_s, Range::kNonNegative},
      {"sop_recalibration_interval_s", &P::sop_recalibration_interval_s, Range::kNonNegative},
      {"dephasing_p", &P::dephasing_p, Range::kUnit},
      {"memory_coherence_time_s", &P::memory_coherence_time_s, Range::kPositive},
      {"memory_write_efficiency", &P::memory_write_efficiency, Range::kUnit},
      {"memory_read_efficiency", &P::memory_read_efficiency, Range::kUnit},
      {"memory_cryogenic_required", &P::memory_cryogenic_required, Range::kUnit},
      {"bsm_success_prob", &P::bsm_success_prob, Range::kUnit},
      {"bsm_visibility_penalty", &P::bsm_visibility_penalty, Range::kUnit},
      {"detector_efficiency", &P::detector_efficiency, Range::kUnit},
      {"endpoint_detector_efficiency", &P::endpoint_detector_efficiency, Range::kUnit},
      {"attempt_rate_hz", &P::attempt_rate_hz, Range::kPositive},
      {"memory_cutoff_s", &P::memory_cutoff_s, Range::kPositive},
      {"max_heralding_distance_km", &P::max_heralding_distance_km, Range::kPositive},
      {"qec_loss_threshold_db", &P::qec_loss_threshold_db, Range::kPositive},
      {"qec_exact_half_loss", &P::qec_exact_half_loss, Range::kUnit},
      {"qec_cryogenic_required", &P::qec_cryogenic_required, Range::kUnit},
  };
  return table;
}

double checked_number(std::string_view key, const json& value, Range range) {
  if (!value.is_number()) {
    throw ParameterError("parameter '" + std::string(key) + "' must be a number");
  }
  const double v = value.get<double>();
  bool ok = std::isfinite(v);
  switch (range) {
    case Range::kNonNegative:
      ok = ok && v >= 0.0;
      break;
    case Range::kPositive:
      ok = ok && v > 0.0;
      break;
    case Range::kUnit:
      ok = ok && v >= 0.0 && v <= 1.0;
      break;
  }
  if (!ok) {
    static constexpr const char* kExpect[] = {">= 0", "> 0", "in [0, 1]"};
    std::ostringstream os;
    os << "parameter '" << key << "' must be " << kExpect[static_cast<int>(range)] << ", got "
       << value.dump();
    throw ParameterError(os.str());
  }
  return v;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ConfigError(path, 0, "cannot open file");
  }
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::string type_name(const json& v) { return v.type_name(); }

// Schema checks against a located document.
class Checker {
 public:
  Checker(const LocatedJson& doc, const std::string& file) : doc_(doc), file_(file) {}

  [[noreturn]] void fail(const std::string& pointer, const std::string& message) const {
    throw ConfigError(file_, doc_.line_of(pointer), message);
  }

  const json& object(const json& v, const std::string& pointer, std::string_view what) const {
    if (!v.is_object()) {
      fail(pointer, std::string(what) + " must be an object, got " + type_name(v));
    }
    return v;
  }

  void only_keys(const json& obj, const std::string& pointer,
                 std::initializer_list<std::string_view> allowed) const {
    for (const auto& [k, _] : obj.items()) {
      if (std::find(allowed.begin(), allowed.end(), k) == allowed.end()) {
        fail(pointer_child(pointer, k), "unknown key '" + k + "'");
      }
    }
  }

  const json& member(const json& obj, const std::string& pointer, std::string_view key) const {
    const auto it = obj.find(std::string(key));
    if (it == obj.end()) {
      fail(pointer, "missing required key '" + std::string(key) + "'");
    }
    return *it;
  }

  std::string string(const json& obj, const std::string& pointer, std::string_view key) const {
    const json& v = member(obj, pointer, key);
    if (!v.is_string() || v.get_ref<const std::string&>().empty()) {
      fail(pointer_child(pointer, key),
           "'" + std::string(key) + "' must be a non-empty string");
    }
    return v.get<std::string>();
  }

  double number(const json& obj, const std::string& pointer, std::string_view key) const {
    const json& v = member(obj, pointer, key);
    if (!v.is_number() || !std::isfinite(v.get<double>())) {
      fail(pointer_child(pointer, key), "'" + std::string(key) + "' must be a finite number");
    }
    return v.get<double>();
  }

  void schema_version(const json& root, int expected) const {
    const json& v = member(root, "", "schema_version");
    if (!v.is_number_integer() || v.get<long long>() != expected) {
      fail("/schema_version", "unsupported schema_version " + v.dump() + ", expected " +
                                  std::to_string(expected));
    }
  }

 private:
  const LocatedJson& doc_;
  const std::string& file_;
};

void require_finite(const json& v, const std::string& where) {
  if (v.is_number_float() && !std::isfinite(v.get<double>())) {
    throw std::runtime_error("report field " + where + " is not finite");
  }
  if (v.is_object()) {
    for (const auto& [k, child] : v.items()) {
      require_finite(child, where + "/" + k);
    }
  } else if (v.is_array()) {
    for (std::size_t i = 0; i < v.size(); ++i) {
      require_finite(v[i], where + "/" + std::to_string(i));
    }
  }
}

}  // namespace

std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

const std::vector<std::string>& PlanParameters::keys() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& p : param_table()) {
      out.emplace_back(p.key);
    }
    return out;
  }();
  return names;
}

void PlanParameters::set(std::string_view key, const json& value) {
  const auto& table = param_table();
  const auto it = std::find_if(table.begin(), table.end(),
                               [&](const ParamInfo& p) { return p.key == key; });
  if (it == table.end()) {
    throw ParameterError("unknown parameter '" + std::string(key) + "'");
  }
  std::visit(
      [&](auto member) {
        using M = std::remove_reference_t<decltype(this->*member)>;
        if constexpr (std::is_same_v<M, bool>) {
          if (!value.is_boolean()) {
            throw ParameterError("parameter '" + std::string(key) + "' must be true or false");
          }
          this->*member = value.get<bool>();
        } else {
          this->*member = checked_number(key, value, it->range);
        }
      },
      it->member);
}

void PlanParameters::set_from_string(std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0) {
    throw ParameterError("expected key=value, got '" + std::string(assignment) + "'");
  }
  const std::string_view key = assignment.substr(0, eq);
  const std::string text(assignment.substr(eq + 1));
  json value = json::parse(text, nullptr, false);
  if (value.is_discarded()) {
    throw ParameterError("value for '" + std::string(key) + "' is not a number or boolean: '" +
                         text + "'");
  }
  set(key, value);
}

TechnologySpecs PlanParameters::technology_specs() const {
  TechnologySpecs specs;
  specs.one_way = qec_exact_half_loss ? OneWayRepeaterSpec::half_loss()
                                      : OneWayRepeaterSpec{qec_loss_threshold_db, false};
  specs.one_way.cryogenic_required = qec_cryogenic_required;
  specs.max_heralding_distance_km = max_heralding_distance_km;
  return specs;
}

json PlanParameters::to_json() const {
  json out = json::object();
  for (const auto& p : param_table()) {
    std::visit(
        [&](auto member) {
          using M = std::remove_cvref_t<decltype(this->*member)>;
          if constexpr (std::is_same_v<M, std::optional<double>>) {
            out[std::string(p.key)] = (this->*member).value_or(memory_coherence_time_s);
          } else {
            out[std::string(p.key)] = this->*member;
          }
        },
        p.member);
  }
  return out;
}

FiberTable default_fiber_table() {
  FiberSpec ndsf = ndsf_fiber();
  return {{ndsf.type_name, ndsf}};
}

FiberTable parse_fiber_table(std::string_view text, const std::string& file) {
  const LocatedJson doc = parse_located(text, file);
  const Checker check(doc, file);
  const json& root = check.object(doc.value, "", "fiber table");
  check.only_keys(root, "", {"schema_version", "fibers"});
  check.schema_version(root, kFiberSchemaVersion);
  const json& fibers = check.member(root, "", "fibers");
  if (!fibers.is_array() || fibers.empty()) {
    check.fail("/fibers", "'fibers' must be a non-empty array");
  }
  FiberTable table;
  for (std::size_t i = 0; i < fibers.size(); ++i) {
    const std::string ptr = pointer_child("/fibers", i);
    const json& f = check.object(fibers[i], ptr, "fiber entry");
    check.only_keys(f, ptr, {"name", "attenuation_db_per_km", "group_index"});
    FiberSpec spec;
    spec.type_name = check.string(f, ptr, "name");
    if (table.count(spec.type_name) != 0) {
      check.fail(pointer_child(ptr, "name"), "duplicate fiber type '" + spec.type_name + "'");
    }
    const std::string att_ptr = pointer_child(ptr, "attenuation_db_per_km");
    const json& att = check.object(check.member(f, ptr, "attenuation_db_per_km"), att_ptr,
                                   "'attenuation_db_per_km'");
    for (const auto& [band_text, _] : att.items()) {
      const auto band = parse_band(band_text);
      if (!band) {
        check.fail(pointer_child(att_ptr, band_text),
                   "unknown band '" + band_text + "', expected O, C or L");
      }
      spec.attenuation_db_per_km[*band] = check.number(att, att_ptr, band_text);
    }
    if (f.contains("group_index")) {
      spec.group_index = check.number(f, ptr, "group_index");
    }
    try {
      spec.validate();
    } catch (const ParameterError& e) {
      check.fail(ptr, e.what());
    }
    table.emplace(spec.type_name, std::move(spec));
  }
  return table;
}

FiberTable load_fiber_table(const std::string& path) {
  return parse_fiber_table(read_file(path), path);
}

json fiber_table_to_json(const FiberTable& table) {
  json fibers = json::array();
  for (const auto& [name, spec] : table) {
    json att = json::object();
    for (const auto& [band, value] : spec.attenuation_db_per_km) {
      att[std::string(band_name(band))] = value;
    }
    fibers.push_back({{"name", name}, {"attenuation_db_per_km", att},
                      {"group_index", spec.group_index}});
  }
  return {{"schema_version", kFiberSchemaVersion}, {"fibers", fibers}};
}

RouteConfig parse_route(std::string_view text, const std::string& file,
                        const FiberTable& fibers) {
  const LocatedJson doc = parse_located(text, file);
  const Checker check(doc, file);
  const json& root = check.object(doc.value, "", "route");
  check.only_keys(root, "", {"schema_version", "name", "fiber_type", "quantum_band",
                             "coexistence", "sites", "defaults"});
  check.schema_version(root, kRouteSchemaVersion);

  RouteConfig route;
  route.source = root;
  route.name = check.string(root, "", "name");

  route.fiber_type = check.string(root, "", "fiber_type");
  const auto fiber = fibers.find(route.fiber_type);
  if (fiber == fibers.end()) {
    std::string known;
    for (const auto& [name, _] : fibers) {
      known += (known.empty() ? "" : ", ") + name;
    }
    check.fail("/fiber_type",
               "unknown fiber type '" + route.fiber_type + "' (known: " + known + ")");
  }

  const std::string band_text = check.string(root, "", "quantum_band");
  const auto band = parse_band(band_text);
  if (!band) {
    check.fail("/quantum_band", "unknown band '" + band_text + "', expected O, C or L");
  }
  if (fiber->second.attenuation_db_per_km.count(*band) == 0) {
    check.fail("/quantum_band", "fiber type '" + route.fiber_type + "' has no attenuation for " +
                                    band_text + " band");
  }
  route.quantum_band = *band;

  if (root.contains("coexistence")) {
    const json& v = root.at("coexistence");
    if (!v.is_boolean()) {
      check.fail("/coexistence", "'coexistence' must be true or false");
    }
    route.coexistence = v.get<bool>();
  }

  const json& sites = check.member(root, "", "sites");
  if (!sites.is_array() || sites.size() < 2) {
    check.fail("/sites", "'sites' must be an array of at least two sites");
  }
  std::set<std::string> names;
  for (std::size_t i = 0; i < sites.size(); ++i) {
    const std::string ptr = pointer_child("/sites", i);
    const json& s = check.object(sites[i], ptr, "site");
    check.only_keys(s, ptr, {"name", "position_km", "kind"});
    Site site;
    site.name = check.string(s, ptr, "name");
    if (!names.insert(site.name).second) {
      check.fail(pointer_child(ptr, "name"), "duplicate site name '" + site.name + "'");
    }
    site.position_km = check.number(s, ptr, "position_km");
    if (site.position_km < 0.0) {
      check.fail(pointer_child(ptr, "position_km"), "site position must be >= 0 km");
    }
    if (!route.sites.empty() && site.position_km <= route.sites.back().position_km) {
      check.fail(pointer_child(ptr, "position_km"),
                 "site positions must be strictly increasing: '" + site.name + "' at " +
                     format_number(site.position_km) + " km follows '" + route.sites.back().name +
                     "' at " + format_number(route.sites.back().position_km) + " km");
    }
    const std::string kind = check.string(s, ptr, "kind");
    if (kind == "endpoint") {
      site.kind = SiteKind::kEndpoint;
    } else if (kind == "ila") {
      site.kind = SiteKind::kIla;
    } else {
      check.fail(pointer_child(ptr, "kind"),
                 "unknown site kind '" + kind + "', expected endpoint or ila");
    }
    const bool end = i == 0 || i + 1 == sites.size();
    if (end && site.kind != SiteKind::kEndpoint) {
      check.fail(pointer_child(ptr, "kind"), "first and last sites must be endpoints");
    }
    if (!end && site.kind != SiteKind::kIla) {
      check.fail(pointer_child(ptr, "kind"), "interior sites must be ila");
    }
    route.sites.push_back(std::move(site));
  }

  if (root.contains("defaults")) {
    const json& defaults = check.object(root.at("defaults"), "/defaults", "'defaults'");
    for (const auto& [key, value] : defaults.items()) {
      try {
        route.parameters.set(key, value);
      } catch (const ParameterError& e) {
        check.fail(pointer_child("/defaults", key), e.what());
      }
    }
  }
  return route;
}

RouteConfig load_route(const std::string& path, const FiberTable& fibers) {
  return parse_route(read_file(path), path, fibers);
}

RepeaterChain build_chain(const RouteConfig& route, const FiberTable& fibers) {
  const auto fiber = fibers.find(route.fiber_type);
  if (fiber == fibers.end()) {
    throw ParameterError("fiber table has no entry for '" + route.fiber_type + "'");
  }
  if (route.sites.size() < 2) {
    throw ParameterError("route needs at least two sites");
  }
  const PlanParameters& p = route.parameters;
  RepeaterChain chain;
  for (std::size_t i = 0; i + 1 < route.sites.size(); ++i) {
    FiberSpan span;
    span.length_km = route.sites[i + 1].position_km - route.sites[i].position_km;
    span.fiber = fiber->second;
    span.quantum_band = route.quantum_band;
    span.sop_drift_rate_rad_s = p.sop_drift_rate_rad_s;
    span.sop_recalibration_interval_s = p.sop_recalibration_interval_s;
    span.dephasing_p = p.dephasing_p;
    span.coexistence_noise_prob = route.coexistence ? p.coexistence_noise_prob : 0.0;
    span.mux_insertion_loss_db = p.mux_insertion_loss_db;
    chain.spans.push_back(std::move(span));
  }
  for (std::size_t i = 1; i + 1 < route.sites.size(); ++i) {
    QorsNode node;
    node.memory = MemorySpec{p.memory_coherence_time_s, p.memory_write_efficiency,
                             p.memory_read_efficiency, p.memory_cryogenic_required};
    node.bsm_success_prob = p.bsm_success_prob;
    node.bsm_visibility_penalty = p.bsm_visibility_penalty;
    node.detector_efficiency = p.detector_efficiency;
    node.position_km = route.sites[i].position_km;
    chain.nodes.push_back(node);
  }
  chain.attempt_rate_hz = p.attempt_rate_hz;
  chain.memory_cutoff_s = p.cutoff_s();
  chain.endpoint_detector_efficiency = p.endpoint_detector_efficiency;
  chain.coexistence = route.coexistence;
  // Spans only ever join declared sites.
  chain.existing_sites_only = true;
  chain.validate();
  return chain;
}

std::vector<SpanRow> span_table(const RepeaterChain& chain) {
  std::vector<SpanRow> rows;
  for (std::size_t i = 0; i < chain.spans.size(); ++i) {
    const FiberSpan& s = chain.spans[i];
    const SpanAttempt attempt = chain_model::attempt_for_span(chain, i);
    rows.push_back({i, s.length_km, span_loss_db(s), transmittance(s),
                    fidelity(attempt.state, bell_ket(Bell::kPhiPlus)),
                    sop_rotation_angle(s.sop_drift_rate_rad_s, s.sop_recalibration_interval_s)});
  }
  return rows;
}

std::string config_hash(const RouteConfig& route, const FiberTable& fibers) {
  const json canonical{{"route", route.source},
                       {"fibers", fiber_table_to_json(fibers)},
                       {"parameters", route.parameters.to_json()}};
  const std::string text = canonical.dump();
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int size = 0;
  if (EVP_Digest(text.data(), text.size(), digest, &size, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  for (unsigned int i = 0; i < size; ++i) {
    hex += kHex[digest[i] >> 4];
    hex += kHex[digest[i] & 0xF];
  }
  return hex;
}

QkdMetrics qkd_from_result(const EndToEndResult& result) {
  if (!result.mean_state || !(result.pair_rate_hz > 0.0)) {
    return bbm92_key_rate(0.5, 0.0);
  }
  // Background is already part of the delivered state.
  const double q = std::min(0.5, qber_from_state(*result.mean_state, 0.0, 1.0));
  return bbm92_key_rate(q, kBbm92SiftingFactor * result.pair_rate_hz);
}

std::vector<Report> run_plan(const RouteConfig& route, const FiberTable& fibers,
                             const PlanOptions& options) {
  const RepeaterChain chain = build_chain(route, fibers);
  const std::vector<SpanRow> rows = span_table(chain);
  const std::string hash = config_hash(route, fibers);
  const TechnologySpecs specs = route.parameters.technology_specs();

  std::vector<Report> reports;
  for (Technology tech : options.technologies) {
    Report r;
    r.route = route.name;
    r.technology = tech;
    r.spans = rows;
    r.verdict = assess_chain(chain, tech, specs);
    r.provenance.seed = options.seed;
    r.provenance.config_hash = hash;
    if (tech == Technology::kEntanglement) {
      r.provenance.trials = options.trials;
      r.end_to_end = simulate_chain_mc(chain, options.trials, options.seed, options.workers);
      try {
        r.analytic = simulate_chain_analytic(chain);
      } catch (const ParameterError&) {
        r.analytic.reset();
      }
      r.qkd = qkd_from_result(*r.end_to_end);
    }
    reports.push_back(std::move(r));
  }
  return reports;
}

json result_to_json(const EndToEndResult& r) {
  return {{"fidelity", r.werner_fidelity},
          {"pair_rate_hz", r.pair_rate_hz},
          {"latency_s", r.mean_latency_s},
          {"success_probability", r.success_probability},
          {"fidelity_stderr", r.fidelity_stderr},
          {"pair_rate_stderr_hz", r.rate_stderr},
          {"latency_stderr_s", r.latency_stderr},
          {"trials", r.trials},
          {"successes", r.successes}};
}

json report_to_json(const Report& r) {
  json spans = json::array();
  for (const auto& s : r.spans) {
    spans.push_back({{"index", s.index},
                     {"length_km", s.length_km},
                     {"loss_db", s.loss_db},
                     {"transmittance", s.transmittance},
                     {"fidelity", s.fidelity},
                     {"sop_angle_rad", s.sop_angle_rad}});
  }

  json end_to_end = nullptr;
  if (r.end_to_end) {
    end_to_end = result_to_json(*r.end_to_end);
    end_to_end["analytic"] = nullptr;
    if (r.analytic) {
      end_to_end["analytic"] = {{"fidelity", r.analytic->werner_fidelity},
                                {"pair_rate_hz", r.analytic->pair_rate_hz},
                                {"latency_s", r.analytic->mean_latency_s},
                                {"success_probability", r.analytic->success_probability}};
    }
  }

  json qkd = nullptr;
  if (r.qkd) {
    qkd = {{"qber", r.qkd->qber},
           {"sifted_rate_hz", r.qkd->sifted_rate_hz},
           {"secret_key_rate_hz", r.qkd->secret_key_rate_hz},
           {"secret_fraction", r.qkd->secret_fraction},
           {"secure", r.qkd->secure}};
  }

  json violations = json::array();
  for (const auto& v : r.verdict.violations) {
    json span_index = nullptr;
    if (v.span_index) {
      span_index = *v.span_index;
    }
    violations.push_back({{"requirement", std::string(requirement_name(v.requirement))},
                          {"span_index", span_index},
                          {"detail", v.detail}});
  }

  json out{{"schema_version", kReportSchemaVersion},
           {"route", r.route},
           {"technology", std::string(technology_name(r.technology))},
           {"spans", spans},
           {"end_to_end", end_to_end},
           {"qkd", qkd},
           {"verdict",
            {{"feasible", r.verdict.feasible},
             {"max_span_km", r.verdict.max_span_km},
             {"violations", violations}}},
           {"provenance",
            {{"seed", r.provenance.seed},
             {"trials", r.provenance.trials},
             {"config_hash", r.provenance.config_hash},
             {"version", r.provenance.version}}}};
  require_finite(out, "");
  return out;
}

std::string spans_to_csv(const std::vector<SpanRow>& rows) {
  std::string out = "index,length_km,loss_db,transmittance,fidelity,sop_angle_rad\n";
  for (const auto& s : rows) {
    out += std::to_string(s.index) + "," + format_number(s.length_km) + "," +
           format_number(s.loss_db) + "," + format_number(s.transmittance) + "," +
           format_number(s.fidelity) + "," + format_number(s.sop_angle_rad) + "\n";
  }
  return out;
}

std::string reports_to_csv(const std::vector<Report>& reports) {
  std::string out = "technology,index,length_km,loss_db,transmittance,fidelity,sop_angle_rad\n";
  for (const auto& r : reports) {
    const std::string tech(technology_name(r.technology));
    const std::string table = spans_to_csv(r.spans);
    std::istringstream lines(table.substr(table.find('\n') + 1));
    for (std::string line; std::getline(lines, line);) {
      out += tech + "," + line + "\n";
    }
  }
  return out;
}

}  // namespace qors

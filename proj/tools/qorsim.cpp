// qorsim: plan and simulate quantum repeater chains over deployed fiber routes.

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qors/errors.hpp"
#include "qors/planner.hpp"

namespace {

using nlohmann::json;

struct CommonOptions {
  std::string route;
  std::string fibers;
  std::string out;
  std::string format = "json";
  std::vector<std::string> overrides;
};

void add_route_options(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--route", o.route, "Route configuration (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--set", o.overrides, "Override a route parameter, key=value");
}

void add_output_options(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--fibers", o.fibers, "Fiber table (JSON); defaults to the built-in NDSF entry")
      ->check(CLI::ExistingFile);
  cmd->add_option("--out", o.out, "Output file; defaults to standard output");
  cmd->add_option("--format", o.format, "Output format")
      ->check(CLI::IsMember({"json", "csv"}));
}

qors::FiberTable fiber_table(const CommonOptions& o) {
  return o.fibers.empty() ? qors::default_fiber_table() : qors::load_fiber_table(o.fibers);
}

qors::RouteConfig route_config(const CommonOptions& o, const qors::FiberTable& fibers) {
  qors::RouteConfig route = qors::load_route(o.route, fibers);
  for (const auto& assignment : o.overrides) {
    route.parameters.set_from_string(assignment);
  }
  return route;
}

void emit(const CommonOptions& o, const std::string& text) {
  if (o.out.empty()) {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream file(o.out, std::ios::binary);
  if (!file) {
    throw std::runtime_error("cannot write output file '" + o.out + "'");
  }
  file << text;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

int report_error(const std::string& kind, const std::string& message,
                 const qors::ConfigError* config = nullptr) {
  json err{{"kind", kind}, {"message", message}};
  if (config != nullptr) {
    err["message"] = config->detail();
    err["file"] = config->file();
    err["line"] = config->line();
  }
  std::cerr << json{{"error", err}}.dump() << "\n";
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qorsim: quantum repeater planning over deployed fiber routes"};
  app.set_version_flag("--version", std::string(qors::kToolVersion));
  app.require_subcommand(1);

  CommonOptions plan_opts;
  std::string tech = "entanglement";
  std::uint64_t trials = 10000;
  std::uint64_t seed = 42;
  unsigned workers = 1;

  auto* plan = app.add_subcommand("plan", "Feasibility verdicts and simulation report");
  add_route_options(plan, plan_opts);
  add_output_options(plan, plan_opts);
  plan->add_option("--tech", tech, "Technology to assess")
      ->check(CLI::IsMember({"entanglement", "oneway", "both"}));
  plan->add_option("--trials", trials, "Monte Carlo delivery rounds")->check(CLI::PositiveNumber);
  plan->add_option("--seed", seed, "Random seed");
  plan->add_option("--workers", workers, "Worker threads, 0 = one per core");

  CommonOptions sim_opts;
  auto* simulate = app.add_subcommand("simulate", "Chain Monte Carlo with analytic cross-check");
  add_route_options(simulate, sim_opts);
  add_output_options(simulate, sim_opts);
  simulate->add_option("--trials", trials, "Monte Carlo delivery rounds")
      ->check(CLI::PositiveNumber);
  simulate->add_option("--seed", seed, "Random seed");
  simulate->add_option("--workers", workers, "Worker threads, 0 = one per core");

  CommonOptions chan_opts;
  auto* channel = app.add_subcommand("channel", "Per-span transmittance and fidelity");
  add_route_options(channel, chan_opts);
  add_output_options(channel, chan_opts);

  CommonOptions fiber_opts;
  auto* fibers = app.add_subcommand("fibers", "List the fiber table");
  add_output_options(fibers, fiber_opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (plan->parsed()) {
      const qors::FiberTable table = fiber_table(plan_opts);
      const qors::RouteConfig route = route_config(plan_opts, table);
      qors::PlanOptions options;
      options.trials = trials;
      options.seed = seed;
      options.workers = workers;
      if (tech == "both") {
        options.technologies = {qors::Technology::kEntanglement, qors::Technology::kOneWay};
      } else {
        options.technologies = {*qors::parse_technology(tech)};
      }
      const auto reports = qors::run_plan(route, table, options);
      if (plan_opts.format == "csv") {
        emit(plan_opts, qors::reports_to_csv(reports));
      } else if (reports.size() == 1) {
        emit(plan_opts, dump(qors::report_to_json(reports.front())));
      } else {
        json all = json::array();
        for (const auto& r : reports) {
          all.push_back(qors::report_to_json(r));
        }
        emit(plan_opts, dump(all));
      }
    } else if (simulate->parsed()) {
      const qors::FiberTable table = fiber_table(sim_opts);
      const qors::RouteConfig route = route_config(sim_opts, table);
      const qors::RepeaterChain chain = qors::build_chain(route, table);
      const auto mc = qors::simulate_chain_mc(chain, trials, seed, workers);
      std::optional<qors::EndToEndResult> analytic;
      try {
        analytic = qors::simulate_chain_analytic(chain);
      } catch (const qors::ParameterError&) {
      }
      if (sim_opts.format == "csv") {
        std::string csv = "model,fidelity,pair_rate_hz,latency_s,success_probability\n";
        auto row = [&](const char* model, const qors::EndToEndResult& r) {
          csv += std::string(model) + "," + qors::format_number(r.werner_fidelity) + "," +
                 qors::format_number(r.pair_rate_hz) + "," + qors::format_number(r.mean_latency_s) + "," +
                 qors::format_number(r.success_probability) + "\n";
        };
        row("monte_carlo", mc);
        if (analytic) {
          row("analytic", *analytic);
        }
        emit(sim_opts, csv);
      } else {
        json out{{"schema_version", qors::kReportSchemaVersion},
                 {"route", route.name},
                 {"monte_carlo", qors::result_to_json(mc)},
                 {"analytic", analytic ? qors::result_to_json(*analytic) : json(nullptr)},
                 {"provenance",
                  {{"seed", seed},
                   {"trials", trials},
                   {"config_hash", qors::config_hash(route, table)},
                   {"version", std::string(qors::kToolVersion)}}}};
        emit(sim_opts, dump(out));
      }
    } else if (channel->parsed()) {
      const qors::FiberTable table = fiber_table(chan_opts);
      const qors::RouteConfig route = route_config(chan_opts, table);
      const auto rows = qors::span_table(qors::build_chain(route, table));
      if (chan_opts.format == "csv") {
        emit(chan_opts, qors::spans_to_csv(rows));
      } else {
        json spans = json::array();
        for (const auto& s : rows) {
          spans.push_back({{"index", s.index},
                           {"length_km", s.length_km},
                           {"loss_db", s.loss_db},
                           {"transmittance", s.transmittance},
                           {"fidelity", s.fidelity},
                           {"sop_angle_rad", s.sop_angle_rad}});
        }
        emit(chan_opts, dump({{"schema_version", qors::kReportSchemaVersion},
                              {"route", route.name},
                              {"spans", spans}}));
      }
    } else if (fibers->parsed()) {
      const qors::FiberTable table = fiber_table(fiber_opts);
      if (fiber_opts.format == "csv") {
        std::string csv = "name,band,attenuation_db_per_km,group_index\n";
        for (const auto& [name, spec] : table) {
          for (const auto& [band, att] : spec.attenuation_db_per_km) {
            csv += name + "," + std::string(qors::band_name(band)) + "," + qors::format_number(att) +
                   "," + qors::format_number(spec.group_index) + "\n";
          }
        }
        emit(fiber_opts, csv);
      } else {
        emit(fiber_opts, dump(qors::fiber_table_to_json(table)));
      }
    }
  } catch (const qors::ConfigError& e) {
    return report_error("config", e.what(), &e);
  } catch (const std::invalid_argument& e) {
    return report_error("parameter", e.what());
  } catch (const std::exception& e) {
    return report_error("runtime", e.what());
  }
  return 0;
}

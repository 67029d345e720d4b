#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "obroute/demands.hpp"
#include "obroute/eval.hpp"
#include "obroute/generators.hpp"
#include "obroute/io.hpp"
#include "obroute/packet_sim.hpp"
#include "obroute/parallel.hpp"
#include "obroute/spectral.hpp"
#include "obroute/splittable.hpp"
#include "obroute/unsplittable.hpp"
#include "obroute/verify.hpp"

using namespace obroute;

namespace {

constexpr int kExitVerifyFailed = 1;
constexpr int kExitUsage = 2;

// Values taken from the command line; unset ones fall back to --config.
struct Flags {
  std::optional<std::string> config;
  std::optional<std::string> graph;
  std::optional<std::string> generate;
  std::optional<std::string> demands;
  std::optional<std::string> permutation;
  std::optional<std::string> trace;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::string> format;
  std::optional<unsigned> threads;
  std::optional<int> trials;
  std::optional<double> audit_constant;
  bool random = false;
  bool per_direction = false;
  std::string suite = "lemmas";
};

void add_common(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config, "Experiment config JSON");
  auto* graph = cmd->add_option("--graph", f.graph, "Edge list or graph JSON");
  auto* gen = cmd->add_option("--generate", f.generate, "Generator spec KIND:ARGS");
  graph->excludes(gen);
  cmd->add_option("--seed", f.seed, "Root seed (u64)");
  cmd->add_option("--out", f.out, "Output path (default stdout)");
  cmd->add_option("--format", f.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  cmd->add_option("--threads", f.threads, "Worker cap (default all cores)");
}

ExperimentConfig merge(const std::string& command, const Flags& f) {
  ExperimentConfig c;
  if (f.config) c = read_config_file(*f.config);
  if (!c.command.empty() && c.command != command) {
    throw InputError("config is for '" + c.command + "', not '" + command + "'");
  }
  c.command = command;
  if (f.graph) {
    c.graph_file = f.graph;
    c.generate.reset();
  }
  if (f.generate) {
    c.generate = f.generate;
    c.graph_file.reset();
  }
  if (f.demands) c.demands_file = f.demands;
  if (f.permutation) c.permutation_file = f.permutation;
  if (f.random) c.random_permutation = true;
  if (f.seed) c.seed = f.seed;
  if (f.out) c.out = f.out;
  if (f.format) c.format = *f.format == "csv" ? OutputFormat::Csv : OutputFormat::Json;
  if (f.threads) c.threads = *f.threads;
  if (f.trials) c.trials = *f.trials;
  if (f.audit_constant) c.audit_constant = *f.audit_constant;
  if (f.per_direction) c.per_direction = true;
  if (command == "verify") c.suite = f.suite;
  return c;
}

std::uint64_t require_seed(const ExperimentConfig& c) {
  if (!c.seed) throw InputError(c.command + " is randomized and needs --seed");
  return *c.seed;
}

Graph load_graph(const ExperimentConfig& c) {
  Graph g;
  if (c.graph_file) {
    g = read_graph_file(*c.graph_file);
  } else if (c.generate) {
    const std::string& spec = *c.generate;
    const bool seeded_family = spec.rfind("random", 0) == 0;
    const bool explicit_seed = spec.rfind("random_regular:", 0) == 0 &&
                               std::count(spec.begin(), spec.end(), ',') == 2;
    if (seeded_family && !explicit_seed && !c.seed) {
      throw InputError("generator '" + spec + "' is randomized and needs --seed");
    }
    g = generate(spec, c.seed.value_or(0));
  } else {
    throw InputError("one of --graph or --generate is required");
  }
  require_connected(g);
  spdlog::info("graph: n={} links={}", g.num_vertices(), g.num_links());
  return g;
}

DemandMatrix load_demands(const ExperimentConfig& c, int n) {
  if (!c.demands_file) throw InputError(c.command + " needs --demands");
  return read_demands_file(*c.demands_file, n);
}

void emit(const ExperimentConfig& c, const std::string& text) {
  if (!c.out) {
    std::cout << text;
    return;
  }
  std::ofstream out(*c.out, std::ios::binary);
  if (!out) throw InputError("cannot write " + *c.out);
  out << text;
}

std::string key_value_csv(const Json& j) {
  std::string out = "key,value\n";
  for (const auto& [key, value] : j.items()) {
    if (!value.is_structured()) out += key + "," + (value.is_string() ? value.get<std::string>() : value.dump()) + "\n";
  }
  return out;
}

Json opt_with_ratio(const OptResult& opt, const CongestionReport& report) {
  Json j = opt_to_json(opt);
  if (opt.method == OptMethod::DegreeLowerBound) j["note"] = "lower-bound mode: OPT replaced by the degree bound";
  j["ratio"] = report.ratio ? Json(*report.ratio) : Json(nullptr);
  return j;
}

int cmd_spectra(const ExperimentConfig& c) {
  const Graph g = load_graph(c);
  const SpectralProfile input = spectral(g);
  const WalkGraph walk = lazify_if_needed(g);
  Json j = spectral_to_json(walk.profile);
  j["input_lambda"] = input.lambda;
  j["pi"] = std::vector<double>(walk.profile.pi.data(), walk.profile.pi.data() + walk.profile.pi.size());
  emit(c, c.format == OutputFormat::Csv ? key_value_csv(j) : dump(j));
  return 0;
}

int cmd_route_split(const ExperimentConfig& c) {
  const Graph g = load_graph(c);
  const DemandMatrix d = load_demands(c, g.num_vertices());
  const RoutingPolicy policy = compute_policy(g);
  CongestionReport report = congestion(g, d, policy);
  const OptResult opt = opt_congestion(g, d);
  attach_opt(report, opt.value);
  if (c.format == OutputFormat::Csv) {
    emit(c, congestion_csv(report, g));
    return 0;
  }
  const int k = policy.profile.k;
  Json j{{"spectral", spectral_to_json(policy.profile)},
         {"congestion", congestion_to_json(report, g)},
         {"opt", opt_with_ratio(opt, report)},
         {"ratio_bound", 12 * k},
         {"within_bound", !report.ratio || *report.ratio <= 12.0 * k + 1e-6},
         {"policy", policy_to_json(policy)}};
  emit(c, dump(j));
  return 0;
}

int cmd_route_unsplit(const ExperimentConfig& c) {
  const std::uint64_t seed = require_seed(c);
  const Graph g = load_graph(c);
  // The policy is fixed before the demands are read.
  const UnsplittablePolicy policy = build_policy(g, seed);
  const DemandMatrix d = load_demands(c, g.num_vertices());
  const OptResult opt = opt_congestion(g, d);
  const RatioAudit audit = ratio_audit(g, d, policy, opt.value, c.audit_constant);
  if (c.format == OutputFormat::Csv) {
    emit(c, congestion_csv(audit.report, g));
    return 0;
  }
  Json j{{"seed", seed},
         {"k", policy.k()},
         {"resamples", policy.resamples()},
         {"congestion", congestion_to_json(audit.report, g)},
         {"opt", opt_with_ratio(opt, audit.report)},
         {"audit", audit_to_json(audit)},
         {"paths", unsplittable_to_json(policy)}};
  emit(c, dump(j));
  return 0;
}

int cmd_valiant(const ExperimentConfig& c, const std::optional<std::string>& trace_path) {
  const std::uint64_t seed = require_seed(c);
  const Graph g = load_graph(c);
  const int n = g.num_vertices();
  std::vector<Vertex> sigma;
  if (c.permutation_file && c.random_permutation) {
    throw InputError("--permutation and --random are exclusive");
  }
  if (c.permutation_file) {
    sigma = read_permutation_file(*c.permutation_file);
  } else if (c.random_permutation) {
    sigma = random_permutation(n, derive_seed(seed, "cli-permutation"));
  } else {
    throw InputError("valiant needs --permutation FILE or --random");
  }
  validate_permutation(sigma, n);
  SimulationOptions options;
  options.per_direction = c.per_direction;
  options.record_trace = trace_path.has_value();
  const ValiantReport r = route_permutation(g, sigma, seed, options);
  if (trace_path) {
    std::ofstream out(*trace_path, std::ios::binary);
    if (!out) throw InputError("cannot write " + *trace_path);
    out << trace_csv(r.sim);
  }
  if (c.format == OutputFormat::Csv) {
    std::string csv = "packet,arrival\n";
    for (int x = 0; x < n; ++x) csv += std::to_string(x) + "," + std::to_string(r.sim.arrivals[x]) + "\n";
    emit(c, csv);
    return 0;
  }
  Json j = simulation_to_json(r.sim, g);
  j["seed"] = seed;
  j["k"] = r.k;
  j["path_length"] = r.path_length;
  j["max_coincidence"] = r.max_coincidence;
  j["diagnostic_bound"] = r.diagnostic;
  j["bound"] = r.bound;
  j["within_bound"] = r.sim.delay <= r.bound;
  j["resamples"] = r.resamples;
  j["permutation"] = sigma;
  emit(c, dump(j));
  return 0;
}

int cmd_verify(const ExperimentConfig& c) {
  const std::uint64_t seed = require_seed(c);
  const VerifyReport r = run_suite(c.suite, seed, c.trials);
  for (const std::string& w : r.warnings) {
    std::cerr << "warning: " << w << "\n";
  }
  for (const CheckResult& check : r.checks) {
    std::cerr << (check.pass ? "PASS " : "FAIL ") << check.name << " " << check.measured.dump() << "\n";
  }
  if (c.format == OutputFormat::Csv) {
    std::string csv = "check,pass\n";
    for (const CheckResult& check : r.checks) csv += check.name + "," + (check.pass ? "true" : "false") + "\n";
    emit(c, csv);
  } else {
    emit(c, dump(verify_to_json(r)));
  }
  return r.pass() ? 0 : kExitVerifyFailed;
}

void configure_logging() {
  auto logger = spdlog::stderr_color_mt("obroute");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::warn);
  if (const char* env = std::getenv("OBROUTE_LOG")) {
    const auto level = spdlog::level::from_str(env);
    // from_str maps unknown names to off
    if (level != spdlog::level::off || std::string(env) == "off") spdlog::set_level(level);
  }
}

}  // namespace

int main(int argc, char** argv) {
  configure_logging();
  CLI::App app{"Oblivious routing via random walks"};
  app.require_subcommand(1);
  Flags f;

  auto* spectra = app.add_subcommand("spectra", "Spectral profile and mixing steps");
  add_common(spectra, f);

  auto* split = app.add_subcommand("route-split", "Splittable routing policy and congestion");
  add_common(split, f);
  split->add_option("--demands", f.demands, "Demand matrix CSV or JSON");

  auto* unsplit = app.add_subcommand("route-unsplit", "Single-path routing and ratio audit");
  add_common(unsplit, f);
  unsplit->add_option("--demands", f.demands, "Demand matrix CSV or JSON");
  unsplit->add_option("--audit-constant", f.audit_constant, "Audit constant C (empirical)");

  auto* valiant = app.add_subcommand("valiant", "Permutation routing packet simulation");
  add_common(valiant, f);
  valiant->add_option("--permutation", f.permutation, "Permutation file");
  valiant->add_flag("--random", f.random, "Route a random permutation");
  valiant->add_flag("--per-direction", f.per_direction, "One packet per direction per round");
  valiant->add_option("--trace", f.trace, "Write the crossing trace CSV here");

  auto* verify = app.add_subcommand("verify", "Statistical lemma checks");
  add_common(verify, f);
  verify->add_option("suite", f.suite, "lemmas, splittable, sampler, packets or unsplittable");
  verify->add_option("--trials", f.trials, "Override sample sizes");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  CLI::App* cmd = app.get_subcommands().front();
  try {
    const ExperimentConfig c = merge(cmd->get_name(), f);
    set_thread_limit(c.threads);
    if (cmd == spectra) return cmd_spectra(c);
    if (cmd == split) return cmd_route_split(c);
    if (cmd == unsplit) return cmd_route_unsplit(c);
    if (cmd == valiant) return cmd_valiant(c, f.trace);
    return cmd_verify(c);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitVerifyFailed;
  }
}

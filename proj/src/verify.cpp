#include "obroute/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "obroute/demands.hpp"
#include "obroute/eval.hpp"
#include "obroute/generators.hpp"
#include "obroute/matrix_ops.hpp"
#include "obroute/packet_sim.hpp"
#include "obroute/parallel.hpp"
#include "obroute/path_sampler.hpp"
#include "obroute/rng.hpp"
#include "obroute/splittable.hpp"
#include "obroute/unsplittable.hpp"

namespace obroute {

namespace {

constexpr double kTol = 1e-9;

struct Check {
  std::string name;
  std::string group;
  int default_trials;  // 0 for deterministic checks
  std::function<CheckResult(std::uint64_t, int)> run;
};

Eigen::RowVectorXd random_mass(int n, Rng& rng) {
  Eigen::RowVectorXd v(n);
  for (int x = 0; x < n; ++x) v[x] = rng.uniform();
  return v;
}

std::vector<std::pair<std::string, Graph>> regular_suite(std::uint64_t seed) {
  return {{"complete:4", complete_graph(4)},
          {"cycle:5", cycle_graph(5)},
          {"hypercube:3", hypercube(3)},
          {"random_regular:10,3", random_regular(10, 3, seed)}};
}

CheckResult inversion(std::uint64_t seed, int trials) {
  CheckResult r{"inversion"};
  std::vector<double> residual(trials), rowsum(trials);
  std::vector<int> support(trials, 0);
  parallel_for(static_cast<std::size_t>(trials), [&](std::size_t t) {
    Rng rng(derive_seed(seed, "inversion", t));
    const int n = 2 + static_cast<int>(rng.below(31));
    const Graph g = random_connected(n, 0.2, 3, derive_seed(seed, "inversion-graph", t));
    const Eigen::MatrixXd a = transition_matrix(g);
    const Eigen::RowVectorXd v = random_mass(n, rng);
    const Eigen::MatrixXd m = reverse_operator(v, a);
    residual[t] = ((v * a) * m - v).lpNorm<Eigen::Infinity>();
    rowsum[t] = (m.rowwise().sum().array() - 1.0).abs().maxCoeff();
    for (int x = 0; x < n; ++x) {
      for (int y = 0; y < n; ++y) {
        if (m(x, y) != 0.0 && a(x, y) == 0.0 && a(y, x) == 0.0) ++support[t];
      }
    }
  });
  const double worst = *std::max_element(residual.begin(), residual.end());
  const double worst_row = *std::max_element(rowsum.begin(), rowsum.end());
  int off = 0;
  for (int s : support) off += s;
  r.pass = worst <= kTol && worst_row <= kTol && off == 0;
  r.measured = Json{{"instances", trials}, {"max_residual", worst},
                    {"max_row_sum_error", worst_row}, {"off_support_entries", off}};
  return r;
}

CheckResult unit_flow(std::uint64_t seed, int) {
  CheckResult r{"unit-flow"};
  double div_err = 0.0, anti_err = 0.0, term_err = 0.0;
  for (const auto& [name, g] : regular_suite(seed)) {
    const RoutingPolicy policy = compute_policy(g, PolicyOptions{true});
    const int n = g.num_vertices();
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (i == j) continue;
        const CommodityFlow& f = policy.flow(i, j);
        Eigen::RowVectorXd expected = Eigen::RowVectorXd::Zero(n);
        expected[j] += 1.0;
        expected[i] -= 1.0;
        div_err = std::max(div_err, (f.divergence(policy.graph) - expected).lpNorm<Eigen::Infinity>());
        const Eigen::MatrixXd m = f.to_matrix(policy.graph);
        anti_err = std::max(anti_err, (m + m.transpose()).lpNorm<Eigen::Infinity>());
        const SequentialTrace& tr = policy.trace(i, j);
        Eigen::RowVectorXd ej = Eigen::RowVectorXd::Zero(n);
        ej[j] = 1.0;
        term_err = std::max(term_err, (tr.states.back() - ej).lpNorm<Eigen::Infinity>());
      }
    }
  }
  r.pass = div_err <= kTol && anti_err <= kTol && term_err <= kTol;
  r.measured = Json{{"max_divergence_error", div_err}, {"max_antisymmetry_error", anti_err},
                    {"max_terminal_error", term_err}};
  return r;
}

CheckResult domination(std::uint64_t seed, int) {
  CheckResult r{"domination"};
  double worst = -1e300;
  for (const auto& [name, g] : regular_suite(seed)) {
    const RoutingPolicy policy = compute_policy(g, PolicyOptions{true});
    const Eigen::MatrixXd a = transition_matrix(policy.graph);
    const int n = g.num_vertices();
    const int k = policy.profile.k;
    for (int j = 0; j < n; ++j) {
      Eigen::RowVectorXd ej = Eigen::RowVectorXd::Zero(n);
      ej[j] = 1.0;
      for (int s = 0; s <= k; ++s) {
        const Eigen::RowVectorXd cap = 3.0 * walk_power(ej, a, k - s);
        for (int i = 0; i < n; ++i) {
          if (i == j) continue;
          const auto& st = policy.trace(i, j).states[k + s];
          worst = std::max(worst, (st - cap).maxCoeff());
        }
      }
    }
  }
  r.pass = worst <= kTol;
  r.measured = Json{{"max_excess", worst}};
  return r;
}

CheckResult max_principle(std::uint64_t seed, int trials) {
  CheckResult r{"max-principle"};
  std::vector<double> err(trials, 0.0);
  std::vector<int> later(trials, 0);
  parallel_for(static_cast<std::size_t>(trials), [&](std::size_t t) {
    Rng rng(derive_seed(seed, "max-principle", t));
    const int n = 2 + static_cast<int>(rng.below(19));
    const Graph g = random_connected(n, 0.3, 3, derive_seed(seed, "max-principle-graph", t));
    const Eigen::RowVectorXd v = random_mass(n, rng);
    const auto steps = rw_congestion(v, g, 12);
    const double first = steps.front().maxCoeff();
    double expected = 0.0;
    for (int x = 0; x < n; ++x) expected = std::max(expected, v[x] / g.degrees()[x]);
    err[t] = std::abs(first - expected);
    for (std::size_t s = 1; s < steps.size(); ++s) {
      if (steps[s].maxCoeff() > first + kTol) later[t] = 1;
    }
  });
  const double worst = *std::max_element(err.begin(), err.end());
  int bad = 0;
  for (int b : later) bad += b;
  r.pass = worst <= kTol && bad == 0;
  r.measured = Json{{"instances", trials}, {"max_step1_error", worst}, {"later_step_maxima", bad}};
  return r;
}

CheckResult splittable_bound(std::uint64_t seed, int trials) {
  CheckResult r{"splittable-bound"};
  const Graph g = complete_graph(4);
  const RoutingPolicy policy = compute_policy(g);
  const int k = policy.profile.k;
  std::vector<NamedDemand> suite;
  for (int t = 0; t < trials; ++t) {
    suite.push_back({"random-" + std::to_string(t), random_demand(4, derive_seed(seed, "split-demand", t))});
  }
  suite.push_back({"adjacency", adjacency_demand(g)});
  const PerformanceReport rep = performance_ratio(g, policy, suite);
  r.pass = rep.ratio <= 12.0 * k + 1e-6;
  r.measured = Json{{"graph", "complete:4"}, {"k", k}, {"max_ratio", rep.ratio}, {"bound", 12 * k}};
  return r;
}

CheckResult opt_adjacency(std::uint64_t seed, int) {
  CheckResult r{"opt-adjacency"};
  Json values = Json::object();
  for (const auto& [name, g] : regular_suite(seed)) {
    const double v = opt_congestion(g, adjacency_demand(g)).value;
    values[name] = v;
    if (std::abs(v - 2.0) > 1e-6) r.pass = false;
  }
  r.measured = values;
  return r;
}

CheckResult sample_space(std::uint64_t seed, int trials) {
  CheckResult r{"sample-space"};
  const WalkGraph walk = lazify_if_needed(random_regular(16, 4, seed));
  auto shared = std::make_shared<const WalkGraph>(walk);
  std::vector<int> empty(trials, 0), invalid(trials, 0);
  parallel_for(static_cast<std::size_t>(trials), [&](std::size_t t) {
    const PathSpace space = build_sample_space(shared, derive_seed(seed, "space-health", t));
    empty[t] = space.empty_buckets() > 0;
    for (std::int64_t id = 0; id < space.total_walks(); ++id) {
      const auto p = space.path(static_cast<std::uint32_t>(id));
      if (static_cast<int>(p.size()) != space.k() + 1) ++invalid[t];
      for (std::size_t i = 1; i < p.size(); ++i) {
        if (walk_edge_index(walk.graph, p[i - 1], p[i]) < 0) {
          ++invalid[t];
          break;
        }
      }
    }
  });
  int builds = 0, bad = 0;
  for (int t = 0; t < trials; ++t) {
    builds += empty[t];
    bad += invalid[t];
  }
  const double fraction = static_cast<double>(builds) / trials;
  r.pass = fraction <= 0.1 && bad == 0;
  r.measured = Json{{"builds", trials}, {"builds_with_empty_bucket", builds},
                    {"fraction", fraction}, {"invalid_paths", bad}};
  return r;
}

CheckResult edge_load(std::uint64_t seed, int trials) {
  CheckResult r{"edge-load"};
  const WalkGraph walk = lazify_if_needed(hypercube(3));
  const LoadStatistics s = load_statistics(walk, trials, seed);
  const double lo = 0.9 * s.lower_band;
  const double hi = 1.1 * s.upper_band;
  const bool in_band = (s.mean_first.array() >= lo).all() && (s.mean_first.array() <= hi).all();
  const double sum_err = std::abs(s.sum_first - s.expected_sum) / s.expected_sum;
  r.pass = sum_err <= 0.05 && s.spread_ratio <= 3.5 && in_band;
  r.measured = Json{{"graph", "hypercube:3"}, {"trials", trials},
                    {"sum", s.sum_first}, {"expected_sum", s.expected_sum},
                    {"spread_ratio", s.spread_ratio},
                    {"min_mean", s.mean_first.minCoeff()}, {"max_mean", s.mean_first.maxCoeff()},
                    {"band", Json::array({lo, hi})}};
  return r;
}

CheckResult tail(std::uint64_t seed, int trials) {
  CheckResult r{"tail"};
  const WalkGraph walk = lazify_if_needed(random_regular(16, 4, seed));
  const LoadStatistics s = load_statistics(walk, trials, derive_seed(seed, "tail"));
  const RankTailStatistics rank = rank_tail_statistics(walk, trials, derive_seed(seed, "rank-tail"));
  std::vector<double> first(s.max_load_first.begin(), s.max_load_first.end());
  const ChernoffReport c1 = chernoff_check(first, s.tail_threshold, 1.0 / 16.0);
  r.pass = c1.pass && rank.frequency() <= 3.0 / 16.0;
  r.measured = Json{{"graph", "random_regular:16,4"}, {"trials", trials},
                    {"threshold", s.tail_threshold}, {"frequency", c1.frequency},
                    {"rank_threshold", rank.threshold}, {"rank_frequency", rank.frequency()},
                    {"allowed", 3.0 / 16.0}};
  return r;
}

CheckResult valiant(std::uint64_t seed, int trials) {
  CheckResult r{"valiant"};
  const Graph g = hypercube(4);
  const DelayStatistics s = delay_statistics(g, trials, seed);
  const int n = g.num_vertices();
  std::vector<Vertex> identity(n);
  for (int x = 0; x < n; ++x) identity[x] = x;
  const ValiantReport id = route_permutation(g, identity, seed);
  r.pass = s.within_bound && id.sim.delay == 0;
  r.measured = Json{{"graph", "hypercube:4"}, {"runs", trials}, {"k", s.k},
                    {"max_delay", s.max_delay}, {"mean_delay", s.mean_delay},
                    {"identity_delay", id.sim.delay}};
  return r;
}

CheckResult umcf_audit(std::uint64_t seed, int trials) {
  CheckResult r{"umcf-audit"};
  const Graph g = random_regular(12, 3, seed);
  std::vector<char> ok(trials, 1), chain(trials, 1), flagged(trials, 0);
  parallel_for(static_cast<std::size_t>(trials), [&](std::size_t t) {
    const UnsplittablePolicy policy = build_policy(g, derive_seed(seed, "audit-policy", t));
    const DemandMatrix d = random_demand(12, derive_seed(seed, "audit-demand", t), 0.5);
    const OptResult opt = opt_congestion(g, d);
    const RatioAudit a = ratio_audit(g, d, policy, opt.value);
    ok[t] = a.decomposition_holds;
    flagged[t] = a.flagged;
    const double degree = opt_lower_bound_degree(g, d);
    chain[t] = a.profile.lower_bound() <= degree + 1e-6 && degree <= opt.value + 1e-6;
  });
  const auto count = [](const std::vector<char>& v) { return static_cast<int>(std::count(v.begin(), v.end(), 1)); };
  r.pass = count(ok) == trials && count(chain) == trials;
  r.measured = Json{{"graph", "random_regular:12,3"}, {"runs", trials},
                    {"decomposition_holds", count(ok)}, {"lower_bound_chain_holds", count(chain)},
                    {"flagged", count(flagged)}};
  return r;
}

const std::vector<Check>& registry() {
  static const std::vector<Check> checks = {
      {"inversion", "splittable", 100, inversion},
      {"unit-flow", "splittable", 0, unit_flow},
      {"domination", "splittable", 0, domination},
      {"max-principle", "splittable", 100, max_principle},
      {"splittable-bound", "splittable", 20, splittable_bound},
      {"opt-adjacency", "splittable", 0, opt_adjacency},
      {"sample-space", "sampler", 50, sample_space},
      {"edge-load", "sampler", 2000, edge_load},
      {"tail", "sampler", 200, tail},
      {"valiant", "packets", 100, valiant},
      {"umcf-audit", "unsplittable", 10, umcf_audit},
  };
  return checks;
}

}  // namespace

bool VerifyReport::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

std::vector<std::string> suite_names() {
  return {"lemmas", "splittable", "sampler", "packets", "unsplittable"};
}

VerifyReport run_suite(const std::string& suite, std::uint64_t seed, int trials) {
  const auto names = suite_names();
  if (std::find(names.begin(), names.end(), suite) == names.end()) {
    throw InputError("unknown suite '" + suite + "'");
  }
  VerifyReport report;
  report.suite = suite;
  report.seed = seed;
  for (const Check& c : registry()) {
    if (suite != "lemmas" && suite != c.group) continue;
    int n = c.default_trials;
    if (trials > 0 && c.default_trials > 0) {
      n = trials;
      if (n < c.default_trials) {
        report.warnings.push_back("insufficient samples for " + c.name + ": " + std::to_string(n) +
                                  " < " + std::to_string(c.default_trials));
      }
    }
    report.checks.push_back(c.run(derive_seed(seed, c.name), n));
  }
  return report;
}

Json verify_to_json(const VerifyReport& r) {
  Json checks = Json::array();
  for (const CheckResult& c : r.checks) {
    checks.push_back(Json{{"name", c.name}, {"pass", c.pass}, {"measured", c.measured}});
  }
  return Json{{"suite", r.suite}, {"seed", r.seed}, {"pass", r.pass()},
              {"warnings", r.warnings}, {"checks", checks}};
}

}  // namespace obroute

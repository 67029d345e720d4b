#include "obroute/eval.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "obroute/lp.hpp"
#include "obroute/parallel.hpp"

namespace obroute {

const char* to_string(OptMethod m) {
  return m == OptMethod::LpExact ? "lp-exact" : "degree-lower-bound";
}

double opt_lower_bound_degree(const Graph& g, const DemandMatrix& d) {
  validate_demand(d, g.num_vertices());
  if (g.num_vertices() == 0) return 0.0;
  const Eigen::ArrayXd out = d.rowwise().sum().array() / g.degrees().array();
  const Eigen::ArrayXd in = d.colwise().sum().transpose().array() / g.degrees().array();
  return std::max(out.maxCoeff(), in.maxCoeff());
}

OptResult opt_congestion(const Graph& g, const DemandMatrix& d, const OptOptions& options) {
  const int n = g.num_vertices();
  validate_demand(d, n);
  require_connected(g);
  OptResult out;
  out.tolerance = options.tolerance;

  const double scale = d.maxCoeff();
  if (scale == 0.0) return out;

  if (n > options.max_vertices || g.num_links() > options.max_links) {
    if (!options.allow_fallback) throw InputError("instance exceeds the LP budget");
    out.method = OptMethod::DegreeLowerBound;
    out.value = opt_lower_bound_degree(g, d);
    return out;
  }

  const DemandMatrix dn = d / scale;
  std::vector<Vertex> sources;
  for (int x = 0; x < n; ++x) {
    if (dn.row(x).sum() > 0.0) sources.push_back(x);
  }
  const int links = g.num_links();
  const int per_source = 2 * links;
  const int theta = static_cast<int>(sources.size()) * per_source;
  const int rows = static_cast<int>(sources.size()) * (n - 1) + links;

  LinearProgram lp;
  lp.a = Eigen::MatrixXd::Zero(rows, theta + 1);
  lp.b = Eigen::VectorXd::Zero(rows);
  lp.c = Eigen::VectorXd::Zero(theta + 1);
  lp.c[theta] = 1.0;
  lp.sense.assign(rows, RowSense::Equal);

  // Conservation at every vertex but the source: outflow - inflow = -D_sx.
  int row = 0;
  for (std::size_t si = 0; si < sources.size(); ++si) {
    const Vertex s = sources[si];
    const int base = static_cast<int>(si) * per_source;
    std::vector<int> row_of(n, -1);
    for (int x = 0; x < n; ++x) {
      if (x == s) continue;
      row_of[x] = row;
      lp.b[row] = -dn(s, x);
      ++row;
    }
    for (int l = 0; l < links; ++l) {
      const Link& link = g.links()[l];
      // forward var: u -> v, backward var: v -> u
      if (row_of[link.u] >= 0) {
        lp.a(row_of[link.u], base + l) += 1.0;
        lp.a(row_of[link.u], base + links + l) -= 1.0;
      }
      if (row_of[link.v] >= 0) {
        lp.a(row_of[link.v], base + l) -= 1.0;
        lp.a(row_of[link.v], base + links + l) += 1.0;
      }
    }
  }
  for (int l = 0; l < links; ++l) {
    for (std::size_t si = 0; si < sources.size(); ++si) {
      const int base = static_cast<int>(si) * per_source;
      lp.a(row, base + l) = 1.0;
      lp.a(row, base + links + l) = 1.0;
    }
    lp.a(row, theta) = -g.links()[l].weight;
    lp.sense[row] = RowSense::LessEqual;
    ++row;
  }

  const LpSolution sol = solve_lp(lp, 1e-10);
  if (sol.status != LpStatus::Optimal) {
    throw std::runtime_error("OPT linear program did not reach optimality");
  }
  out.iterations = sol.iterations;
  out.value = sol.x[theta] * scale;

  Eigen::VectorXd load = Eigen::VectorXd::Zero(links);
  for (std::size_t si = 0; si < sources.size(); ++si) {
    const int base = static_cast<int>(si) * per_source;
    SourceFlow f;
    f.source = sources[si];
    f.forward = sol.x.segment(base, links) * scale;
    f.backward = sol.x.segment(base + links, links) * scale;
    Eigen::VectorXd net = Eigen::VectorXd::Zero(n);  // outflow - inflow
    for (int l = 0; l < links; ++l) {
      const Link& link = g.links()[l];
      const double x = f.forward[l] - f.backward[l];
      net[link.u] += x;
      net[link.v] -= x;
    }
    for (int x = 0; x < n; ++x) {
      const double expected = x == f.source ? d.row(x).sum() : -d(f.source, x);
      out.conservation_residual = std::max(out.conservation_residual, std::abs(net[x] - expected));
    }
    load += f.forward + f.backward;
    out.certificate.push_back(std::move(f));
  }
  for (int l = 0; l < links; ++l) {
    out.certificate_congestion =
        std::max(out.certificate_congestion, load[l] / g.links()[l].weight);
  }
  const double tol = options.tolerance;
  out.certificate_valid = out.conservation_residual <= tol * std::max(1.0, scale) &&
                          out.certificate_congestion <= out.value * (1.0 + tol) + tol;
  if (!out.certificate_valid) {
    throw std::runtime_error("OPT certificate failed validation");
  }
  return out;
}

namespace {

template <typename CongestionFn>
PerformanceReport evaluate_suite(const Graph& g, std::span<const NamedDemand> suite,
                                 const OptOptions& options, CongestionFn&& cong) {
  PerformanceReport report;
  report.entries.resize(suite.size());
  parallel_for(suite.size(), [&](std::size_t i) {
    RatioEntry& e = report.entries[i];
    e.label = suite[i].label;
    e.cong = cong(suite[i].d);
    const OptResult opt = opt_congestion(g, suite[i].d, options);
    e.opt = opt.value;
    e.method = opt.method;
    if (e.opt > 0.0) {
      e.ratio = e.cong / e.opt;
    } else if (e.cong > options.tolerance) {
      throw std::domain_error("zero OPT with nonzero congestion");
    }
  });
  for (std::size_t i = 0; i < report.entries.size(); ++i) {
    if (report.witness < 0 || report.entries[i].ratio > report.ratio) {
      report.ratio = report.entries[i].ratio;
      report.witness = static_cast<int>(i);
    }
  }
  return report;
}

}  // namespace

PerformanceReport performance_ratio(const Graph& g, const RoutingPolicy& policy,
                                    std::span<const NamedDemand> suite,
                                    const OptOptions& options) {
  return evaluate_suite(g, suite, options,
                        [&](const DemandMatrix& d) { return congestion(g, d, policy).max; });
}

PerformanceReport performance_ratio(const Graph& g, const UnsplittablePolicy& policy,
                                    std::span<const NamedDemand> suite,
                                    const OptOptions& options) {
  return evaluate_suite(g, suite, options, [&](const DemandMatrix& d) {
    return unsplittable_congestion(g, d, policy).max;
  });
}

ChernoffReport chernoff_check(std::span<const double> samples, double threshold, double bound,
                              double slack) {
  if (samples.empty()) throw InputError("chernoff_check needs at least one sample");
  ChernoffReport r;
  r.samples = samples.size();
  r.threshold = threshold;
  r.bound = bound;
  r.slack = slack;
  r.exceed = static_cast<std::size_t>(
      std::count_if(samples.begin(), samples.end(), [&](double s) { return s > threshold; }));
  r.frequency = static_cast<double>(r.exceed) / static_cast<double>(r.samples);
  r.pass = r.frequency <= bound * slack;
  return r;
}

}  // namespace obroute

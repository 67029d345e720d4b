#include <doctest.h>

#include <cmath>
#include <vector>

#include "obroute/demands.hpp"
#include "obroute/eval.hpp"
#include "obroute/generators.hpp"
#include "obroute/unsplittable.hpp"
#include "oracles.hpp"

using namespace obroute;
using doctest::Approx;

namespace {

double tv_distance(const std::vector<double>& a, const std::vector<double>& b) {
  double tv = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) tv += 0.5 * std::abs(a[i] - b[i]);
  return tv;
}

}  // namespace

TEST_CASE("policy covers every ordered pair") {
  const UnsplittablePolicy p = build_policy(complete_graph(4), 3);
  int pairs = 0;
  for (int x = 0; x < 4; ++x) {
    for (int y = 0; y < 4; ++y) {
      if (x == y) continue;
      const TwoLegPath& path = p.path(x, y);
      CHECK(path.gamma.front() == x);
      CHECK(path.gamma.back() == y);
      CHECK(static_cast<int>(path.gamma.size()) == 2 * p.k() + 1);
      ++pairs;
    }
  }
  CHECK(pairs == 12);
  CHECK_THROWS(p.path(1, 1));
  CHECK_THROWS(p.path(0, 4));
}

TEST_CASE("paths have length 2k on assorted graphs") {
  for (const Graph& g : {hypercube(3), grid_graph(3, 3), random_connected(9, 0.3, 3, 6)}) {
    const UnsplittablePolicy p = build_policy(g, 11);
    const int n = g.num_vertices();
    for (int x = 0; x < n; ++x) {
      for (int y = 0; y < n; ++y) {
        if (x == y) continue;
        const auto& gamma = p.path(x, y).gamma;
        CHECK(static_cast<int>(gamma.size()) == 2 * p.k() + 1);
        for (std::size_t s = 1; s < gamma.size(); ++s) {
          CHECK(walk_edge_index(p.walk_graph(), gamma[s - 1], gamma[s]) >= 0);
        }
      }
    }
  }
}

TEST_CASE("policy is deterministic per seed") {
  const Graph g = random_regular(10, 3, 2);
  const UnsplittablePolicy a = build_policy(g, 5);
  const UnsplittablePolicy b = build_policy(g, 5);
  const UnsplittablePolicy c = build_policy(g, 6);
  bool differs = false;
  for (int x = 0; x < 10; ++x) {
    for (int y = 0; y < 10; ++y) {
      if (x == y) continue;
      CHECK(a.path(x, y).gamma == b.path(x, y).gamma);
      differs = differs || a.path(x, y).gamma != c.path(x, y).gamma;
    }
  }
  CHECK(differs);
}

TEST_CASE("capacitated routing matches the unit expansion in distribution") {
  const Graph g = build_graph(std::vector<EdgeSpec>{{0, 1, Capacity{3}},
                                                    {1, 2, Capacity{1}},
                                                    {2, 3, Capacity{2}},
                                                    {3, 0, Capacity{1}},
                                                    {0, 2, Capacity{1}}});
  const UnitExpansion u = unit_capacity_expansion(g);
  const WalkGraph wg = lazify_if_needed(g);
  const WalkGraph wu = lazify_if_needed(u.graph);
  CHECK(wg.profile.k == wu.profile.k);
  constexpr int kSeeds = 500;
  std::vector<double> mid_g(4, 0.0);
  std::vector<double> mid_u(4, 0.0);
  std::vector<double> step_g(4, 0.0);
  std::vector<double> step_u(4, 0.0);
  for (int s = 0; s < kSeeds; ++s) {
    const UnsplittablePolicy pg = build_policy(wg, s, {.walks_scale = 200});
    const UnsplittablePolicy pu = build_policy(wu, s + 100000, {.walks_scale = 200});
    mid_g[pg.path(1, 3).intermediate] += 1.0 / kSeeds;
    mid_u[pu.path(1, 3).intermediate] += 1.0 / kSeeds;
    step_g[pg.path(1, 3).gamma[1]] += 1.0 / kSeeds;
    step_u[pu.path(1, 3).gamma[1]] += 1.0 / kSeeds;
  }
  CHECK(tv_distance(mid_g, mid_u) <= 0.1);
  CHECK(tv_distance(step_g, step_u) <= 0.1);
}

TEST_CASE("unsplittable congestion") {
  SUBCASE("zero demand") {
    const Graph g = hypercube(3);
    CHECK(unsplittable_congestion(g, DemandMatrix::Zero(8, 8), build_policy(g, 1)).max == 0.0);
  }
  SUBCASE("single demand follows one path") {
    const Graph g = build_graph(std::vector<EdgeSpec>{{0, 1, Capacity{2}},
                                                      {1, 2, Capacity{1}},
                                                      {2, 3, Capacity{4}},
                                                      {3, 0, Capacity{1}}});
    const UnsplittablePolicy p = build_policy(g, 2);
    DemandMatrix d = DemandMatrix::Zero(4, 4);
    d(0, 2) = 1.0;
    const CongestionReport r = unsplittable_congestion(g, d, p);
    Eigen::VectorXd traversals = Eigen::VectorXd::Zero(g.num_links());
    accumulate_link_traversals(g, p.path(0, 2).gamma, 1.0, traversals);
    for (int l = 0; l < g.num_links(); ++l) {
      CHECK(r.per_link[l] == Approx(traversals[l] / to_double(g.links()[l].capacity)));
    }
  }
  SUBCASE("adjacency demand matches a recount") {
    const Graph g = random_regular(12, 3, 4);
    const UnsplittablePolicy p = build_policy(g, 9);
    const DemandMatrix d = adjacency_demand(g);
    std::vector<std::pair<std::vector<int>, double>> weighted;
    for (int x = 0; x < 12; ++x) {
      for (int y = 0; y < 12; ++y) {
        if (d(x, y) > 0) weighted.push_back({p.path(x, y).gamma, d(x, y)});
      }
    }
    const auto expected = oracle::recount(weighted);
    const CongestionReport r = unsplittable_congestion(g, d, p);
    double worst = 0.0;
    for (int l = 0; l < g.num_links(); ++l) {
      const Link& link = g.links()[l];
      const auto it = expected.find({link.u, link.v});
      const double want = it == expected.end() ? 0.0 : it->second;
      CHECK(r.per_link[l] == Approx(want));
      worst = std::max(worst, want);
    }
    CHECK(r.max == Approx(worst));
  }
  SUBCASE("invalid demand") {
    const Graph g = cycle_graph(5);
    DemandMatrix d = DemandMatrix::Zero(5, 5);
    d(1, 2) = -0.5;
    CHECK_THROWS_AS(unsplittable_congestion(g, d, build_policy(g, 1)), InputError);
  }
}

TEST_CASE("normalized profile") {
  SUBCASE("regular graphs leave the demand alone") {
    const Graph g = hypercube(3);
    const DemandMatrix d = random_demand(8, 3);
    const NormalizedDemandProfile p = normalized_profile(g, d);
    CHECK((p.tilde - d).lpNorm<Eigen::Infinity>() == 0.0);
    CHECK(p.d_max == 3.0);
  }
  SUBCASE("star leaf rows scale by d_max") {
    const Graph g = star_graph(3);
    DemandMatrix d = DemandMatrix::Zero(4, 4);
    d(1, 2) = 1.0;
    d(1, 3) = 2.0;
    d(0, 1) = 1.5;
    const NormalizedDemandProfile p = normalized_profile(g, d);
    CHECK(p.tilde(1, 2) == 3.0);
    CHECK(p.tilde(1, 3) == 6.0);
    CHECK(p.tilde(0, 1) == 1.5);
    CHECK(p.m == 6.0);
    CHECK(p.row_max == 9.0);
    CHECK(p.s == 1.5);
    CHECK(p.lower_bound() == Approx(3.0));
  }
  SUBCASE("zero demand") {
    const NormalizedDemandProfile p = normalized_profile(cycle_graph(4), DemandMatrix::Zero(4, 4));
    CHECK(p.m == 0.0);
    CHECK(p.s == 1.0);
    CHECK(p.lower_bound() == 0.0);
  }
  SUBCASE("s lies in [1, n] and the bound sits under the degree bound") {
    for (int t = 0; t < 30; ++t) {
      const Graph g = random_connected(9, 0.3, 3, 70 + t);
      const DemandMatrix d = random_demand(9, t, 0.3);
      const NormalizedDemandProfile p = normalized_profile(g, d);
      CHECK(p.s >= 1.0);
      CHECK(p.s <= 9.0);
      CHECK(p.m <= p.row_max + 1e-12);
      CHECK(p.row_max <= p.m * 9 + 1e-12);
      CHECK(p.lower_bound() <= opt_lower_bound_degree(g, d) + 1e-12);
    }
  }
}

TEST_CASE("ordered view") {
  SUBCASE("sorting with ties by id") {
    NormalizedDemandProfile p;
    p.tilde = DemandMatrix::Zero(4, 4);
    p.tilde(0, 1) = 1;
    p.tilde(0, 2) = 5;
    p.tilde(0, 3) = 3;
    p.tilde(1, 0) = 2;
    p.tilde(1, 2) = 2;
    p.tilde(1, 3) = 2;
    p.m = 5;
    p.row_max = 9;
    p.s = 1.8;
    const OrderedDemandView v = ordered_view(p);
    CHECK(v.order[0] == std::vector<Vertex>{2, 3, 1});
    CHECK(v.sorted(0, 0) == 5);
    CHECK(v.sorted(0, 1) == 3);
    CHECK(v.sorted(0, 2) == 1);
    CHECK(v.order[1] == std::vector<Vertex>{0, 2, 3});
    CHECK(v.order[2] == std::vector<Vertex>{0, 1, 3});
    CHECK(v.sorted.cols() == 3);
  }
  SUBCASE("tail bound holds on random demands") {
    for (int t = 0; t < 40; ++t) {
      const Graph g = random_connected(10, 0.3, 3, 200 + t);
      const DemandMatrix d = random_demand(10, 300 + t, 0.5);
      const NormalizedDemandProfile p = normalized_profile(g, d);
      const OrderedDemandView v = ordered_view(p);
      CHECK(v.tail_bound_holds);
      for (int x = 0; x < 10; ++x) {
        CHECK(v.sorted.row(x).sum() == Approx(p.tilde.row(x).sum()));
        for (int r = 1; r < 9; ++r) CHECK(v.sorted(x, r) <= v.sorted(x, r - 1));
      }
    }
  }
}

TEST_CASE("rank loads") {
  const Graph g = random_regular(10, 3, 1);
  const UnsplittablePolicy p = build_policy(g, 4);
  const DemandMatrix d = random_demand(10, 5);
  const OrderedDemandView v = ordered_view(normalized_profile(g, d));
  const auto first = rank_loads(p, v, PathPart::FirstLeg);
  const auto full = rank_loads(p, v, PathPart::Full);
  REQUIRE(first.size() == 9);
  Eigen::VectorXd total_first = Eigen::VectorXd::Zero(walk_edge_count(p.walk_graph()));
  for (const auto& w : first) total_first += w;
  // Regular graph: pi_x / pi_max = 1, so every rank contributes n k traversals.
  CHECK(total_first.sum() == Approx(9.0 * 10 * p.k()));
  Eigen::VectorXd total_full = Eigen::VectorXd::Zero(total_first.size());
  for (const auto& w : full) total_full += w;
  CHECK(total_full.sum() == Approx(2 * total_first.sum()));
}

TEST_CASE("ratio audit") {
  SUBCASE("zero demand") {
    const Graph g = hypercube(3);
    const RatioAudit a = ratio_audit(g, DemandMatrix::Zero(8, 8), build_policy(g, 1), 0.0);
    CHECK(a.ratio == 0.0);
    CHECK_FALSE(a.flagged);
  }
  SUBCASE("opt of zero with traffic throws") {
    const Graph g = hypercube(3);
    DemandMatrix d = DemandMatrix::Zero(8, 8);
    d(0, 7) = 1.0;
    CHECK_THROWS_AS(ratio_audit(g, d, build_policy(g, 1), 0.0), std::domain_error);
  }
  SUBCASE("adjacency on random_regular(16,4) over 50 seeds") {
    const Graph g = random_regular(16, 4, 1);
    const DemandMatrix d = adjacency_demand(g);
    const OptResult opt = opt_congestion(g, d);
    REQUIRE(opt.method == OptMethod::LpExact);
    CHECK(opt.value == Approx(2.0).epsilon(1e-6));
    const WalkGraph w = lazify_if_needed(g);
    for (int seed = 0; seed < 50; ++seed) {
      const RatioAudit a = ratio_audit(g, d, build_policy(w, seed), opt.value);
      CHECK_FALSE(a.flagged);
      CHECK(a.decomposition_holds);
      CHECK(a.full.holds);
      CHECK(a.first_leg.holds);
      CHECK(a.ratio == Approx(a.cong / opt.value));
      CHECK(a.constant == kDefaultAuditConstant);
      CHECK(a.bound == Approx(40.0 * (4.0 * std::pow(std::log(16.0), 2) +
                                      w.profile.k * std::log(16.0))));
    }
  }
  SUBCASE("decomposition holds on capacitated graphs") {
    for (int t = 0; t < 10; ++t) {
      const Graph g = random_connected(10, 0.3, 3, 500 + t);
      const DemandMatrix d = random_demand(10, 600 + t, 0.4);
      const UnsplittablePolicy p = build_policy(g, t);
      for (PathPart part : {PathPart::Full, PathPart::FirstLeg}) {
        const DecompositionCheck c = check_decomposition(g, d, p, part);
        CHECK(c.holds);
        CHECK(c.min_slack >= 0.0);
        CHECK(((c.rhs - c.lhs).array() >= 0.0).all());
      }
    }
  }
}

TEST_CASE("rank tail statistic") {
  const WalkGraph w = lazify_if_needed(random_regular(16, 4, 1));
  const RankTailStatistics s = rank_tail_statistics(w, 20, 1);
  CHECK(s.trials == 20);
  CHECK(s.n == 16);
  CHECK(s.threshold == Approx(36 * std::log(16.0) + 18.0 / 4.0 * s.k * s.k));
  CHECK(s.frequency() <= 3.0 / 16);
  CHECK(s.max_load > 0.0);
}

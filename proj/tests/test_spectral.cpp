#include <doctest.h>

#include <cmath>
#include <vector>

#include "obroute/generators.hpp"
#include "obroute/graph.hpp"
#include "obroute/matrix_ops.hpp"
#include "obroute/rng.hpp"
#include "obroute/spectral.hpp"
#include "oracles.hpp"

using namespace obroute;
using doctest::Approx;

namespace {

Graph from(std::vector<EdgeSpec> e, int n = -1) { return build_graph(e, n); }

std::vector<Graph> generator_suite() {
  return {complete_graph(4), cycle_graph(5), hypercube(3), grid_graph(3, 4), star_graph(5),
          path_graph(6), random_regular(10, 3, 1), random_connected(12, 0.3, 3, 2)};
}

}  // namespace

TEST_CASE("build_graph degrees") {
  const Graph k2 = from({{0, 1, Capacity{1}}});
  CHECK(k2.num_vertices() == 2);
  CHECK(k2.degrees()[0] == 1.0);
  CHECK(k2.degrees()[1] == 1.0);

  const Graph p = from({{0, 1, Capacity{2}}, {1, 2, Capacity{1}}});
  CHECK(p.degrees()[0] == 2.0);
  CHECK(p.degrees()[1] == 3.0);
  CHECK(p.degrees()[2] == 1.0);
  CHECK(p.degree(1) == Capacity{3});
}

TEST_CASE("build_graph rejects bad input") {
  CHECK_THROWS_AS(from({{0, 1, Capacity{-1}}}), InputError);
  CHECK_THROWS_AS(from({{0, 1, Capacity{0}}}), InputError);
  CHECK_THROWS_AS(from({{1, 1, Capacity{1}}}), InputError);
  CHECK_THROWS_AS(from({{0, 3, Capacity{1}}}, 3), InputError);
}

TEST_CASE("parallel edges aggregate into one link") {
  const Graph g = from({{1, 0, Capacity{1}}, {0, 1, Capacity(1, 2)}, {1, 2, Capacity{1}}});
  CHECK(g.edges().size() == 3);
  CHECK(g.num_links() == 2);
  CHECK(g.links()[0].capacity == Capacity(3, 2));
  CHECK(g.edges()[1].parallel_id == 1);
  CHECK(g.link_index(1, 0) == 0);
  CHECK(g.link_index(0, 2) == -1);
}

TEST_CASE("disconnected graphs are representable but rejected for routing") {
  const Graph g = from({{0, 1, Capacity{1}}, {2, 3, Capacity{1}}});
  CHECK_FALSE(g.connected());
  CHECK_THROWS_AS(require_connected(g), InputError);
  CHECK_THROWS_AS(spectral(g), InputError);
  CHECK_THROWS_AS(lazify_if_needed(g), InputError);
}

TEST_CASE("stationary distribution") {
  const auto c4 = stationary_distribution(cycle_graph(4));
  for (int x = 0; x < 4; ++x) CHECK(c4[x] == Approx(0.25));

  const auto star = stationary_distribution(star_graph(3));
  CHECK(star[0] == Approx(0.5));
  for (int x = 1; x < 4; ++x) CHECK(star[x] == Approx(1.0 / 6.0));

  const auto p = stationary_distribution(from({{0, 1, Capacity{2}}, {1, 2, Capacity{1}}}));
  CHECK(p[0] == Approx(2.0 / 6.0));
  CHECK(p[1] == Approx(3.0 / 6.0));
  CHECK(p[2] == Approx(1.0 / 6.0));

  CHECK_THROWS_AS(stationary_distribution(Graph{}), InputError);
}

TEST_CASE("spectra of small graphs") {
  SUBCASE("K4") {
    const SpectralProfile p = spectral(complete_graph(4));
    const auto ev = oracle::eigenvalues_of_walk(complete_graph(4));
    const std::vector<double> frozen{-1.0 / 3, -1.0 / 3, -1.0 / 3, 1.0};
    for (int i = 0; i < 4; ++i) {
      CHECK(p.eigenvalues[i] == Approx(ev[i]).epsilon(1e-10));
      CHECK(p.eigenvalues[i] == Approx(frozen[i]).epsilon(1e-10));
    }
    CHECK(p.lambda == Approx(1.0 / 3).epsilon(1e-10));
  }
  SUBCASE("C4 is bipartite") {
    const SpectralProfile p = spectral(cycle_graph(4));
    const std::vector<double> frozen{-1.0, 0.0, 0.0, 1.0};
    for (int i = 0; i < 4; ++i) CHECK(p.eigenvalues[i] == Approx(frozen[i]).epsilon(1e-10));
    CHECK(p.lambda == 1.0);
  }
  SUBCASE("K2") {
    const SpectralProfile p = spectral(complete_graph(2));
    CHECK(p.lambdaN == -1.0);
    CHECK(p.lambda2 == -1.0);
    CHECK(p.lambda == 1.0);
  }
}

TEST_CASE("lazification") {
  SUBCASE("C4 adopts loops") {
    const WalkGraph w = lazify_if_needed(cycle_graph(4));
    CHECK(w.profile.lazified);
    CHECK(w.graph.has_loops());
    CHECK(w.profile.lambda_bar == Approx(0.5).epsilon(1e-10));
    CHECK(w.profile.k == 3);
  }
  SUBCASE("K4 keeps the original walk") {
    const WalkGraph w = lazify_if_needed(complete_graph(4));
    CHECK_FALSE(w.profile.lazified);
    CHECK(w.profile.lambda_bar == Approx(1.0 / 3).epsilon(1e-10));
    const Graph lazy = complete_graph(4).with_added_loops(complete_graph(4).degree_vector());
    // Lazy eigenvalues (1 - 1/3) / 2 tie with the original ones.
    CHECK(spectral(lazy).lambda == Approx(1.0 / 3).epsilon(1e-10));
  }
  SUBCASE("K2 lazy walk mixes in one step") {
    const WalkGraph w = lazify_if_needed(complete_graph(2));
    CHECK(w.profile.lazified);
    const auto ev = oracle::eigenvalues_of_walk(w.graph);
    CHECK(ev[0] == Approx(0.0).epsilon(1e-12));
    CHECK(ev[1] == Approx(1.0));
    CHECK(w.profile.lambda_bar == 0.0);
    CHECK(w.profile.k == 1);
  }
  SUBCASE("lambda_bar < 1 across the generator suite") {
    for (const Graph& g : generator_suite()) CHECK(lazify_if_needed(g).profile.lambda_bar < 1.0);
  }
}

TEST_CASE("mixing steps") {
  CHECK(mixing_steps(0.5, 1.0 / 8) == 4);
  CHECK(mixing_steps(0.9, 0.01) == 51);
  CHECK(mixing_steps(0.0, 0.25) == 1);
  CHECK_THROWS_AS(mixing_steps(1.0, 0.25), std::domain_error);
  CHECK_THROWS_AS(mixing_steps(1.5, 0.25), std::domain_error);

  Rng rng(7);
  for (int t = 0; t < 200; ++t) {
    const double lb = 0.01 + 0.98 * rng.uniform();
    const double pi_min = 1e-4 + 0.5 * rng.uniform();
    const int k = mixing_steps(lb, pi_min);
    CHECK(k >= 1);
    CHECK(std::pow(lb, k) <= pi_min / 2 * (1 + 1e-12));
    if (k > 1) CHECK(std::pow(lb, k - 1) > pi_min / 2);
  }
}

TEST_CASE("walk_power") {
  const Graph g = random_connected(9, 0.4, 3, 3);
  const Eigen::MatrixXd a = transition_matrix(g);
  const Eigen::RowVectorXd pi = stationary_distribution(g);
  CHECK((walk_power(pi, a, 17) - pi).lpNorm<Eigen::Infinity>() < 1e-12);

  const WalkGraph k2 = lazify_if_needed(complete_graph(2));
  Eigen::RowVector2d e0(1.0, 0.0);
  const auto v = walk_power(e0, transition_matrix(k2.graph), 1);
  CHECK(v[0] == Approx(0.5));
  CHECK(v[1] == Approx(0.5));

  Eigen::RowVectorXd w = Eigen::RowVectorXd::LinSpaced(9, 1, 9);
  CHECK(walk_power(w, a, 0) == w);
  CHECK(walk_power(w, a, 5).sum() == Approx(w.sum()));
  CHECK_THROWS(walk_power(Eigen::RowVector2d(1, 0), a, 1));
  CHECK_THROWS(walk_power(w, a, -1));
}

TEST_CASE("generators") {
  const Graph q3 = hypercube(3);
  CHECK(q3.num_vertices() == 8);
  CHECK(q3.edges().size() == 12);
  CHECK(complete_graph(4).edges().size() == 6);

  const Graph rr = random_regular(8, 3, 1);
  CHECK(rr.edges().size() == 12);
  CHECK(rr.num_links() == 12);
  for (int x = 0; x < 8; ++x) CHECK(rr.degrees()[x] == 3.0);
  CHECK(rr.connected());
  CHECK(rr.is_regular());

  const Graph again = random_regular(8, 3, 1);
  for (std::size_t e = 0; e < rr.edges().size(); ++e) {
    CHECK(rr.edges()[e].u == again.edges()[e].u);
    CHECK(rr.edges()[e].v == again.edges()[e].v);
  }

  CHECK(grid_graph(3, 4).edges().size() == 17);
  CHECK(generate("grid:2,3").num_vertices() == 6);
  CHECK(generate("random_regular:12,3,5").edges().size() == 18);
  CHECK_THROWS_AS(random_regular(7, 3, 1), InputError);
  CHECK_THROWS_AS(random_regular(4, 4, 1), InputError);
  CHECK_THROWS_AS(generate("nonsense:3"), InputError);
  CHECK_THROWS_AS(generate("complete:x"), InputError);
  CHECK_THROWS_AS(generate("grid:3"), InputError);
  CHECK(random_connected(20, 0.1, 3, 9).connected());
}

TEST_CASE("unit capacity expansion") {
  SUBCASE("capacity 3 becomes three unit edges") {
    const UnitExpansion u = unit_capacity_expansion(from({{0, 1, Capacity{3}}}));
    CHECK(u.graph.edges().size() == 3);
    CHECK(u.scale == 1);
    for (int id : u.projection) CHECK(id == 0);
    CHECK(u.graph.degrees()[0] == 3.0);
  }
  SUBCASE("unit capacities are a fixed point") {
    const Graph g = cycle_graph(5);
    const UnitExpansion u = unit_capacity_expansion(g);
    CHECK(u.graph.edges().size() == 5);
    for (int e = 0; e < 5; ++e) CHECK(u.projection[e] == e);
  }
  SUBCASE("capacity 1/2 scales to one unit edge") {
    const UnitExpansion u = unit_capacity_expansion(from({{0, 1, Capacity(1, 2)}}));
    CHECK(u.scale == 2);
    CHECK(u.graph.edges().size() == 1);
  }
  SUBCASE("mixed denominators use their LCM and keep degree ratios") {
    const Graph g = from({{0, 1, Capacity(1, 2)}, {1, 2, Capacity(2, 3)}, {0, 2, Capacity{1}}});
    const UnitExpansion u = unit_capacity_expansion(g);
    CHECK(u.scale == 6);
    CHECK(u.graph.edges().size() == 3 + 4 + 6);
    for (int x = 0; x < 3; ++x) CHECK(u.graph.degrees()[x] == Approx(6 * g.degrees()[x]));
  }
  SUBCASE("a flow split evenly over parallel copies has the same congestion") {
    const Graph g = from({{0, 1, Capacity{3}}, {1, 2, Capacity{2}}, {0, 2, Capacity{1}}});
    const UnitExpansion u = unit_capacity_expansion(g);
    const std::vector<double> flow{1.5, -0.7, 0.4};  // per edge of g
    std::vector<int> copies(g.edges().size(), 0);
    for (int id : u.projection) ++copies[id];
    for (std::size_t e = 0; e < g.edges().size(); ++e) {
      const double on_g = std::abs(flow[e]) / to_double(g.edges()[e].capacity);
      const double on_copy = std::abs(flow[e]) / copies[e] / 1.0;
      CHECK(on_g == Approx(on_copy));
    }
  }
}

TEST_CASE("walk matrix properties across generators") {
  for (const Graph& g : generator_suite()) {
    const WalkGraph w = lazify_if_needed(g);
    for (const Graph* h : {&g, &w.graph}) {
      const Eigen::MatrixXd a = transition_matrix(*h);
      CHECK((a.rowwise().sum().array() - 1.0).abs().maxCoeff() <= 1e-9);
      const Eigen::RowVectorXd pi = stationary_distribution(*h);
      CHECK((pi * a - pi).lpNorm<Eigen::Infinity>() <= 1e-9);
      for (int x = 0; x < h->num_vertices(); ++x) {
        for (int y = 0; y < h->num_vertices(); ++y) {
          if (a(x, y) != 0.0 && x != y) CHECK(h->link_index(x, y) >= 0);
        }
      }
    }
  }
}

TEST_CASE("symmetric eigensolve matches the walk matrix spectrum") {
  for (int t = 0; t < 12; ++t) {
    const int n = 3 + 5 * t;
    const Graph g = random_connected(n, 0.15, 3, 100 + t);
    const SpectralProfile p = spectral(g);
    const auto ev = oracle::eigenvalues_of_walk(g);
    for (int i = 0; i < n; ++i) CHECK(p.eigenvalues[i] == Approx(ev[i]).epsilon(1e-8));
  }
}

TEST_CASE("mixing contraction on lazified regular graphs") {
  Rng rng(11);
  for (const Graph& g : {hypercube(3), cycle_graph(5), random_regular(10, 3, 4), complete_graph(6)}) {
    const WalkGraph w = lazify_if_needed(g);
    const Eigen::MatrixXd a = transition_matrix(w.graph);
    const int k = w.profile.k;
    for (int t = 0; t < 20; ++t) {
      Eigen::RowVectorXd v(g.num_vertices());
      for (int x = 0; x < v.size(); ++x) v[x] = rng.uniform();
      v /= v.sum();
      const double gap = (walk_power(v, a, k) - w.profile.pi).norm();
      CHECK(gap <= std::pow(w.profile.lambda_bar, k) + 1e-12);
    }
  }
}

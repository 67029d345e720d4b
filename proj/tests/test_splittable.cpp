#include <doctest.h>

#include <cmath>
#include <vector>

#include "obroute/demands.hpp"
#include "obroute/generators.hpp"
#include "obroute/matrix_ops.hpp"
#include "obroute/parallel.hpp"
#include "obroute/rng.hpp"
#include "obroute/splittable.hpp"
#include "oracles.hpp"

using namespace obroute;
using doctest::Approx;

namespace {

double max_abs_diff(const Eigen::MatrixXd& a, const oracle::Mat& b) {
  double worst = 0.0;
  for (int x = 0; x < a.rows(); ++x) {
    for (int y = 0; y < a.cols(); ++y) worst = std::max(worst, std::abs(a(x, y) - b[x][y]));
  }
  return worst;
}

void check_against_oracle(const Graph& g) {
  const WalkGraph w = lazify_if_needed(g);
  const RoutingPolicy policy = compute_policy(w, {.keep_traces = true});
  const int n = g.num_vertices();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const oracle::Algorithm1 alg = oracle::algorithm1(w.graph, w.profile.k, i, j);
      CHECK(max_abs_diff(policy.flow(i, j).to_matrix(w.graph), alg.r) <= 1e-9);
      const SequentialTrace& t = policy.trace(i, j);
      for (int s = 0; s <= 2 * w.profile.k; ++s) {
        for (int x = 0; x < n; ++x) CHECK(t.states[s][x] == Approx(alg.states[s][x]).epsilon(1e-9));
      }
      for (int s = 1; s <= 2 * w.profile.k; ++s) {
        CHECK(max_abs_diff(t.op(s), alg.ops[s - 1]) <= 1e-9);
      }
    }
  }
}

DemandMatrix adjacency_of(const Graph& g) { return adjacency_demand(g); }

}  // namespace

TEST_CASE("pointwise_mul") {
  Eigen::RowVector2d v(2.0, 3.0);
  Eigen::Matrix2d m;
  m << 1, 2, 3, 4;
  Eigen::Matrix2d expected;
  expected << 2, 4, 9, 12;
  CHECK(pointwise_mul(v, m) == expected);
  CHECK(pointwise_mul(Eigen::RowVector2d::Zero(), m).isZero());
  CHECK(pointwise_mul(Eigen::RowVector2d::Ones(), m) == m);
  Eigen::Matrix2d walk;
  walk << 0.5, 0.5, 1, 0;
  Eigen::Matrix2d scaled;
  scaled << 1, 1, 0, 0;
  CHECK(pointwise_mul(Eigen::RowVector2d(2, 0), walk) == scaled);
  CHECK_THROWS(pointwise_mul(Eigen::RowVector3d(1, 2, 3), m));
}

TEST_CASE("row_norm") {
  Eigen::Matrix3d m;
  m << 1, 3, 0, 0, 0, 0, 2, 2, 4;
  Eigen::Matrix3d fallback;
  fallback << 0, 0.5, 0.5, 0.5, 0, 0.5, 0.5, 0.5, 0;
  const Eigen::Matrix3d r = row_norm(m, fallback);
  CHECK(r(0, 0) == 0.25);
  CHECK(r(0, 1) == 0.75);
  CHECK(r.row(1) == fallback.row(1));
  CHECK(r(2, 2) == 0.5);
  Eigen::Matrix3d neg = m;
  neg(0, 0) = -1;
  CHECK_THROWS(row_norm(neg, fallback));
  CHECK_THROWS(row_norm(m, Eigen::Matrix2d::Zero()));

  Eigen::Matrix2d k2;
  k2 << 2, 2, 0, 0;
  Eigen::Matrix2d expected;
  expected << 0.5, 0.5, 1, 0;
  CHECK(row_norm(k2, transition_matrix(complete_graph(2))) == expected);

  Eigen::Matrix2d plain;
  plain << 1, 3, 2, 2;
  Eigen::Matrix2d normed;
  normed << 0.25, 0.75, 0.5, 0.5;
  CHECK(row_norm(plain, Eigen::Matrix2d::Zero()) == normed);
  const Eigen::Matrix3d id = Eigen::Matrix3d::Identity();
  CHECK(row_norm(id, fallback) == id);
}

TEST_CASE("reverse_operator") {
  SUBCASE("stationary mass reverses a reversible walk onto itself") {
    const Graph g = star_graph(3);
    const Eigen::MatrixXd a = transition_matrix(g);
    const Eigen::MatrixXd r = reverse_operator(stationary_distribution(g), a);
    CHECK((r - a).lpNorm<Eigen::Infinity>() < 1e-12);
  }
  SUBCASE("uniform mass on a regular graph gives the walk back") {
    const Eigen::MatrixXd a = transition_matrix(complete_graph(4));
    const Eigen::RowVectorXd u = Eigen::RowVectorXd::Constant(4, 0.25);
    const Eigen::MatrixXd r = reverse_operator(u, a);
    CHECK((r - a).lpNorm<Eigen::Infinity>() < 1e-12);
    CHECK(((u * a) * r - u).lpNorm<Eigen::Infinity>() < 1e-12);
  }
  SUBCASE("time reversal fixes pi on C4") {
    const Graph g = cycle_graph(4);
    const Eigen::MatrixXd a = transition_matrix(g);
    const Eigen::RowVectorXd pi = stationary_distribution(g);
    CHECK(((pi * a) * reverse_operator(pi, a) - pi).lpNorm<Eigen::Infinity>() < 1e-12);
  }
  SUBCASE("unit mass on a path") {
    const Graph g = path_graph(3);
    const Eigen::MatrixXd a = transition_matrix(g);
    Eigen::RowVector3d e0(1, 0, 0);
    const Eigen::MatrixXd r = reverse_operator(e0, a);
    // Only 0 -> 1 carries mass, so row 1 sends everything back to 0; rows 0
    // and 2 have no incoming mass and fall back to the walk.
    CHECK(r(1, 0) == 1.0);
    CHECK(r(1, 2) == 0.0);
    CHECK(r.row(0) == a.row(0));
    CHECK(r.row(2) == a.row(2));
    CHECK(((e0 * a) * r - e0).lpNorm<Eigen::Infinity>() < 1e-12);
  }
  SUBCASE("invariants on random inputs") {
    Rng rng(5);
    for (int t = 0; t < 20; ++t) {
      const Graph g = random_connected(8, 0.3, 4, 40 + t);
      const Eigen::MatrixXd a = transition_matrix(g);
      Eigen::RowVectorXd v(8);
      for (int x = 0; x < 8; ++x) v[x] = rng.uniform();
      const Eigen::MatrixXd r = reverse_operator(v, a);
      CHECK((r.rowwise().sum().array() - 1.0).abs().maxCoeff() < 1e-12);
      CHECK(((v * a) * r - v).lpNorm<Eigen::Infinity>() < 1e-12);
      for (int x = 0; x < 8; ++x) {
        for (int y = 0; y < 8; ++y) {
          if (r(x, y) > 0.0) CHECK(a(y, x) > 0.0);
        }
      }
    }
  }
  CHECK_THROWS(reverse_operator(Eigen::RowVector2d(-1, 2), Eigen::Matrix2d::Identity()));
}

TEST_CASE("policy agrees with a literal transcription") {
  SUBCASE("K4") { check_against_oracle(complete_graph(4)); }
  SUBCASE("C5") { check_against_oracle(cycle_graph(5)); }
  SUBCASE("C4 lazified") { check_against_oracle(cycle_graph(4)); }
  SUBCASE("hypercube 3") { check_against_oracle(hypercube(3)); }
  SUBCASE("star") { check_against_oracle(star_graph(4)); }
  SUBCASE("capacitated") { check_against_oracle(random_connected(7, 0.4, 4, 3)); }
}

TEST_CASE("flows are unit flows") {
  for (const Graph& g : {complete_graph(2), hypercube(3), grid_graph(3, 3),
                         random_connected(10, 0.2, 3, 8)}) {
    const WalkGraph w = lazify_if_needed(g);
    const RoutingPolicy policy = compute_policy(w);
    const int n = g.num_vertices();
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (i == j) continue;
        const CommodityFlow& f = policy.flow(i, j);
        Eigen::RowVectorXd expected = Eigen::RowVectorXd::Zero(n);
        expected[j] = 1.0;
        expected[i] = -1.0;
        CHECK((f.divergence(w.graph) - expected).lpNorm<Eigen::Infinity>() <= 1e-9);
        const Eigen::MatrixXd r = f.to_matrix(w.graph);
        CHECK((r + r.transpose()).lpNorm<Eigen::Infinity>() == 0.0);
      }
    }
  }
}

TEST_CASE("K2 carries the whole unit") {
  const RoutingPolicy policy = compute_policy(complete_graph(2));
  CHECK(policy.profile.k == 1);
  CHECK(policy.flow(0, 1).link_flow[0] == Approx(1.0));
  CHECK(policy.flow(1, 0).link_flow[0] == Approx(-1.0));
  Eigen::RowVector2d div = policy.flow(0, 1).divergence(policy.graph);
  CHECK(div[0] == Approx(-1.0));
  CHECK(div[1] == Approx(1.0));
  CHECK_THROWS_AS(policy.flow(0, 0), std::out_of_range);
  CHECK_THROWS_AS(policy.trace(0, 1), std::logic_error);
}

TEST_CASE("congestion") {
  SUBCASE("zero demand") {
    const Graph g = hypercube(3);
    const RoutingPolicy policy = compute_policy(g);
    const CongestionReport r = congestion(g, DemandMatrix::Zero(8, 8), policy);
    CHECK(r.max == 0.0);
    CHECK(r.per_link.size() == g.num_links());
  }
  SUBCASE("K2") {
    const Graph g = complete_graph(2);
    DemandMatrix d = DemandMatrix::Zero(2, 2);
    d(0, 1) = 1.0;
    CHECK(congestion(g, d, compute_policy(g)).max == Approx(1.0));
  }
  SUBCASE("frozen adjacency values") {
    struct Case {
      Graph g;
      double cong;
    };
    for (const Case& c : {Case{complete_graph(4), 28.0 / 9.0}, Case{cycle_graph(4), 93.0 / 32.0},
                          Case{complete_graph(2), 2.0}, Case{path_graph(3), 2.0}}) {
      const WalkGraph w = lazify_if_needed(c.g);
      const DemandMatrix d = adjacency_of(c.g);
      const CongestionReport r = congestion(c.g, d, compute_policy(w));
      const auto expected = oracle::splittable_congestion(w.graph, w.profile.k, d);
      for (int l = 0; l < c.g.num_links(); ++l) {
        const Link& link = c.g.links()[l];
        CHECK(r.per_link[l] == Approx(expected.at({link.u, link.v})).epsilon(1e-9));
        CHECK(r.per_link[l] == Approx(c.cong).epsilon(1e-9));
      }
    }
  }
  SUBCASE("capacitated graph against the oracle") {
    const Graph g = random_connected(8, 0.4, 5, 21);
    const WalkGraph w = lazify_if_needed(g);
    const DemandMatrix d = random_demand(8, 4);
    const CongestionReport r = congestion(g, d, compute_policy(w));
    const auto expected = oracle::splittable_congestion(w.graph, w.profile.k, d);
    for (int l = 0; l < g.num_links(); ++l) {
      const Link& link = g.links()[l];
      CHECK(r.per_link[l] == Approx(expected.at({link.u, link.v})).epsilon(1e-9));
    }
  }
  SUBCASE("scales linearly with demand") {
    const Graph g = grid_graph(2, 3);
    const RoutingPolicy policy = compute_policy(g);
    const DemandMatrix d = random_demand(6, 9);
    CHECK(congestion(g, 3.5 * d, policy).max == Approx(3.5 * congestion(g, d, policy).max));
  }
}

TEST_CASE("demand validation") {
  const Graph g = cycle_graph(5);
  const RoutingPolicy policy = compute_policy(g);
  DemandMatrix d = DemandMatrix::Zero(5, 5);
  d(0, 1) = -1.0;
  CHECK_THROWS_AS(congestion(g, d, policy), InputError);
  d(0, 1) = 0.0;
  d(2, 2) = 1.0;
  CHECK_THROWS_AS(congestion(g, d, policy), InputError);
  CHECK_THROWS_AS(congestion(g, DemandMatrix::Zero(4, 4), policy), InputError);
  d(2, 2) = std::nan("");
  CHECK_THROWS_AS(congestion(g, d, policy), InputError);
  CHECK_THROWS_AS(congestion(cycle_graph(6), DemandMatrix::Zero(6, 6), policy), InputError);
}

TEST_CASE("sequential congestion") {
  SUBCASE("K2 step loads") {
    const Graph g = complete_graph(2);
    const RoutingPolicy policy = compute_policy(g, {.keep_traces = true});
    DemandMatrix d = DemandMatrix::Zero(2, 2);
    d(0, 1) = 1.0;
    const auto steps = sequential_congestion(g, d, policy);
    REQUIRE(steps.size() == 2);
    // Lazy walk: half the mass crosses on the way out, the other half on the
    // way back in.
    CHECK(steps[0](0, 1) == Approx(0.5));
    CHECK(steps[1](0, 1) == Approx(0.5));
    CHECK(steps[0](0, 0) == 0.0);
  }
  SUBCASE("first step spreads evenly from the source") {
    const Graph g = random_connected(7, 0.4, 3, 31);
    const RoutingPolicy policy = compute_policy(g, {.keep_traces = true});
    DemandMatrix d = DemandMatrix::Zero(7, 7);
    d(2, 5) = 1.0;
    const auto steps = sequential_congestion(policy.graph, d, policy);
    for (const Arc& arc : policy.graph.arcs(2)) {
      if (arc.link >= 0) CHECK(steps[0](2, arc.to) == Approx(1.0 / policy.graph.degrees()[2]));
    }
  }
  SUBCASE("forward phase stays under the degree bound") {
    for (int t = 0; t < 10; ++t) {
      const Graph g = random_connected(8, 0.3, 3, 60 + t);
      const RoutingPolicy policy = compute_policy(g, {.keep_traces = true});
      const DemandMatrix d = random_demand(8, 80 + t, 0.5);
      const auto steps = sequential_congestion(policy.graph, d, policy);
      double bound = 0.0;
      for (int x = 0; x < 8; ++x) bound = std::max(bound, d.row(x).sum() / policy.graph.degrees()[x]);
      for (int s = 0; s < policy.profile.k; ++s) CHECK(steps[s].maxCoeff() <= bound + 1e-9);
    }
  }
  SUBCASE("sum dominates the flow") {
    const Graph g = cycle_graph(6);
    const RoutingPolicy policy = compute_policy(g, {.keep_traces = true});
    const DemandMatrix d = random_demand(6, 2);
    const auto steps = sequential_congestion(g, d, policy);
    Eigen::MatrixXd total = Eigen::MatrixXd::Zero(6, 6);
    for (const auto& s : steps) total += s + s.transpose();
    const CongestionReport r = congestion(g, d, policy);
    for (int l = 0; l < g.num_links(); ++l) {
      CHECK(r.per_link[l] <= total(g.links()[l].u, g.links()[l].v) + 1e-9);
    }
  }
  CHECK_THROWS_AS(sequential_congestion(complete_graph(3), DemandMatrix::Zero(3, 3),
                                        compute_policy(complete_graph(3))),
                  InputError);
}

TEST_CASE("rw_congestion") {
  const Graph g = cycle_graph(4);
  const auto steps = rw_congestion(Eigen::RowVector4d(1, 0, 0, 0), g, 2);
  REQUIRE(steps.size() == 2);
  CHECK(steps[0](0, 1) == 0.5);
  CHECK(steps[0](0, 3) == 0.5);
  CHECK(steps[0](1, 2) == 0.0);
  CHECK(steps[1](1, 2) == 0.25);
  CHECK(steps[1](1, 0) == 0.25);
  CHECK(steps[1](0, 1) == 0.0);
  const auto q3 = rw_congestion(Eigen::RowVectorXd::Unit(8, 5), hypercube(3), 1);
  for (int y : {4, 7, 1}) CHECK(q3[0](5, y) == Approx(1.0 / 3));
  for (const Graph& h : {complete_graph(4), random_connected(8, 0.4, 3, 2)}) {
    const auto pi_steps = rw_congestion(stationary_distribution(h), h, 4);
    const double expected = 1.0 / h.total_degree();
    for (const auto& step : pi_steps) {
      for (const Link& l : h.links()) {
        CHECK(step(l.u, l.v) == Approx(expected));
        CHECK(step(l.v, l.u) == Approx(expected));
      }
    }
  }
  CHECK_THROWS_AS(rw_congestion(Eigen::RowVector3d(1, 0, 0), g, 1), InputError);
  CHECK_THROWS_AS(rw_congestion(Eigen::RowVector4d(-1, 0, 0, 0), g, 1), InputError);
}

TEST_CASE("backward phase lands on the target") {
  const Graph g = random_connected(9, 0.3, 3, 12);
  const RoutingPolicy policy = compute_policy(g, {.keep_traces = true});
  const int k = policy.profile.k;
  for (int i = 0; i < 9; ++i) {
    for (int j = 0; j < 9; ++j) {
      if (i == j) continue;
      const auto& t = policy.trace(i, j);
      CHECK(t.states[2 * k][j] == Approx(1.0).epsilon(1e-9));
      CHECK(t.states[2 * k].sum() == Approx(1.0));
    }
  }
}

TEST_CASE("cycle_mass") {
  const Graph g = cycle_graph(4);
  CommodityFlow f{0, 2, Eigen::VectorXd::Zero(g.num_links())};
  CHECK(cycle_mass(f, g) == 0.0);
  // Links of C4: 0-1, 0-3, 1-2, 2-3. Circulate 0.25 around 0 -> 1 -> 2 -> 3 -> 0.
  f.link_flow << 0.25, -0.25, 0.25, 0.25;
  CHECK(cycle_mass(f, g) == Approx(1.0));
  // A path flow carries no cycle mass.
  f.link_flow << 1.0, 0.0, 1.0, 0.0;
  CHECK(cycle_mass(f, g) == Approx(0.0));
}

TEST_CASE("thread count does not change the policy") {
  const Graph g = random_connected(14, 0.2, 3, 17);
  set_thread_limit(1);
  const RoutingPolicy one = compute_policy(g);
  set_thread_limit(4);
  const RoutingPolicy four = compute_policy(g);
  set_thread_limit(0);
  for (std::size_t s = 0; s < one.flows.size(); ++s) {
    if (one.flows[s].link_flow.size() == 0) continue;
    CHECK(one.flows[s].link_flow == four.flows[s].link_flow);
  }
}

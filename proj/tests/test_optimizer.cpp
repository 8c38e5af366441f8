#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstddef>
#include <vector>

#include "discrimkit/optimizer.hpp"
#include "discrimkit/rng.hpp"
#include "support/test_helpers.hpp"

using namespace discrimkit;
using dk_test::make_matrix;

namespace {

GramMatrix gram_from(std::initializer_list<std::initializer_list<cplx>> rows) {
  return GramMatrix::from_matrix(HermitianMatrix(make_matrix(rows)));
}

// independent 2x2 oracle: dense grid over (gamma_1, gamma_2) with the
// closed-form feasibility test (1-g1)(1-g2) >= |x01|^2
double grid_best_2x2(double x01, const std::vector<double>& priors,
                     double step = 1e-3) {
  const double need = x01 * x01;
  double best = 0.0;
  for (double g1 = 0.0; g1 <= 1.0 + 1e-12; g1 += step)
    for (double g2 = 0.0; g2 <= 1.0 + 1e-12; g2 += step)
      if ((1.0 - g1) * (1.0 - g2) >= need)
        best = std::max(best, priors[0] * g1 + priors[1] * g2);
  return best;
}

}  // namespace

TEST_CASE("maximize_exact on orthogonal states reaches certainty") {
  const auto opt = maximize_exact(gram_from({{1.0, 0.0}, {0.0, 1.0}}),
                                  {0.5, 0.5});
  CHECK(opt.objective == Catch::Approx(1.0).margin(1e-10));
  CHECK(opt.gamma_star[0] == Catch::Approx(1.0).margin(1e-10));
  CHECK(opt.gamma_star[1] == Catch::Approx(1.0).margin(1e-10));
}

TEST_CASE("maximize_exact reproduces the zero-error limit for two states") {
  // overlap 0.5, two copies: powered off-diagonal 0.25
  const auto opt = maximize_exact(gram_from({{1.0, 0.25}, {0.25, 1.0}}),
                                  {0.5, 0.5});
  CHECK(opt.objective == Catch::Approx(0.75).margin(1e-8));
  CHECK(opt.gamma_star[0] == Catch::Approx(0.75).margin(1e-6));
  CHECK(opt.gamma_star[1] == Catch::Approx(0.75).margin(1e-6));
  CHECK(opt.objective ==
        Catch::Approx(idp_limit(TwoStateProblem(cplx{0.5, 0.0}, 2)))
            .margin(1e-8));
  CHECK(opt.objective ==
        Catch::Approx(grid_best_2x2(0.25, {0.5, 0.5})).margin(2e-3));
}

TEST_CASE("maximize_exact walks to a vertex under skewed priors") {
  const auto opt = maximize_exact(gram_from({{1.0, 0.5}, {0.5, 1.0}}),
                                  {0.9, 0.1});
  CHECK(opt.objective == Catch::Approx(0.675).margin(1e-8));
  CHECK(opt.gamma_star[0] == Catch::Approx(0.75).margin(1e-6));
  CHECK(opt.gamma_star[1] == Catch::Approx(0.0).margin(1e-6));
  CHECK(opt.objective ==
        Catch::Approx(grid_best_2x2(0.5, {0.9, 0.1})).margin(2e-3));
}

TEST_CASE("maximize_exact output satisfies the feasibility invariants") {
  for (std::size_t n : {2u, 3u, 5u}) {
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
      const auto inst = dk_test::feasible_instance(n, 500 * n + seed);
      const std::vector<double> priors(n, 1.0 / static_cast<double>(n));
      const auto opt = maximize_exact(inst.x, priors);
      INFO("n=" << n << " seed=" << seed);
      const auto verdict = exact_feasibility(inst.x, opt.gamma_star);
      CHECK(verdict.is_psd);
      bool some_below_one = false;
      for (double g : opt.gamma_star) {
        CHECK(g >= 0.0);
        CHECK(g <= 1.0 + 1e-12);
        if (g < 1.0 - 1e-9) some_below_one = true;
      }
      if (some_below_one) {
        CHECK(opt.boundary_eigenvalue >= -verdict.tolerance_used);
        CHECK(opt.boundary_eigenvalue <= 10.0 * verdict.tolerance_used);
      }
      // the uniform closed form is a feasible point, so it never wins
      const auto uni = maximize_exact_uniform(inst.x, priors);
      CHECK(opt.objective >= uni.objective - 1e-9);
    }
  }
}

TEST_CASE("maximize_exact is deterministic") {
  const auto inst = dk_test::feasible_instance(4, 777);
  const std::vector<double> priors{0.4, 0.3, 0.2, 0.1};
  const auto a = maximize_exact(inst.x, priors);
  const auto b = maximize_exact(inst.x, priors);
  CHECK(a.objective == b.objective);
  CHECK(a.gamma_star == b.gamma_star);
  CHECK(a.iterations == b.iterations);
}

TEST_CASE("maximize_exact rejects dependent states") {
  StateSet dup({{1.0, 0.0}, {1.0, 0.0}}, 1);
  CHECK_THROWS_WITH(maximize_exact(gram(dup), {0.5, 0.5}),
                    Catch::Matchers::ContainsSubstring("linearly dependent"));
  CHECK_THROWS_AS(maximize_exact(gram_from({{1.0, 0.5}, {0.5, 1.0}}), {1.0}),
                  invalid_input);
}

TEST_CASE("uniform sub-mode equals the smallest eigenvalue") {
  const auto g = gram_from(
      {{1.0, 0.5, 0.5}, {0.5, 1.0, 0.5}, {0.5, 0.5, 1.0}});
  const std::vector<double> priors(3, 1.0 / 3.0);
  const auto opt = maximize_exact_uniform(g, priors);
  REQUIRE(opt.gamma_star.size() == 3);
  for (double g_i : opt.gamma_star)
    CHECK(g_i == Catch::Approx(0.5).margin(1e-12));
  CHECK(opt.objective == Catch::Approx(0.5).margin(1e-12));
  CHECK(opt.boundary_eigenvalue == Catch::Approx(0.0).margin(1e-12));
  // orthogonal states cap at gamma = 1
  const auto capped =
      maximize_exact_uniform(gram_from({{1.0, 0.0}, {0.0, 1.0}}), {0.5, 0.5});
  CHECK(capped.objective == 1.0);
}

TEST_CASE("tradeoff endpoints recover the two closed-form limits") {
  for (double ov : {0.2, 0.5, 0.8}) {
    const TwoStateProblem prob(cplx{ov, 0.0}, 1);
    INFO("overlap=" << ov);
    const auto pts = tradeoff_scan(prob, 21);
    REQUIRE(pts.size() == 21);
    CHECK(pts.front().p_i == 0.0);
    CHECK(pts.front().p_d == Catch::Approx(helstrom(prob)).margin(1e-9));
    CHECK(pts.back().p_i == Catch::Approx(ov).margin(1e-15));
    CHECK(pts.back().p_d == Catch::Approx(idp_limit(prob)).margin(1e-9));
    CHECK(pts.back().p_e == Catch::Approx(0.0).margin(1e-9));
    double prev = 2.0;
    for (const auto& pt : pts) {
      CHECK(pt.slack >= -1e-10);
      CHECK(pt.p_d <= prev + 1e-12);
      prev = pt.p_d;
    }
  }
}

TEST_CASE("tradeoff_point handles rates beyond the overlap") {
  const TwoStateProblem prob(cplx{0.5, 0.0}, 1);
  const auto all_inconclusive = tradeoff_point(prob, 1.0);
  CHECK(all_inconclusive.p_d == Catch::Approx(0.0).margin(1e-10));
  CHECK(all_inconclusive.p_e == Catch::Approx(0.0).margin(1e-10));
  // between P_IP and 1 the scan rides the zero-error edge
  const auto mid = tradeoff_point(prob, 0.7);
  CHECK(mid.p_d == Catch::Approx(0.3).margin(1e-9));
  CHECK(mid.p_e == Catch::Approx(0.0).margin(1e-9));
  CHECK_THROWS_AS(tradeoff_scan(prob, 1), invalid_input);
  CHECK_THROWS_AS(tradeoff_scan(TwoStateProblem(cplx{0.3, 0.4}, 1), 5),
                  invalid_input);
}

TEST_CASE("two-outcome oracle reproduces the Helstrom limit") {
  for (double ov : {0.0, 0.4, 0.6}) {
    std::vector<std::vector<cplx>> amps{
        {1.0, 0.0}, {cplx{ov, 0.0}, cplx{std::sqrt(1.0 - ov * ov), 0.0}}};
    StateSet s(amps, 1);
    const auto res = brute_force_measurement_oracle(s, 2);
    INFO("overlap=" << ov);
    CHECK(res.value ==
          Catch::Approx(helstrom(TwoStateProblem(cplx{ov, 0.0}, 1)))
              .margin(1e-4));
    CHECK(res.samples_evaluated > 100000);
  }
}

TEST_CASE("two-outcome oracle tracks the copy count") {
  StateSet s({{1.0, 0.0}, {0.6, 0.8}}, 2);
  const auto res = brute_force_measurement_oracle(s, 2);
  CHECK(res.value == Catch::Approx(0.966476).margin(1e-4));
}

TEST_CASE("three-outcome oracle reproduces the zero-error limit") {
  for (double ov : {0.2, 0.5, 0.8}) {
    std::vector<std::vector<cplx>> amps{
        {1.0, 0.0}, {cplx{ov, 0.0}, cplx{std::sqrt(1.0 - ov * ov), 0.0}}};
    StateSet s(amps, 1);
    const auto res = brute_force_measurement_oracle(s, 3);
    INFO("overlap=" << ov);
    CHECK(res.value ==
          Catch::Approx(idp_limit(TwoStateProblem(cplx{ov, 0.0}, 1)))
              .margin(1e-4));
  }
}

TEST_CASE("oracle input validation") {
  StateSet three({{1.0, 0.0}, {0.0, 1.0}, {0.6, 0.8}}, 1);
  CHECK_THROWS_AS(brute_force_measurement_oracle(three, 2), invalid_input);
  StateSet two({{1.0, 0.0}, {0.0, 1.0}}, 1);
  CHECK_THROWS_AS(brute_force_measurement_oracle(two, 4), invalid_input);
}

TEST_CASE("relabeling states and priors relabels the optimum") {
  const auto inst = dk_test::feasible_instance(3, 4242);
  const std::vector<double> priors{0.5, 0.3, 0.2};
  const auto base = maximize_exact(inst.x, priors);
  // cycle 0 -> 1 -> 2 -> 0 applied to both the Gram matrix and the priors
  const std::size_t perm[3] = {1, 2, 0};
  ComplexMatrix relabeled(3, 3);
  std::vector<double> relabeled_priors(3);
  for (std::size_t a = 0; a < 3; ++a) {
    relabeled_priors[a] = priors[perm[a]];
    for (std::size_t b = 0; b < 3; ++b)
      relabeled(a, b) = inst.x.base()(perm[a], perm[b]);
  }
  const auto moved = maximize_exact(
      GramMatrix::from_matrix(HermitianMatrix(relabeled), inst.x.copies()),
      relabeled_priors);
  CHECK(moved.objective == Catch::Approx(base.objective).margin(1e-8));
  for (std::size_t a = 0; a < 3; ++a)
    CHECK(moved.gamma_star[a] ==
          Catch::Approx(base.gamma_star[perm[a]]).margin(1e-6));
}

TEST_CASE("uniform-prior two-state optimum tracks the zero-error limit") {
  rng::SplitMix64 rng(0x0BDD);
  for (int k = 0; k < 50; ++k) {
    const double ov = rng.next_in(0.02, 0.97);
    for (long long copies : {1LL, 2LL, 3LL}) {
      std::vector<std::vector<cplx>> amps{
          {1.0, 0.0}, {cplx{ov, 0.0}, cplx{std::sqrt(1.0 - ov * ov), 0.0}}};
      const auto opt = maximize_exact(gram(StateSet(amps, copies)),
                                      {0.5, 0.5});
      INFO("overlap=" << ov << " copies=" << copies);
      CHECK(opt.objective ==
            Catch::Approx(idp_limit(TwoStateProblem(cplx{ov, 0.0}, copies)))
                .margin(1e-6));
    }
  }
}

TEST_CASE("unsaturated coordinates of the optimum sit on the boundary") {
  // bumping any gamma_i below the cap by 1e-6 must break feasibility
  std::vector<GramMatrix> instances{
      gram_from({{1.0, 0.25}, {0.25, 1.0}}),
      gram_from({{1.0, 0.5}, {0.5, 1.0}}),
      dk_test::feasible_instance(3, 31).x,
      dk_test::feasible_instance(4, 32).x,
  };
  std::vector<std::vector<double>> prior_sets{
      {0.5, 0.5}, {0.9, 0.1}, {0.5, 0.3, 0.2}, {0.4, 0.3, 0.2, 0.1}};
  for (std::size_t c = 0; c < instances.size(); ++c) {
    const auto opt = maximize_exact(instances[c], prior_sets[c]);
    for (std::size_t i = 0; i < opt.gamma_star.size(); ++i) {
      if (opt.gamma_star[i] >= 1.0 - 1e-6) continue;
      std::vector<double> bumped = opt.gamma_star;
      bumped[i] += 1e-6;
      INFO("instance=" << c << " coordinate=" << i);
      CHECK_FALSE(exact_feasibility(instances[c], bumped).is_psd);
    }
  }
}

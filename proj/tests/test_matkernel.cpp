#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "discrimkit/eig.hpp"
#include "discrimkit/matrix.hpp"
#include "discrimkit/psd.hpp"
#include "discrimkit/tolerances.hpp"
#include "support/test_helpers.hpp"

using namespace discrimkit;
using dk_test::make_matrix;
using dk_test::random_complex;
using dk_test::random_hermitian;
using dk_test::random_psd;

namespace {

// Independent 2x2 oracle: roots of the characteristic polynomial of a real
// symmetric [[a, c], [c, b]].
std::pair<double, double> char_poly_roots_2x2(double a, double b, double c) {
  const double mean = 0.5 * (a + b);
  const double disc = std::sqrt(0.25 * (a - b) * (a - b) + c * c);
  return {mean - disc, mean + disc};
}

double reconstruction_error(const HermitianMatrix& h,
                            const EigenDecomposition& ed) {
  return frobenius_distance(h.entries(), ed.reconstruct());
}

double gram_identity_error(const ComplexMatrix& v) {
  const ComplexMatrix g = v.adjoint() * v;
  return frobenius_distance(g, ComplexMatrix::identity(v.cols()));
}

}  // namespace

TEST_CASE("HermitianMatrix symmetrizes and records asymmetry") {
  ComplexMatrix raw = make_matrix({{1.0, cplx{0.5, 1e-10}}, {0.5, 2.0}});
  HermitianMatrix h(raw);
  CHECK(h(0, 1) == std::conj(h(1, 0)));
  CHECK(h(0, 0).imag() == 0.0);
  CHECK(h.asymmetry_norm() > 0.0);
  CHECK(h.asymmetry_norm() < 1e-9);
}

TEST_CASE("HermitianMatrix rejects gross asymmetry") {
  ComplexMatrix raw = make_matrix({{1.0, 0.9}, {0.5, 2.0}});
  CHECK_THROWS_AS(HermitianMatrix(raw), invalid_input);
}

TEST_CASE("HermitianMatrix rejects non-square input") {
  CHECK_THROWS_AS(HermitianMatrix(ComplexMatrix(2, 3)), invalid_input);
}

TEST_CASE("eig_hermitian on 2x2 identity") {
  HermitianMatrix h(ComplexMatrix::identity(2));
  const auto ed = eig_hermitian(h);
  CHECK(ed.eigenvalues[0] == Catch::Approx(1.0).margin(1e-14));
  CHECK(ed.eigenvalues[1] == Catch::Approx(1.0).margin(1e-14));
  CHECK(gram_identity_error(ed.eigenvectors) < 1e-12);
}

TEST_CASE("eig_hermitian on [[1,2],[2,1]]") {
  HermitianMatrix h(make_matrix({{1.0, 2.0}, {2.0, 1.0}}));
  const auto ed = eig_hermitian(h);
  CHECK(ed.eigenvalues[0] == Catch::Approx(-1.0).margin(1e-12));
  CHECK(ed.eigenvalues[1] == Catch::Approx(3.0).margin(1e-12));
}

TEST_CASE("eig_hermitian matches characteristic-polynomial roots") {
  // [[1, 0.36], [0.36, 1]] -> 1 -/+ 0.36
  const auto [lo, hi] = char_poly_roots_2x2(1.0, 1.0, 0.36);
  REQUIRE(lo == Catch::Approx(0.64).margin(1e-15));
  REQUIRE(hi == Catch::Approx(1.36).margin(1e-15));
  HermitianMatrix h(make_matrix({{1.0, 0.36}, {0.36, 1.0}}));
  const auto ed = eig_hermitian(h);
  CHECK(ed.eigenvalues[0] == Catch::Approx(lo).margin(1e-12));
  CHECK(ed.eigenvalues[1] == Catch::Approx(hi).margin(1e-12));
}

TEST_CASE("eig_hermitian handles 1x1 and diagonal matrices") {
  HermitianMatrix one(make_matrix({{cplx{-2.5, 0.0}}}));
  const auto ed1 = eig_hermitian(one);
  CHECK(ed1.eigenvalues[0] == -2.5);
  CHECK(std::abs(ed1.eigenvectors(0, 0)) == Catch::Approx(1.0));

  HermitianMatrix diag(make_matrix(
      {{3.0, 0.0, 0.0}, {0.0, -1.0, 0.0}, {0.0, 0.0, 2.0}}));
  const auto ed3 = eig_hermitian(diag);
  CHECK(ed3.eigenvalues == std::vector<double>{-1.0, 2.0, 3.0});
  CHECK(reconstruction_error(diag, ed3) < 1e-13);
}

TEST_CASE("eig_hermitian round-trips random Hermitian matrices") {
  for (std::size_t n : {1u, 2u, 3u, 5u, 8u, 13u, 21u}) {
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
      const HermitianMatrix h = random_hermitian(n, 1000 * n + seed);
      const auto ed = eig_hermitian(h);
      const double scale = std::max(1.0, h.frobenius_norm());
      INFO("n=" << n << " seed=" << seed);
      REQUIRE(std::is_sorted(ed.eigenvalues.begin(), ed.eigenvalues.end()));
      CHECK(reconstruction_error(h, ed) <= 1e-10 * scale);
      CHECK(gram_identity_error(ed.eigenvectors) <= 1e-10);
    }
  }
}

TEST_CASE("eig_hermitian handles degenerate spectra") {
  // clustered / repeated eigenvalues
  HermitianMatrix id8(ComplexMatrix::identity(8));
  const auto ed = eig_hermitian(id8);
  for (double lam : ed.eigenvalues) CHECK(lam == Catch::Approx(1.0).margin(1e-13));
  CHECK(gram_identity_error(ed.eigenvectors) < 1e-12);

  // rank-1 projector (one nonzero eigenvalue, rest exactly degenerate at 0)
  const ComplexMatrix g = random_complex(6, 1, 42);
  const HermitianMatrix p(g * g.adjoint());
  const auto edp = eig_hermitian(p);
  CHECK(reconstruction_error(p, edp) < 1e-11 * std::max(1.0, p.frobenius_norm()));
  for (std::size_t k = 0; k + 1 < edp.eigenvalues.size(); ++k)
    CHECK(std::abs(edp.eigenvalues[k]) < 1e-11 * p.frobenius_norm());
}

TEST_CASE("eig_hermitian is bit-deterministic") {
  const HermitianMatrix h = random_hermitian(7, 99);
  const auto a = eig_hermitian(h);
  const auto b = eig_hermitian(h);
  REQUIRE(a.eigenvalues.size() == b.eigenvalues.size());
  for (std::size_t k = 0; k < a.eigenvalues.size(); ++k)
    CHECK(a.eigenvalues[k] == b.eigenvalues[k]);
  for (std::size_t i = 0; i < 7; ++i)
    for (std::size_t j = 0; j < 7; ++j)
      CHECK(a.eigenvectors(i, j) == b.eigenvectors(i, j));
}

TEST_CASE("psd_check verdicts") {
  SECTION("identity is PSD with min eigenvalue 1") {
    const auto v = psd_check(HermitianMatrix(ComplexMatrix::identity(2)), 1.0);
    CHECK(v.is_psd);
    CHECK(v.min_eigenvalue == Catch::Approx(1.0).margin(1e-13));
    CHECK(v.tolerance_used == kRelPsdTol);
    CHECK_FALSE(v.on_boundary());
  }
  SECTION("[[1,2],[2,1]] is indefinite with min eigenvalue -1") {
    const auto v =
        psd_check(HermitianMatrix(make_matrix({{1.0, 2.0}, {2.0, 1.0}})), 1.0);
    CHECK_FALSE(v.is_psd);
    CHECK(v.min_eigenvalue == Catch::Approx(-1.0).margin(1e-13));
  }
  SECTION("zero matrix sits on the PSD boundary") {
    const auto v = psd_check(HermitianMatrix(ComplexMatrix(3, 3)), 1.0);
    CHECK(v.is_psd);
    CHECK(v.min_eigenvalue == Catch::Approx(0.0).margin(1e-15));
    CHECK(v.on_boundary());
  }
  SECTION("scale must be positive") {
    CHECK_THROWS_AS(
        psd_check(HermitianMatrix(ComplexMatrix::identity(2)), 0.0),
        invalid_input);
  }
}

TEST_CASE("psd_factor base cases") {
  SECTION("zero matrix factors with zero columns") {
    const auto f = psd_factor(HermitianMatrix(ComplexMatrix(3, 3)));
    CHECK(f.cols() == 0);
  }
  SECTION("identity factors into orthonormal columns") {
    const auto f = psd_factor(HermitianMatrix(ComplexMatrix::identity(2)));
    REQUIRE(f.cols() == 2);
    CHECK(frobenius_distance(f * f.adjoint(), ComplexMatrix::identity(2)) <
          1e-12);
  }
  SECTION("rank-1 matrix gives a single column") {
    const HermitianMatrix a(make_matrix({{0.25, 0.25}, {0.25, 0.25}}));
    const auto f = psd_factor(a);
    REQUIRE(f.cols() == 1);
    CHECK(std::abs(f(0, 0)) == Catch::Approx(0.5).margin(1e-12));
    CHECK(std::abs(f(1, 0)) == Catch::Approx(0.5).margin(1e-12));
    CHECK(frobenius_distance(f * f.adjoint(), a.entries()) <=
          1e-9 * std::max(1.0, a.frobenius_norm()));
  }
  SECTION("indefinite input is rejected with the eigenvalue in the message") {
    const HermitianMatrix bad(make_matrix({{1.0, 2.0}, {2.0, 1.0}}));
    try {
      psd_factor(bad);
      FAIL("expected invalid_input");
    } catch (const invalid_input& e) {
      CHECK(std::string(e.what()).find("-1") != std::string::npos);
    }
  }
}

TEST_CASE("psd_factor reconstructs random PSD matrices") {
  for (std::size_t n : {2u, 3u, 4u, 6u, 9u}) {
    for (std::size_t rank : {std::size_t{1}, n / 2 + 1, n}) {
      const HermitianMatrix a = random_psd(n, rank, 7 * n + rank);
      const auto verdict = psd_check(a);
      INFO("n=" << n << " rank=" << rank);
      REQUIRE(verdict.is_psd);
      const auto f = psd_factor(a);
      CHECK(f.cols() <= n);
      CHECK(frobenius_distance(f * f.adjoint(), a.entries()) <=
            1e-9 * std::max(1.0, a.frobenius_norm()));
    }
  }
}

TEST_CASE("psd_factor column count equals numerical rank") {
  // rank-2 PSD embedded in dimension 5
  const HermitianMatrix a = random_psd(5, 2, 314);
  const auto f = psd_factor(a);
  CHECK(f.cols() == 2);
}

TEST_CASE("adding 10*tolerance*I never downgrades a PSD verdict") {
  for (std::uint64_t seed = 0; seed < 24; ++seed) {
    // mix of indefinite, near-boundary and PSD inputs
    HermitianMatrix a = seed % 3 == 0 ? random_hermitian(4, seed)
                                      : random_psd(4, 2 + seed % 3, seed);
    const double scale = default_psd_scale(a);
    const auto before = psd_check(a, scale);
    ComplexMatrix shifted = a.entries();
    const double eps = 10.0 * before.tolerance_used;
    for (std::size_t i = 0; i < 4; ++i) shifted(i, i) += eps;
    const auto after = psd_check(HermitianMatrix(shifted), scale);
    INFO("seed=" << seed);
    if (before.is_psd) CHECK(after.is_psd);
  }
}

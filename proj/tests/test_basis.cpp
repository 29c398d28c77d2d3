#include "doctest.h"

#include "oracles.hpp"
#include "smoothridge/basis.hpp"

#include <algorithm>
#include <cmath>

using namespace smoothridge;
using doctest::Approx;

TEST_CASE("grid centers in 1D include both endpoints") {
  const Matrix c = build_grid_centers({{-2.0, 2.0}}, 5);
  REQUIRE(c.rows() == 5);
  for (int k = 0; k < 5; ++k) CHECK(c(k, 0) == Approx(-2.0 + k));
  CHECK_THROWS_AS(build_grid_centers({{-2.0, 2.0}}, 1), ConfigError);
}

TEST_CASE("grid centers in 2D are row-major") {
  const Matrix c = build_grid_centers({{0.0, 1.0}, {0.0, 1.0}}, 2);
  REQUIRE(c.rows() == 4);
  CHECK(c(0, 0) == 0.0);
  CHECK(c(0, 1) == 0.0);
  CHECK(c(1, 0) == 0.0);
  CHECK(c(1, 1) == 1.0);
  CHECK(c(2, 0) == 1.0);
  CHECK(c(2, 1) == 0.0);
  CHECK(c(3, 0) == 1.0);
  CHECK(c(3, 1) == 1.0);
}

TEST_CASE("rbf width scales the grid spacing") {
  const Matrix c = build_grid_centers({{0.0, 1.0}}, 11);
  CHECK(rbf_width(c, 1.0) == Approx(0.1));
  CHECK(rbf_width(c, 2.0) == Approx(0.2));
  CHECK_THROWS_AS(rbf_width(c, 0.0), ConfigError);
  CHECK_THROWS_AS(rbf_width(c, -1.0), ConfigError);
}

TEST_CASE("basis spec invariants") {
  Matrix dup(2, 1);
  dup << 0.5, 0.5;
  CHECK_THROWS_AS(BasisSpec(dup, 0.1, {{0.0, 1.0}}, {2}), ConfigError);
  CHECK_THROWS_AS(BasisSpec(Matrix::Zero(1, 1), 0.1, {{0.0, 1.0}}, {1}), ConfigError);
  Matrix ok(2, 1);
  ok << 0.0, 1.0;
  CHECK_THROWS_AS(BasisSpec(ok, 0.0, {{0.0, 1.0}}, {2}), ConfigError);
  CHECK_NOTHROW(BasisSpec(ok, 0.5, {{0.0, 1.0}}, {2}));
}

TEST_CASE("design matrix analytic entries") {
  const BasisSpec spec = make_grid_basis({{-2.0, 2.0}}, 5);
  Matrix xs(2, 1);
  xs << 0.0, 1.0 + spec.width();
  const DesignMatrix d = design_matrix(spec, xs);
  CHECK(d.phi(0, 2) == 1.0);
  CHECK(d.phi(1, 3) == Approx(std::exp(-0.5)).epsilon(1e-14));
  CHECK(d.phi(1, 3) == Approx(0.60653).epsilon(1e-5));
}

TEST_CASE("design matrix matches an element-wise oracle") {
  auto g = oracle::rng(7);
  Matrix xs(7, 1);
  for (int i = 0; i < 7; ++i) xs(i, 0) = oracle::uniform(g, -1.0, 3.0);
  const BasisSpec spec = make_grid_basis({{-1.0, 3.0}}, 4, 1.3);
  const Matrix ref = oracle::rbf_matrix(xs, spec.centers(), spec.width());
  const Matrix phi = design_matrix(spec, xs).phi;
  CHECK((phi - ref).cwiseAbs().maxCoeff() < 1e-15);
  CHECK((phi.array() > 0.0).all());
  CHECK((phi.array() <= 1.0).all());
}

TEST_CASE("row permutation equivariance") {
  auto g = oracle::rng(11);
  Matrix xs(9, 2);
  for (int i = 0; i < 9; ++i) xs.row(i) << oracle::uniform(g, 0, 1), oracle::uniform(g, 0, 1);
  const BasisSpec spec = make_grid_basis({{0.0, 1.0}, {0.0, 1.0}}, 3);
  Eigen::PermutationMatrix<Eigen::Dynamic> perm(9);
  perm.setIdentity();
  std::shuffle(perm.indices().data(), perm.indices().data() + 9, g);
  const Matrix a = design_matrix(spec, perm * xs).phi;
  const Matrix b = perm * design_matrix(spec, xs).phi;
  CHECK(a == b);
}

TEST_CASE("adjacency edge counts and connectivity") {
  for (int m : {2, 5, 30}) {
    const Adjacency a = Adjacency::chain(m);
    CHECK(a.edges().size() == static_cast<std::size_t>(m - 1));
    CHECK(a.connected());
    CHECK(a.lattice_degree() == 2);
  }
  for (int gsize : {2, 3, 10}) {
    const Adjacency a = Adjacency::grid(gsize, gsize);
    CHECK(a.edges().size() == static_cast<std::size_t>(2 * gsize * (gsize - 1)));
    CHECK(a.connected());
    CHECK(a.lattice_degree() == 4);
  }
  const BasisSpec spec = make_grid_basis({{0.0, 1.0}, {0.0, 1.0}}, 4);
  CHECK(spec.adjacency().edges().size() == 24u);
}

TEST_CASE("laplacian identities") {
  auto g = oracle::rng(3);
  const Adjacency a = Adjacency::chain(8);
  const Matrix d = a.laplacian();
  CHECK((d - oracle::chain_difference(8)).cwiseAbs().maxCoeff() == 0.0);
  CHECK(d.rowwise().sum().cwiseAbs().maxCoeff() == 0.0);
  CHECK((d - d.transpose()).cwiseAbs().maxCoeff() == 0.0);
  const Vector lam = oracle::normal_vec(g, 8);
  double direct = 0.0;
  for (int j = 1; j < 8; ++j) direct += (lam(j) - lam(j - 1)) * (lam(j) - lam(j - 1));
  CHECK(lam.dot(d * lam) == Approx(direct).epsilon(1e-13));
  Eigen::SelfAdjointEigenSolver<Matrix> es(Adjacency::grid(4, 4).laplacian());
  CHECK(es.eigenvalues().minCoeff() > -1e-12);
}

TEST_CASE("every column is exercised when centers lie in the data range") {
  const BasisSpec spec = make_grid_basis({{0.0, 1.0}}, 30);
  Matrix xs(50, 1);
  for (int i = 0; i < 50; ++i) xs(i, 0) = i / 49.0;
  const Matrix phi = design_matrix(spec, xs).phi;
  CHECK(phi.colwise().maxCoeff().minCoeff() > 0.5);
}

TEST_CASE("predict evaluates the expansion") {
  const BasisSpec spec = make_grid_basis({{0.0, 1.0}}, 3);
  Vector beta(3);
  beta << 1.0, -2.0, 0.5;
  Matrix xs(1, 1);
  xs << 0.5;
  const double expected = std::exp(-0.25 / (2 * 0.25)) * 1.0 - 2.0 + 0.5 * std::exp(-0.25 / (2 * 0.25));
  CHECK(predict(spec, beta, xs)(0) == Approx(expected).epsilon(1e-14));
  CHECK_THROWS_AS(predict(spec, Vector::Zero(2), xs), ConfigError);
}

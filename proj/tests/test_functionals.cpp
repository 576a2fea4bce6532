#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "fracgfm/functionals.hpp"
#include "fracgfm/rng.hpp"

using namespace fracgfm;

namespace {

const double kRoot2 = std::sqrt(2.0);

FractionalProblem single_edge(DenseMatrix v, DiagonalMetric q = DiagonalMetric::identity(2)) {
  return FractionalProblem(EdgeIncidence(WeightedDigraph(2, {{0, 1, 1.0}})), std::move(q), std::move(v));
}

// Random orthonormal n x m basis via Gram-Schmidt on Gaussian columns.
DenseMatrix random_basis(std::size_t n, std::size_t m, Rng& rng) {
  DenseMatrix v(n, m);
  for (std::size_t j = 0; j < m; ++j) {
    Vector c(n);
    for (double& x : c) x = rng.normal();
    for (int pass = 0; pass < 2; ++pass)
      for (std::size_t k = 0; k < j; ++k) {
        const Vector prev = v.column(k);
        axpy(-dot(prev, c), prev, c);
      }
    const double nc = norm2(c);
    for (double& x : c) x /= nc;
    v.set_column(j, c);
  }
  return v;
}

Vector random_vector(std::size_t m, Rng& rng) {
  Vector x(m);
  for (double& v : x) v = rng.normal();
  return x;
}

FractionalProblem random_problem(std::uint64_t seed, std::size_t m, bool directed, bool degree) {
  Rng rng(seed);
  WeightedDigraph g = directed ? generate_drgg(10, seed) : generate_rgg(10, seed);
  for (std::uint64_t s = seed + 1000; g.has_isolated_vertex(); ++s) g = directed ? generate_drgg(10, s) : generate_rgg(10, s);
  const DiagonalMetric q = degree ? degree_metric(g) : DiagonalMetric::identity(10);
  return FractionalProblem(EdgeIncidence(g), q, random_basis(10, m, rng));
}

// Dense oracle for T(Vx): explicit lift followed by the pairwise sum.
double dense_t(const WeightedDigraph& g, const DenseMatrix& v, const Vector& x) {
  Vector y(v.rows(), 0.0);
  for (std::size_t i = 0; i < v.rows(); ++i)
    for (std::size_t j = 0; j < v.cols(); ++j) y[i] += v(i, j) * x[j];
  double t = 0.0;
  for (const auto& e : g.edges()) t += e.w * std::max(0.0, y[e.i] - y[e.j]);
  return t;
}

}  // namespace

TEST_CASE("dv_eval examples") {
  const EdgeIncidence single(WeightedDigraph(2, {{0, 1, 2.0}}));
  CHECK(dv_eval(single, Vector{3, 1}) == 4.0);
  CHECK(dv_eval(single, Vector{3, 1}, true) == 0.0);
  CHECK(dv_eval(single, Vector{1, 3}, true) == 4.0);
  CHECK_THROWS_AS(dv_eval(single, Vector{1, 2, 3}), std::invalid_argument);

  const EdgeIncidence sym(generate_rgg(12, 4));
  CHECK(dv_eval(sym, Vector(12, 0.7)) == 0.0);

  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const EdgeIncidence inc(generate_drgg(12, static_cast<std::uint64_t>(trial)));
    const Vector y = random_vector(12, rng);
    Vector neg(y);
    for (double& v : neg) v = -v;
    CHECK(dv_eval(inc, y, true) == dv_eval(inc, neg));
  }
}

TEST_CASE("evaluate on the single-edge problem") {
  const FractionalProblem p = single_edge(DenseMatrix::identity(2));
  const RatioValue a = evaluate(p, Vector{1, 0});
  CHECK(a.t == 1.0);
  CHECK(a.b == 1.0);
  CHECK(a.e == 1.0);

  const RatioValue b = evaluate(p, Vector{1 / kRoot2, -1 / kRoot2});
  CHECK(std::abs(b.t - kRoot2) < 1e-15);
  CHECK(std::abs(b.b - 1.0) < 1e-15);
  CHECK(std::abs(b.e - kRoot2) < 1e-15);

  CHECK_THROWS_AS(evaluate(p, Vector{0, 0}), std::invalid_argument);
  CHECK_THROWS_AS(evaluate(p, Vector{1}), std::invalid_argument);
}

TEST_CASE("FractionalProblem validation") {
  CHECK_THROWS_AS(single_edge(DenseMatrix(2, 2, {1, 0, 0, 2})), std::invalid_argument);
  CHECK_THROWS_AS(single_edge(DenseMatrix::identity(3)), std::invalid_argument);
  CHECK_THROWS_AS(FractionalProblem(EdgeIncidence(WeightedDigraph(2, {{0, 1, 1.0}})), DiagonalMetric::identity(3),
                                    DenseMatrix::identity(2)),
                  std::invalid_argument);
  const FractionalProblem p = single_edge(DenseMatrix::identity(2));
  CHECK(p.dim() == 2);
  CHECK(p.edge_count() == 1);
  CHECK(std::abs(p.norm_cv() - kRoot2) < 1e-12);
}

TEST_CASE("positive homogeneity and triangle inequality") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const FractionalProblem p = random_problem(seed, 6, seed % 2 == 0, seed % 3 == 0);
    Rng rng(seed + 100);
    const Vector x = random_vector(6, rng);
    const Vector y = random_vector(6, rng);
    for (double alpha : {0.0, 0.3, 2.5, 17.0}) {
      const Vector ax = scaled(x, alpha);
      const double t = p.numerator(x);
      CHECK(std::abs(p.numerator(ax) - alpha * t) <= 1e-12 * (1.0 + alpha * t));
      CHECK(std::abs(p.denominator(ax) - alpha * p.denominator(x)) <= 1e-12 * (1.0 + alpha * p.denominator(x)));
      if (alpha > 0.0) CHECK(std::abs(evaluate(p, ax).e - evaluate(p, x).e) <= 1e-12 * (1.0 + evaluate(p, x).e));
    }
    Vector sum(x);
    axpy(1.0, y, sum);
    CHECK(p.numerator(sum) <= p.numerator(x) + p.numerator(y) + 1e-12);
    const RatioValue r = evaluate(p, x);
    CHECK(std::abs(r.e * r.b - r.t) <= 1e-12 * (1.0 + r.t));
  }
}

TEST_CASE("numerator matches the dense oracle") {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    Rng rng(seed);
    const WeightedDigraph g = seed % 2 ? generate_rgg(10, seed) : generate_drgg(10, seed);
    const DenseMatrix v = random_basis(10, 7, rng);
    const FractionalProblem p(EdgeIncidence(g), DiagonalMetric::identity(10), v);
    const Vector x = random_vector(7, rng);
    const double oracle = dense_t(g, v, x);
    CHECK(std::abs(p.numerator(x) - oracle) <= 1e-12 * (1.0 + oracle));
  }
}

TEST_CASE("b_gradient") {
  const FractionalProblem id = single_edge(DenseMatrix::identity(2));
  const Vector g1 = b_gradient(id, Vector{0.6, 0.8});
  CHECK(std::abs(g1[0] - 0.6) < 1e-15);
  CHECK(std::abs(g1[1] - 0.8) < 1e-15);

  const FractionalProblem w = single_edge(DenseMatrix::identity(2), DiagonalMetric({4.0, 1.0}));
  CHECK(w.denominator(Vector{1, 0}) == 2.0);
  const Vector g2 = b_gradient(w, Vector{1, 0});
  CHECK(g2 == Vector{2.0, 0.0});
  CHECK_THROWS_AS(b_gradient(w, Vector{0, 0}), std::invalid_argument);

  Rng rng(77);
  int points = 0;
  for (std::uint64_t seed = 1; points < 50; ++seed) {
    const FractionalProblem p = random_problem(seed, 5, seed % 2 == 0, true);
    for (int j = 0; j < 5 && points < 50; ++j, ++points) {
      const Vector x = random_vector(5, rng);
      const Vector grad = b_gradient(p, x);
      const double h = 1e-6;
      for (std::size_t i = 0; i < 5; ++i) {
        Vector xp(x), xm(x);
        xp[i] += h;
        xm[i] -= h;
        const double fd = (p.denominator(xp) - p.denominator(xm)) / (2 * h);
        CHECK(std::abs(fd - grad[i]) <= 1e-6);
      }
      // Convexity certificate.
      const Vector y = random_vector(5, rng);
      Vector diff(y);
      axpy(-1.0, x, diff);
      CHECK(p.denominator(y) - p.denominator(x) - dot(grad, diff) >= -1e-12);
    }
  }
}

TEST_CASE("zero variation on a connected symmetric graph means a constant signal") {
  // Community graphs are symmetric and connected by construction.
  const WeightedDigraph g = generate_community(8, 2, 1.0, 0.3, 2);
  REQUIRE(g.is_symmetric());
  REQUIRE(g.is_connected());
  const FractionalProblem p(EdgeIncidence(g), DiagonalMetric::identity(8), DenseMatrix::identity(8));
  CHECK(p.numerator(Vector(8, -1.3)) == 0.0);
  Rng rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    Vector x = random_vector(8, rng);
    const Vector c(8, 1.0);
    const double mean = dot(x, c) / 8.0;
    // Any non-constant signal has a positive variation.
    if (std::abs(x[0] - mean) > 1e-6) CHECK(p.numerator(x) > 0.0);
    // A small non-constant perturbation of a constant keeps T positive.
    Vector near(8, 2.0);
    near[static_cast<std::size_t>(trial % 8)] += 1e-3;
    CHECK(p.numerator(near) > 0.0);
  }
}

TEST_CASE("column_stats") {
  const FractionalProblem p = single_edge(DenseMatrix(2, 1, {1 / kRoot2, -1 / kRoot2}));
  const ColumnStats& s = p.column_stats();
  CHECK(std::abs(s.forward[0] - kRoot2) < 1e-15);
  CHECK(s.reversed[0] == 0.0);
  CHECK(s.forward_argmin == 0);
  CHECK(s.reversed_argmin == 0);

  const WeightedDigraph sym = generate_rgg(10, 3);
  Rng rng(3);
  const FractionalProblem ps(EdgeIncidence(sym), DiagonalMetric::identity(10), random_basis(10, 6, rng));
  for (std::size_t j = 0; j < 6; ++j) CHECK(std::abs(ps.column_stats().forward[j] - ps.column_stats().reversed[j]) < 1e-12);

  // Second column is constant, hence in the kernel of C.
  DenseMatrix v(3, 2);
  v(0, 0) = 1 / kRoot2;
  v(1, 0) = -1 / kRoot2;
  for (std::size_t i = 0; i < 3; ++i) v(i, 1) = 1 / std::sqrt(3.0);
  const FractionalProblem pk(EdgeIncidence(WeightedDigraph(3, {{0, 1, 1.0}, {1, 2, 1.0}})), DiagonalMetric::identity(3), v);
  CHECK(std::abs(pk.column_stats().forward[1]) < 1e-15);
  CHECK(std::abs(pk.column_stats().reversed[1]) < 1e-15);
  CHECK(pk.column_stats().forward_argmin == 1);
  CHECK(std::abs(pk.column_stats().reversed[0] - 1 / kRoot2) < 1e-15);
  CHECK(pk.column_stats().reversed_argmin == 1);
  CHECK(column_stats(pk).forward == pk.column_stats().forward);
}

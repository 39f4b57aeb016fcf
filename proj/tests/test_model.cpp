#include <cmath>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "plancluster/errors.hpp"
#include "plancluster/model.hpp"

using namespace plancluster;

namespace {

PiecewisePolynomial knots(std::vector<double> t, std::vector<double> v) {
  return from_samples(t, v);
}

MotionPlan single(PiecewisePolynomial pp, double t_f) {
  return MotionPlan("p", t_f, {{std::move(pp), DimensionBounds(-10, 10)}}, {});
}

}  // namespace

TEST_CASE("evaluate") {
  const PiecewisePolynomial cube({0.0, 1.0}, {{0, 0, 0, 1}}, 3);
  CHECK(cube.evaluate(0.5) == 0.125);
  const PiecewisePolynomial lin({0.0, 1.0}, {{2, -1}}, 1);
  CHECK(lin.evaluate(0.0) == 2.0);
  CHECK(knots({0, 1}, {-1, 1}).evaluate(0.75) == 0.5);
}

TEST_CASE("evaluate uses the right segment at breakpoints") {
  const PiecewisePolynomial pp({0.0, 1.0, 2.0}, {{0, 1}, {1, 5}}, 1);
  CHECK(pp.segment_at(1.0) == 1);
  CHECK(pp.segment_at(2.0) == 1);
  CHECK(pp.evaluate(2.0) == 6.0);
}

TEST_CASE("evaluate outside the domain is a domain error") {
  const PiecewisePolynomial pp({0.0, 1.0}, {{0, 1}}, 1);
  CHECK_THROWS_AS(pp.evaluate(-0.1), DomainError);
  CHECK_THROWS_AS(pp.evaluate(1.1), DomainError);
  CHECK_THROWS_AS(pp.derivative_at(2.0), DomainError);
}

TEST_CASE("derivative_at") {
  const PiecewisePolynomial cube({0.0, 1.0}, {{0, 0, 0, 1}}, 3);
  CHECK(cube.derivative_at(0.5) == 0.75);
  CHECK(knots({0, 0.5, 1}, {0, 1, 1}).derivative_at(0.5) == 1.0);
  const PiecewisePolynomial lin({0.0, 1.0}, {{5, -3}}, 1);
  CHECK(lin.derivative_at(0.0) == -3.0);
  CHECK(lin.derivative_at(0.3) == -3.0);
  CHECK(lin.derivative_at(1.0) == -3.0);
}

TEST_CASE("construction validates the layout") {
  CHECK_THROWS_AS(PiecewisePolynomial({0.0, 1.0}, {{0, 1}}, 2), FormatError);
  CHECK_THROWS_AS(PiecewisePolynomial({0.0, 1.0}, {{0, 1, 2}}, 1), FormatError);
  CHECK_THROWS_AS(PiecewisePolynomial({0.0, 1.0, 2.0}, {{0, 1}}, 1), FormatError);
  CHECK_THROWS_AS(PiecewisePolynomial({0.0, 0.0}, {{0, 1}}, 1), FormatError);
  CHECK_THROWS_AS(PiecewisePolynomial({1.0, 0.0}, {{0, 1}}, 1), FormatError);
  CHECK_THROWS_AS(PiecewisePolynomial({0.0, 1.0}, {{0, std::nan("")}}, 1), FormatError);
}

TEST_CASE("construction checks continuity") {
  CHECK_THROWS_AS(PiecewisePolynomial({0.0, 1.0, 2.0}, {{0, 1}, {1.1, 0}}, 1), DataError);
  CHECK_NOTHROW(PiecewisePolynomial({0.0, 1.0, 2.0}, {{0, 1}, {1.0 + 1e-12, 0}}, 1));
  // Kinks are fine: only C0 is required.
  CHECK_NOTHROW(PiecewisePolynomial({0.0, 1.0, 2.0}, {{0, 1, 0, 0}, {1, -5, 0, 0}}, 3));
}

TEST_CASE("bounds and plan invariants") {
  CHECK_THROWS_AS(DimensionBounds(1.0, 1.0), FormatError);
  CHECK_THROWS_AS(DimensionBounds(2.0, 1.0), FormatError);
  const auto pp = knots({0, 2}, {0, 1});
  CHECK_THROWS(MotionPlan("p", 0.0, {{pp, std::nullopt}}, {}));
  CHECK_THROWS(MotionPlan("p", 2.0, {}, {{pp, std::nullopt}}));
  CHECK_THROWS(MotionPlan("p", 1.0, {{pp, std::nullopt}}, {}));
  CHECK_NOTHROW(MotionPlan("p", 2.0 + 1e-10, {{pp, std::nullopt}}, {}));
  const MotionPlan plan("p", 2.0, {{pp, std::nullopt}}, {{pp, DimensionBounds(0, 1)}});
  CHECK(plan.dimension_count() == 2);
  CHECK(plan.dimension_id(0) == "s0");
  CHECK(plan.dimension_id(1) == "c0");
  CHECK(plan.dimension(1).bounds->upper == 1.0);
}

TEST_CASE("normalize_time") {
  const auto n = normalize_time(single(knots({0, 2}, {0, 1}), 2.0));
  CHECK(n.t_f() == 1.0);
  const auto& pp = n.state()[0].trajectory;
  CHECK(pp.breakpoints() == std::vector<double>{0.0, 1.0});
  CHECK(pp.evaluate(1.0) == 1.0);
  CHECK(pp.derivative_at(0.5) == 1.0);

  const auto unit = single(knots({0, 1}, {3, 4}), 1.0);
  CHECK(normalize_time(unit) == unit);

  const PiecewisePolynomial cubic({0.0, 2.0}, {{0, 1, 0, 0}}, 3);
  const auto nc = normalize_time(single(cubic, 2.0));
  const auto& c = nc.state()[0].trajectory;
  CHECK(std::vector<double>(c.coeffs(0).begin(), c.coeffs(0).end()) ==
        std::vector<double>{0, 2, 0, 0});
  for (double t : {0.0, 0.5, 1.0, 1.5, 2.0})
    CHECK(std::abs(c.evaluate(t / 2.0) - cubic.evaluate(t)) < 1e-12);
}

TEST_CASE("from_samples") {
  const auto a = knots({0, 1}, {0, 1});
  CHECK(a.segment_count() == 1);
  CHECK(a.derivative_at(0.5) == 1.0);
  const auto b = knots({0, 0.5, 1}, {0, 1, 0});
  CHECK(b.segment_count() == 2);
  CHECK(b.derivative_at(0.25) == 2.0);
  CHECK(b.derivative_at(0.75) == -2.0);
  CHECK_THROWS_AS(knots({0}, {0}), FormatError);
  CHECK_THROWS_AS(knots({0, 0}, {0, 1}), FormatError);
  CHECK_THROWS_AS(knots({0, 1, 2}, {0, 1}), FormatError);
}

TEST_CASE("property: from_samples reproduces the samples") {
  oracle::Gen gen(11);
  for (int trial = 0; trial < 200; ++trial) {
    const auto t = gen.breakpoints(gen.index(1, 30), gen.uniform(0.1, 50));
    std::vector<double> v(t.size());
    for (auto& x : v) x = gen.uniform(-1e3, 1e3);
    const auto pp = from_samples(t, v);
    for (std::size_t i = 0; i + 1 < t.size(); ++i) CHECK(pp.evaluate(t[i]) == v[i]);
    const double scale = std::max(std::abs(v[v.size() - 2]), std::abs(v.back()));
    CHECK(std::abs(pp.evaluate(t.back()) - v.back()) <= 4.0 * scale * 0x1.0p-52);
  }
}

TEST_CASE("property: normalize_time preserves values and is idempotent") {
  oracle::Gen gen(12);
  for (int trial = 0; trial < 100; ++trial) {
    const double t_f = gen.uniform(0.05, 40.0);
    const auto pp = gen.spline(gen.index(1, 12), -5.0, 5.0, t_f);
    const auto plan = single(pp, t_f);
    const auto norm = normalize_time(plan);
    const auto& q = norm.state()[0].trajectory;
    for (int k = 0; k < 100; ++k) {
      const double t = gen.uniform(0.0, t_f);
      CHECK(std::abs(q.evaluate(std::min(1.0, t / t_f)) - pp.evaluate(t)) < 1e-9);
    }
    CHECK(normalize_time(norm) == norm);
  }
}

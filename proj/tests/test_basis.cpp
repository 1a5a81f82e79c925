#include "doctest.h"

#include "hpdg/basis.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <random>

using namespace hpdg;

namespace {

double factorial(int n) { return n <= 1 ? 1.0 : n * factorial(n - 1); }

// Exact integral of x^a y^b over the reference element.
double monomial_integral(ElementKind kind, int a, int b) {
  if (kind == ElementKind::Quad) return 1.0 / ((a + 1.0) * (b + 1.0));
  return factorial(a) * factorial(b) / factorial(a + b + 2);
}

Vec2 random_reference_point(ElementKind kind, std::mt19937& rng) {
  std::uniform_real_distribution<double> unit(0.02, 0.98);
  Vec2 x(unit(rng), unit(rng));
  if (kind == ElementKind::Triangle && x[0] + x[1] > 0.98) x = Vec2(0.98 - x[1], 0.98 - x[0]);
  return x;
}

}  // namespace

TEST_CASE("dof counts") {
  CHECK(dof_count(ElementKind::Quad, 1) == 4);
  CHECK(dof_count(ElementKind::Triangle, 2) == 6);
  CHECK(dof_count(ElementKind::Quad, 2) == 9);
  CHECK(dof_count(ElementKind::Triangle, 3) == 10);
  CHECK(dof_count(ElementKind::Quad, 20) == 441);
  CHECK_THROWS_AS(dof_count(ElementKind::Quad, -1), Error);
}

TEST_CASE("quadrature integrates simple integrands") {
  const auto square = quadrature(ElementKind::Quad, 0);
  double area = 0.0;
  for (double w : square.weights) area += w;
  CHECK(area == doctest::Approx(1.0).epsilon(1e-15));

  const auto q4 = quadrature(ElementKind::Quad, 4);
  double x2y2 = 0.0;
  for (std::size_t i = 0; i < q4.size(); ++i) x2y2 += q4.weights[i] * std::pow(q4.points[i][0] * q4.points[i][1], 2);
  CHECK(std::abs(x2y2 - 1.0 / 9.0) < 1e-14);

  const auto tri = quadrature(ElementKind::Triangle, 1);
  double xint = 0.0;
  for (std::size_t i = 0; i < tri.size(); ++i) xint += tri.weights[i] * tri.points[i][0];
  CHECK(std::abs(xint - 1.0 / 6.0) < 1e-15);
}

TEST_CASE("quadrature exactness on all monomials up to the order") {
  for (auto kind : {ElementKind::Quad, ElementKind::Triangle}) {
    for (int order = 0; order <= 26; ++order) {
      const auto rule = quadrature(kind, order);
      for (double w : rule.weights) REQUIRE(w > 0.0);
      for (const auto& x : rule.points) REQUIRE(inside_reference(kind, x));
      for (int a = 0; a <= order; ++a)
        for (int b = 0; a + b <= order; ++b) {
          double sum = 0.0;
          for (std::size_t q = 0; q < rule.size(); ++q)
            sum += rule.weights[q] * std::pow(rule.points[q][0], a) * std::pow(rule.points[q][1], b);
          const double exact = monomial_integral(kind, a, b);
          INFO("kind=", to_string(kind), " order=", order, " a=", a, " b=", b);
          CHECK(std::abs(sum - exact) <= 1e-13 * exact);
        }
    }
  }
}

TEST_CASE("constant mode has unit norm and vanishing derivatives") {
  for (auto kind : {ElementKind::Quad, ElementKind::Triangle}) {
    const std::vector<Vec2> pts{Vec2(0.2, 0.3), Vec2(0.1, 0.1)};
    const auto table = eval_basis(kind, 3, pts, 3);
    const double expected = 1.0 / std::sqrt(reference_measure(kind));
    for (int q = 0; q < 2; ++q) {
      CHECK(table.value(0, q, 0, 0) == doctest::Approx(expected));
      for (int n = 1; n <= 3; ++n)
        for (int b = 0; b <= n; ++b) CHECK(table.value(0, q, n - b, b) == 0.0);
    }
  }
}

TEST_CASE("eval_basis rejects bad input") {
  const std::vector<Vec2> outside{Vec2(0.8, 0.8)};
  CHECK_THROWS_AS(eval_basis(ElementKind::Triangle, 2, outside, 0), Error);
  const std::vector<Vec2> inside{Vec2(0.2, 0.2)};
  CHECK_THROWS_AS(eval_basis(ElementKind::Quad, 2, inside, 4), Error);
  CHECK_THROWS_AS(eval_basis(ElementKind::Quad, -1, inside, 0), Error);
}

TEST_CASE("derivative tables match central finite differences") {
  // Independent oracle: differentiate the value table numerically.
  std::mt19937 rng(7);
  const double step = 1e-5;
  for (auto kind : {ElementKind::Quad, ElementKind::Triangle}) {
    for (int p = 0; p <= 6; ++p) {
      const ReferenceBasis basis(kind, p);
      for (int trial = 0; trial < 5; ++trial) {
        const Vec2 x = random_reference_point(kind, rng);
        auto values_at = [&](const Vec2& y) {
          std::vector<double> v;
          for (const auto& j : basis.evaluate_reference(y)) v.push_back(j.value());
          return v;
        };
        auto first = [&](const Vec2& y, int dir) {
          Vec2 e = Vec2::Zero();
          e[dir] = step;
          const auto plus = basis.evaluate_reference(y + e);
          const auto minus = basis.evaluate_reference(y - e);
          std::vector<std::array<double, 3>> out;  // d/ddir of value, d/dx, d/dy
          for (std::size_t i = 0; i < plus.size(); ++i)
            out.push_back({(plus[i].value() - minus[i].value()) / (2 * step),
                           (plus[i].derivative(1, 0) - minus[i].derivative(1, 0)) / (2 * step),
                           (plus[i].derivative(0, 1) - minus[i].derivative(0, 1)) / (2 * step)});
          return out;
        };
        (void)values_at;
        const auto jets = basis.evaluate_reference(x);
        const auto dx = first(x, 0);
        const auto dy = first(x, 1);
        double scale = 1.0;
        for (const auto& j : jets) scale = std::max({scale, std::abs(j.derivative(1, 0)), std::abs(j.derivative(2, 0))});
        for (std::size_t i = 0; i < jets.size(); ++i) {
          CHECK(std::abs(dx[i][0] - jets[i].derivative(1, 0)) <= 1e-7 * scale);
          CHECK(std::abs(dy[i][0] - jets[i].derivative(0, 1)) <= 1e-7 * scale);
          CHECK(std::abs(dx[i][1] - jets[i].derivative(2, 0)) <= 1e-7 * scale);
          CHECK(std::abs(dy[i][1] - jets[i].derivative(1, 1)) <= 1e-7 * scale);
          CHECK(std::abs(dy[i][2] - jets[i].derivative(0, 2)) <= 1e-7 * scale);
        }
        // third derivatives from differences of the second-derivative tables
        Vec2 ex(step, 0), ey(0, step);
        const auto px = basis.evaluate_reference(x + ex), mx = basis.evaluate_reference(x - ex);
        const auto py = basis.evaluate_reference(x + ey), my = basis.evaluate_reference(x - ey);
        double scale3 = 1.0;
        for (const auto& j : jets) scale3 = std::max(scale3, std::abs(j.derivative(3, 0)) + std::abs(j.derivative(0, 3)));
        for (std::size_t i = 0; i < jets.size(); ++i) {
          CHECK(std::abs((px[i].derivative(2, 0) - mx[i].derivative(2, 0)) / (2 * step) - jets[i].derivative(3, 0)) <=
                1e-7 * scale3);
          CHECK(std::abs((py[i].derivative(2, 0) - my[i].derivative(2, 0)) / (2 * step) - jets[i].derivative(2, 1)) <=
                1e-7 * scale3);
          CHECK(std::abs((px[i].derivative(0, 2) - mx[i].derivative(0, 2)) / (2 * step) - jets[i].derivative(1, 2)) <=
                1e-7 * scale3);
          CHECK(std::abs((py[i].derivative(0, 2) - my[i].derivative(0, 2)) / (2 * step) - jets[i].derivative(0, 3)) <=
                1e-7 * scale3);
        }
      }
    }
  }
}

TEST_CASE("reference mass matrix is well conditioned up to p = 10") {
  for (auto kind : {ElementKind::Quad, ElementKind::Triangle}) {
    for (int p = 0; p <= 10; ++p) {
      const ReferenceBasis basis(kind, p);
      const auto rule = quadrature(kind, 2 * p);
      const int n = basis.size();
      Eigen::MatrixXd mass = Eigen::MatrixXd::Zero(n, n);
      for (std::size_t q = 0; q < rule.size(); ++q) {
        const auto jets = basis.evaluate_reference(rule.points[q]);
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) mass(i, j) += rule.weights[q] * jets[i].value() * jets[j].value();
      }
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(mass);
      const double cond = eig.eigenvalues().maxCoeff() / eig.eigenvalues().minCoeff();
      INFO("kind=", to_string(kind), " p=", p);
      CHECK(cond <= 10.0);
      CHECK((mass - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-11);
    }
  }
}

TEST_CASE("span property: monomials are reproduced") {
  std::mt19937 rng(11);
  for (auto kind : {ElementKind::Quad, ElementKind::Triangle}) {
    for (int p = 0; p <= 6; ++p) {
      const ReferenceBasis basis(kind, p);
      const int n = basis.size();
      // least-squares fit on 100 random points
      std::vector<Vec2> pts;
      for (int i = 0; i < 100; ++i) pts.push_back(random_reference_point(kind, rng));
      Eigen::MatrixXd v(pts.size(), n);
      for (std::size_t q = 0; q < pts.size(); ++q) {
        const auto jets = basis.evaluate_reference(pts[q]);
        for (int i = 0; i < n; ++i) v(q, i) = jets[i].value();
      }
      for (int a = 0; a <= p; ++a)
        for (int b = 0; b <= p; ++b) {
          if (kind == ElementKind::Triangle && a + b > p) continue;
          Eigen::VectorXd target(pts.size());
          for (std::size_t q = 0; q < pts.size(); ++q) target[q] = std::pow(pts[q][0], a) * std::pow(pts[q][1], b);
          const Eigen::VectorXd c = v.colPivHouseholderQr().solve(target);
          CHECK((v * c - target).cwiseAbs().maxCoeff() <= 1e-10);
        }
    }
  }
}

#include "hpdg/inverse_lab.hpp"

#include "hpdg/basis.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <cstdio>
#include <sstream>

namespace hpdg {

namespace {

using Matrix = Eigen::MatrixXd;

double largest_eigenvalue(const Matrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(a, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().maxCoeff();
}

// Largest lambda with a v = lambda b v, b positive definite.
double largest_generalized(const Matrix& a, const Matrix& b) {
  Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> eig(a, b, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) throw Error("generalized eigensolve failed");
  return eig.eigenvalues().maxCoeff();
}

// Weighted Gram matrix of the reference basis: integral of w * phi_i * phi_j.
template <typename Weight>
Matrix weighted_mass(ElementKind kind, int p, int order, Weight weight) {
  const ReferenceBasis basis(kind, p);
  const auto rule = quadrature(kind, order);
  const int n = basis.size();
  Matrix m = Matrix::Zero(n, n);
  Eigen::VectorXd phi(n);
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const auto jets = basis.evaluate_reference(rule.points[q]);
    for (int i = 0; i < n; ++i) phi[i] = jets[i].value();
    m += rule.weights[q] * weight(rule.points[q]) * phi * phi.transpose();
  }
  return m;
}

double bubble(ElementKind kind, const Vec2& x) {
  if (kind == ElementKind::Quad) return x[0] * (1.0 - x[0]) * x[1] * (1.0 - x[1]);
  return x[0] * x[1] * (1.0 - x[0] - x[1]);
}

}  // namespace

double trace_inverse_constant(ElementKind kind, int p) {
  if (p < 0) throw Error("degree must be nonnegative");
  const ReferenceBasis basis(kind, p);
  const int n = basis.size();
  const Matrix cell = weighted_mass(kind, p, 2 * p, [](const Vec2&) { return 1.0; });
  Matrix face = Matrix::Zero(n, n);
  const auto rule = gauss_for_order(2 * p);
  Eigen::VectorXd phi(n);
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const auto jets = basis.evaluate_reference(Vec2(rule.points[q], 0.0));
    for (int i = 0; i < n; ++i) phi[i] = jets[i].value();
    face += rule.weights[q] * phi * phi.transpose();
  }
  // Functions vanishing on F only add zero eigenvalues; the maximum is unaffected.
  return largest_generalized(face, cell);
}

double h1_inverse_constant(ElementKind kind, int p) {
  if (p < 0) throw Error("degree must be nonnegative");
  if (p == 0) return 0.0;
  const ReferenceBasis basis(kind, p);
  const int n = basis.size();
  const auto rule = quadrature(kind, 2 * p);
  Matrix mass = Matrix::Zero(n, n), stiff = Matrix::Zero(n, n);
  Eigen::VectorXd v(n), dx(n), dy(n);
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const auto jets = basis.evaluate_reference(rule.points[q]);
    for (int i = 0; i < n; ++i) {
      v[i] = jets[i].value();
      dx[i] = jets[i].derivative(1, 0);
      dy[i] = jets[i].derivative(0, 1);
    }
    const double w = rule.weights[q];
    mass += w * v * v.transpose();
    stiff += w * (dx * dx.transpose() + dy * dy.transpose());
  }
  return largest_generalized(stiff, mass);
}

double bubble_inverse_constant(ElementKind kind, int p, double alpha, double beta) {
  if (p < 0) throw Error("degree must be nonnegative");
  if (!(alpha > -0.5)) throw Error("bubble exponent alpha must exceed -1/2");
  if (!(alpha <= beta)) throw Error("bubble exponents need alpha <= beta");
  // Identical weights give the identical quadratic form.
  if (alpha == beta) return 1.0;
  const int order = 2 * p + 10;
  const Matrix a = weighted_mass(kind, p, order, [&](const Vec2& x) { return std::pow(bubble(kind, x), alpha); });
  const Matrix b = weighted_mass(kind, p, order, [&](const Vec2& x) { return std::pow(bubble(kind, x), beta); });
  return largest_generalized(a, b);
}

Jet face_legendre(int n, const Jet& s) {
  if (n < 0) throw Error("degree must be nonnegative");
  const Jet t = 2.0 * s - Jet::constant(1.0);
  Jet prev = Jet::constant(1.0), cur = t;
  if (n == 0) return prev;
  for (int k = 1; k < n; ++k) {
    Jet next = ((2.0 * k + 1.0) * t * cur - static_cast<double>(k) * prev) * (1.0 / (k + 1.0));
    prev = cur;
    cur = next;
  }
  return std::sqrt(2.0 * n + 1.0) * cur;
}

namespace {

Jet extension_mode(ElementKind kind, int p, int n, const Vec2& x) {
  const double eps = 1.0 / (static_cast<double>(p) * p);
  const Jet xs = Jet::affine(x[0], 1.0, 0.0);
  const Jet ys = Jet::affine(x[1], 0.0, 1.0);
  const Jet one = Jet::constant(1.0);
  const Jet cutoff = kind == ElementKind::Quad ? one - ys : xs * (one - xs - ys);
  return face_legendre(n, xs) * cutoff * exp((-1.0 / eps) * ys);
}

// Gram matrices of E(L_0..L_p) for the three norms, integrated with Gauss
// rules on geometrically graded strips towards y = 0.
struct ExtensionGram {
  Matrix l2, h1, h2;
};

ExtensionGram extension_gram(ElementKind kind, int p) {
  if (p < 1) throw Error("extension needs p >= 1");
  const int n = p + 1;
  ExtensionGram g{Matrix::Zero(n, n), Matrix::Zero(n, n), Matrix::Zero(n, n)};
  const double eps = 1.0 / (static_cast<double>(p) * p);
  std::vector<double> breaks{0.0};
  for (double b = eps / 64.0; b < 1.0; b *= 2.0) breaks.push_back(b);
  breaks.push_back(1.0);
  const auto gy = gauss_legendre(24);
  const auto gx = gauss_for_order(2 * p + 8);
  Eigen::VectorXd v(n), dx(n), dy(n), dxx(n), dxy(n), dyy(n);
  for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
    const double y0 = breaks[k], ly = breaks[k + 1] - breaks[k];
    for (std::size_t j = 0; j < gy.size(); ++j) {
      const double y = y0 + ly * gy.points[j];
      const double lx = kind == ElementKind::Quad ? 1.0 : 1.0 - y;
      for (std::size_t i = 0; i < gx.size(); ++i) {
        const Vec2 pt(lx * gx.points[i], y);
        const double w = ly * gy.weights[j] * lx * gx.weights[i];
        for (int m = 0; m < n; ++m) {
          const Jet e = extension_mode(kind, p, m, pt);
          v[m] = e.value();
          dx[m] = e.derivative(1, 0);
          dy[m] = e.derivative(0, 1);
          dxx[m] = e.derivative(2, 0);
          dxy[m] = e.derivative(1, 1);
          dyy[m] = e.derivative(0, 2);
        }
        g.l2 += w * v * v.transpose();
        g.h1 += w * (dx * dx.transpose() + dy * dy.transpose());
        g.h2 += w * (dxx * dxx.transpose() + 2.0 * dxy * dxy.transpose() + dyy * dyy.transpose());
      }
    }
  }
  return g;
}

}  // namespace

Jet extension(ElementKind kind, int p, std::span<const double> coefficients, const Vec2& x) {
  if (p < 1) throw Error("extension needs p >= 1");
  Jet sum;
  for (std::size_t n = 0; n < coefficients.size(); ++n)
    sum += coefficients[n] * extension_mode(kind, p, static_cast<int>(n), x);
  return sum;
}

ExtensionNorms extension_norms(ElementKind kind, int p, std::span<const double> coefficients) {
  if (static_cast<int>(coefficients.size()) > p + 1) throw Error("too many coefficients for P_p");
  const auto g = extension_gram(kind, p);
  Eigen::VectorXd c = Eigen::VectorXd::Zero(p + 1);
  for (std::size_t n = 0; n < coefficients.size(); ++n) c[static_cast<int>(n)] = coefficients[n];
  return {c.dot(g.l2 * c), c.dot(g.h1 * c), c.dot(g.h2 * c)};
}

ExtensionScalings ExtensionScalings::normalized(int p) const {
  const double q = static_cast<double>(p);
  return {l2 * q, h1 / q, h2 / (q * q * q)};
}

ExtensionScalings extension_scalings(ElementKind kind, int p) {
  // The face basis is orthonormal, so ||q||_F^2 is the coefficient norm.
  const auto g = extension_gram(kind, p);
  return {std::sqrt(largest_eigenvalue(g.l2)), std::sqrt(largest_eigenvalue(g.h1)),
          std::sqrt(largest_eigenvalue(g.h2))};
}

LinearFit fit_growth_exponent(const ConstantSeries& series) {
  if (series.values.size() < 4 || series.abscissa.size() != series.values.size())
    throw Error("growth fit needs at least four points");
  for (double v : series.values)
    if (!(v > 0.0)) throw Error("growth fit needs positive constants");
  return fit_loglog(series.abscissa, series.values);
}

namespace {

template <typename Fn>
ConstantSeries sweep(const std::string& name, ElementKind kind, int pmin, int pmax, double predicted, Fn fn) {
  if (pmin < 0 || pmax < pmin) throw Error("invalid degree range");
  ConstantSeries s;
  s.name = name;
  s.kind = kind;
  s.predicted_exponent = predicted;
  for (int p = pmin; p <= pmax; ++p) {
    s.degrees.push_back(p);
    s.abscissa.push_back(p + 1.0);
    s.values.push_back(fn(p));
  }
  if (s.values.size() >= 4) {
    const auto fit = fit_growth_exponent(s);
    s.exponent = fit.slope;
    s.r2 = fit.r2;
  }
  return s;
}

}  // namespace

ConstantSeries trace_series(ElementKind kind, int pmin, int pmax) {
  return sweep("trace", kind, pmin, pmax, 2.0, [&](int p) { return trace_inverse_constant(kind, p); });
}

ConstantSeries h1_series(ElementKind kind, int pmin, int pmax) {
  return sweep("h1", kind, std::max(pmin, 1), pmax, 4.0, [&](int p) { return h1_inverse_constant(kind, p); });
}

ConstantSeries bubble_series(ElementKind kind, int pmin, int pmax, double alpha, double beta) {
  return sweep("bubble", kind, pmin, pmax, 2.0 * 2.0 * (beta - alpha),
               [&](int p) { return bubble_inverse_constant(kind, p, alpha, beta); });
}

std::vector<ConstantSeries> extension_series(ElementKind kind, int pmin, int pmax) {
  std::vector<ExtensionScalings> values;
  const int lo = std::max(pmin, 1);
  for (int p = lo; p <= pmax; ++p) values.push_back(extension_scalings(kind, p).normalized(p));
  std::vector<ConstantSeries> out;
  const char* names[] = {"extension_l2", "extension_h1", "extension_h2"};
  for (int k = 0; k < 3; ++k)
    out.push_back(sweep(names[k], kind, lo, pmax, 0.0, [&](int p) {
      const auto& v = values[p - lo];
      return k == 0 ? v.l2 : k == 1 ? v.h1 : v.h2;
    }));
  return out;
}

std::string inverse_lab_csv(const std::vector<ConstantSeries>& series) {
  std::ostringstream out;
  out << "kind,p,constant,value,predicted_exponent,fitted_exponent,r2\n";
  char buf[256];
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.values.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%s,%d,%s,%.12g,%.4g,%.6g,%.6g\n", to_string(s.kind).c_str(), s.degrees[i],
                    s.name.c_str(), s.values[i], s.predicted_exponent, s.exponent, s.r2);
      out << buf;
    }
  return out.str();
}

}  // namespace hpdg

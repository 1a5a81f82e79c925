#pragma once

#include "hpdg/jet.hpp"
#include "hpdg/report.hpp"
#include "hpdg/types.hpp"

#include <span>
#include <string>
#include <vector>

namespace hpdg {

/// sup over the polynomial space of ||q||^2_F / ||q||^2_K on the reference
/// element, with F the edge y = 0.
double trace_inverse_constant(ElementKind kind, int p);

/// sup of |q|^2_{1,K} / ||q||^2_{0,K} on the reference element.
double h1_inverse_constant(ElementKind kind, int p);

/// sup of ||b^{alpha/2} q||^2 / ||b^{beta/2} q||^2 with b the product of the
/// affine edge functions. Requires -1/2 < alpha <= beta.
double bubble_inverse_constant(ElementKind kind, int p, double alpha, double beta);

/// Orthonormal Legendre polynomial of degree n on [0,1].
Jet face_legendre(int n, const Jet& s);

/// E(q) = q(x) Phi(x, y) exp(-y / eps) with eps = p^{-2}, where Phi = 1 - y on
/// the square and x (1 - x - y) on the triangle; q = sum_n c_n L_n(x).
Jet extension(ElementKind kind, int p, std::span<const double> coefficients, const Vec2& x);

/// Squared L2 norm, H1 seminorm and Hessian norm of E(q) on the reference element.
struct ExtensionNorms {
  double l2_sq = 0.0;
  double h1_sq = 0.0;
  double h2_sq = 0.0;
};

ExtensionNorms extension_norms(ElementKind kind, int p, std::span<const double> coefficients);

/// Worst-case ratios ||E(q)|| / ||q||_F, |E(q)|_1 / ||q||_F and
/// ||D^2 E(q)|| / ||q||_F over P_p(F).
struct ExtensionScalings {
  double l2 = 0.0;
  double h1 = 0.0;
  double h2 = 0.0;

  /// Ratios divided by their predicted powers: l2 * p, h1 / p, h2 / p^3.
  ExtensionScalings normalized(int p) const;
};

ExtensionScalings extension_scalings(ElementKind kind, int p);

/// Constants over a degree sweep, with the growth exponent fitted against
/// the abscissa (p + 1 for the sweeps below).
struct ConstantSeries {
  std::string name;
  ElementKind kind = ElementKind::Quad;
  std::vector<int> degrees;
  std::vector<double> abscissa;
  std::vector<double> values;
  double predicted_exponent = 0.0;
  double exponent = 0.0;
  double r2 = 0.0;
};

/// Slope and R^2 of log(values) against log(abscissa). Needs at least four
/// points and positive entries.
LinearFit fit_growth_exponent(const ConstantSeries& series);

/// Sweeps over p in [pmin, pmax] with the exponent filled in. Names are
/// "trace", "h1", "bubble", "extension_l2", "extension_h1" and "extension_h2".
ConstantSeries trace_series(ElementKind kind, int pmin, int pmax);
ConstantSeries h1_series(ElementKind kind, int pmin, int pmax);
ConstantSeries bubble_series(ElementKind kind, int pmin, int pmax, double alpha, double beta);
/// Normalized extension ratios; predicted exponent 0.
std::vector<ConstantSeries> extension_series(ElementKind kind, int pmin, int pmax);

/// Columns: kind, p, constant, value, predicted_exponent, fitted_exponent, r2.
std::string inverse_lab_csv(const std::vector<ConstantSeries>& series);

}  // namespace hpdg

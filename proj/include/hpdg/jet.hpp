#pragma once

#include <array>
#include <cstddef>

namespace hpdg {

inline constexpr int kJetOrder = 4;
inline constexpr int kJetSize = (kJetOrder + 1) * (kJetOrder + 2) / 2;

/// Position of the coefficient of X^a Y^b, grouped by total degree.
constexpr int jet_index(int a, int b) {
  const int n = a + b;
  return n * (n + 1) / 2 + b;
}

/// Truncated bivariate Taylor polynomial of total degree kJetOrder.
///
/// Stores c_ab = D^{(a,b)} f / (a! b!) about an evaluation point. Arithmetic on
/// jets propagates all partial derivatives up to fourth order exactly, which is
/// how basis functions get their physical derivatives: the reference
/// coordinates are seeded as affine jets in the physical coordinates and the
/// three-term recurrences are evaluated on jets.
class Jet {
 public:
  Jet() = default;

  static Jet constant(double value);
  /// value + dx * X + dy * Y
  static Jet affine(double value, double dx, double dy);

  double value() const { return c_[0]; }
  double coeff(int a, int b) const { return c_[jet_index(a, b)]; }
  /// Partial derivative d^{a+b} / dx^a dy^b.
  double derivative(int a, int b) const;

  Jet& operator+=(const Jet& other);
  Jet& operator-=(const Jet& other);
  Jet& operator*=(double s);
  Jet& operator*=(const Jet& other);

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator*(Jet a, double s) { return a *= s; }
  friend Jet operator*(double s, Jet a) { return a *= s; }
  friend Jet operator*(const Jet& a, const Jet& b);

 private:
  std::array<double, kJetSize> c_{};
};

Jet exp(const Jet& f);

}  // namespace hpdg

#include "hpdg/jet.hpp"

#include <cmath>
#include <vector>

namespace hpdg {

namespace {

struct ProductTerm {
  int lhs, rhs, out;
};

std::vector<ProductTerm> build_product_terms() {
  std::vector<ProductTerm> terms;
  for (int n1 = 0; n1 <= kJetOrder; ++n1) {
    for (int b1 = 0; b1 <= n1; ++b1) {
      const int a1 = n1 - b1;
      for (int n2 = 0; n1 + n2 <= kJetOrder; ++n2) {
        for (int b2 = 0; b2 <= n2; ++b2) {
          const int a2 = n2 - b2;
          terms.push_back({jet_index(a1, b1), jet_index(a2, b2), jet_index(a1 + a2, b1 + b2)});
        }
      }
    }
  }
  return terms;
}

const std::vector<ProductTerm>& product_terms() {
  static const std::vector<ProductTerm> terms = build_product_terms();
  return terms;
}

constexpr double factorial(int n) { return n <= 1 ? 1.0 : n * factorial(n - 1); }

}  // namespace

Jet Jet::constant(double value) {
  Jet j;
  j.c_[0] = value;
  return j;
}

Jet Jet::affine(double value, double dx, double dy) {
  Jet j;
  j.c_[0] = value;
  j.c_[jet_index(1, 0)] = dx;
  j.c_[jet_index(0, 1)] = dy;
  return j;
}

double Jet::derivative(int a, int b) const {
  if (a < 0 || b < 0 || a + b > kJetOrder) return 0.0;
  return factorial(a) * factorial(b) * c_[jet_index(a, b)];
}

Jet& Jet::operator+=(const Jet& other) {
  for (int i = 0; i < kJetSize; ++i) c_[i] += other.c_[i];
  return *this;
}

Jet& Jet::operator-=(const Jet& other) {
  for (int i = 0; i < kJetSize; ++i) c_[i] -= other.c_[i];
  return *this;
}

Jet& Jet::operator*=(double s) {
  for (double& c : c_) c *= s;
  return *this;
}

Jet& Jet::operator*=(const Jet& other) {
  *this = *this * other;
  return *this;
}

Jet operator*(const Jet& a, const Jet& b) {
  Jet out;
  for (const auto& t : product_terms()) out.c_[t.out] += a.c_[t.lhs] * b.c_[t.rhs];
  return out;
}

Jet exp(const Jet& f) {
  // exp(f0 + d) = exp(f0) * sum_k d^k / k!, d nilpotent of order kJetOrder + 1
  Jet d = f;
  d -= Jet::constant(f.value());
  Jet sum = Jet::constant(1.0);
  Jet power = Jet::constant(1.0);
  for (int k = 1; k <= kJetOrder; ++k) {
    power = power * d;
    sum += power * (1.0 / factorial(k));
  }
  return sum * std::exp(f.value());
}

}  // namespace hpdg

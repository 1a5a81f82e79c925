#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace hpdg {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

enum class ElementKind { Triangle, Quad };

std::string to_string(ElementKind kind);
ElementKind element_kind_from_string(const std::string& name);

/// Raised when an input violates a documented precondition.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace hpdg

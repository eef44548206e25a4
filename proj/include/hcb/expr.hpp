#pragma once

// Observable expressions over x_u, x_c, x_s with rational literals, + - *,
// unary minus, min(a, b), max(a, b) and parentheses. A literal may carry a
// fraction bar, as in 3/4; there is no general division.

#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "hcb/rational.hpp"

namespace hcb {

/// Coefficients of c0 + cu x_u + cc x_c + cs x_s.
struct AffineForm {
  Rational c0{0}, cu{0}, cc{0}, cs{0};

  double operator()(double xu, double xc, double xs) const;
  /// sup of |v| over the unit cube.
  Rational sup_abs() const;
  Rational grad_norm_squared() const;
};

class Expr {
 public:
  /// Throws ParseError with the offending position.
  static Expr parse(std::string_view text);

  double operator()(double xu, double xc, double xs) const;

  /// Exact coefficients when the expression is affine.
  std::optional<AffineForm> affine() const;

  bool uses_xu() const;
  bool uses_xc() const;
  bool uses_xs() const;

  const std::string& text() const { return text_; }

  struct Node;

 private:
  std::shared_ptr<const Node> root_;
  std::string text_;
};

}  // namespace hcb

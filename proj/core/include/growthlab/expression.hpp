#pragma once

#include <complex>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "growthlab/scaled_complex.hpp"

namespace growthlab {

namespace detail {
class ExprNode;
using NodePtr = std::shared_ptr<const ExprNode>;
}  // namespace detail

/// Entire function modeled as an immutable expression tree over
/// {polynomial, exp(node), sum, product} plus generator-backed power series.
/// Evaluation returns ScaledComplex; exp nodes add the argument's real part
/// into the log scale and never exponentiate natively.
class EntireFunction {
 public:
  EntireFunction();  // the zero function

  static EntireFunction polynomial(std::vector<std::complex<double>> coeffs);
  static EntireFunction constant(std::complex<double> c);
  static EntireFunction variable();  // f(z) = z
  static EntireFunction exp_of(const EntireFunction& f);
  /// Generator-backed power series sum a_n z^n. `nonnegative_coefficients`
  /// enables the exact max-modulus shortcut M(r) = f(r).
  static EntireFunction from_series(std::function<ScaledComplex(std::size_t)> gen,
                                    bool nonnegative_coefficients, std::string label);

  friend EntireFunction operator+(const EntireFunction& a, const EntireFunction& b);
  friend EntireFunction operator-(const EntireFunction& a, const EntireFunction& b);
  friend EntireFunction operator*(const EntireFunction& a, const EntireFunction& b);
  EntireFunction operator-() const;
  EntireFunction scaled(std::complex<double> c) const;
  EntireFunction pow(int n) const;  // n >= 0

  ScaledComplex eval(std::complex<double> z) const;
  /// Plain-complex evaluation (fast path for ODE coefficients); may overflow
  /// to inf when the value exceeds double range.
  std::complex<double> eval_complex(std::complex<double> z) const;

  /// n-th symbolic derivative; n <= max_derivative_depth (default 8).
  EntireFunction derivative(int n = 1) const;
  int max_derivative_depth() const { return depth_cap_; }

  /// First `count` power-series coefficients (cached, thread-safe).
  std::vector<ScaledComplex> series_coefficients(std::size_t count) const;
  bool has_series() const { return true; }
  bool nonnegative_series() const;
  /// True when the series does not terminate (tree contains exp or a
  /// generator-backed series).
  bool is_transcendental() const;
  /// Structural zero test (constant folding reduces zero trees to the zero
  /// polynomial; generator-backed series are never reported zero).
  bool is_identically_zero() const;

  std::string to_string() const;

 private:
  explicit EntireFunction(detail::NodePtr root);
  struct State;
  std::shared_ptr<State> state_;
  int depth_cap_ = 8;
};

/// Parse an expression over {z, +, -, *, ^integer, exp(...), numeric literals}.
/// Throws ExprParseError with a character position on malformed input.
EntireFunction parse_function(const std::string& text);

class ExprParseError : public std::runtime_error {
 public:
  ExprParseError(const std::string& what, std::size_t position)
      : std::runtime_error(what), position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

}  // namespace growthlab

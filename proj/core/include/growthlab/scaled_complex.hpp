#pragma once

#include <cmath>
#include <complex>
#include <limits>

namespace growthlab {

/// Overflow-safe complex amplitude: value = mantissa * exp(log_scale).
///
/// The mantissa magnitude is kept in [1, e) after every operation; the
/// natural-log scale absorbs the rest of the dynamic range, so values of
/// size exp(exp(r)) stay representable. Zero is the sentinel
/// (mantissa 0, log_scale -inf).
class ScaledComplex {
 public:
  // Addition of two values whose log scales differ by more than this
  // returns the larger operand unchanged (relative error < e^-40).
  static constexpr double kAbsorptionThreshold = 40.0;

  constexpr ScaledComplex() = default;

  ScaledComplex(std::complex<double> value) { *this = from_complex(value); }
  ScaledComplex(double value) : ScaledComplex(std::complex<double>(value)) {}

  static ScaledComplex zero() { return ScaledComplex(); }

  static ScaledComplex from_complex(std::complex<double> v) {
    ScaledComplex s;
    s.mantissa_ = v;
    s.log_scale_ = 0.0;
    s.normalize();
    return s;
  }

  /// Build from log-magnitude and argument: value = exp(log_abs + i*arg).
  static ScaledComplex from_log_polar(double log_abs, double arg) {
    ScaledComplex s;
    double d = std::floor(log_abs);
    s.mantissa_ = std::polar(std::exp(log_abs - d), arg);
    s.log_scale_ = d;
    return s;
  }

  bool is_zero() const { return mantissa_ == std::complex<double>(0.0); }

  std::complex<double> mantissa() const { return mantissa_; }
  double log_scale() const { return log_scale_; }

  /// log |value|; -inf for zero.
  double log_abs() const {
    if (is_zero()) return -std::numeric_limits<double>::infinity();
    return log_scale_ + std::log(std::abs(mantissa_));
  }

  double arg() const { return std::arg(mantissa_); }

  /// Plain complex value. Overflows to inf when log_abs() > ~709.
  std::complex<double> to_complex() const {
    if (is_zero()) return {0.0, 0.0};
    return mantissa_ * std::exp(log_scale_);
  }

  ScaledComplex operator-() const {
    ScaledComplex r = *this;
    r.mantissa_ = -r.mantissa_;
    return r;
  }

  ScaledComplex& operator*=(const ScaledComplex& o) {
    if (is_zero() || o.is_zero()) {
      *this = zero();
      return *this;
    }
    mantissa_ *= o.mantissa_;
    log_scale_ += o.log_scale_;
    normalize();
    return *this;
  }

  ScaledComplex& operator/=(const ScaledComplex& o) {
    mantissa_ /= o.mantissa_;
    log_scale_ -= o.log_scale_;
    normalize();
    return *this;
  }

  ScaledComplex& operator+=(const ScaledComplex& o) {
    if (o.is_zero()) return *this;
    if (is_zero()) {
      *this = o;
      return *this;
    }
    double diff = log_scale_ - o.log_scale_;
    if (diff > kAbsorptionThreshold) return *this;
    if (diff < -kAbsorptionThreshold) {
      *this = o;
      return *this;
    }
    if (diff >= 0.0) {
      mantissa_ += o.mantissa_ * std::exp(-diff);
    } else {
      mantissa_ = mantissa_ * std::exp(diff) + o.mantissa_;
      log_scale_ = o.log_scale_;
    }
    normalize();
    return *this;
  }

  ScaledComplex& operator-=(const ScaledComplex& o) { return *this += -o; }

  friend ScaledComplex operator*(ScaledComplex a, const ScaledComplex& b) { return a *= b; }
  friend ScaledComplex operator/(ScaledComplex a, const ScaledComplex& b) { return a /= b; }
  friend ScaledComplex operator+(ScaledComplex a, const ScaledComplex& b) { return a += b; }
  friend ScaledComplex operator-(ScaledComplex a, const ScaledComplex& b) { return a -= b; }

  ScaledComplex pow_int(int n) const {
    ScaledComplex r = from_complex(1.0);
    ScaledComplex base = *this;
    bool invert = n < 0;
    unsigned m = invert ? -static_cast<unsigned>(n) : static_cast<unsigned>(n);
    while (m) {
      if (m & 1u) r *= base;
      base *= base;
      m >>= 1;
    }
    if (invert) r = from_complex(1.0) / r;
    return r;
  }

 private:
  void normalize() {
    double a = std::abs(mantissa_);
    if (a == 0.0 || !std::isfinite(a)) {
      if (a == 0.0) {
        mantissa_ = 0.0;
        log_scale_ = -std::numeric_limits<double>::infinity();
      }
      return;
    }
    double d = std::floor(std::log(a));
    if (d != 0.0) {
      mantissa_ *= std::exp(-d);
      log_scale_ += d;
      // One corrective pass for round-off at the window edge.
      double a2 = std::abs(mantissa_);
      if (a2 >= kE) {
        mantissa_ /= kE;
        log_scale_ += 1.0;
      } else if (a2 < 1.0) {
        mantissa_ *= kE;
        log_scale_ -= 1.0;
      }
    }
  }

  static constexpr double kE = 2.718281828459045235;

  std::complex<double> mantissa_{0.0, 0.0};
  double log_scale_ = -std::numeric_limits<double>::infinity();
};

}  // namespace growthlab

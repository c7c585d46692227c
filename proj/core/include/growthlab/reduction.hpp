#pragma once

#include <complex>
#include <functional>
#include <memory>
#include <vector>

#include "growthlab/expression.hpp"
#include "growthlab/ode.hpp"

namespace growthlab {

/// Pointwise access to a holomorphic function's derivatives, the currency of
/// the order-reduction machinery (quotients of solutions are not expression
/// trees).
class PointwiseHolomorphic {
 public:
  virtual ~PointwiseHolomorphic() = default;
  /// Value and derivatives f, f', ..., f^(n) at z (n+1 entries).
  virtual std::vector<ScaledComplex> derivatives_at(std::complex<double> z, int n) const = 0;
};

class EntirePointwise final : public PointwiseHolomorphic {
 public:
  explicit EntirePointwise(EntireFunction f) : f_(std::move(f)) {}
  std::vector<ScaledComplex> derivatives_at(std::complex<double> z, int n) const override;

 private:
  EntireFunction f_;
};

/// g = num / den with derivatives from the solved Leibniz recurrence
/// g^(n) = (num^(n) - sum_{i<n} C(n,i) g^(i) den^(n-i)) / den.
class QuotientPointwise final : public PointwiseHolomorphic {
 public:
  QuotientPointwise(std::shared_ptr<const PointwiseHolomorphic> num,
                    std::shared_ptr<const PointwiseHolomorphic> den)
      : num_(std::move(num)), den_(std::move(den)) {}
  std::vector<ScaledComplex> derivatives_at(std::complex<double> z, int n) const override;

 private:
  std::shared_ptr<const PointwiseHolomorphic> num_, den_;
};

/// nu = (num/den)' — the order-reduction substitution.
class QuotientDerivativePointwise final : public PointwiseHolomorphic {
 public:
  QuotientDerivativePointwise(std::shared_ptr<const PointwiseHolomorphic> num,
                              std::shared_ptr<const PointwiseHolomorphic> den)
      : q_(std::move(num), std::move(den)) {}
  std::vector<ScaledComplex> derivatives_at(std::complex<double> z, int n) const override;

 private:
  QuotientPointwise q_;
};

/// Order-(k-1) equation with pointwise coefficient evaluators; composable
/// into further reduction steps.
struct ReducedODE {
  int order = 0;
  std::vector<std::function<ScaledComplex(std::complex<double>)>> coefficients;  // A_{1,0}..A_{1,k-2}

  ScaledComplex coefficient_at(int j, std::complex<double> z) const {
    return coefficients.at(j)(z);
  }
};

/// Coefficient source shared by LinearODE and ReducedODE.
using CoefficientEval = std::function<ScaledComplex(int j, std::complex<double> z)>;

struct ReductionOptions {
  std::vector<std::complex<double>> check_points;  // defaults to a small ray sample
  double solution_residual_tol = 1e-6;
  double zero_exclusion_log_gap = 30.0;  // |f1| this far (in logs) below its point median is "near a zero"
};

/// Residual |L(f)(z)| / max term magnitude, maximized over points.
double ode_residual(const LinearODE& ode, const PointwiseHolomorphic& f,
                    const std::vector<std::complex<double>>& points);
double ode_residual(const ReducedODE& ode, const PointwiseHolomorphic& f,
                    const std::vector<std::complex<double>>& points);

/// One reduction step: given a nonvanishing solution f1 of the order-k
/// equation, produce the order-(k-1) equation for nu = (f/f1)' with
/// A_{1,j} = A_{j+1} + sum_{m=1}^{k-j-1} C(j+1+m, m) A_{j+1+m} f1^(m)/f1
/// (A_k = 1). Verifies first that f1 actually solves the equation.
ReducedODE reduce_order(const LinearODE& ode,
                        std::shared_ptr<const PointwiseHolomorphic> f1,
                        const ReductionOptions& opts = {});

/// Further reduction steps (general recurrence with A_{j-1,k-j+1} = 1).
ReducedODE reduce_order(const ReducedODE& ode,
                        std::shared_ptr<const PointwiseHolomorphic> f1,
                        const ReductionOptions& opts = {});

/// Max over sample points of |L_reduced(nu)| relative to the largest term,
/// where nu = (f_other / f1)'. Points where f1 is near a zero are excluded.
double reduction_residual(const ReducedODE& reduced,
                          std::shared_ptr<const PointwiseHolomorphic> f1,
                          std::shared_ptr<const PointwiseHolomorphic> f_other,
                          const std::vector<std::complex<double>>& points,
                          const ReductionOptions& opts = {});

/// Residual of an explicit candidate nu against the reduced equation.
double reduction_residual_of(const ReducedODE& reduced, const PointwiseHolomorphic& nu,
                             const std::vector<std::complex<double>>& points);

}  // namespace growthlab

#pragma once

#include <complex>
#include <vector>

namespace growthlab {

/// Cauchy-style zero bound: every root of a_n z^n + ... + a_0 lies in
/// |z| <= 1 + max |a_k / a_n|. Requires a_n != 0.
double polynomial_zero_bound(const std::vector<std::complex<double>>& coeffs);

struct RootFindResult {
  std::vector<std::complex<double>> roots;
  int iterations = 0;
  double max_residual = 0.0;  // max |p(root)| / coefficient scale
};

/// Simultaneous (Durand-Kerner) iteration, degree <= 32. Independent root
/// oracle for zero-bound verification.
RootFindResult find_roots(const std::vector<std::complex<double>>& coeffs,
                          int max_iterations = 600, double tol = 1e-13);

/// True iff every oracle root lies within the zero bound (+1e-9 slack).
bool verify_roots_within(const std::vector<std::complex<double>>& coeffs);

}  // namespace growthlab

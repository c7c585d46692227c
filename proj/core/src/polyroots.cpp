#include "growthlab/polyroots.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace growthlab {

namespace {
using cplx = std::complex<double>;

std::vector<cplx> trimmed(const std::vector<cplx>& coeffs) {
  std::vector<cplx> c = coeffs;
  while (!c.empty() && c.back() == cplx(0.0)) c.pop_back();
  if (c.size() < 2) throw std::invalid_argument("polynomial must have degree >= 1 with a_n != 0");
  return c;
}

cplx horner(const std::vector<cplx>& c, cplx z) {
  cplx acc = c.back();
  for (std::size_t i = c.size(); i-- > 1;) acc = acc * z + c[i - 1];
  return acc;
}

}  // namespace

double polynomial_zero_bound(const std::vector<cplx>& coeffs) {
  std::vector<cplx> c = trimmed(coeffs);
  double m = 0.0;
  for (std::size_t i = 0; i + 1 < c.size(); ++i)
    m = std::max(m, std::abs(c[i] / c.back()));
  return 1.0 + m;
}

RootFindResult find_roots(const std::vector<cplx>& coeffs, int max_iterations, double tol) {
  std::vector<cplx> c = trimmed(coeffs);
  std::size_t n = c.size() - 1;
  if (n > 32) throw std::invalid_argument("find_roots: degree cap is 32");

  // Monic normalization for stable correction terms.
  std::vector<cplx> mono(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) mono[i] = c[i] / c.back();

  double radius = 0.5 * polynomial_zero_bound(coeffs);
  std::vector<cplx> z(n);
  cplx seed(0.4, 0.9);
  cplx p = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    p *= seed;
    z[i] = radius * p / std::abs(p) * (1.0 + 0.05 * double(i) / double(n));
  }

  RootFindResult res;
  for (int it = 0; it < max_iterations; ++it) {
    double max_step = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      cplx denom = 1.0;
      for (std::size_t j = 0; j < n; ++j)
        if (j != i) denom *= z[i] - z[j];
      if (denom == cplx(0.0)) denom = 1e-30;
      cplx delta = horner(mono, z[i]) / denom;
      z[i] -= delta;
      max_step = std::max(max_step, std::abs(delta) / std::max(1.0, std::abs(z[i])));
    }
    res.iterations = it + 1;
    if (max_step < tol) break;
  }

  // Newton polish: the simultaneous iteration can stagnate in step size on
  // wide root spreads (tiny leading coefficients) while the residual is
  // still poor; a few Newton steps restore quadratic convergence per root.
  std::vector<cplx> dmono(n);
  for (std::size_t i = 1; i <= n; ++i) dmono[i - 1] = mono[i] * double(i);
  for (auto& zi : z) {
    for (int it = 0; it < 8; ++it) {
      cplx p = horner(mono, zi);
      cplx dp = horner(dmono, zi);
      if (dp == cplx(0.0)) break;
      cplx step = p / dp;
      zi -= step;
      if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(zi))) break;
    }
  }

  // Backward-error residual: |p(z)| relative to sum |c_k| |z|^k, so a value
  // of eps means z is an exact root of an eps-perturbed polynomial.
  for (auto& r : z) {
    double scale = 0.0, zp = 1.0;
    for (std::size_t i = 0; i < c.size(); ++i) {
      scale += std::abs(c[i]) * zp;
      zp *= std::abs(r);
    }
    res.max_residual =
        std::max(res.max_residual, std::abs(horner(c, r)) / std::max(scale, 1e-300));
  }
  if (res.max_residual > 1e-6)
    throw std::runtime_error("find_roots: simultaneous iteration did not converge");
  res.roots = std::move(z);
  return res;
}

bool verify_roots_within(const std::vector<cplx>& coeffs) {
  double bound = polynomial_zero_bound(coeffs);
  RootFindResult rf = find_roots(coeffs);
  for (const auto& r : rf.roots)
    if (std::abs(r) > bound + 1e-9) return false;
  return true;
}

}  // namespace growthlab

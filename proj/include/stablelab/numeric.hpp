#pragma once

#include <functional>
#include <stdexcept>

namespace stablelab {

/// Bisection on a monotone or sign-changing function. Requires f(lo) and
/// f(hi) of opposite sign; refines to |hi-lo| <= rel_tol * max(1,|root|).
double bisect(const std::function<double(double)>& f, double lo, double hi,
              double rel_tol = 1e-14, int max_iter = 200);

/// Tanh-sinh (double exponential) quadrature on (a,b). Handles integrable
/// power singularities at both endpoints, which is what the generalized
/// arcsine density has.
double tanh_sinh(const std::function<double(double)>& f, double a, double b,
                 double tol = 1e-12);

/// Adaptive Simpson on [a,b] for smooth-in-panels integrands.
double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double tol = 1e-10, int max_depth = 40);

/// Riemann zeta on (1, infinity) by Euler-Maclaurin; ~1e-15 relative.
double riemann_zeta(double s);

/// Tail sum over integers k > m of k^{-s}, s > 1, by Euler-Maclaurin.
double zeta_tail(double s, double m);

}  // namespace stablelab

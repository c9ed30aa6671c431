#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <vector>

#include "stablelab/cadlag.hpp"
#include "stablelab/rng.hpp"

namespace stablelab {

/// Stable law in the [alpha, c_plus, c_minus] coordinates: alpha in (0,2),
/// tail constants c+ and c- with c+ + c- > 0. Derived quantities:
/// beta_total = c+ + c-, beta_diff = c+ - c-, beta = beta_diff/beta_total,
/// and c_alpha = Gamma(1-alpha) cos(alpha pi/2) (pi/2 at alpha = 1).
struct StableParams {
    double alpha;
    double c_plus;
    double c_minus;

    StableParams(double a, double cp, double cm);

    double beta_total() const { return c_plus + c_minus; }
    double beta_diff() const { return c_plus - c_minus; }
    double beta() const { return beta_diff() / beta_total(); }
    double c_alpha() const;
    /// omega(alpha,t): tan(alpha pi/2) for alpha != 1, -(2/pi) log|t| at 1.
    double omega(double t) const;
    bool symmetric() const { return c_plus == c_minus; }
    /// Scale of the equivalent S(sigma, beta, 0) representation.
    double sigma() const;
};

/// One- or two-sided power tail t -> c+- t^{-alpha} ell(t) with a slowly
/// varying ell (constant 1 by default).
struct TailModel {
    double alpha;
    double c_plus;
    double c_minus;
    std::function<double(double)> ell;  // default: constant 1

    TailModel(double a, double cp, double cm,
              std::function<double(double)> l = nullptr);

    double ell_at(double t) const { return ell ? ell(t) : 1.0; }
    /// Two-sided tail (c+ + c-) t^{-alpha} ell(t).
    double tau(double t) const;
    StableParams limit_params() const {
        return StableParams(alpha, c_plus, c_minus);
    }
};

/// Canonical centering/scaling pair.
struct NormalizingSeq {
    std::function<double(std::size_t)> A;
    std::function<double(std::size_t)> B;
};

struct ArcsineParams {
    double rho;
    explicit ArcsineParams(double r);
};

/// Characteristic function
///   exp(-c_alpha (c+ + c-) |t|^alpha (1 - i beta sgn(t) omega(alpha,t))),
/// value 1 at t = 0 (also for the alpha = 1 log branch).
std::complex<double> char_fn(const StableParams& p, double t);

/// One draw of the stable law with characteristic function char_fn, by the
/// exact trigonometric (Chambers-Mallows-Stuck) construction. alpha = 1
/// requires the symmetric case.
double sample_stable(const StableParams& p, Rng& rng);

/// N iid draws.
std::vector<double> sample_stable(const StableParams& p, std::size_t n,
                                  Rng& rng);

/// B_n solving n ell(B_n) = B_n^alpha: closed form (n ell)^{1/alpha} for
/// constant ell, monotone bisection to 1e-10 relative otherwise.
double canonical_Bn(const TailModel& model, std::size_t n);

/// A_n = 0 for alpha < 1; n * mean for alpha > 1 (mean required); 0 for the
/// symmetric alpha = 1 case, which is the only alpha = 1 case supported.
double canonical_An(const TailModel& model, std::optional<double> mean,
                    std::size_t n);

NormalizingSeq canonical_normalizing(const TailModel& model,
                                     std::optional<double> mean);

/// Generalized arcsine CDF
///   F_rho(t) = (sin(rho pi)/pi) int_0^t s^{rho-1} (1-s)^{-rho} ds,
/// computed by double-exponential quadrature (the endpoint singularities
/// are integrable powers); equals (2/pi) arcsin sqrt(t) at rho = 1/2.
double arcsine_cdf(const ArcsineParams& p, double t);

/// Pr[S > 0]. Exact shortcuts: 1/2 for symmetric laws, 1 (resp. 0) for
/// one-sided alpha < 1 laws; Monte Carlo with N draws otherwise.
double positivity_rho(const StableParams& p, std::size_t n, Rng& rng);

/// Closed form 1/2 + arctan(beta tan(pi alpha/2)) / (pi alpha), alpha != 1.
double positivity_rho_exact(const StableParams& p);

/// Sampled stable Levy path on the given grid (strictly stable cases only:
/// alpha != 1, or alpha = 1 symmetric). Independent increments; the
/// increment over [s,t] is distributed as (t-s)^{1/alpha} S.
CadlagPath reference_levy_path(const StableParams& p,
                               const std::vector<double>& grid, Rng& rng);

/// CDF of the one-sided alpha = 1/2 law with c- = 0 (Levy distribution with
/// scale c_alpha c+ in this parametrization): erfc(sqrt(c/(2x))).
double levy_half_cdf(double c_plus, double x);

}  // namespace stablelab

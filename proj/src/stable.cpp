#include "stablelab/stable.hpp"

#include <cmath>
#include <stdexcept>

#include "stablelab/numeric.hpp"

namespace stablelab {

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;
}

StableParams::StableParams(double a, double cp, double cm)
    : alpha(a), c_plus(cp), c_minus(cm) {
    if (!(alpha > 0.0) || !(alpha < 2.0))
        throw std::invalid_argument("StableParams: alpha must lie in (0,2)");
    if (c_plus < 0.0 || c_minus < 0.0 || !(c_plus + c_minus > 0.0))
        throw std::invalid_argument(
            "StableParams: need c+ >= 0, c- >= 0, c+ + c- > 0");
}

double StableParams::c_alpha() const {
    if (alpha == 1.0) return kPi / 2.0;
    return std::tgamma(1.0 - alpha) * std::cos(alpha * kPi / 2.0);
}

double StableParams::omega(double t) const {
    if (alpha == 1.0) return -(2.0 / kPi) * std::log(std::fabs(t));
    return std::tan(alpha * kPi / 2.0);
}

double StableParams::sigma() const {
    return std::pow(c_alpha() * beta_total(), 1.0 / alpha);
}

TailModel::TailModel(double a, double cp, double cm,
                     std::function<double(double)> l)
    : alpha(a), c_plus(cp), c_minus(cm), ell(std::move(l)) {
    if (!(alpha > 0.0) || !(alpha < 2.0))
        throw std::invalid_argument("TailModel: alpha must lie in (0,2)");
    if (c_plus < 0.0 || c_minus < 0.0 || !(c_plus + c_minus > 0.0))
        throw std::invalid_argument("TailModel: bad tail constants");
}

double TailModel::tau(double t) const {
    return (c_plus + c_minus) * std::pow(t, -alpha) * ell_at(t);
}

ArcsineParams::ArcsineParams(double r) : rho(r) {
    if (!(rho > 0.0) || !(rho < 1.0))
        throw std::invalid_argument("ArcsineParams: rho must lie in (0,1)");
}

std::complex<double> char_fn(const StableParams& p, double t) {
    if (!std::isfinite(t)) throw std::invalid_argument("char_fn: t not finite");
    if (t == 0.0) return {1.0, 0.0};
    double mod = p.c_alpha() * p.beta_total() * std::pow(std::fabs(t), p.alpha);
    double sgn = (t > 0.0) ? 1.0 : -1.0;
    std::complex<double> expo(-mod, mod * p.beta() * sgn * p.omega(t));
    return std::exp(expo);
}

double sample_stable(const StableParams& p, Rng& rng) {
    const double alpha = p.alpha;
    const double beta = p.beta();
    if (alpha == 1.0 && !p.symmetric())
        throw std::invalid_argument(
            "sample_stable: non-symmetric alpha = 1 is unsupported");

    const double v = kPi * (rng.uniform() - 0.5);  // uniform on (-pi/2, pi/2)
    double x;
    if (alpha == 1.0) {
        x = std::tan(v);  // symmetric: standard Cauchy
    } else {
        const double w = rng.exponential();
        const double tg = std::tan(alpha * kPi / 2.0);
        const double b = std::atan(beta * tg) / alpha;
        const double s = std::pow(1.0 + beta * beta * tg * tg,
                                  1.0 / (2.0 * alpha));
        x = s * std::sin(alpha * (v + b)) /
            std::pow(std::cos(v), 1.0 / alpha) *
            std::pow(std::cos(v - alpha * (v + b)) / w, (1.0 - alpha) / alpha);
    }
    return p.sigma() * x;
}

std::vector<double> sample_stable(const StableParams& p, std::size_t n,
                                  Rng& rng) {
    std::vector<double> out(n);
    for (auto& v : out) v = sample_stable(p, rng);
    return out;
}

double canonical_Bn(const TailModel& model, std::size_t n) {
    if (n < 1) throw std::invalid_argument("canonical_Bn: n >= 1");
    const double dn = static_cast<double>(n);
    if (!model.ell)  // constant ell == 1
        return std::pow(dn, 1.0 / model.alpha);
    auto g = [&](double b) {
        return dn * model.ell(b) - std::pow(b, model.alpha);
    };
    double lo = 1e-9, hi = 1.0;
    int grow = 0;
    while (g(hi) > 0.0) {
        hi *= 2.0;
        if (++grow > 2000)
            throw std::runtime_error("canonical_Bn: root not bracketed");
    }
    return bisect(g, lo, hi, 1e-10);
}

double canonical_An(const TailModel& model, std::optional<double> mean,
                    std::size_t n) {
    if (model.alpha < 1.0) return 0.0;
    if (model.alpha > 1.0) {
        if (!mean)
            throw std::invalid_argument(
                "canonical_An: alpha > 1 requires the observable mean");
        return static_cast<double>(n) * *mean;
    }
    if (model.c_plus == model.c_minus) return 0.0;
    throw std::invalid_argument(
        "canonical_An: non-symmetric alpha = 1 centering is unsupported");
}

NormalizingSeq canonical_normalizing(const TailModel& model,
                                     std::optional<double> mean) {
    NormalizingSeq seq;
    seq.A = [model, mean](std::size_t n) {
        return canonical_An(model, mean, n);
    };
    seq.B = [model](std::size_t n) { return canonical_Bn(model, n); };
    return seq;
}

double arcsine_cdf(const ArcsineParams& p, double t) {
    if (t < 0.0 || t > 1.0)
        throw std::invalid_argument("arcsine_cdf: t must lie in [0,1]");
    if (t == 0.0) return 0.0;
    if (t == 1.0) return 1.0;
    const double rho = p.rho;
    auto dens = [rho](double s) {
        return std::pow(s, rho - 1.0) * std::pow(1.0 - s, -rho);
    };
    double raw = tanh_sinh(dens, 0.0, t, 1e-12);
    double f = std::sin(rho * kPi) / kPi * raw;
    return std::min(1.0, std::max(0.0, f));
}

double positivity_rho(const StableParams& p, std::size_t n, Rng& rng) {
    if (p.symmetric()) return 0.5;
    if (p.alpha < 1.0 && p.c_minus == 0.0) return 1.0;
    if (p.alpha < 1.0 && p.c_plus == 0.0) return 0.0;
    if (n == 0) throw std::invalid_argument("positivity_rho: n >= 1");
    std::size_t pos = 0;
    for (std::size_t i = 0; i < n; ++i)
        if (sample_stable(p, rng) > 0.0) ++pos;
    return static_cast<double>(pos) / static_cast<double>(n);
}

double positivity_rho_exact(const StableParams& p) {
    if (p.alpha == 1.0) {
        if (!p.symmetric())
            throw std::invalid_argument("positivity_rho_exact: alpha = 1");
        return 0.5;
    }
    return 0.5 + std::atan(p.beta() * std::tan(kPi * p.alpha / 2.0)) /
                     (kPi * p.alpha);
}

CadlagPath reference_levy_path(const StableParams& p,
                               const std::vector<double>& grid, Rng& rng) {
    if (p.alpha == 1.0 && !p.symmetric())
        throw std::invalid_argument(
            "reference_levy_path: non-symmetric alpha = 1 is unsupported");
    if (grid.size() < 2 || grid.front() != 0.0)
        throw std::invalid_argument("reference_levy_path: grid must start at 0");
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1]))
            throw std::invalid_argument("reference_levy_path: grid not increasing");

    std::vector<double> vals(grid.size(), 0.0);
    for (std::size_t i = 1; i < grid.size(); ++i) {
        double dt = grid[i] - grid[i - 1];
        vals[i] = vals[i - 1] +
                  std::pow(dt, 1.0 / p.alpha) * sample_stable(p, rng);
    }
    double horizon = grid.back();
    return CadlagPath::step(horizon, grid, std::move(vals));
}

double levy_half_cdf(double c_plus, double x) {
    if (x <= 0.0) return 0.0;
    StableParams p(0.5, c_plus, 0.0);
    const double c = p.sigma();  // (c_alpha c+)^2 at alpha = 1/2
    return std::erfc(std::sqrt(c / (2.0 * x)));
}

}  // namespace stablelab

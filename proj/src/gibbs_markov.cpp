#include "stablelab/gibbs_markov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "stablelab/numeric.hpp"

namespace stablelab {

std::int64_t GibbsMarkovSystem::sample_symbol(Rng& rng) const {
    return symbol_of(invariant_sample(rng));
}

double GibbsMarkovSystem::branch_measure_scale(std::int64_t) const {
    return std::numeric_limits<double>::quiet_NaN();
}

std::vector<OrbitPoint> GibbsMarkovSystem::stationary_orbit(std::size_t n,
                                                            Rng& rng) const {
    std::vector<OrbitPoint> orbit(n + 1);
    double x = invariant_sample(rng);
    for (std::size_t t = 0; t <= n; ++t) {
        orbit[t] = {x, symbol_of(x)};
        if (t < n) x = apply(x);
    }
    return orbit;
}

std::vector<std::int64_t> GibbsMarkovSystem::stationary_symbols(
    std::size_t n, Rng& rng) const {
    auto orbit = stationary_orbit(n > 0 ? n - 1 : 0, rng);
    std::vector<std::int64_t> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = orbit[i].symbol;
    return out;
}

// --- dyadic renewal map --------------------------------------------------

std::int64_t DyadicRenewalMap::symbol_of(double x) const {
    if (!(x > 0.0) || x > 1.0)
        throw BoundaryError("dyadic_renewal: point outside (0,1]");
    int e;
    double m = std::frexp(x, &e);  // x = m 2^e, m in [0.5, 1)
    return (m == 0.5) ? 2 - e : 1 - e;
}

double DyadicRenewalMap::apply(double x) const {
    std::int64_t k = symbol_of(x);
    return std::ldexp(x, static_cast<int>(k)) - 1.0;  // exact
}

Interval DyadicRenewalMap::cylinder(std::int64_t k) const {
    if (k < 1) throw std::invalid_argument("dyadic_renewal: symbols are >= 1");
    return {std::ldexp(1.0, static_cast<int>(-k)),
            std::ldexp(1.0, static_cast<int>(-k + 1))};
}

double DyadicRenewalMap::inverse_branch(std::int64_t k, double y) const {
    if (k < 1) throw std::invalid_argument("dyadic_renewal: symbols are >= 1");
    return std::ldexp(y + 1.0, static_cast<int>(-k));
}

double DyadicRenewalMap::branch_measure_scale(std::int64_t k) const {
    if (k < 1) throw std::invalid_argument("dyadic_renewal: symbols are >= 1");
    return std::ldexp(1.0, static_cast<int>(-k));
}

double DyadicRenewalMap::invariant_sample(Rng& rng) const {
    return rng.uniform();
}

std::int64_t DyadicRenewalMap::sample_symbol(Rng& rng) const {
    return rng.geometric_half();
}

std::vector<OrbitPoint> DyadicRenewalMap::stationary_orbit(std::size_t n,
                                                           Rng& rng) const {
    std::vector<OrbitPoint> orbit(n + 1);
    double x = rng.uniform();
    orbit[n] = {x, symbol_of(x)};
    for (std::size_t t = n; t-- > 0;) {
        int k = rng.geometric_half();
        x = std::ldexp(x + 1.0, -k);  // exact inverse branch
        orbit[t] = {x, k};
    }
    return orbit;
}

std::vector<std::int64_t> DyadicRenewalMap::stationary_symbols(
    std::size_t n, Rng& rng) const {
    std::vector<std::int64_t> out(n);
    for (auto& s : out) s = rng.geometric_half();
    return out;
}

// --- heavy Bernoulli shift ------------------------------------------------

HeavyBernoulliShift::HeavyBernoulliShift(double alpha, bool symmetric,
                                         std::size_t table_size)
    : alpha_(alpha), symmetric_(symmetric), table_size_(table_size) {
    if (!(alpha > 0.0) || !(alpha < 2.0))
        throw std::invalid_argument("HeavyBernoulliShift: alpha in (0,2)");
    if (table_size_ < 16)
        throw std::invalid_argument("HeavyBernoulliShift: table too small");
    const double s = 1.0 + alpha_;
    zeta_ = riemann_zeta(s);
    tail_mass_ = zeta_tail(s, static_cast<double>(table_size_)) / zeta_;

    // Alias table over magnitudes {1..K} plus the tail bucket at slot 0.
    const std::size_t n = table_size_ + 1;
    std::vector<double> p(n);
    p[0] = tail_mass_;
    for (std::size_t k = 1; k <= table_size_; ++k)
        p[k] = std::pow(static_cast<double>(k), -s) / zeta_;
    alias_prob_.assign(n, 0.0);
    alias_idx_.assign(n, 0);
    std::vector<std::uint32_t> small, large;
    std::vector<double> scaled(n);
    for (std::size_t i = 0; i < n; ++i) {
        scaled[i] = p[i] * static_cast<double>(n);
        (scaled[i] < 1.0 ? small : large).push_back(
            static_cast<std::uint32_t>(i));
    }
    while (!small.empty() && !large.empty()) {
        std::uint32_t sm = small.back();
        small.pop_back();
        std::uint32_t lg = large.back();
        alias_prob_[sm] = scaled[sm];
        alias_idx_[sm] = lg;
        scaled[lg] -= 1.0 - scaled[sm];
        if (scaled[lg] < 1.0) {
            large.pop_back();
            small.push_back(lg);
        }
    }
    for (auto i : large) alias_prob_[i] = 1.0;
    for (auto i : small) alias_prob_[i] = 1.0;

    // cumulative cylinder offsets in enumeration order +1,-1,+2,-2,...
    const std::size_t cyl = symmetric_ ? 2 * table_size_ : table_size_;
    cum_.resize(cyl + 1);
    cum_[0] = 0.0;
    for (std::size_t i = 0; i < cyl; ++i)
        cum_[i + 1] = cum_[i] + probability(symbol_at_enum(i));
}

std::string HeavyBernoulliShift::name() const {
    return symmetric_ ? "heavy_bernoulli" : "heavy_bernoulli_onesided";
}

std::size_t HeavyBernoulliShift::enum_index(std::int64_t symbol) const {
    if (symbol > 0) return 2 * static_cast<std::size_t>(symbol) - 2;
    return 2 * static_cast<std::size_t>(-symbol) - 1;
}

std::int64_t HeavyBernoulliShift::symbol_at_enum(std::size_t idx) const {
    if (!symmetric_) return static_cast<std::int64_t>(idx) + 1;
    std::int64_t mag = static_cast<std::int64_t>(idx / 2) + 1;
    return (idx % 2 == 0) ? mag : -mag;
}

double HeavyBernoulliShift::probability(std::int64_t symbol) const {
    if (symbol == 0 || (!symmetric_ && symbol < 0))
        throw std::invalid_argument("HeavyBernoulliShift: bad symbol");
    double mag = static_cast<double>(symbol > 0 ? symbol : -symbol);
    double p = std::pow(mag, -(1.0 + alpha_)) / zeta_;
    return symmetric_ ? 0.5 * p : p;
}

double HeavyBernoulliShift::symbol_abs_tail(double t) const {
    if (t < 1.0) return 1.0;
    return zeta_tail(1.0 + alpha_, std::floor(t)) / zeta_;
}

TailModel HeavyBernoulliShift::symbol_tail_model() const {
    double c = 1.0 / (alpha_ * zeta_);
    if (symmetric_) return TailModel(alpha_, 0.5 * c, 0.5 * c);
    return TailModel(alpha_, c, 0.0);
}

std::int64_t HeavyBernoulliShift::sample_magnitude(Rng& rng) const {
    const std::size_t n = table_size_ + 1;
    auto idx = static_cast<std::size_t>(
        (static_cast<unsigned __int128>(rng.next_u64()) * n) >> 64);
    std::size_t outcome =
        (rng.uniform() < alias_prob_[idx]) ? idx : alias_idx_[idx];
    if (outcome != 0) return static_cast<std::int64_t>(outcome);
    // rounded-Pareto closure beyond the table
    double x = static_cast<double>(table_size_) *
               std::pow(rng.uniform(), -1.0 / alpha_);
    double capped = std::min(x, 4.0e18);
    auto m = static_cast<std::int64_t>(std::ceil(capped));
    return std::max<std::int64_t>(m, static_cast<std::int64_t>(table_size_) + 1);
}

std::int64_t HeavyBernoulliShift::sample_symbol(Rng& rng) const {
    std::int64_t m = sample_magnitude(rng);
    if (!symmetric_) return m;
    return (rng.next_u64() & 1ULL) ? m : -m;
}

std::int64_t HeavyBernoulliShift::tail_symbol_at(double x) const {
    // x lies in the residual region [cum_.back(), 1)
    const double s = 1.0 + alpha_;
    double abs_tail_before = 1.0 - cum_.back();  // mass of all tail cylinders
    double r = x - cum_.back();
    if (r < 0.0 || r >= abs_tail_before)
        throw BoundaryError("heavy_bernoulli: point outside tail region");
    // find the magnitude j > K whose block contains r
    double K = static_cast<double>(table_size_);
    auto mass_before = [&](double j) {
        // mass of magnitudes (K, j): both signs together in enum order
        return (zeta_tail(s, K) - zeta_tail(s, j - 1.0)) / zeta_;
    };
    double jlo = K + 1.0, jhi = K + 2.0;
    while (mass_before(jhi + 1.0) <= r) {
        jhi = 2.0 * jhi;
        if (jhi > 1e300) throw BoundaryError("heavy_bernoulli: tail overflow");
    }
    while (jhi - jlo > 0.5) {
        double mid = std::floor(0.5 * (jlo + jhi));
        if (mass_before(mid + 1.0) <= r)
            jlo = mid + 1.0;
        else
            jhi = mid;
    }
    double j = jlo;
    if (!symmetric_) return static_cast<std::int64_t>(j);
    double within = r - mass_before(j);
    double half = 0.5 * std::pow(j, -s) / zeta_;
    return within < half ? static_cast<std::int64_t>(j)
                         : -static_cast<std::int64_t>(j);
}

std::int64_t HeavyBernoulliShift::symbol_of(double x) const {
    if (x < 0.0 || x >= 1.0)
        throw BoundaryError("heavy_bernoulli: point outside [0,1)");
    if (x < cum_.back()) {
        auto it = std::upper_bound(cum_.begin(), cum_.end(), x);
        std::size_t idx = static_cast<std::size_t>(it - cum_.begin()) - 1;
        return symbol_at_enum(idx);
    }
    return tail_symbol_at(x);
}

Interval HeavyBernoulliShift::cylinder(std::int64_t symbol) const {
    double mag = static_cast<double>(symbol > 0 ? symbol : -symbol);
    if (mag <= static_cast<double>(table_size_)) {
        std::size_t idx = symmetric_ ? enum_index(symbol)
                                     : static_cast<std::size_t>(symbol) - 1;
        return {cum_[idx], cum_[idx + 1]};
    }
    const double s = 1.0 + alpha_;
    double K = static_cast<double>(table_size_);
    double before =
        cum_.back() + (zeta_tail(s, K) - zeta_tail(s, mag - 1.0)) / zeta_;
    double p = probability(symbol);
    if (!symmetric_) return {before, before + p};
    if (symbol > 0) return {before, before + p};
    return {before + p, before + 2.0 * p};
}

double HeavyBernoulliShift::apply(double x) const {
    std::int64_t sym = symbol_of(x);
    Interval c = cylinder(sym);
    return std::min((x - c.lo) / c.length(), std::nextafter(1.0, 0.0));
}

double HeavyBernoulliShift::inverse_branch(std::int64_t symbol,
                                           double y) const {
    Interval c = cylinder(symbol);
    return c.lo + y * c.length();
}

double HeavyBernoulliShift::branch_measure_scale(std::int64_t symbol) const {
    return probability(symbol);  // closed form, no cumulative rounding
}

double HeavyBernoulliShift::invariant_sample(Rng& rng) const {
    double u = rng.uniform();
    return u < 1.0 ? u : 0.5;
}

std::vector<OrbitPoint> HeavyBernoulliShift::stationary_orbit(
    std::size_t n, Rng& rng) const {
    // backward through the inverse branches: symbols are iid
    std::vector<OrbitPoint> orbit(n + 1);
    double x = invariant_sample(rng);
    orbit[n] = {x, symbol_of(x)};
    for (std::size_t t = n; t-- > 0;) {
        std::int64_t k = sample_symbol(rng);
        x = inverse_branch(k, x);
        orbit[t] = {x, k};
    }
    return orbit;
}

std::vector<std::int64_t> HeavyBernoulliShift::stationary_symbols(
    std::size_t n, Rng& rng) const {
    std::vector<std::int64_t> out(n);
    for (auto& s : out) s = sample_symbol(rng);
    return out;
}

// --- Markov-modulated variant ----------------------------------------------

MarkovModulatedShift::MarkovModulatedShift(double alpha, double persistence,
                                           std::size_t table_size)
    : base_(alpha, true, table_size), persistence_(persistence) {
    if (!(persistence > 0.0) || !(persistence < 1.0))
        throw std::invalid_argument("MarkovModulatedShift: persistence in (0,1)");
}

std::pair<double, double> MarkovModulatedShift::stationary_sign() const {
    // power iteration on the 2x2 sign kernel
    double q = persistence_;
    double v0 = 1.0, v1 = 0.0;
    for (int it = 0; it < 10000; ++it) {
        double w0 = v0 * q + v1 * (1.0 - q);
        double w1 = v0 * (1.0 - q) + v1 * q;
        double diff = std::fabs(w0 - v0) + std::fabs(w1 - v1);
        v0 = w0;
        v1 = w1;
        if (diff < 1e-15) break;
    }
    return {v0, v1};
}

std::vector<std::int64_t> MarkovModulatedShift::sample_symbols(
    std::size_t n, Rng& rng) const {
    std::vector<std::int64_t> out(n);
    auto pi = stationary_sign();
    int sign = rng.uniform() < pi.first ? 1 : -1;
    for (std::size_t t = 0; t < n; ++t) {
        std::int64_t mag = base_.sample_symbol(rng);
        if (mag < 0) mag = -mag;
        out[t] = sign * mag;
        if (!(rng.uniform() < persistence_)) sign = -sign;
    }
    return out;
}

// --- observables -----------------------------------------------------------

Observable::Observable(std::string name, Eval eval, Lip lipschitz,
                       std::optional<TailModel> tail, bool integer_valued,
                       bool piecewise_constant, std::optional<double> mean)
    : name_(std::move(name)),
      eval_(std::move(eval)),
      lip_(std::move(lipschitz)),
      tail_(std::move(tail)),
      integer_valued_(integer_valued),
      piecewise_constant_(piecewise_constant),
      mean_(mean) {}

const TailModel& Observable::tail() const {
    if (!tail_)
        throw std::invalid_argument("Observable '" + name_ +
                                    "' has no power tail");
    return *tail_;
}

Observable make_f_alpha(double alpha) {
    if (!(alpha > 0.0) || !(alpha < 2.0))
        throw std::invalid_argument("make_f_alpha: alpha in (0,2)");
    auto eval = [alpha](double x, std::int64_t) {
        return std::pow(x, -1.0 / alpha);
    };
    auto lip = [alpha](std::int64_t k) {
        return (2.0 / alpha) * std::exp2(static_cast<double>(k) / alpha);
    };
    std::optional<double> mean;
    if (alpha > 1.0) mean = alpha / (alpha - 1.0);
    return Observable("f_alpha", eval, lip, TailModel(alpha, 1.0, 0.0), false,
                      false, mean);
}

Observable make_symbol_observable(const HeavyBernoulliShift& sys,
                                  std::int64_t factor) {
    if (factor == 0)
        throw std::invalid_argument("make_symbol_observable: factor != 0");
    auto eval = [factor](double, std::int64_t sym) {
        return static_cast<double>(factor * sym);
    };
    auto lip = [](std::int64_t) { return 0.0; };
    TailModel base = sys.symbol_tail_model();
    double scale = std::pow(std::fabs(static_cast<double>(factor)), base.alpha);
    double cp = base.c_plus * scale;
    double cm = base.c_minus * scale;
    if (factor < 0) std::swap(cp, cm);
    std::optional<double> mean;
    if (sys.symmetric())
        mean = 0.0;
    else if (sys.tail_alpha() > 1.0)
        mean = static_cast<double>(factor) * riemann_zeta(sys.tail_alpha()) /
               riemann_zeta(1.0 + sys.tail_alpha());
    return Observable(factor == 1 ? "symbol" : "symbol_scaled", eval, lip,
                      TailModel(base.alpha, cp, cm), true, true, mean);
}

Observable make_constant_observable(double value) {
    auto eval = [value](double, std::int64_t) { return value; };
    auto lip = [](std::int64_t) { return 0.0; };
    return Observable("constant", eval, lip, std::nullopt,
                      value == std::floor(value), true, value);
}

// --- pointwise operations ----------------------------------------------

std::vector<double> iterate(const GibbsMarkovSystem& sys, double x,
                            std::size_t n) {
    std::vector<double> orbit(n + 1);
    orbit[0] = x;
    for (std::size_t t = 0; t < n; ++t) orbit[t + 1] = sys.apply(orbit[t]);
    return orbit;
}

double ergodic_sum(const GibbsMarkovSystem& sys, const Observable& f, double x,
                   std::size_t n) {
    double acc = 0.0;
    double z = x;
    for (std::size_t t = 0; t < n; ++t) {
        acc += f(z, sys.symbol_of(z));
        z = sys.apply(z);
    }
    return acc;
}

std::size_t separation_time(const GibbsMarkovSystem& sys, double x, double y,
                            std::size_t n_max) {
    double a = x, b = y;
    for (std::size_t i = 0; i < n_max; ++i) {
        if (sys.symbol_of(a) != sys.symbol_of(b)) return i + 1;
        a = sys.apply(a);
        b = sys.apply(b);
    }
    return n_max;  // separation is at least n_max
}

double dynamical_metric(const GibbsMarkovSystem& sys, double x, double y,
                        std::size_t n_max) {
    return std::pow(sys.theta(),
                    static_cast<double>(separation_time(sys, x, y, n_max)));
}

double theta_f(const GibbsMarkovSystem& sys, const Observable& f, double x) {
    return f.lipschitz(sys.symbol_of(x));
}

double theta_f_n(const GibbsMarkovSystem& sys, const Observable& f, double x,
                 std::size_t n) {
    double acc = 0.0;
    double z = x;
    const double theta = sys.theta();
    for (std::size_t k = 0; k < n; ++k) {
        acc += std::pow(theta, static_cast<double>(n - k)) *
               f.lipschitz(sys.symbol_of(z));
        z = sys.apply(z);
    }
    return acc;
}

OscillationReport oscillation_check(const GibbsMarkovSystem& sys,
                                    const Observable& f,
                                    std::span<const std::int64_t> word,
                                    std::size_t pair_samples, Rng& rng) {
    if (word.empty())
        throw std::invalid_argument("oscillation_check: empty word");
    const std::size_t n = word.size();
    const double theta = sys.theta();
    const Interval dom = sys.domain();

    double bound = 0.0;
    for (std::size_t k = 0; k < n; ++k)
        bound += std::pow(theta, static_cast<double>(n - k)) *
                 f.lipschitz(word[k]);

    // suffix orbit of a point of the cylinder anchored at u in the space:
    // z[k] = v_{w_{k+1}} ... v_{w_n}(u) = T^k x, so the word is exact.
    auto ergodic_sum_in_cylinder = [&](double u) {
        std::vector<double> z(n + 1);
        z[n] = u;
        for (std::size_t k = n; k-- > 0;)
            z[k] = sys.inverse_branch(word[k], z[k + 1]);
        double acc = 0.0;
        for (std::size_t k = 0; k < n; ++k) acc += f(z[k], word[k]);
        return acc;
    };

    OscillationReport rep;
    rep.pairs = pair_samples;
    rep.bound = bound;
    for (std::size_t i = 0; i < pair_samples; ++i) {
        double u = rng.uniform(dom.lo, dom.hi);
        double v = rng.uniform(dom.lo, dom.hi);
        double osc =
            std::fabs(ergodic_sum_in_cylinder(u) - ergodic_sum_in_cylinder(v));
        rep.max_oscillation = std::max(rep.max_oscillation, osc);
        if (osc > bound) ++rep.violations;
    }
    return rep;
}

DistortionReport distortion_check(const GibbsMarkovSystem& sys,
                                  std::size_t rank, std::size_t trials,
                                  Rng& rng) {
    if (rank == 0) throw std::invalid_argument("distortion_check: rank >= 1");
    const Interval dom = sys.domain();
    DistortionReport rep;
    rep.trials = trials;
    for (std::size_t t = 0; t < trials; ++t) {
        std::vector<std::int64_t> word(rank);
        for (auto& w : word) w = sys.sample_symbol(rng);
        double a = rng.uniform(dom.lo, dom.hi);
        double b = rng.uniform(dom.lo, dom.hi);
        if (a > b) std::swap(a, b);
        // measures of the cylinder and of the pullback of E through the
        // same branch composition
        double lenZ = dom.hi - dom.lo;
        double lenE = b - a;
        bool affine = true;
        for (std::size_t k = rank; k-- > 0;) {
            double scale = sys.branch_measure_scale(word[k]);
            if (std::isnan(scale)) {
                affine = false;
                break;
            }
            lenZ *= scale;
            lenE *= scale;
        }
        if (!affine) {
            double zlo = dom.lo, zhi = dom.hi, ea = a, eb = b;
            for (std::size_t k = rank; k-- > 0;) {
                zlo = sys.inverse_branch(word[k], zlo);
                zhi = sys.inverse_branch(word[k], zhi);
                ea = sys.inverse_branch(word[k], ea);
                eb = sys.inverse_branch(word[k], eb);
            }
            lenZ = zhi - zlo;
            lenE = eb - ea;
        }
        double lhs = lenE / lenZ;                  // mu(Z cap T^-n E)/mu(Z)
        double rhs = (b - a) / (dom.hi - dom.lo);  // mu(E)/mu(T^n Z), full
        if (lhs <= 0.0 || rhs <= 0.0) continue;
        rep.max_log_distortion =
            std::max(rep.max_log_distortion, std::fabs(std::log(lhs / rhs)));
    }
    return rep;
}

double sample_initial(const GibbsMarkovSystem& sys, Rng& rng) {
    return sys.invariant_sample(rng);
}

double sample_initial_density(const GibbsMarkovSystem& sys,
                              const std::function<double(double)>& density,
                              double bound, Rng& rng) {
    if (!(bound > 0.0))
        throw std::invalid_argument(
            "sample_initial_density: need a finite density bound");
    for (int tries = 0; tries < 1000000; ++tries) {
        double x = sys.invariant_sample(rng);
        if (rng.uniform() * bound < density(x)) return x;
    }
    throw std::runtime_error("sample_initial_density: rejection stalled");
}

}  // namespace stablelab

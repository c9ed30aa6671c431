#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "stablelab/rng.hpp"
#include "stablelab/stable.hpp"

namespace stablelab {

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    double length() const { return hi - lo; }
};

struct BoundaryError : std::runtime_error {
    explicit BoundaryError(const std::string& what) : std::runtime_error(what) {}
};

struct OrbitPoint {
    double x;
    std::int64_t symbol;  // rank-1 cylinder of x
};

/// Piecewise-invertible Markov interval map with a countable partition,
/// full branches and an invariant probability measure (Lebesgue for the
/// concrete instances here).
class GibbsMarkovSystem {
public:
    virtual ~GibbsMarkovSystem() = default;

    virtual std::string name() const = 0;
    virtual double theta() const = 0;            // metric base in (0,1)
    virtual double distortion_bound() const = 0; // R
    virtual double big_image_bound() const = 0;  // inf_Z mu(TZ)
    virtual Interval domain() const = 0;

    virtual std::int64_t symbol_of(double x) const = 0;
    virtual double apply(double x) const = 0;
    virtual Interval cylinder(std::int64_t symbol) const = 0;
    /// Inverse branch v_Z: maps the full space into the cylinder.
    virtual double inverse_branch(std::int64_t symbol, double y) const = 0;
    /// |v_Z'| for systems with affine branches (the measure contraction of
    /// one inverse-branch application); NaN when branches are not affine.
    /// Lets measure ratios of deep cylinders be computed multiplicatively,
    /// free of endpoint cancellation.
    virtual double branch_measure_scale(std::int64_t symbol) const;
    virtual double invariant_sample(Rng& rng) const = 0;
    virtual std::int64_t sample_symbol(Rng& rng) const;

    /// n+1 points of a stationary orbit (x, Tx, ..., T^n x) with rank-1
    /// symbols. Overridden by instances that can generate exactly.
    virtual std::vector<OrbitPoint> stationary_orbit(std::size_t n,
                                                     Rng& rng) const;

    /// Rank-1 symbols along a stationary orbit. Both concrete instances
    /// have iid symbol streams and override this with direct sampling.
    virtual std::vector<std::int64_t> stationary_symbols(std::size_t n,
                                                         Rng& rng) const;
};

/// X = (0,1], cylinders Z_k = (2^{-k}, 2^{-k+1}], T x = 2^k x - 1 on Z_k,
/// Lebesgue invariant; theta = 1/2, R = 0, big images full.
///
/// Branch arithmetic is exact in binary floating point (scaling by 2^k and
/// subtracting 1 from a value in (1,2] are both exact), so computed orbits
/// are true orbits of the dyadic-rational start point. True orbits of
/// dyadic rationals reach the fixed point 1 once the mantissa is consumed,
/// which is why long stationary orbits are generated backward through the
/// inverse branches: x_t = (x_{t+1} + 1) 2^{-k} with k drawn geometric(1/2)
/// is the exact time reversal of the stationary chain.
class DyadicRenewalMap final : public GibbsMarkovSystem {
public:
    std::string name() const override { return "dyadic_renewal"; }
    double theta() const override { return 0.5; }
    double distortion_bound() const override { return 0.0; }
    double big_image_bound() const override { return 1.0; }
    Interval domain() const override { return {0.0, 1.0}; }

    std::int64_t symbol_of(double x) const override;
    double apply(double x) const override;
    Interval cylinder(std::int64_t symbol) const override;
    double inverse_branch(std::int64_t symbol, double y) const override;
    double branch_measure_scale(std::int64_t symbol) const override;
    double invariant_sample(Rng& rng) const override;
    std::int64_t sample_symbol(Rng& rng) const override;
    std::vector<OrbitPoint> stationary_orbit(std::size_t n,
                                             Rng& rng) const override;
    std::vector<std::int64_t> stationary_symbols(std::size_t n,
                                                 Rng& rng) const override;
};

/// Bernoulli shift over the alphabet Z \ {0} (symmetric) or N (one-sided)
/// with p_k proportional to |k|^{-(1+alpha)}, realized on [0,1) as
/// consecutive cylinders of length p_k mapped affinely onto [0,1).
/// Magnitudes are drawn by an alias table up to `table_size`, closed with a
/// rounded-Pareto tail (total tail mass below table_size^{-alpha}).
class HeavyBernoulliShift final : public GibbsMarkovSystem {
public:
    HeavyBernoulliShift(double alpha, bool symmetric,
                        std::size_t table_size = std::size_t{1} << 20);

    std::string name() const override;
    double theta() const override { return 0.5; }
    double distortion_bound() const override { return 0.0; }
    double big_image_bound() const override { return 1.0; }
    Interval domain() const override { return {0.0, 1.0}; }

    std::int64_t symbol_of(double x) const override;
    double apply(double x) const override;
    Interval cylinder(std::int64_t symbol) const override;
    double inverse_branch(std::int64_t symbol, double y) const override;
    double branch_measure_scale(std::int64_t symbol) const override;
    double invariant_sample(Rng& rng) const override;
    std::int64_t sample_symbol(Rng& rng) const override;
    std::vector<OrbitPoint> stationary_orbit(std::size_t n,
                                             Rng& rng) const override;
    std::vector<std::int64_t> stationary_symbols(std::size_t n,
                                                 Rng& rng) const override;

    double tail_alpha() const { return alpha_; }
    bool symmetric() const { return symmetric_; }
    /// p_k for a symbol in the alphabet.
    double probability(std::int64_t symbol) const;
    /// mu(|f| > t) for the symbol observable f, t >= 1.
    double symbol_abs_tail(double t) const;
    /// Tail model of the symbol observable (ell == 1, exact constants).
    TailModel symbol_tail_model() const;

private:
    std::int64_t sample_magnitude(Rng& rng) const;
    std::int64_t tail_symbol_at(double x) const;
    std::size_t enum_index(std::int64_t symbol) const;
    std::int64_t symbol_at_enum(std::size_t idx) const;

    double alpha_;
    bool symmetric_;
    std::size_t table_size_;
    double zeta_;       // zeta(1+alpha)
    double tail_mass_;  // conditional magnitude mass beyond table_size
    std::vector<double> alias_prob_;
    std::vector<std::uint32_t> alias_idx_;
    std::vector<double> cum_;  // cumulative cylinder offsets, enum order
};

/// Sign-persistent Markov modulation of the symmetric heavy shift: the next
/// symbol keeps the current sign with probability `persistence` and draws
/// its magnitude iid. All transition weights are positive, the stationary
/// sign law (computed by power iteration on the sign chain) is uniform, so
/// the stationary symbol law coincides with the shift's. Exercises a
/// genuinely non-iid symbol process.
class MarkovModulatedShift {
public:
    MarkovModulatedShift(double alpha, double persistence,
                         std::size_t table_size = std::size_t{1} << 20);

    const HeavyBernoulliShift& base() const { return base_; }
    double persistence() const { return persistence_; }
    /// Stationary law of the sign chain (power iteration, exact here).
    std::pair<double, double> stationary_sign() const;
    std::vector<std::int64_t> sample_symbols(std::size_t n, Rng& rng) const;

private:
    HeavyBernoulliShift base_;
    double persistence_;
};

/// Scalar observable with per-cylinder Lipschitz data and tail metadata.
class Observable {
public:
    using Eval = std::function<double(double x, std::int64_t symbol)>;
    using Lip = std::function<double(std::int64_t symbol)>;

    Observable(std::string name, Eval eval, Lip lipschitz,
               std::optional<TailModel> tail, bool integer_valued,
               bool piecewise_constant, std::optional<double> mean);

    const std::string& name() const { return name_; }
    double operator()(double x, std::int64_t symbol) const {
        return eval_(x, symbol);
    }
    double lipschitz(std::int64_t symbol) const { return lip_(symbol); }
    bool has_tail() const { return tail_.has_value(); }
    /// Throws when the observable is degenerate (no power tail).
    const TailModel& tail() const;
    bool integer_valued() const { return integer_valued_; }
    bool piecewise_constant() const { return piecewise_constant_; }
    std::optional<double> mean() const { return mean_; }

private:
    std::string name_;
    Eval eval_;
    Lip lip_;
    std::optional<TailModel> tail_;
    bool integer_valued_;
    bool piecewise_constant_;
    std::optional<double> mean_;
};

/// f_alpha(x) = x^{-1/alpha} on the dyadic renewal map: mu(f > t) = t^{-alpha}
/// exactly, D_{Z_k} = (2/alpha) 2^{k/alpha}.
Observable make_f_alpha(double alpha);
/// Symbol observable k -> factor * k on a heavy Bernoulli shift.
Observable make_symbol_observable(const HeavyBernoulliShift& sys,
                                  std::int64_t factor = 1);
Observable make_constant_observable(double value);

// --- pointwise operations ---------------------------------------------

/// Orbit x, Tx, ..., T^n x.
std::vector<double> iterate(const GibbsMarkovSystem& sys, double x,
                            std::size_t n);
/// S_n(f)(x) = sum_{k<n} f(T^k x); S_0 = 0.
double ergodic_sum(const GibbsMarkovSystem& sys, const Observable& f, double x,
                   std::size_t n);
/// Least n >= 1 with different rank-n cylinders, capped at n_max.
std::size_t separation_time(const GibbsMarkovSystem& sys, double x, double y,
                            std::size_t n_max);
double dynamical_metric(const GibbsMarkovSystem& sys, double x, double y,
                        std::size_t n_max);
/// theta_f(x) = D_{Z(x)}(f).
double theta_f(const GibbsMarkovSystem& sys, const Observable& f, double x);
/// theta_{f,n}(x) = sum_{k<n} theta^{n-k} theta_f(T^k x).
double theta_f_n(const GibbsMarkovSystem& sys, const Observable& f, double x,
                 std::size_t n);

struct OscillationReport {
    std::size_t pairs = 0;
    std::size_t violations = 0;
    double max_oscillation = 0.0;
    double bound = 0.0;
};

/// Samples point pairs in the rank-n cylinder given by `word` and checks
/// ||S_n(f)(x) - S_n(f)(y)|| <= theta_{f,n}(Z). Points and suffix orbits
/// are built through the inverse branches, so the word is honored exactly.
OscillationReport oscillation_check(const GibbsMarkovSystem& sys,
                                    const Observable& f,
                                    std::span<const std::int64_t> word,
                                    std::size_t pair_samples, Rng& rng);

struct DistortionReport {
    std::size_t trials = 0;
    double max_log_distortion = 0.0;
};

/// Samples rank-n cylinders Z and intervals E and compares
/// mu(Z cap T^{-n} E)/mu(Z) against mu(T^n Z cap E)/mu(T^n Z); the max
/// |log ratio| must stay within the distortion bound (0 for the affine
/// instances).
DistortionReport distortion_check(const GibbsMarkovSystem& sys,
                                  std::size_t rank, std::size_t trials,
                                  Rng& rng);

/// Draw from the invariant law.
double sample_initial(const GibbsMarkovSystem& sys, Rng& rng);
/// Draw from a density (w.r.t. the invariant law) bounded by `bound`,
/// by rejection.
double sample_initial_density(const GibbsMarkovSystem& sys,
                              const std::function<double(double)>& density,
                              double bound, Rng& rng);

}  // namespace stablelab

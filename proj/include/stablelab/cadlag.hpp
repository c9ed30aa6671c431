#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

namespace stablelab {

/// Finitely represented cadlag path on [0,T] with values in R^d.
///
/// Breakpoints 0 = t_0 < t_1 < ... < t_m <= T. Segment i covers
/// [t_i, t_{i+1}) and runs affinely from start_value(i) to end_value(i)
/// (equal for step paths); the last segment covers [t_m, T] and its end
/// value is the value at T. A degenerate last breakpoint t_m == T carries
/// the single point value at the horizon.
class CadlagPath {
public:
    CadlagPath(int dim, double horizon, std::vector<double> times,
               std::vector<double> start_values, std::vector<double> end_values);

    static CadlagPath constant(int dim, double horizon,
                               std::vector<double> value);
    /// Scalar step path: value values[i] on [times[i], times[i+1]).
    static CadlagPath step(double horizon, std::vector<double> times,
                           std::vector<double> values);
    /// d-dimensional step path, values row-major (segment-major).
    static CadlagPath step_multi(int dim, double horizon,
                                 std::vector<double> times,
                                 std::vector<double> values);

    int dim() const { return dim_; }
    double horizon() const { return horizon_; }
    std::size_t segment_count() const { return times_.size(); }
    double breakpoint(std::size_t i) const { return times_[i]; }
    std::span<const double> start_value(std::size_t i) const {
        return {start_vals_.data() + i * dim_, static_cast<std::size_t>(dim_)};
    }
    std::span<const double> end_value(std::size_t i) const {
        return {end_vals_.data() + i * dim_, static_cast<std::size_t>(dim_)};
    }
    bool is_step() const { return is_step_; }

    void eval(double t, std::span<double> out) const;
    double eval1(double t, int component = 0) const;

    /// Restriction to [0,s], s <= horizon.
    CadlagPath restricted(double s) const;
    /// Constant continuation to a larger horizon.
    CadlagPath extended(double s) const;
    /// Merges adjacent equal-valued segments; drops zero-size jumps.
    CadlagPath normalized() const;

    /// One row per breakpoint: t, v_1, ..., v_d.
    void write_csv(std::ostream& os) const;

private:
    int dim_;
    double horizon_;
    std::vector<double> times_;
    std::vector<double> start_vals_;
    std::vector<double> end_vals_;
    bool is_step_;
};

/// Increasing piecewise-linear homeomorphism of [0,T] onto itself.
struct TimeChange {
    double horizon = 1.0;
    std::vector<double> knots;   // includes 0 and T
    std::vector<double> images;  // includes 0 and T, strictly increasing

    TimeChange(double T, std::vector<double> k, std::vector<double> im);
    double operator()(double t) const;
    double max_distortion() const;  // sup |lambda - id|
};

/// Partial sum path on [0,1]: S_t = (S_{floor(tn)} - (floor(tn)/n) A) / B,
/// from sums S_0..S_n given row-major (n+1) x d. Exactly n step segments
/// plus the terminal value at t = 1.
CadlagPath from_partial_sums(std::span<const double> sums, int dim, double B,
                             std::span<const double> A);

/// Uniform distance sup_{t <= s} ||x_t - y_t||.
double sup_distance(const CadlagPath& x, const CadlagPath& y, double s);

/// Skorohod J1 distance on [0,s]. Exact for step paths (dynamic program
/// over monotone matchings of the two jump sets, with reordering and
/// matching time costs); for paths with affine segments it falls back to
/// the uniform distance, which is the jump-free limit of the matching
/// construction. Always <= sup_distance.
double j1_distance(const CadlagPath& x, const CadlagPath& y, double s);
double j1_distance(const CadlagPath& x, const CadlagPath& y);

struct J1InfiniteResult {
    double value = 0.0;
    double error_bound = 0.0;
};

/// d_{J1,infinity} = int_0^inf e^{-s} (1 ^ d_{J1,s}) ds, truncated at s_cut
/// with the tail closed by e^{-s_cut} (1 ^ d_{J1,s_cut}). Paths are treated
/// as constant beyond their horizons.
J1InfiniteResult j1_distance_infinite(const CadlagPath& x, const CadlagPath& y,
                                      double s_cut = 20.0);

/// Tightness moduli on [0,horizon]:
///   which=1: sup_{0<=t<=delta} ||x_t - x_0||
///   which=2: sup_{T-delta<=t<=T} ||x_T - x_t||
///   which=3: sup over t-delta <= t' < t < t'' <= t+delta (clamped) of
///            min(||x_t - x_{t'}||, ||x_{t''} - x_t||)
/// Exact for step paths by enumeration over segment triples.
double modulus(const CadlagPath& x, double delta, int which);

/// Lebesgue measure of {t in [0,1] : x_t^{(component)} > 0}; exact for
/// step and affine segments.
double occupation_fraction(const CadlagPath& x, int component = 0);

}  // namespace stablelab

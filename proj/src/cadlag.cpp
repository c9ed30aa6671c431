#include "stablelab/cadlag.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "stablelab/numeric.hpp"

namespace stablelab {

namespace {

double dist(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double d = a[i] - b[i];
        s += d * d;
    }
    return std::sqrt(s);
}

}  // namespace

CadlagPath::CadlagPath(int dim, double horizon, std::vector<double> times,
                       std::vector<double> start_values,
                       std::vector<double> end_values)
    : dim_(dim),
      horizon_(horizon),
      times_(std::move(times)),
      start_vals_(std::move(start_values)),
      end_vals_(std::move(end_values)) {
    if (dim_ < 1) throw std::invalid_argument("CadlagPath: dim >= 1 required");
    if (!(horizon_ > 0.0))
        throw std::invalid_argument("CadlagPath: positive horizon required");
    if (times_.empty() || times_.front() != 0.0)
        throw std::invalid_argument("CadlagPath: breakpoints must start at 0");
    for (std::size_t i = 1; i < times_.size(); ++i)
        if (!(times_[i] > times_[i - 1]))
            throw std::invalid_argument("CadlagPath: breakpoints not increasing");
    if (times_.back() > horizon_)
        throw std::invalid_argument("CadlagPath: breakpoint beyond horizon");
    const std::size_t want = times_.size() * static_cast<std::size_t>(dim_);
    if (start_vals_.size() != want || end_vals_.size() != want)
        throw std::invalid_argument("CadlagPath: value array size mismatch");
    is_step_ = std::equal(start_vals_.begin(), start_vals_.end(),
                          end_vals_.begin());
}

CadlagPath CadlagPath::constant(int dim, double horizon,
                                std::vector<double> value) {
    std::vector<double> times{0.0};
    std::vector<double> vals = value;
    return CadlagPath(dim, horizon, std::move(times), vals, std::move(value));
}

CadlagPath CadlagPath::step(double horizon, std::vector<double> times,
                            std::vector<double> values) {
    std::vector<double> v = values;
    return CadlagPath(1, horizon, std::move(times), v, std::move(values));
}

CadlagPath CadlagPath::step_multi(int dim, double horizon,
                                  std::vector<double> times,
                                  std::vector<double> values) {
    std::vector<double> v = values;
    return CadlagPath(dim, horizon, std::move(times), v, std::move(values));
}

namespace {

// Index of the segment containing t: the last breakpoint <= t.
std::size_t locate(const std::vector<double>& times, double t) {
    auto it = std::upper_bound(times.begin(), times.end(), t);
    return static_cast<std::size_t>(it - times.begin()) - 1;
}

}  // namespace

void CadlagPath::eval(double t, std::span<double> out) const {
    if (t < 0.0 || t > horizon_)
        throw std::invalid_argument("CadlagPath::eval: t outside [0,T]");
    std::size_t i = locate(times_, t);
    auto sv = start_value(i);
    auto ev = end_value(i);
    double seg_end = (i + 1 < times_.size()) ? times_[i + 1] : horizon_;
    double len = seg_end - times_[i];
    double frac = (len > 0.0 && !is_step_) ? (t - times_[i]) / len : 0.0;
    for (int c = 0; c < dim_; ++c) out[c] = sv[c] + frac * (ev[c] - sv[c]);
    if (t == horizon_)
        for (int c = 0; c < dim_; ++c) out[c] = end_value(times_.size() - 1)[c];
}

double CadlagPath::eval1(double t, int component) const {
    std::vector<double> buf(dim_);
    eval(t, buf);
    return buf[component];
}

CadlagPath CadlagPath::restricted(double s) const {
    if (!(s > 0.0) || s > horizon_)
        throw std::invalid_argument("CadlagPath::restricted: bad horizon");
    std::size_t last = locate(times_, s);
    std::vector<double> times(times_.begin(), times_.begin() + last + 1);
    std::vector<double> sv(start_vals_.begin(),
                           start_vals_.begin() + (last + 1) * dim_);
    std::vector<double> ev(end_vals_.begin(),
                           end_vals_.begin() + (last + 1) * dim_);
    // clip the final segment's end value to the value at s
    std::vector<double> at_s(dim_);
    eval(s, at_s);
    std::copy(at_s.begin(), at_s.end(), ev.begin() + last * dim_);
    return CadlagPath(dim_, s, std::move(times), std::move(sv), std::move(ev));
}

CadlagPath CadlagPath::extended(double s) const {
    if (s < horizon_)
        throw std::invalid_argument("CadlagPath::extended: shrinking horizon");
    if (s == horizon_) return *this;
    // The terminal value continues as a constant. If the last segment is
    // degenerate or affine we append a constant segment starting at T.
    std::vector<double> times = times_;
    std::vector<double> sv = start_vals_;
    std::vector<double> ev = end_vals_;
    auto last_end = end_value(times_.size() - 1);
    bool last_constant =
        std::equal(last_end.begin(), last_end.end(),
                   start_value(times_.size() - 1).begin()) &&
        times_.back() < horizon_;
    if (!last_constant && times_.back() < horizon_) {
        times.push_back(horizon_);
        sv.insert(sv.end(), last_end.begin(), last_end.end());
        ev.insert(ev.end(), last_end.begin(), last_end.end());
    }
    return CadlagPath(dim_, s, std::move(times), std::move(sv), std::move(ev));
}

CadlagPath CadlagPath::normalized() const {
    std::vector<double> times;
    std::vector<double> sv;
    std::vector<double> ev;
    for (std::size_t i = 0; i < times_.size(); ++i) {
        bool merge = false;
        if (!times.empty() && is_step_) {
            auto prev = std::span<const double>(ev.data() + ev.size() - dim_,
                                                static_cast<std::size_t>(dim_));
            merge = std::equal(prev.begin(), prev.end(), start_value(i).begin());
        }
        if (merge) {
            std::copy(end_value(i).begin(), end_value(i).end(),
                      ev.end() - dim_);
        } else {
            times.push_back(times_[i]);
            sv.insert(sv.end(), start_value(i).begin(), start_value(i).end());
            ev.insert(ev.end(), end_value(i).begin(), end_value(i).end());
        }
    }
    return CadlagPath(dim_, horizon_, std::move(times), std::move(sv),
                      std::move(ev));
}

void CadlagPath::write_csv(std::ostream& os) const {
    os << "t";
    for (int c = 1; c <= dim_; ++c) os << ",v" << c;
    os << "\n";
    os.precision(17);
    for (std::size_t i = 0; i < times_.size(); ++i) {
        os << times_[i];
        for (int c = 0; c < dim_; ++c) os << "," << start_value(i)[c];
        os << "\n";
    }
}

TimeChange::TimeChange(double T, std::vector<double> k, std::vector<double> im)
    : horizon(T), knots(std::move(k)), images(std::move(im)) {
    if (knots.size() != images.size() || knots.size() < 2)
        throw std::invalid_argument("TimeChange: need matching knot arrays");
    if (knots.front() != 0.0 || images.front() != 0.0 ||
        knots.back() != horizon || images.back() != horizon)
        throw std::invalid_argument("TimeChange: must fix 0 and T");
    for (std::size_t i = 1; i < knots.size(); ++i)
        if (!(knots[i] > knots[i - 1]) || !(images[i] > images[i - 1]))
            throw std::invalid_argument("TimeChange: not strictly increasing");
}

double TimeChange::operator()(double t) const {
    if (t <= 0.0) return 0.0;
    if (t >= horizon) return horizon;
    auto it = std::upper_bound(knots.begin(), knots.end(), t);
    std::size_t i = static_cast<std::size_t>(it - knots.begin());
    double f = (t - knots[i - 1]) / (knots[i] - knots[i - 1]);
    return images[i - 1] + f * (images[i] - images[i - 1]);
}

double TimeChange::max_distortion() const {
    double m = 0.0;
    for (std::size_t i = 0; i < knots.size(); ++i)
        m = std::max(m, std::fabs(images[i] - knots[i]));
    return m;
}

CadlagPath from_partial_sums(std::span<const double> sums, int dim, double B,
                             std::span<const double> A) {
    if (dim < 1 || sums.size() % static_cast<std::size_t>(dim) != 0)
        throw std::invalid_argument("from_partial_sums: bad dimensions");
    const std::size_t steps = sums.size() / static_cast<std::size_t>(dim);
    if (steps < 2) throw std::invalid_argument("from_partial_sums: empty sums");
    const std::size_t n = steps - 1;
    if (!(B > 0.0)) throw std::invalid_argument("from_partial_sums: B > 0");
    for (int c = 0; c < dim; ++c)
        if (sums[static_cast<std::size_t>(c)] != 0.0)
            throw std::invalid_argument("from_partial_sums: S_0 must be 0");

    std::vector<double> times(n + 1);
    std::vector<double> vals((n + 1) * static_cast<std::size_t>(dim));
    const double dn = static_cast<double>(n);
    for (std::size_t k = 0; k <= n; ++k) {
        times[k] = (k < n) ? static_cast<double>(k) / dn : 1.0;
        double frac = static_cast<double>(k) / dn;
        for (int c = 0; c < dim; ++c)
            vals[k * dim + c] =
                (sums[k * dim + c] - frac * A[static_cast<std::size_t>(c)]) / B;
    }
    std::vector<double> ev = vals;
    return CadlagPath(dim, 1.0, std::move(times), std::move(vals),
                      std::move(ev));
}

namespace {

CadlagPath to_horizon(const CadlagPath& x, double s) {
    if (s == x.horizon()) return x;
    return s < x.horizon() ? x.restricted(s) : x.extended(s);
}

}  // namespace

double sup_distance(const CadlagPath& xin, const CadlagPath& yin, double s) {
    if (xin.dim() != yin.dim())
        throw std::invalid_argument("sup_distance: dimension mismatch");
    CadlagPath x = to_horizon(xin, s);
    CadlagPath y = to_horizon(yin, s);
    std::vector<double> ts;
    for (std::size_t i = 0; i < x.segment_count(); ++i)
        ts.push_back(x.breakpoint(i));
    for (std::size_t i = 0; i < y.segment_count(); ++i)
        ts.push_back(y.breakpoint(i));
    ts.push_back(s);
    std::sort(ts.begin(), ts.end());
    ts.erase(std::unique(ts.begin(), ts.end()), ts.end());

    // The difference is affine between merged event times, so the sup is
    // attained at right values or left limits of those times.
    std::vector<double> bx(x.dim()), by(y.dim());
    double best = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        x.eval(ts[i], bx);
        y.eval(ts[i], by);
        best = std::max(best, dist(bx, by));
        if (i + 1 < ts.size()) {
            // left limit at the next event: evaluate just inside the panel
            double a = ts[i], b = ts[i + 1];
            double probe = b - (b - a) * 1e-12;
            x.eval(probe, bx);
            y.eval(probe, by);
            best = std::max(best, dist(bx, by));
        }
    }
    return best;
}

namespace {

struct StepView {
    std::vector<double> jump_times;          // u_1..u_p
    std::vector<std::vector<double>> piece;  // piece 0..p values
};

StepView step_view(const CadlagPath& p) {
    CadlagPath n = p.normalized();
    StepView v;
    for (std::size_t i = 0; i < n.segment_count(); ++i) {
        if (i > 0) v.jump_times.push_back(n.breakpoint(i));
        v.piece.emplace_back(n.start_value(i).begin(), n.start_value(i).end());
    }
    return v;
}

}  // namespace

double j1_distance(const CadlagPath& xin, const CadlagPath& yin, double s) {
    if (xin.dim() != yin.dim())
        throw std::invalid_argument("j1_distance: dimension mismatch");
    CadlagPath x = to_horizon(xin, s);
    CadlagPath y = to_horizon(yin, s);
    if (!x.is_step() || !y.is_step()) return sup_distance(x, y, s);

    StepView X = step_view(x);
    StepView Y = step_view(y);
    const std::size_t p = X.jump_times.size();
    const std::size_t q = Y.jump_times.size();
    const auto& u = X.jump_times;
    const auto& w = Y.jump_times;

    auto V = [&](std::size_t i, std::size_t j) {
        return dist(X.piece[i], Y.piece[j]);
    };

    // Bottleneck DP over monotone staircases through the (p+1) x (q+1)
    // grid of piece pairs. Every visited cell pays its value mismatch.
    // A diagonal move matches jump u_i to w_j at time cost |u_i - w_j|;
    // a single advance schedules one unmatched jump and pays the largest
    // reordering violation against the jumps of the other path already
    // consumed (zero when the natural time order is kept).
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> prev(q + 1, inf), cur(q + 1, inf);
    prev[0] = V(0, 0);
    for (std::size_t j = 1; j <= q; ++j)
        prev[j] = std::max(prev[j - 1], V(0, j));
    for (std::size_t i = 1; i <= p; ++i) {
        cur[0] = std::max(prev[0], V(i, 0));
        for (std::size_t j = 1; j <= q; ++j) {
            double diag = std::max(prev[j - 1], std::fabs(u[i - 1] - w[j - 1]));
            double xadv =
                std::max(prev[j], std::max(0.0, w[j - 1] - u[i - 1]));
            double yadv =
                std::max(cur[j - 1], std::max(0.0, u[i - 1] - w[j - 1]));
            cur[j] = std::max(V(i, j), std::min({diag, xadv, yadv}));
        }
        std::swap(prev, cur);
    }
    return prev[q];
}

double j1_distance(const CadlagPath& x, const CadlagPath& y) {
    return j1_distance(x, y, std::min(x.horizon(), y.horizon()));
}

J1InfiniteResult j1_distance_infinite(const CadlagPath& x, const CadlagPath& y,
                                      double s_cut) {
    if (x.dim() != y.dim())
        throw std::invalid_argument("j1_distance_infinite: dimension mismatch");
    auto integrand = [&](double s) {
        double d = j1_distance(x, y, s);
        return std::exp(-s) * std::min(1.0, d);
    };
    // panels split at the paths' breakpoints, where d_{J1,s} can kink
    std::vector<double> cuts{0.0, s_cut};
    for (std::size_t i = 1; i < x.segment_count(); ++i)
        if (x.breakpoint(i) < s_cut) cuts.push_back(x.breakpoint(i));
    for (std::size_t i = 1; i < y.segment_count(); ++i)
        if (y.breakpoint(i) < s_cut) cuts.push_back(y.breakpoint(i));
    if (x.horizon() < s_cut) cuts.push_back(x.horizon());
    if (y.horizon() < s_cut) cuts.push_back(y.horizon());
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    const double tol = 1e-9;
    J1InfiniteResult out;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        double lo = cuts[i];
        double hi = cuts[i + 1];
        if (lo == 0.0) lo = std::min(1e-12, hi * 0.5);  // open at 0
        out.value += adaptive_simpson(integrand, lo, hi, tol);
        out.error_bound += tol;
    }
    out.value += std::exp(-s_cut) * std::min(1.0, j1_distance(x, y, s_cut));
    out.error_bound += std::exp(-s_cut);
    return out;
}

double modulus(const CadlagPath& xin, double delta, int which) {
    if (!(delta > 0.0) || delta >= 1.0)
        throw std::invalid_argument("modulus: delta must lie in (0,1)");
    if (which < 1 || which > 3)
        throw std::invalid_argument("modulus: which must be 1, 2 or 3");
    if (!xin.is_step())
        throw std::invalid_argument("modulus: exact evaluation needs a step path");
    CadlagPath x = xin.normalized();
    const double T = x.horizon();
    const std::size_t m = x.segment_count();

    auto val = [&](std::size_t i) { return x.start_value(i); };

    if (which == 1) {
        double best = 0.0;
        for (std::size_t i = 0; i < m && x.breakpoint(i) <= delta; ++i)
            best = std::max(best, dist(val(i), val(0)));
        return best;
    }
    if (which == 2) {
        auto vT = x.end_value(m - 1);
        double best = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            double seg_end = (i + 1 < m) ? x.breakpoint(i + 1) : T;
            bool reaches = (i + 1 < m) ? (seg_end > T - delta) : true;
            if (reaches) best = std::max(best, dist(vT, val(i)));
        }
        return best;
    }

    // which == 3: exact enumeration over segment triples i' < i < i''.
    // Segment i covers [t_i, t_{i+1}) except the last, closed at T.
    auto seg_start = [&](std::size_t i) { return x.breakpoint(i); };
    auto seg_end = [&](std::size_t i) {
        return (i + 1 < m) ? x.breakpoint(i + 1) : T;
    };
    double best = 0.0;
    for (std::size_t i = 1; i + 1 < m; ++i) {
        for (std::size_t il = 0; il < i; ++il) {
            double dl = dist(val(i), val(il));
            if (dl <= best) continue;
            for (std::size_t ir = i + 1; ir < m; ++ir) {
                double cand = std::min(dl, dist(val(ir), val(i)));
                if (cand <= best) continue;
                // a feasible t in segment i with valid t' and t'' windows;
                // all upper constraints are strict (half-open segments)
                double lo = std::max(seg_start(i), seg_start(ir) - delta);
                double hi = std::min({seg_end(i), seg_end(il) + delta,
                                      seg_end(ir)});
                if (lo < hi) best = cand;
            }
        }
    }
    return best;
}

double occupation_fraction(const CadlagPath& x, int component) {
    if (component < 0 || component >= x.dim())
        throw std::invalid_argument("occupation_fraction: bad component");
    const double T = x.horizon();
    const std::size_t m = x.segment_count();
    double occ = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        double a = x.breakpoint(i);
        double b = (i + 1 < m) ? x.breakpoint(i + 1) : T;
        if (b <= a) continue;
        double v0 = x.start_value(i)[component];
        double v1 = x.end_value(i)[component];
        if (x.is_step() || v0 == v1) {
            if (v0 > 0.0) occ += b - a;
        } else {
            // affine segment: measure of the sub-interval where it is > 0
            if (v0 > 0.0 && v1 > 0.0) {
                occ += b - a;
            } else if (v0 > 0.0 || v1 > 0.0) {
                double c = a + (b - a) * (0.0 - v0) / (v1 - v0);
                occ += (v0 > 0.0) ? (c - a) : (b - c);
            }
        }
    }
    return occ / T;
}

}  // namespace stablelab

#include "stablelab/numeric.hpp"

#include <cmath>
#include <vector>

namespace stablelab {

double bisect(const std::function<double(double)>& f, double lo, double hi,
              double rel_tol, int max_iter) {
    double flo = f(lo);
    double fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo > 0) == (fhi > 0))
        throw std::runtime_error("bisect: root not bracketed");
    for (int i = 0; i < max_iter; ++i) {
        double mid = 0.5 * (lo + hi);
        double fm = f(mid);
        if (fm == 0.0) return mid;
        if ((fm > 0) == (flo > 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
        if (hi - lo <= rel_tol * std::max(1.0, std::fabs(mid))) break;
    }
    return 0.5 * (lo + hi);
}

double tanh_sinh(const std::function<double(double)>& f, double a, double b,
                 double tol) {
    if (!(b > a)) return 0.0;
    const double c = 0.5 * (a + b);
    const double r = 0.5 * (b - a);
    const double pi_half = 1.5707963267948966;

    // g(u) = f(c + r*tanh(pi/2 sinh u)) * weight; integrate over u.
    auto eval = [&](double u, double& node_ok) -> double {
        double s = std::sinh(u);
        double ch = std::cosh(u);
        double t = std::tanh(pi_half * s);
        double x = c + r * t;
        if (x <= a || x >= b) {  // collapsed to an endpoint in fp arithmetic
            node_ok = 0.0;
            return 0.0;
        }
        double sech = 1.0 / std::cosh(pi_half * s);
        double w = pi_half * ch * sech * sech;
        node_ok = 1.0;
        return f(x) * w;
    };

    const double umax = 4.0;  // tanh(pi/2 sinh 4) is 1 to ~1e-37
    double h = 1.0;
    double ok;
    double sum = eval(0.0, ok);
    double integral = h * sum;
    for (int level = 1; level <= 12; ++level) {
        h *= 0.5;
        double add = 0.0;
        for (double u = h; u <= umax; u += 2.0 * h) {
            add += eval(u, ok);
            add += eval(-u, ok);
        }
        double next = 0.5 * integral + h * add;
        if (level >= 4 && std::fabs(next - integral) <=
                              tol * std::max(1.0, std::fabs(next))) {
            integral = next;
            break;
        }
        integral = next;
    }
    return r * integral;
}

namespace {

double simpson_panel(const std::function<double(double)>& f, double a,
                     double fa, double b, double fb, double m, double fm) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_simpson_rec(const std::function<double(double)>& f, double a,
                            double fa, double b, double fb, double m,
                            double fm, double whole, double tol, int depth) {
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = simpson_panel(f, a, fa, m, fm, lm, flm);
    double right = simpson_panel(f, m, fm, b, fb, rm, frm);
    double delta = left + right - whole;
    if (depth <= 0 || std::fabs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return adaptive_simpson_rec(f, a, fa, m, fm, lm, flm, left, 0.5 * tol,
                                depth - 1) +
           adaptive_simpson_rec(f, m, fm, b, fb, rm, frm, right, 0.5 * tol,
                                depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double tol, int max_depth) {
    if (!(b > a)) return 0.0;
    double m = 0.5 * (a + b);
    double fa = f(a), fb = f(b), fm = f(m);
    double whole = simpson_panel(f, a, fa, b, fb, m, fm);
    return adaptive_simpson_rec(f, a, fa, b, fb, m, fm, whole, tol, max_depth);
}

double zeta_tail(double s, double m) {
    // sum_{k>m} k^{-s} = m^{1-s}/(s-1) - m^{-s}/2 + s m^{-s-1}/12
    //                    - s(s+1)(s+2) m^{-s-3}/720 + ...
    if (s <= 1.0) throw std::invalid_argument("zeta_tail: s must exceed 1");
    double inv = 1.0 / m;
    double ms = std::pow(m, -s);
    return std::pow(m, 1.0 - s) / (s - 1.0) - 0.5 * ms +
           s * ms * inv / 12.0 -
           s * (s + 1.0) * (s + 2.0) * ms * inv * inv * inv / 720.0;
}

double riemann_zeta(double s) {
    if (s <= 1.0) throw std::invalid_argument("riemann_zeta: s must exceed 1");
    const int m = 20000;
    double sum = 0.0;
    for (int k = m; k >= 1; --k) sum += std::pow(static_cast<double>(k), -s);
    return sum + zeta_tail(s, static_cast<double>(m));
}

}  // namespace stablelab

#include "ckns/mathutil.hpp"

#include <cmath>
#include <stdexcept>

namespace ckns {

std::pair<double, double> golden_max(const std::function<double(double)>& f, double a, double b,
                                     double tol, int max_iter) {
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - phi * (b - a);
    double d = a + phi * (b - a);
    double fc = f(c), fd = f(d);
    for (int it = 0; it < max_iter && (b - a) > tol; ++it) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = f(d);
        }
    }
    const double xm = 0.5 * (a + b);
    return {xm, f(xm)};
}

double bisect_smallest(const std::function<double(double)>& phi, double lo, double hi, double tol,
                       int max_iter) {
    if (phi(hi) > 1.0) throw std::runtime_error("bisect_smallest: no admissible k in bracket");
    if (phi(lo) <= 1.0) return lo;
    for (int it = 0; it < max_iter && (hi - lo) > tol; ++it) {
        const double mid = 0.5 * (lo + hi);
        (phi(mid) <= 1.0 ? hi : lo) = mid;
    }
    return hi;
}

std::pair<double, double> max_entropy_weight(double alpha) {
    // substitute n = e^{-s}: maximize s * e^{-alpha s} over s > 0
    auto g = [alpha](double s) { return s * std::exp(-alpha * s); };
    auto [s_star, val] = golden_max(g, 1e-8, 40.0 / alpha, 1e-10 / alpha);
    return {std::exp(-s_star), val};
}

EntropySplitBounds entropy_split_bounds() {
    EntropySplitBounds b;
    // low branch on (0,1): n^{1/6} |ln n|^{3/2}, substituted n = e^{-s}
    auto low_inner = [](double s) { return std::exp(-s / 6.0) * std::pow(s, 1.5); };
    double m = golden_max(low_inner, 1e-9, 200.0).second;
    // low branch on [1,100]: increasing tail dominates at n = 100
    auto low_outer = [](double n) { return std::pow(n, 1.0 / 6.0) * std::pow(std::log(n), 1.5); };
    m = std::max(m, golden_max(low_outer, 1.0, 100.0).second);
    m = std::max(m, low_outer(100.0));
    b.k_low = m;
    // high branch on (100, inf): n^{-1/6} (ln n)^{3/2}, maximum near e^9
    auto high = [](double n) { return std::pow(n, -1.0 / 6.0) * std::pow(std::log(n), 1.5); };
    b.k_high = std::max(golden_max(high, 100.0, 1e6).second, high(100.0));
    return b;
}

} // namespace ckns

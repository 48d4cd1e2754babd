#pragma once

#include <cmath>
#include <functional>
#include <utility>

namespace ckns {

/// n ln n extended continuously by 0 at n = 0 (and exactly 0 at n = 1).
inline double xlnx(double n) { return n > 0.0 ? n * std::log(n) : 0.0; }

inline double log_plus(double t) { return t > 1.0 ? std::log(t) : 0.0; }

/// Golden-section maximizer for a unimodal function on [a,b].
/// Returns {argmax, max}.
std::pair<double, double> golden_max(const std::function<double(double)>& f, double a, double b,
                                     double tol = 1e-12, int max_iter = 400);

/// Bisection for the smallest k in [lo,hi] with phi(k) <= 1, phi nonincreasing.
double bisect_smallest(const std::function<double(double)>& phi, double lo, double hi,
                       double tol = 1e-8, int max_iter = 200);

/// sup over n in (0,1) of n^alpha * |ln n|; attained at n = exp(-1/alpha).
/// Computed numerically (log-substituted golden section), not from the closed form.
std::pair<double, double> max_entropy_weight(double alpha);

/// Pointwise split constants of the A=100 entropy decomposition:
/// K_low  = sup_{0<n<=100} |n ln n|^{3/2} / n^{4/3}
/// K_high = sup_{n>100}    |n ln n|^{3/2} / n^{5/3}
struct EntropySplitBounds {
    double k_low = 0.0;
    double k_high = 0.0;
};
EntropySplitBounds entropy_split_bounds();

} // namespace ckns

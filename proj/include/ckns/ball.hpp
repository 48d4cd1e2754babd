#pragma once

#include <string>
#include <vector>

#include "ckns/grid.hpp"

namespace ckns {

/// Node set of the discrete indicator of B_r(x0) with periodic minimal-image
/// distance, stored as contiguous runs along the fast (z) axis so sums touch
/// memory linearly. Strict inequality |x - x0| < r.
class BallIndex {
  public:
    BallIndex(const Grid& g, const Vec3& x0, double r);

    struct Run {
        std::int64_t base;
        int len;
    };
    const std::vector<Run>& runs() const { return runs_; }
    std::int64_t node_count() const { return count_; }
    const Grid& grid() const { return grid_; }
    double radius() const { return r_; }
    const Vec3& center() const { return x0_; }

    /// h <= r/8 on every participating axis (z exempt in planar mode).
    bool resolved() const { return resolved_; }
    /// Discrete measure: node count times the cell volume.
    double volume() const { return double(count_) * grid_.cell_volume(); }

    double sum(const std::vector<double>& values) const;
    template <class F>
    double sum_mapped(const std::vector<double>& values, F&& f) const {
        double acc = 0.0;
        for (const Run& run : runs_) {
            const double* p = values.data() + run.base;
            for (int i = 0; i < run.len; ++i) acc += f(p[i]);
        }
        return acc;
    }
    template <class F>
    double sum_mapped2(const std::vector<double>& a, const std::vector<double>& b, F&& f) const {
        double acc = 0.0;
        for (const Run& run : runs_) {
            const double* pa = a.data() + run.base;
            const double* pb = b.data() + run.base;
            for (int i = 0; i < run.len; ++i) acc += f(pa[i], pb[i]);
        }
        return acc;
    }

  private:
    Grid grid_;
    Vec3 x0_;
    double r_;
    bool resolved_ = true;
    std::int64_t count_ = 0;
    std::vector<Run> runs_;
};

struct BallQuad {
    double value = 0.0;
    bool resolved = true;
    std::string warning;
};

/// Riemann sum of f over the discrete indicator of B_r(x0), weight = cell
/// volume. Throws if the ball does not fit in the periodic box (r >= L/2);
/// under-resolution (h > r/8) yields a warning-carrying result.
BallQuad integrate_ball(const ScalarField& f, const Vec3& x0, double r);

/// Integral of a piecewise-linear interpolant of (t_j, v_j) over [ta, tb].
/// Samples must cover the window. Used for all cylinder time integrals.
double trapezoid_window(const std::vector<double>& t, const std::vector<double>& v, double ta,
                        double tb);

} // namespace ckns

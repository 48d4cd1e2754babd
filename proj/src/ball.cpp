#include "ckns/ball.hpp"

#include <algorithm>
#include <cmath>

namespace ckns {

BallIndex::BallIndex(const Grid& g, const Vec3& x0, double r) : grid_(g), x0_(x0), r_(r) {
    if (!(r > 0.0)) throw Error("ball radius must be positive");
    if (!(r < 0.5 * g.box)) throw Error("ball of radius " + std::to_string(r) +
                                        " does not fit in periodic box of length " +
                                        std::to_string(g.box));
    resolved_ = g.h_max() <= r / 8.0 + 1e-14 * r;

    const double r2 = r * r;
    // index windows around the center, wrapped per axis
    auto window = [&](double c, double h, int n, int& lo, int& hi) {
        if (n == 1) {
            lo = hi = 0;
            return;
        }
        lo = int(std::floor((c - r) / h)) - 1;
        hi = int(std::ceil((c + r) / h)) + 1;
        if (hi - lo + 1 > n) { // never visit a node twice
            lo = 0;
            hi = n - 1;
        }
    };
    int ilo, ihi, jlo, jhi, klo, khi;
    window(x0[0], g.hx(), g.nx, ilo, ihi);
    window(x0[1], g.hy(), g.ny, jlo, jhi);
    window(x0[2], g.hz(), g.nz, klo, khi);

    auto mod = [](int a, int n) { return ((a % n) + n) % n; };
    for (int i = ilo; i <= ihi; ++i) {
        const double dx = g.wrap(i * g.hx() - x0[0]);
        const double dx2 = dx * dx;
        if (dx2 >= r2) continue;
        const int im = mod(i, g.nx);
        for (int j = jlo; j <= jhi; ++j) {
            const double dy = g.wrap(j * g.hy() - x0[1]);
            const double rem = r2 - dx2 - dy * dy;
            if (rem <= 0.0) continue;
            const int jm = mod(j, g.ny);
            // collect the in-ball k nodes as wrapped contiguous runs
            int run_start = -1, prev = -2;
            auto flush = [&](int endk) {
                if (run_start < 0) return;
                runs_.push_back({g.index(im, jm, run_start), endk - run_start + 1});
                count_ += endk - run_start + 1;
                run_start = -1;
            };
            for (int k = klo; k <= khi; ++k) {
                const double dz = (g.nz == 1) ? g.wrap(-x0[2]) : g.wrap(k * g.hz() - x0[2]);
                if (dz * dz < rem) {
                    const int km = mod(k, g.nz);
                    if (run_start >= 0 && km == prev + 1) {
                        prev = km;
                    } else {
                        flush(prev);
                        run_start = km;
                        prev = km;
                    }
                }
            }
            flush(prev);
        }
    }
}

double BallIndex::sum(const std::vector<double>& values) const {
    double acc = 0.0;
    for (const Run& run : runs_) {
        const double* p = values.data() + run.base;
        for (int i = 0; i < run.len; ++i) acc += p[i];
    }
    return acc;
}

BallQuad integrate_ball(const ScalarField& f, const Vec3& x0, double r) {
    require_finite(f, "integrate_ball input");
    BallIndex idx(f.grid, x0, r);
    BallQuad q;
    q.value = idx.sum(f.v) * f.grid.cell_volume();
    q.resolved = idx.resolved();
    if (!q.resolved)
        q.warning = "ball under-resolved: h=" + std::to_string(f.grid.h_max()) +
                    " exceeds r/8=" + std::to_string(r / 8.0);
    return q;
}

double trapezoid_window(const std::vector<double>& t, const std::vector<double>& v, double ta,
                        double tb) {
    if (t.size() != v.size() || t.size() < 2) throw Error("trapezoid_window: need >= 2 samples");
    const double slack = 1e-12 * (1.0 + std::fabs(ta) + std::fabs(tb));
    if (t.front() > ta + slack || t.back() < tb - slack)
        throw Error("trapezoid_window: samples do not cover the requested window");
    if (tb <= ta) return 0.0;

    auto interp = [&](double tq) {
        auto it = std::upper_bound(t.begin(), t.end(), tq);
        std::size_t hi = std::min<std::size_t>(t.size() - 1, std::max<std::ptrdiff_t>(1, it - t.begin()));
        std::size_t lo = hi - 1;
        const double w = (t[hi] == t[lo]) ? 0.0 : (tq - t[lo]) / (t[hi] - t[lo]);
        return v[lo] + w * (v[hi] - v[lo]);
    };

    double acc = 0.0;
    double tprev = ta, vprev = interp(ta);
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] <= ta) continue;
        if (t[i] >= tb) break;
        acc += 0.5 * (vprev + v[i]) * (t[i] - tprev);
        tprev = t[i];
        vprev = v[i];
    }
    const double vb = interp(tb);
    acc += 0.5 * (vprev + vb) * (tb - tprev);
    return acc;
}

} // namespace ckns

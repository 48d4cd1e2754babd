#include "ckns/testfn.hpp"

#include <algorithm>
#include <cmath>

namespace ckns {

namespace {

double smooth01(double t) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    return t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}
double smooth01_d(double t) {
    if (t <= 0.0 || t >= 1.0) return 0.0;
    const double u = t * (1.0 - t);
    return 30.0 * u * u;
}
double smooth01_dd(double t) {
    if (t <= 0.0 || t >= 1.0) return 0.0;
    return 60.0 * t * (1.0 - t) * (1.0 - 2.0 * t);
}

} // namespace

BackwardHeatKernel::BackwardHeatKernel(int n) : level(n), rn(std::pow(2.0, -n)) {
    if (n < 1) throw Error("backward heat kernel level must be >= 1");
}

double BackwardHeatKernel::value(const Vec3& dx, double t) const {
    const double s = rn * rn - t;
    if (!(s > 0.0)) throw Error("backward heat kernel evaluated at t >= r_n^2");
    const double q = dot(dx, dx) / (4.0 * s);
    return std::pow(s, -1.5) * std::exp(-q);
}

Vec3 BackwardHeatKernel::grad(const Vec3& dx, double t) const {
    const double s = rn * rn - t;
    const double v = value(dx, t);
    return (-v / (2.0 * s)) * dx;
}

double BackwardHeatKernel::dt(const Vec3& dx, double t) const {
    const double s = rn * rn - t;
    const double v = value(dx, t);
    return v * (1.5 / s - dot(dx, dx) / (4.0 * s * s));
}

double BackwardHeatKernel::lap(const Vec3& dx, double t) const {
    const double s = rn * rn - t;
    const double v = value(dx, t);
    return v * (dot(dx, dx) / (4.0 * s * s) - 1.5 / s);
}

double XiCutoff::value(const Vec3& dx, double t) const {
    const double rad = norm(dx);
    const double xs = 1.0 - smooth01((rad - r_plateau) / (r_support - r_plateau));
    const double xt = t >= 0.0 ? 1.0
                               : 1.0 - smooth01((-t - r_plateau * r_plateau) /
                                                (r_support * r_support - r_plateau * r_plateau));
    return xs * xt;
}

Vec3 XiCutoff::grad(const Vec3& dx, double t) const {
    const double rad = norm(dx);
    if (rad == 0.0) return {0, 0, 0};
    const double w = r_support - r_plateau;
    const double ds = -smooth01_d((rad - r_plateau) / w) / w;
    const double xt = t >= 0.0 ? 1.0
                               : 1.0 - smooth01((-t - r_plateau * r_plateau) /
                                                (r_support * r_support - r_plateau * r_plateau));
    return (ds * xt / rad) * dx;
}

double XiCutoff::dt(const Vec3& dx, double t) const {
    if (t >= 0.0) return 0.0;
    const double rad = norm(dx);
    const double xs = 1.0 - smooth01((rad - r_plateau) / (r_support - r_plateau));
    const double wt = r_support * r_support - r_plateau * r_plateau;
    return xs * smooth01_d((-t - r_plateau * r_plateau) / wt) / wt;
}

double XiCutoff::lap(const Vec3& dx, double t) const {
    const double rad = norm(dx);
    const double w = r_support - r_plateau;
    const double xt = t >= 0.0 ? 1.0
                               : 1.0 - smooth01((-t - r_plateau * r_plateau) /
                                                (r_support * r_support - r_plateau * r_plateau));
    if (rad == 0.0) return 0.0;
    const double arg = (rad - r_plateau) / w;
    // radial laplacian: X'' + 2 X' / r
    const double x1 = -smooth01_d(arg) / w;
    const double x2 = -smooth01_dd(arg) / (w * w);
    return xt * (x2 + 2.0 * x1 / rad);
}

PhiN::PhiN(int level, XiCutoff xi) : psi_(level), xi_(xi) {
    if (!(xi_.r_plateau > 0.0 && xi_.r_support > xi_.r_plateau))
        throw Error("phi_n cutoff needs 0 < plateau < support");
}

double PhiN::value(const Vec3& dx, double t) const { return psi_.value(dx, t) * xi_.value(dx, t); }

Vec3 PhiN::grad(const Vec3& dx, double t) const {
    const Vec3 gp = psi_.grad(dx, t);
    const Vec3 gx = xi_.grad(dx, t);
    const double vp = psi_.value(dx, t);
    const double vx = xi_.value(dx, t);
    return {gp[0] * vx + vp * gx[0], gp[1] * vx + vp * gx[1], gp[2] * vx + vp * gx[2]};
}

double PhiN::dt_plus_lap(const Vec3& dx, double t) const {
    // (dt+lap)(Psi xi) = Psi (dt+lap) xi + 2 grad Psi . grad xi; Psi is caloric
    const double vp = psi_.value(dx, t);
    const Vec3 gp = psi_.grad(dx, t);
    const Vec3 gx = xi_.grad(dx, t);
    return vp * (xi_.dt(dx, t) + xi_.lap(dx, t)) + 2.0 * dot(gp, gx);
}

int PhiN::supersample(double h) const {
    // narrowest Gaussian width is sqrt(2) r_n at t -> 0
    const double sigma = std::sqrt(2.0) * psi_.rn;
    const int s = int(std::ceil(4.0 * h / sigma));
    return std::clamp(s, 1, 8);
}

double BumpCutoff::value(const Vec3& dx, double t) const {
    const double xs = 1.0 - smooth01((norm(dx) - 0.5 * r_) / (0.5 * r_));
    const double xt = t >= 0.0 ? 1.0 : 1.0 - smooth01((-t - 0.25 * r_ * r_) / (0.75 * r_ * r_));
    return xs * xt;
}

Vec3 BumpCutoff::grad(const Vec3& dx, double t) const {
    const double rad = norm(dx);
    if (rad == 0.0) return {0, 0, 0};
    const double w = 0.5 * r_;
    const double ds = -smooth01_d((rad - 0.5 * r_) / w) / w;
    const double xt = t >= 0.0 ? 1.0 : 1.0 - smooth01((-t - 0.25 * r_ * r_) / (0.75 * r_ * r_));
    return (ds * xt / rad) * dx;
}

double BumpCutoff::dt_plus_lap(const Vec3& dx, double t) const {
    const double rad = norm(dx);
    const double w = 0.5 * r_;
    const double arg = (rad - 0.5 * r_) / w;
    const double xs = 1.0 - smooth01(arg);
    const double xt = t >= 0.0 ? 1.0 : 1.0 - smooth01((-t - 0.25 * r_ * r_) / (0.75 * r_ * r_));
    double lap_xs = 0.0;
    if (rad > 0.0) lap_xs = -smooth01_dd(arg) / (w * w) - 2.0 * smooth01_d(arg) / (w * rad);
    double dt_xt = 0.0;
    if (t < 0.0) dt_xt = smooth01_d((-t - 0.25 * r_ * r_) / (0.75 * r_ * r_)) / (0.75 * r_ * r_);
    return xs * dt_xt + xt * lap_xs;
}

PhiPropertiesReport phi_properties_check(int level, double h, double dt) {
    PhiN phi(level);
    const BackwardHeatKernel& psi = phi.kernel();
    const double rn = psi.rn;
    PhiPropertiesReport rep;
    rep.level = level;

    // kernel bounds on a deterministic sample of Q_{r_n}
    double min_phi = 1e300, max_phi = -1e300, min_xi = 1e300;
    const int ns = 9;
    for (int it = 1; it <= ns; ++it) {
        const double t = -rn * rn * it / (ns + 1.0);
        for (int ix = -ns; ix <= ns; ++ix)
            for (int iy = -ns; iy <= ns; ++iy) {
                const Vec3 x{rn * ix / (ns + 1.0), rn * iy / (ns + 1.0), rn * 0.3 * ix / (ns + 1.0)};
                if (norm(x) >= rn) continue;
                const double v = phi.value(x, t);
                min_phi = std::min(min_phi, v);
                max_phi = std::max(max_phi, v);
                min_xi = std::min(min_xi, phi.xi().value(x, t));
            }
    }
    rep.c1_bound = std::pow(2.0, -1.5) * std::exp(-0.25) * min_xi;
    rep.c1_empirical = min_phi * std::pow(rn, 3.0);
    rep.c2_empirical = max_phi * std::pow(rn, 3.0);
    rep.bounds_hold = rep.c1_empirical >= rep.c1_bound - 1e-12 && rep.c2_empirical <= 1.0 + 1e-12;

    // finite-difference residuals at (h, dt) and (h/2, dt/2)
    auto fd_residual = [&](auto&& value_fn, const Vec3& x, double t, double hh, double ddt) {
        double lap = 0.0;
        const double c0 = value_fn(x, t);
        for (int a = 0; a < 3; ++a) {
            Vec3 xp = x, xm = x;
            xp[a] += hh;
            xm[a] -= hh;
            lap += (value_fn(xp, t) - 2.0 * c0 + value_fn(xm, t)) / (hh * hh);
        }
        const double ddt_c = (value_fn(x, t + ddt) - value_fn(x, t - ddt)) / (2.0 * ddt);
        return std::fabs(ddt_c + lap);
    };
    auto psi_fn = [&](const Vec3& x, double t) { return psi.value(x, t); };
    auto phi_fn = [&](const Vec3& x, double t) { return phi.value(x, t); };

    const std::array<Vec3, 4> pts{Vec3{0.4 * rn, 0.2 * rn, -0.3 * rn}, Vec3{-0.5 * rn, 0.1 * rn, 0.2 * rn},
                                  Vec3{0.25 * rn, -0.45 * rn, 0.15 * rn}, Vec3{0.1 * rn, 0.3 * rn, 0.5 * rn}};
    const std::array<double, 3> ts{-0.2 * rn * rn, -0.5 * rn * rn, -0.8 * rn * rn};
    double rc = 0.0, rf = 0.0, pc = 0.0, pf = 0.0;
    const double hs = h * rn, dts = dt * rn * rn; // steps scaled to the kernel's own scales
    for (const auto& x : pts)
        for (double t : ts) {
            rc = std::max(rc, fd_residual(psi_fn, x, t, hs, dts));
            rf = std::max(rf, fd_residual(psi_fn, x, t, 0.5 * hs, 0.5 * dts));
        }
    // plateau points of phi: inside Q_{r4} with the stencil clear of the ramp
    const double rp = phi.xi().r_plateau;
    const std::array<Vec3, 3> ppts{Vec3{0.3 * rp, -0.2 * rp, 0.1 * rp}, Vec3{-0.4 * rp, 0.3 * rp, -0.2 * rp},
                                   Vec3{0.2 * rp, 0.2 * rp, 0.35 * rp}};
    const std::array<double, 2> pts_t{-0.3 * rp * rp, -0.6 * rp * rp};
    for (const auto& x : ppts)
        for (double t : pts_t) {
            pc = std::max(pc, fd_residual(phi_fn, x, t, hs, dts));
            pf = std::max(pf, fd_residual(phi_fn, x, t, 0.5 * hs, 0.5 * dts));
        }
    rep.caloric_residual_coarse = rc;
    rep.caloric_residual_fine = rf;
    rep.caloric_ratio = rf > 0.0 ? rc / rf : 0.0;
    rep.plateau_residual_coarse = pc;
    rep.plateau_residual_fine = pf;
    rep.plateau_ratio = pf > 0.0 ? pc / pf : 0.0;
    return rep;
}

} // namespace ckns

#include "ckns/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include "ckns/mathutil.hpp"
#include "ckns/spectral.hpp"

namespace ckns {

Constants lambda_constants_from_sups(double c_sup, double gradphi_sup, double alpha0) {
    if (!(alpha0 > 0.0)) throw Error("alpha0 must be positive");
    Constants k;
    k.lambda0 = 108.0 * (c_sup + 1.0);
    k.lambda1 = gradphi_sup + 1.0;
    k.alpha0 = alpha0;
    k.alpha = std::min(1.0 / 20.0, alpha0 / (4.0 + 6.0 * alpha0));
    return k;
}

Constants lambda_constants(const ScalarField& c_init, const GradPhi& gradphi, double alpha0) {
    if (c_init.min() < 0.0) throw Error("lambda_constants: c must be nonnegative");
    return lambda_constants_from_sups(c_init.max(), gradphi.sup_norm(), alpha0);
}

const std::array<const char*, 9>& QuantityReport::names() {
    static const std::array<const char*, 9> n{"A_u", "E_u", "A_c", "E_c", "A_n",
                                              "E_n", "C_u", "C_u_tilde", "D"};
    return n;
}

QuantityReport quantities(const SnapshotSeries& s, const ParabolicCylinder& q) {
    QuantityReport rep;
    rep.q = q;
    if (!(q.r < 0.5 * s.grid().box)) {
        rep.flags.push_back("cylinder exceeds box");
        rep.A_u = rep.E_u = rep.A_c = rep.E_c = rep.A_n = rep.E_n = rep.C_u = rep.C_u_tilde = rep.D =
            std::numeric_limits<double>::quiet_NaN();
        return rep;
    }
    if (!s.covers(q)) {
        rep.flags.push_back("time window not covered by series");
        rep.A_u = rep.E_u = rep.A_c = rep.E_c = rep.A_n = rep.E_n = rep.C_u = rep.C_u_tilde = rep.D =
            std::numeric_limits<double>::quiet_NaN();
        return rep;
    }
    auto evals = evaluate_cylinders(s, {q},
                                    {Iq::U2, Iq::GradU2, Iq::GradC2, Iq::HessC2, Iq::N,
                                     Iq::GradSqrtN2, Iq::U3, Iq::UT3, Iq::P32});
    const auto& e = evals[0];
    const double r = q.r;
    rep.space_resolved = e.space_resolved;
    rep.time_resolved = e.time_resolved;
    rep.covered = e.covered;
    if (!e.space_resolved) rep.flags.push_back("ball under-resolved (h > r/8)");
    if (!e.time_resolved) rep.flags.push_back("snapshot spacing exceeds r^2/16");
    rep.A_u = e.sup(Iq::U2) / r;
    rep.E_u = e.time_integral(Iq::GradU2) / r;
    rep.A_c = e.sup(Iq::GradC2) / r;
    rep.E_c = e.time_integral(Iq::HessC2) / r;
    rep.A_n = e.sup(Iq::N) / r;
    rep.E_n = e.time_integral(Iq::GradSqrtN2) / r;
    rep.C_u = e.time_integral(Iq::U3) / (r * r);
    rep.C_u_tilde = e.time_integral(Iq::UT3) / (r * r);
    rep.D = e.time_integral(Iq::P32) / (r * r);
    return rep;
}

EntropyNorms entropy_norms(const ScalarField& n, const Vec3& x0, double r) {
    if (n.min() < 0.0) throw Error("entropy_norms: n must be nonnegative");
    BallIndex ball(n.grid, x0, r);
    const double w = n.grid.cell_volume();
    EntropyNorms out;
    out.mass = ball.sum(n.v) * w;
    out.n_abs_ln = ball.sum_mapped(n.v, [](double x) { return std::fabs(xlnx(x)); }) * w;
    out.nlnn_32 = ball.sum_mapped(n.v, [](double x) { return std::pow(std::fabs(xlnx(x)), 1.5); }) * w;
    out.split_low =
        ball.sum_mapped(n.v, [](double x) { return x <= 100.0 ? std::pow(x, 4.0 / 3.0) : 0.0; }) * w;
    out.split_high =
        ball.sum_mapped(n.v, [](double x) { return x > 100.0 ? std::pow(x, 5.0 / 3.0) : 0.0; }) * w;

    static const EntropySplitBounds bounds = entropy_split_bounds();
    std::int64_t bad = 0;
    for (const auto& run : ball.runs()) {
        const double* p = n.v.data() + run.base;
        for (int i = 0; i < run.len; ++i) {
            const double x = p[i];
            if (x <= 0.0) continue;
            const double lhs = std::pow(std::fabs(xlnx(x)), 1.5);
            const double rhs = x <= 100.0 ? bounds.k_low * std::pow(x, 4.0 / 3.0)
                                          : bounds.k_high * std::pow(x, 5.0 / 3.0);
            if (lhs > rhs * (1.0 + 1e-12)) ++bad;
        }
    }
    out.split_violations = bad;
    return out;
}

double luxemburg_norm(const ScalarField& f, double tol) {
    require_finite(f, "luxemburg input");
    const double w = f.grid.cell_volume();
    bool all_zero = true;
    for (double x : f.v)
        if (x != 0.0) {
            all_zero = false;
            break;
        }
    if (all_zero) return 0.0;
    auto phi = [&](double k) {
        double acc = 0.0;
        for (double x : f.v) {
            const double t = std::fabs(x) / k;
            acc += t * log_plus(t);
        }
        return acc * w;
    };
    return bisect_smallest(phi, 1e-12, 1e12, tol);
}

namespace {

double box_integral(const std::vector<double>& v, double w) {
    double acc = 0.0;
    for (double x : v) acc += x;
    return acc * w;
}

} // namespace

GlobalApriori global_apriori_state(const State& s) {
    const Grid& g = s.n.grid;
    Spectral& sp = spectral_for(g);
    const double w = g.cell_volume();
    const std::int64_t m = g.size();
    GlobalApriori out;

    out.n_l1 = box_integral(s.n.v, w); // n >= 0 so the L1 norm is the mass
    out.n_llogl = luxemburg_norm(s.n);

    // sqrt c pieces; the weak-solution framework assumes c > 0
    std::vector<double> sqrtc(s.c.v.size());
    double cmin = s.c.min();
    for (std::int64_t i = 0; i < m; ++i) sqrtc[i] = std::sqrt(std::max(s.c.v[i], 0.0));
    std::vector<double> d;
    std::array<std::vector<double>, 3> gsc;
    if (!Spectral::is_constant(sqrtc)) {
        auto sh = sp.forward(sqrtc);
        for (int a = 0; a < 3; ++a) {
            sp.derivative(sh, a, gsc[a]);
            for (double x : gsc[a]) out.grad_sqrt_c_sq += x * x * w;
        }
        for (int a = 0; a < 3; ++a)
            for (int b = a; b < 3; ++b) {
                sp.second_derivative(sh, a, b, d);
                const double mult = a == b ? 1.0 : 2.0;
                for (double x : d) out.v_hess_sqrt_c += mult * x * x * w;
            }
    } else {
        for (int a = 0; a < 3; ++a) gsc[a].assign(m, 0.0);
    }

    for (int a = 0; a < 3; ++a)
        for (double x : s.u[a]) out.u_sq += x * x * w;

    std::vector<double> sqrtnp1(s.n.v.size());
    for (std::int64_t i = 0; i < m; ++i) sqrtnp1[i] = std::sqrt(std::max(s.n.v[i], 0.0) + 1.0);
    if (!Spectral::is_constant(sqrtnp1)) {
        auto nh = sp.forward(sqrtnp1);
        for (int a = 0; a < 3; ++a) {
            sp.derivative(nh, a, d);
            for (double x : d) out.v_grad_sqrt_np1 += x * x * w;
        }
    }

    for (int a = 0; a < 3; ++a) {
        if (Spectral::is_constant(s.u[a])) continue;
        auto uh = sp.forward(s.u[a]);
        for (int b = 0; b < 3; ++b) {
            sp.derivative(uh, b, d);
            for (double x : d) out.v_grad_u += x * x * w;
        }
    }

    // weighted quartic and n-weighted gradient terms
    bool quartic_needed = false;
    for (std::int64_t i = 0; i < m; ++i) {
        const double g2 = gsc[0][i] * gsc[0][i] + gsc[1][i] * gsc[1][i] + gsc[2][i] * gsc[2][i];
        out.v_n_grad_sqrt_c += s.n.v[i] * g2 * w;
        if (g2 > 0.0) quartic_needed = true;
    }
    if (cmin <= 0.0 && quartic_needed) {
        out.weighted_quartic_infinite = true;
        out.v_weighted_quartic = std::numeric_limits<double>::infinity();
    } else if (quartic_needed) {
        for (std::int64_t i = 0; i < m; ++i) {
            const double g2 = gsc[0][i] * gsc[0][i] + gsc[1][i] * gsc[1][i] + gsc[2][i] * gsc[2][i];
            out.v_weighted_quartic += g2 * g2 / s.c.v[i] * w;
        }
    }

    out.U = out.n_l1 + out.n_llogl + out.grad_sqrt_c_sq + out.u_sq;
    out.V = out.v_grad_sqrt_np1 + out.v_hess_sqrt_c + out.v_grad_u + out.v_weighted_quartic +
            out.v_n_grad_sqrt_c;
    return out;
}

std::vector<GlobalApriori> global_apriori(const SnapshotSeries& s) {
    std::vector<GlobalApriori> out;
    out.reserve(std::size_t(s.size()));
    for (int i = 0; i < s.size(); ++i) out.push_back(global_apriori_state(s.state(i)));
    return out;
}

// --- local energy inequality -------------------------------------------------

const std::array<const char*, 8>& EnergyResidual::lhs_names() {
    static const std::array<const char*, 8> n{
        "T1_nlnn_slice", "T2_grad_sqrt_n", "T3_grad_sqrt_ct_slice", "T4_hess_sqrt_ct",
        "T5_n_grad_sqrt_ct", "T6_weighted_quartic", "T7_u_slice", "T8_grad_u"};
    return n;
}

const std::array<const char*, 11>& EnergyResidual::rhs_names() {
    static const std::array<const char*, 11> n{
        "I1_nlnn_heat", "I2_nlnn_advect", "I3_nlnn_chemo", "I4_n_chemo", "I5_ct_heat", "I6_ct_advect",
        "I7_ct_cubic", "I8_u_heat", "I9_u_cubic", "I10_pressure_flux", "I11_buoyancy"};
    return n;
}

namespace {

/// Everything the residual evaluator needs from one snapshot, on the full grid.
struct DerivedBundle {
    double t = 0.0;
    std::vector<double> n, c, p;
    std::array<std::vector<double>, 3> u;
    std::array<std::vector<double>, 3> grad_c;
    std::array<std::vector<double>, 3> grad_sqrt_ct;
    std::vector<double> sqrt_ct;
    std::vector<double> grad_sqrt_n_sq;
    std::vector<double> hess_sqrt_ct_sq;
    std::vector<double> grad_u_sq;
    double p_ball_mean = 0.0;

    DerivedBundle(const SnapshotSeries& s, int snap, const BallIndex& pbar_ball) {
        const Grid& g = s.grid();
        Spectral& sp = spectral_for(g);
        const std::int64_t m = g.size();
        t = s.time(snap);
        n = s.scalar(snap, FieldKind::N).v;
        c = s.scalar(snap, FieldKind::C).v;
        p = s.scalar(snap, FieldKind::P).v;
        for (int a = 0; a < 3; ++a) u[a] = s.scalar(snap, FieldKind(int(FieldKind::Ux) + a)).v;

        if (!Spectral::is_constant(c)) {
            auto ch = sp.forward(c);
            for (int a = 0; a < 3; ++a) sp.derivative(ch, a, grad_c[a]);
        } else
            for (int a = 0; a < 3; ++a) grad_c[a].assign(m, 0.0);

        sqrt_ct.resize(m);
        for (std::int64_t i = 0; i < m; ++i) sqrt_ct[i] = std::sqrt(std::max(c[i], 0.0) + 1.0);
        hess_sqrt_ct_sq.assign(m, 0.0);
        if (!Spectral::is_constant(sqrt_ct)) {
            auto sh = sp.forward(sqrt_ct);
            std::vector<double> d;
            for (int a = 0; a < 3; ++a) sp.derivative(sh, a, grad_sqrt_ct[a]);
            for (int a = 0; a < 3; ++a)
                for (int b = a; b < 3; ++b) {
                    sp.second_derivative(sh, a, b, d);
                    const double mult = a == b ? 1.0 : 2.0;
                    for (std::int64_t i = 0; i < m; ++i) hess_sqrt_ct_sq[i] += mult * d[i] * d[i];
                }
        } else
            for (int a = 0; a < 3; ++a) grad_sqrt_ct[a].assign(m, 0.0);

        grad_sqrt_n_sq.assign(m, 0.0);
        std::vector<double> sqrtn(m);
        for (std::int64_t i = 0; i < m; ++i) sqrtn[i] = std::sqrt(std::max(n[i], 0.0));
        if (!Spectral::is_constant(sqrtn)) {
            auto nh = sp.forward(sqrtn);
            std::vector<double> d;
            for (int a = 0; a < 3; ++a) {
                sp.derivative(nh, a, d);
                for (std::int64_t i = 0; i < m; ++i) grad_sqrt_n_sq[i] += d[i] * d[i];
            }
        }

        grad_u_sq.assign(m, 0.0);
        for (int a = 0; a < 3; ++a) {
            if (Spectral::is_constant(u[a])) continue;
            auto uh = sp.forward(u[a]);
            std::vector<double> d;
            for (int b = 0; b < 3; ++b) {
                sp.derivative(uh, b, d);
                for (std::int64_t i = 0; i < m; ++i) grad_u_sq[i] += d[i] * d[i];
            }
        }

        p_ball_mean = pbar_ball.node_count() > 0 ? pbar_ball.sum(p) / double(pbar_ball.node_count())
                                                 : 0.0;
    }
};

/// Periodic trilinear interpolation.
double trilerp(const Grid& g, const std::vector<double>& v, const Vec3& x) {
    auto prep = [&](double coord, double h, int n, int& i0, int& i1, double& w) {
        const double s = coord / h;
        double fl = std::floor(s);
        w = s - fl;
        int i = int(fl);
        i0 = ((i % n) + n) % n;
        i1 = (i0 + 1) % n;
    };
    int i0, i1, j0, j1, k0, k1;
    double wx, wy, wz;
    prep(x[0], g.hx(), g.nx, i0, i1, wx);
    prep(x[1], g.hy(), g.ny, j0, j1, wy);
    if (g.nz == 1) {
        k0 = k1 = 0;
        wz = 0.0;
    } else {
        prep(x[2], g.hz(), g.nz, k0, k1, wz);
    }
    auto f = [&](int i, int j, int k) { return v[g.index(i, j, k)]; };
    const double c00 = f(i0, j0, k0) * (1 - wx) + f(i1, j0, k0) * wx;
    const double c10 = f(i0, j1, k0) * (1 - wx) + f(i1, j1, k0) * wx;
    const double c01 = f(i0, j0, k1) * (1 - wx) + f(i1, j0, k1) * wx;
    const double c11 = f(i0, j1, k1) * (1 - wx) + f(i1, j1, k1) * wx;
    const double c0 = c00 * (1 - wy) + c10 * wy;
    const double c1 = c01 * (1 - wy) + c11 * wy;
    return c0 * (1 - wz) + c1 * wz;
}

struct TermAccum {
    std::array<double, 8> lhs{};
    std::array<double, 11> rhs{};
};

/// Spatial quadrature of every group integrand at one time, on the
/// supersampled lattice covering the cutoff support.
TermAccum spatial_terms(const DerivedBundle& b, const Cutoff& psi, const Vec3& x0, double t,
                        const Grid& g, int ss, double w_vel, const Vec3& gradphi_const,
                        const VectorField* gradphi_field) {
    TermAccum acc;
    const double suppr = psi.support_radius();
    const double hs_x = g.hx() / ss, hs_y = g.hy() / ss;
    const double hs_z = g.nz == 1 ? g.hz() : g.hz() / ss;
    const double w = hs_x * hs_y * (g.nz == 1 ? g.hz() : hs_z);
    const int nx = int(std::ceil(suppr / hs_x)) + 1;
    const int ny = int(std::ceil(suppr / hs_y)) + 1;
    const int nz = g.nz == 1 ? 0 : int(std::ceil(suppr / hs_z)) + 1;

    for (int i = -nx; i <= nx; ++i) {
        for (int j = -ny; j <= ny; ++j) {
            for (int k = -nz; k <= nz; ++k) {
                const Vec3 dx{i * hs_x, j * hs_y, k * hs_z};
                const double r2 = dot(dx, dx);
                if (r2 >= suppr * suppr) continue;
                const double psv = psi.value(dx, t);
                const Vec3 psg = psi.grad(dx, t);
                const double pshl = psi.dt_plus_lap(dx, t);
                if (psv == 0.0 && pshl == 0.0 && psg[0] == 0.0 && psg[1] == 0.0 && psg[2] == 0.0)
                    continue;
                const Vec3 x{x0[0] + dx[0], x0[1] + dx[1], x0[2] + dx[2]};

                const double nn = trilerp(g, b.n, x);
                const double nlnn = xlnx(nn);
                const Vec3 uu{trilerp(g, b.u[0], x), trilerp(g, b.u[1], x), trilerp(g, b.u[2], x)};
                const double u2 = dot(uu, uu);
                const Vec3 gc{trilerp(g, b.grad_c[0], x), trilerp(g, b.grad_c[1], x),
                              trilerp(g, b.grad_c[2], x)};
                const Vec3 gsct{trilerp(g, b.grad_sqrt_ct[0], x), trilerp(g, b.grad_sqrt_ct[1], x),
                                trilerp(g, b.grad_sqrt_ct[2], x)};
                const double gsct2 = dot(gsct, gsct);
                const double sct = std::max(trilerp(g, b.sqrt_ct, x), 1.0);
                const double gsn2 = trilerp(g, b.grad_sqrt_n_sq, x);
                const double hsct2 = trilerp(g, b.hess_sqrt_ct_sq, x);
                const double gu2 = trilerp(g, b.grad_u_sq, x);
                const double pp = trilerp(g, b.p, x);
                Vec3 gphi = gradphi_const;
                if (gradphi_field)
                    gphi = {trilerp(g, (*gradphi_field)[0], x), trilerp(g, (*gradphi_field)[1], x),
                            trilerp(g, (*gradphi_field)[2], x)};

                // time-slice groups (evaluated only at the final time by the caller)
                acc.lhs[0] += nlnn * psv * w;
                acc.lhs[2] += 2.0 * gsct2 * psv * w;
                acc.lhs[6] += w_vel * u2 * psv * w;
                // space-time groups
                acc.lhs[1] += 2.0 * gsn2 * psv * w;
                acc.lhs[3] += (4.0 / 7.0) * hsct2 * psv * w;
                acc.lhs[4] += 2.0 * gsct2 * nn * psv * w;
                acc.lhs[5] += 0.25 * gsct2 * gsct2 / (sct * sct) * psv * w;
                acc.lhs[7] += w_vel * gu2 * psv * w;

                acc.rhs[0] += nlnn * pshl * w;
                acc.rhs[1] += nlnn * dot(uu, psg) * w;
                acc.rhs[2] += nlnn * dot(gc, psg) * w;
                acc.rhs[3] += nn * dot(gc, psg) * w;
                acc.rhs[4] += 2.0 * gsct2 * pshl * w;
                acc.rhs[5] += 2.0 * gsct2 * dot(uu, psg) * w;
                acc.rhs[6] += -(4.0 / 7.0) * gsct2 / sct * dot(gsct, psg) * w;
                acc.rhs[7] += w_vel * u2 * pshl * w;
                acc.rhs[8] += w_vel * u2 * dot(uu, psg) * w;
                acc.rhs[9] += w_vel * (pp - b.p_ball_mean) * dot(uu, psg) * w;
                acc.rhs[10] += -2.0 * w_vel * nn * dot(gphi, uu) * psv * w;
            }
        }
    }
    return acc;
}

} // namespace

EnergyResidual local_energy_residual(const SnapshotSeries& s, const Cutoff& psi, const Vec3& x0,
                                     double t, const Constants& k, const GradPhi& gradphi) {
    const Grid& g = s.grid();
    if (psi.support_radius() > 1.0 + 1e-12 || psi.support_t_begin() < -1.0 - 1e-12)
        throw Error("local_energy_residual: cutoff must vanish on the parabolic boundary of Q_1");
    if (!(psi.support_radius() < 0.5 * g.box))
        throw Error("local_energy_residual: cutoff support exceeds the box");
    const double t_lo = std::max(-1.0, psi.support_t_begin());
    const double slack = 1e-12;
    if (s.times().front() > t_lo + slack || s.times().back() < t - slack)
        throw Error("local_energy_residual: series does not cover the support window");

    const int ss = psi.supersample(g.h_max());
    const double w_vel = k.velocity_weight();
    BallIndex pbar_ball(g, x0, std::min(1.0, 0.49 * g.box));

    // participating snapshots: the contiguous index range bracketing [t_lo, t]
    int i_lo = 0, i_hi = s.size() - 1;
    for (int i = 0; i < s.size(); ++i)
        if (s.time(i) <= t_lo + slack) i_lo = i;
    for (int i = s.size() - 1; i >= 0; --i)
        if (s.time(i) >= t - slack) i_hi = i;
    if (i_hi < i_lo) std::swap(i_lo, i_hi);
    std::vector<int> snaps;
    for (int i = i_lo; i <= i_hi; ++i) snaps.push_back(i);

    const VectorField* gp_field = gradphi.field ? &*gradphi.field : nullptr;

    std::vector<double> times;
    std::vector<TermAccum> accums;
    for (int idx : snaps) {
        DerivedBundle b(s, idx, pbar_ball);
        accums.push_back(spatial_terms(b, psi, x0, b.t, g, ss, w_vel, gradphi.constant, gp_field));
        times.push_back(b.t);
    }

    EnergyResidual out;
    out.t = t;

    // time-slice groups: linear interpolation of the per-snapshot spatial sums at t
    auto interp_at_t = [&](auto member) {
        if (times.size() == 1) return accums[0].lhs[member];
        auto it = std::upper_bound(times.begin(), times.end(), t);
        std::size_t hi = std::min<std::size_t>(times.size() - 1, std::max<std::ptrdiff_t>(1, it - times.begin()));
        std::size_t lo = hi - 1;
        const double den = times[hi] - times[lo];
        const double wgt = den == 0.0 ? 0.0 : (t - times[lo]) / den;
        return accums[lo].lhs[member] + wgt * (accums[hi].lhs[member] - accums[lo].lhs[member]);
    };
    out.lhs_terms[0] = interp_at_t(0);
    out.lhs_terms[2] = interp_at_t(2);
    out.lhs_terms[6] = interp_at_t(6);

    // space-time groups: trapezoid over [t_lo, t]
    auto integrate = [&](bool is_lhs, int member) {
        if (times.size() < 2) return 0.0; // degenerate window
        std::vector<double> vals(times.size());
        for (std::size_t i = 0; i < times.size(); ++i)
            vals[i] = is_lhs ? accums[i].lhs[member] : accums[i].rhs[member];
        return trapezoid_window(times, vals, t_lo, t);
    };
    for (int m : {1, 3, 4, 5, 7}) out.lhs_terms[m] = integrate(true, m);
    for (int m = 0; m < 11; ++m) out.rhs_terms[m] = integrate(false, m);

    out.lhs = 0.0;
    for (double v : out.lhs_terms) out.lhs += v;
    out.rhs = 0.0;
    for (double v : out.rhs_terms) out.rhs += v;
    out.margin = out.rhs - out.lhs;
    return out;
}

} // namespace ckns

#include "ckns/engine.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "ckns/mathutil.hpp"
#include "ckns/spectral.hpp"

namespace ckns {

namespace {

bool needs_n(Iq q) {
    switch (q) {
        case Iq::N:
        case Iq::AbsNLnN:
        case Iq::NLnNSigned:
        case Iq::N43Low:
        case Iq::N53High:
        case Iq::N32LnP:
        case Iq::N53:
        case Iq::AbsNLnR2N:
        case Iq::GradSqrtN2: return true;
        default: return false;
    }
}

bool needs_c(Iq q) {
    switch (q) {
        case Iq::GradC2:
        case Iq::HessC2:
        case Iq::GradSqrtCt2:
        case Iq::HessSqrtCt2:
        case Iq::GradSqrtCt3:
        case Iq::GradSqrtCt103: return true;
        default: return false;
    }
}

bool needs_u(Iq q) {
    switch (q) {
        case Iq::U2:
        case Iq::U3:
        case Iq::U103:
        case Iq::UT3:
        case Iq::GradU2: return true;
        default: return false;
    }
}

bool needs_p(Iq q) { return q == Iq::P32 || q == Iq::P53; }

struct Accum {
    std::vector<BallIndex> balls;
    std::vector<CylinderEval>* out;
    int snap = 0;
    double cellvol = 0.0;

    void add(Iq iq, int cyl, double ballsum) {
        (*out)[cyl].slices[iq][snap] += ballsum * cellvol;
    }
};

} // namespace

double CylinderEval::sup(Iq iq) const {
    auto it = slices.find(iq);
    if (it == slices.end()) throw Error("integrand not evaluated for this cylinder");
    const auto& v = it->second;
    const double ta = q.t_begin(), tb = q.t0;
    double m = 0.0;
    bool any = false;
    for (std::size_t i = 0; i < slice_times.size(); ++i) {
        if (slice_times[i] < ta - 1e-14 || slice_times[i] > tb + 1e-14) continue;
        m = any ? std::max(m, v[i]) : v[i];
        any = true;
    }
    if (!any) {
        // no stored slice inside the window: fall back to interpolated endpoints
        auto interp = [&](double tq) {
            auto it2 = std::upper_bound(slice_times.begin(), slice_times.end(), tq);
            std::size_t hi = std::min<std::size_t>(slice_times.size() - 1,
                                                   std::max<std::ptrdiff_t>(1, it2 - slice_times.begin()));
            std::size_t lo = hi - 1;
            const double den = slice_times[hi] - slice_times[lo];
            const double w = den == 0.0 ? 0.0 : (tq - slice_times[lo]) / den;
            return v[lo] + w * (v[hi] - v[lo]);
        };
        m = std::max(interp(ta), interp(tb));
    }
    return m;
}

double CylinderEval::time_integral(Iq iq) const {
    auto it = slices.find(iq);
    if (it == slices.end()) throw Error("integrand not evaluated for this cylinder");
    return trapezoid_window(slice_times, it->second, q.t_begin(), q.t0);
}

std::vector<CylinderEval> evaluate_cylinders(const SnapshotSeries& s,
                                             const std::vector<ParabolicCylinder>& cylinders,
                                             const std::vector<Iq>& integrands) {
    if (s.empty()) throw Error("evaluate_cylinders: empty series");
    const Grid& g = s.grid();
    std::set<Iq> iqs(integrands.begin(), integrands.end());

    std::vector<CylinderEval> out(cylinders.size());
    std::vector<BallIndex> balls;
    balls.reserve(cylinders.size());
    for (std::size_t ci = 0; ci < cylinders.size(); ++ci) {
        const auto& q = cylinders[ci];
        out[ci].q = q;
        balls.emplace_back(g, q.x0, q.r);
        out[ci].space_resolved = balls.back().resolved();
        out[ci].ball_nodes = balls.back().node_count();
        out[ci].covered = s.covers(q);
        out[ci].time_resolved = s.time_resolved(q);
        out[ci].slice_times = s.times();
        for (Iq iq : iqs) out[ci].slices[iq].assign(s.size(), 0.0);
    }

    const bool want_u_cubes = iqs.count(Iq::U3) || iqs.count(Iq::U103) || iqs.count(Iq::UT3);
    const bool want_ct_cubes = iqs.count(Iq::GradSqrtCt3) || iqs.count(Iq::GradSqrtCt103);
    Spectral& sp = spectral_for(g);

    for (int snap = 0; snap < s.size(); ++snap) {
        Accum acc{std::move(balls), &out, snap, g.cell_volume()};

        auto for_each_ball = [&](Iq iq, auto&& per_ball_value) {
            for (std::size_t ci = 0; ci < cylinders.size(); ++ci)
                acc.add(iq, int(ci), per_ball_value(acc.balls[ci], int(ci)));
        };
        auto mapped = [&](Iq iq, const std::vector<double>& f, auto&& fn) {
            if (!iqs.count(iq)) return;
            for_each_ball(iq, [&](const BallIndex& b, int) { return b.sum_mapped(f, fn); });
        };
        // squares of derivative components accumulate additively across pieces
        auto add_square = [&](Iq iq, const std::vector<double>& f, double mult = 1.0) {
            for_each_ball(iq, [&](const BallIndex& b, int) {
                return mult * b.sum_mapped(f, [](double x) { return x * x; });
            });
        };

        // --- n group ---
        if (std::any_of(iqs.begin(), iqs.end(), needs_n)) {
            ScalarField n = s.scalar(snap, FieldKind::N);
            require_finite(n, "cell concentration");
            mapped(Iq::N, n.v, [](double x) { return x; });
            mapped(Iq::AbsNLnN, n.v, [](double x) { return std::fabs(xlnx(x)); });
            mapped(Iq::NLnNSigned, n.v, [](double x) { return xlnx(x); });
            mapped(Iq::N43Low, n.v, [](double x) { return x <= 100.0 ? std::pow(std::max(x, 0.0), 4.0 / 3.0) : 0.0; });
            mapped(Iq::N53High, n.v, [](double x) { return x > 100.0 ? std::pow(x, 5.0 / 3.0) : 0.0; });
            mapped(Iq::N32LnP, n.v, [](double x) {
                if (x <= 0.0) return 0.0;
                return std::pow(x, 1.5) * std::pow(std::fabs(std::log(x)) + 1.0, 1.5);
            });
            mapped(Iq::N53, n.v, [](double x) { return std::pow(std::max(x, 0.0), 5.0 / 3.0); });
            if (iqs.count(Iq::AbsNLnR2N)) {
                for_each_ball(Iq::AbsNLnR2N, [&](const BallIndex& b, int ci) {
                    const double r2 = cylinders[ci].r * cylinders[ci].r;
                    return b.sum_mapped(n.v, [r2](double x) {
                        return x > 0.0 ? x * std::fabs(std::log(r2 * x)) : 0.0;
                    });
                });
            }
            if (iqs.count(Iq::GradSqrtN2)) {
                for (double& x : n.v) x = std::sqrt(std::max(x, 0.0));
                std::vector<double> d;
                if (Spectral::is_constant(n.v)) {
                    // exact zero derivative, skip the transforms
                } else {
                    auto nh = sp.forward(n.v);
                    for (int a = 0; a < 3; ++a) {
                        sp.derivative(nh, a, d);
                        add_square(Iq::GradSqrtN2, d);
                    }
                }
            }
        }

        // --- c group ---
        if (std::any_of(iqs.begin(), iqs.end(), needs_c)) {
            ScalarField c = s.scalar(snap, FieldKind::C);
            require_finite(c, "oxygen concentration");
            std::vector<double> d;
            if ((iqs.count(Iq::GradC2) || iqs.count(Iq::HessC2)) && !Spectral::is_constant(c.v)) {
                auto ch = sp.forward(c.v);
                if (iqs.count(Iq::GradC2))
                    for (int a = 0; a < 3; ++a) {
                        sp.derivative(ch, a, d);
                        add_square(Iq::GradC2, d);
                    }
                if (iqs.count(Iq::HessC2))
                    for (int a = 0; a < 3; ++a)
                        for (int b = a; b < 3; ++b) {
                            sp.second_derivative(ch, a, b, d);
                            add_square(Iq::HessC2, d, a == b ? 1.0 : 2.0);
                        }
            }
            const bool want_ct = iqs.count(Iq::GradSqrtCt2) || iqs.count(Iq::HessSqrtCt2) || want_ct_cubes;
            if (want_ct) {
                for (double& x : c.v) x = std::sqrt(x + 1.0);
                if (!Spectral::is_constant(c.v)) {
                    auto sh = sp.forward(c.v);
                    std::vector<double> g2; // |grad sqrt(c+1)|^2, only for the cube powers
                    if (want_ct_cubes) g2.assign(std::size_t(g.size()), 0.0);
                    for (int a = 0; a < 3; ++a) {
                        sp.derivative(sh, a, d);
                        if (iqs.count(Iq::GradSqrtCt2)) add_square(Iq::GradSqrtCt2, d);
                        if (want_ct_cubes)
                            for (std::size_t i = 0; i < g2.size(); ++i) g2[i] += d[i] * d[i];
                    }
                    if (want_ct_cubes) {
                        mapped(Iq::GradSqrtCt3, g2, [](double x) { return std::pow(x, 1.5); });
                        mapped(Iq::GradSqrtCt103, g2, [](double x) { return std::pow(x, 5.0 / 3.0); });
                    }
                    if (iqs.count(Iq::HessSqrtCt2))
                        for (int a = 0; a < 3; ++a)
                            for (int b = a; b < 3; ++b) {
                                sp.second_derivative(sh, a, b, d);
                                add_square(Iq::HessSqrtCt2, d, a == b ? 1.0 : 2.0);
                            }
                }
            }
        }

        // --- u group ---
        if (std::any_of(iqs.begin(), iqs.end(), needs_u)) {
            if (!want_u_cubes) {
                // component-streaming path
                std::vector<double> d;
                for (int comp = 0; comp < 3; ++comp) {
                    ScalarField uc = s.scalar(snap, FieldKind(int(FieldKind::Ux) + comp));
                    require_finite(uc, "velocity");
                    if (iqs.count(Iq::U2)) add_square(Iq::U2, uc.v);
                    if (iqs.count(Iq::GradU2) && !Spectral::is_constant(uc.v)) {
                        auto uh = sp.forward(uc.v);
                        for (int a = 0; a < 3; ++a) {
                            sp.derivative(uh, a, d);
                            add_square(Iq::GradU2, d);
                        }
                    }
                }
            } else {
                VectorField u = s.velocity(snap);
                require_finite(u, "velocity");
                if (iqs.count(Iq::U2))
                    for (int comp = 0; comp < 3; ++comp) add_square(Iq::U2, u[comp]);
                if (iqs.count(Iq::GradU2)) {
                    std::vector<double> d;
                    for (int comp = 0; comp < 3; ++comp) {
                        if (Spectral::is_constant(u[comp])) continue;
                        auto uh = sp.forward(u[comp]);
                        for (int a = 0; a < 3; ++a) {
                            sp.derivative(uh, a, d);
                            add_square(Iq::GradU2, d);
                        }
                    }
                }
                auto cube_sum = [&](const BallIndex& b, const Vec3& mean, double expo) {
                    double acc2 = 0.0;
                    for (const auto& run : b.runs()) {
                        const double* px = u[0].data() + run.base;
                        const double* py = u[1].data() + run.base;
                        const double* pz = u[2].data() + run.base;
                        for (int i = 0; i < run.len; ++i) {
                            const double a0 = px[i] - mean[0], a1 = py[i] - mean[1], a2 = pz[i] - mean[2];
                            acc2 += std::pow(a0 * a0 + a1 * a1 + a2 * a2, expo);
                        }
                    }
                    return acc2;
                };
                if (iqs.count(Iq::U3))
                    for_each_ball(Iq::U3, [&](const BallIndex& b, int) { return cube_sum(b, {0, 0, 0}, 1.5); });
                if (iqs.count(Iq::U103))
                    for_each_ball(Iq::U103, [&](const BallIndex& b, int) { return cube_sum(b, {0, 0, 0}, 5.0 / 3.0); });
                if (iqs.count(Iq::UT3))
                    for_each_ball(Iq::UT3, [&](const BallIndex& b, int) {
                        Vec3 m{0, 0, 0};
                        if (b.node_count() > 0)
                            for (int comp = 0; comp < 3; ++comp)
                                m[comp] = b.sum(u[comp]) / double(b.node_count());
                        return cube_sum(b, m, 1.5);
                    });
            }
        }

        // --- p group ---
        if (std::any_of(iqs.begin(), iqs.end(), needs_p)) {
            ScalarField p = s.scalar(snap, FieldKind::P);
            require_finite(p, "pressure");
            mapped(Iq::P32, p.v, [](double x) { return std::pow(std::fabs(x), 1.5); });
            mapped(Iq::P53, p.v, [](double x) { return std::pow(std::fabs(x), 5.0 / 3.0); });
        }

        balls = std::move(acc.balls);
    }
    return out;
}

} // namespace ckns

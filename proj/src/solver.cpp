#include "ckns/solver.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "ckns/diagnostics.hpp"
#include "ckns/spectral.hpp"

namespace ckns {

namespace {

using Spectrum = Spectral::Spectrum;

struct SpectralState {
    Spectrum n, c, ux, uy, uz;
};

struct Rhs {
    Spectrum n, c, ux, uy, uz;
};

struct Workspace {
    const Grid& g;
    Spectral& sp;
    const SolverConfig& cfg;
    VectorField gradphi_field;
    bool gradphi_is_field = false;
    Vec3 gradphi_const{0, 0, 0};

    Workspace(const Grid& grid, const SolverConfig& c)
        : g(grid), sp(spectral_for(grid)), cfg(c) {
        if (c.gradphi.field) {
            gradphi_field = *c.gradphi.field;
            gradphi_is_field = true;
        } else {
            gradphi_const = c.gradphi.constant;
        }
    }
};

// nonlinear/forcing terms of (n, c, u), diffusion excluded:
//   n: -div(n u + n grad c)                 (flux form, conserves the mean)
//   c: -u . grad c - c n
//   u: -div(u x u) - n grad phi, projected; k=0 mode pinned
Rhs eval_rhs(Workspace& w, const SpectralState& s) {
    const Grid& g = w.g;
    Spectral& sp = w.sp;
    const std::int64_t m = g.size();
    const int nzc = g.nz / 2 + 1;

    std::vector<double> n(m), c(m), ux(m), uy(m), uz(m);
    sp.inverse(s.n, n);
    sp.inverse(s.c, c);
    sp.inverse(s.ux, ux);
    sp.inverse(s.uy, uy);
    sp.inverse(s.uz, uz);
    std::array<std::vector<double>*, 3> u{&ux, &uy, &uz};

    std::array<std::vector<double>, 3> gc;
    for (int a = 0; a < 3; ++a) sp.derivative(s.c, a, gc[a]);

    Rhs rhs;
    auto ik_dot = [&](Spectrum& dst, const Spectrum& src, int axis, double sign) {
        std::int64_t idx = 0;
        for (int i = 0; i < g.nx; ++i)
            for (int j = 0; j < g.ny; ++j)
                for (int k = 0; k < nzc; ++k, ++idx) {
                    const double kk = axis == 0 ? sp.kdx()[i] : axis == 1 ? sp.kdy()[j] : sp.kdz()[k];
                    dst[idx] += std::complex<double>(0.0, sign * kk) * src[idx];
                }
    };

    std::vector<double> prod(m);
    // n equation: flux form
    rhs.n.assign(sp.spec_size(), {0.0, 0.0});
    for (int a = 0; a < 3; ++a) {
        for (std::int64_t i = 0; i < m; ++i) prod[i] = n[i] * ((*u[a])[i] + gc[a][i]);
        if (Spectral::is_constant(prod) && prod[0] == 0.0) continue;
        auto ph = sp.forward(prod);
        ik_dot(rhs.n, ph, a, -1.0);
    }

    // c equation: advection + consumption
    for (std::int64_t i = 0; i < m; ++i)
        prod[i] = -(ux[i] * gc[0][i] + uy[i] * gc[1][i] + uz[i] * gc[2][i]) - c[i] * n[i];
    rhs.c = sp.forward(prod);

    // u equation: -div(u x u) - n grad phi
    rhs.ux.assign(sp.spec_size(), {0.0, 0.0});
    rhs.uy.assign(sp.spec_size(), {0.0, 0.0});
    rhs.uz.assign(sp.spec_size(), {0.0, 0.0});
    std::array<Spectrum*, 3> rhs_u{&rhs.ux, &rhs.uy, &rhs.uz};
    for (int a = 0; a < 3; ++a) {
        for (int b = a; b < 3; ++b) {
            for (std::int64_t i = 0; i < m; ++i) prod[i] = (*u[a])[i] * (*u[b])[i];
            if (Spectral::is_constant(prod) && prod[0] == 0.0) continue;
            auto ph = sp.forward(prod);
            ik_dot(*rhs_u[a], ph, b, -1.0);
            if (a != b) ik_dot(*rhs_u[b], ph, a, -1.0);
        }
    }
    for (int a = 0; a < 3; ++a) {
        if (w.gradphi_is_field) {
            for (std::int64_t i = 0; i < m; ++i) prod[i] = -n[i] * w.gradphi_field[a][i];
        } else {
            if (w.gradphi_const[a] == 0.0) continue;
            for (std::int64_t i = 0; i < m; ++i) prod[i] = -n[i] * w.gradphi_const[a];
        }
        if (Spectral::is_constant(prod) && prod[0] == 0.0) continue;
        auto ph = sp.forward(prod);
        for (std::int64_t i = 0; i < std::int64_t(ph.size()); ++i) (*rhs_u[a])[i] += ph[i];
    }

    if (w.cfg.dealias) {
        sp.dealias(rhs.n);
        sp.dealias(rhs.c);
        sp.dealias(rhs.ux);
        sp.dealias(rhs.uy);
        sp.dealias(rhs.uz);
    }
    sp.project_divfree(rhs.ux, rhs.uy, rhs.uz);
    // the mean force is balanced by a mean pressure gradient; momentum frame fixed
    rhs.ux[0] = rhs.uy[0] = rhs.uz[0] = 0.0;
    return rhs;
}

std::vector<double> diffusion_factor(const Spectral& sp, const Grid& g, double dt) {
    std::vector<double> e(std::size_t(sp.spec_size()));
    const int nzc = g.nz / 2 + 1;
    std::int64_t idx = 0;
    for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.ny; ++j)
            for (int k = 0; k < nzc; ++k, ++idx) {
                const double k2 = sp.kx()[i] * sp.kx()[i] + sp.ky()[j] * sp.ky()[j] + sp.kz()[k] * sp.kz()[k];
                e[idx] = std::exp(-k2 * dt);
            }
    return e;
}

void axpy_if(Spectrum& out, const std::vector<double>& e, const Spectrum& x, double a,
             const Spectrum& y) {
    // out = e .* (x + a y)
    out.resize(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = e[i] * (x[i] + a * y[i]);
}

} // namespace

void SolverConfig::validate() const {
    if (!(t_start < t_end)) throw Error("solver config: t_start must precede t_end");
    if (dt < 0.0) throw Error("solver config: dt must be positive or 0 (auto)");
    if (output_stride < 1) throw Error("solver config: output_stride must be positive");
    if (!(dt_max > 0.0)) throw Error("solver config: dt_max must be positive");
}

double cfl_dt(const State& s, const SolverConfig& cfg) {
    Spectral& sp = spectral_for(s.n.grid);
    const double umax = s.u.max_norm();
    VectorField gc = sp.gradient(s.c);
    const double gcmax = gc.max_norm();
    const double h = std::min(s.n.grid.hx(),
                              s.n.grid.nz == 1 ? s.n.grid.hy() : std::min(s.n.grid.hy(), s.n.grid.hz()));
    const double speed = std::max(umax + gcmax, kCflEpsFloor);
    return std::min(cfg.cfl_number * h / speed, cfg.dt_max);
}

State step(const State& s, double dt, const SolverConfig& cfg, StepInfo* info) {
    const Grid& g = s.n.grid;
    if (!(dt > 0.0)) throw Error("step: dt must be positive");
    if (dt > cfl_dt(s, cfg) * (1.0 + 1e-9)) throw Error("step: dt violates the CFL bound");
    require_finite(s.n, "n");
    require_finite(s.c, "c");
    require_finite(s.u, "u");

    Workspace w(g, cfg);
    Spectral& sp = w.sp;

    SpectralState cur;
    cur.n = sp.forward(s.n.v);
    cur.c = sp.forward(s.c.v);
    cur.ux = sp.forward(s.u[0]);
    cur.uy = sp.forward(s.u[1]);
    cur.uz = sp.forward(s.u[2]);
    sp.project_divfree(cur.ux, cur.uy, cur.uz);

    const auto e = diffusion_factor(sp, g, dt);
    Rhs k1 = eval_rhs(w, cur);

    // predictor: X* = E (X + dt N(X))
    SpectralState pred;
    axpy_if(pred.n, e, cur.n, dt, k1.n);
    axpy_if(pred.c, e, cur.c, dt, k1.c);
    axpy_if(pred.ux, e, cur.ux, dt, k1.ux);
    axpy_if(pred.uy, e, cur.uy, dt, k1.uy);
    axpy_if(pred.uz, e, cur.uz, dt, k1.uz);

    Rhs k2 = eval_rhs(w, pred);

    // corrector: X+ = E X + dt/2 (E N(X) + N(X*))
    SpectralState next;
    auto combine = [&](Spectrum& out, const Spectrum& x, const Spectrum& f1, const Spectrum& f2) {
        out.resize(x.size());
        for (std::size_t i = 0; i < x.size(); ++i)
            out[i] = e[i] * x[i] + 0.5 * dt * (e[i] * f1[i] + f2[i]);
    };
    combine(next.n, cur.n, k1.n, k2.n);
    combine(next.c, cur.c, k1.c, k2.c);
    combine(next.ux, cur.ux, k1.ux, k2.ux);
    combine(next.uy, cur.uy, k1.uy, k2.uy);
    combine(next.uz, cur.uz, k1.uz, k2.uz);
    sp.project_divfree(next.ux, next.uy, next.uz);

    State out(g, s.t + dt);
    sp.inverse(std::move(next.n), out.n.v);
    sp.inverse(std::move(next.c), out.c.v);
    sp.inverse(std::move(next.ux), out.u[0]);
    sp.inverse(std::move(next.uy), out.u[1]);
    sp.inverse(std::move(next.uz), out.u[2]);

    if (!out.n.finite() || !out.c.finite() || !out.u.finite())
        throw Error("step: non-finite field after update");

    StepInfo local;
    local.mass_pre_clip = 0.0;
    for (double x : out.n.v) local.mass_pre_clip += x;
    local.mass_pre_clip *= g.cell_volume();
    local.min_n_pre_clip = out.n.min();
    local.min_c_pre_clip = out.c.min();

    const double reject_tol = 1e-12 * (1.0 + out.n.max_abs());
    if (cfg.positivity == SolverConfig::Positivity::Reject) {
        if (local.min_n_pre_clip < -reject_tol)
            throw Error("step: negative cell concentration " + std::to_string(local.min_n_pre_clip) +
                        " under positivity_policy=reject");
        if (local.min_c_pre_clip < -reject_tol)
            throw Error("step: negative oxygen concentration under positivity_policy=reject");
    }
    double clipped = 0.0;
    for (double& x : out.n.v)
        if (x < 0.0) {
            clipped -= x;
            x = 0.0;
        }
    for (double& x : out.c.v)
        if (x < 0.0) x = 0.0;
    local.clipped_mass = clipped * g.cell_volume();

    out.p = solve_pressure_global(out.u, out.n, cfg.gradphi, cfg.dealias);
    out.p.time = out.t;
    out.n.time = out.c.time = out.u.time = out.t;
    if (info) *info = local;
    return out;
}

std::string RunResult::monitor_tsv() const {
    std::ostringstream os;
    os << "t\tmass\tmin_n\tmin_c\tmax_c\tmax_div_u\tU\tintV\tclipped_mass\n";
    os.precision(17);
    for (const auto& r : monitor)
        os << r.t << '\t' << r.mass << '\t' << r.min_n << '\t' << r.min_c << '\t' << r.max_c << '\t'
           << r.divergence << '\t' << r.U << '\t' << r.intV << '\t' << r.clipped_mass_total << '\n';
    return os.str();
}

RunResult run(const SolverConfig& cfg, const State& initial) {
    cfg.validate();
    const Grid& g = cfg.grid;
    if (!(initial.n.grid == g)) throw Error("run: initial state grid differs from config grid");
    Spectral& sp = spectral_for(g);

    // relabel so the run starts at the paper's t = -1
    const double shift = -1.0 - cfg.t_start;
    const double t_end = cfg.t_end + shift;

    State cur = initial;
    cur.t = -1.0;
    cur.n.time = cur.c.time = cur.u.time = cur.p.time = cur.t;

    RunResult res;
    std::vector<State> snaps;
    double clipped_total = 0.0;
    double intV = 0.0;
    double prevV = 0.0, prevT = cur.t;
    bool haveV = false;

    auto monitor_state = [&](const State& st, double min_n_pre, double min_c_pre) {
        MonitorRow row;
        row.t = st.t;
        row.mass = 0.0;
        for (double x : st.n.v) row.mass += x;
        row.mass *= g.cell_volume();
        row.min_n = min_n_pre;
        row.min_c = min_c_pre;
        row.max_c = st.c.max();
        row.divergence = sp.max_spectral_divergence(st.u);
        GlobalApriori ap = global_apriori_state(st);
        row.U = ap.U;
        if (haveV) intV += 0.5 * (prevV + ap.V) * (st.t - prevT);
        prevV = ap.V;
        prevT = st.t;
        haveV = true;
        row.intV = intV;
        row.clipped_mass_total = clipped_total;
        res.monitor.push_back(row);
    };

    monitor_state(cur, cur.n.min(), cur.c.min());
    snaps.push_back(cur);

    int step_count = 0;
    try {
        while (cur.t < t_end - 1e-12) {
            double dt = cfg.dt > 0.0 ? std::min(cfg.dt, cfl_dt(cur, cfg)) : cfl_dt(cur, cfg);
            dt = std::min(dt, t_end - cur.t);
            StepInfo info;
            State nxt = step(cur, dt, cfg, &info);
            clipped_total += info.clipped_mass;
            ++step_count;
            cur = std::move(nxt);

            const int stride = cur.t >= cfg.dense_output_from ? cfg.dense_output_stride
                                                              : cfg.output_stride;
            const bool last = cur.t >= t_end - 1e-12;
            if (step_count % stride == 0 || last) {
                monitor_state(cur, info.min_n_pre_clip, info.min_c_pre_clip);
                snaps.push_back(cur);
            }
        }
    } catch (const Error& e) {
        res.aborted = true;
        res.abort_reason = e.what();
    }
    res.steps_taken = step_count;
    res.series = SnapshotSeries::from_states(std::move(snaps));
    return res;
}

State make_initial_state(const Grid& g, const PresetParams& p, const GradPhi& gradphi) {
    State s(g);
    const double two_pi = 2.0 * M_PI;
    const double kf = two_pi * p.mode / g.box;

    auto fill_scalar = [&](ScalarField& f, auto&& fn) {
        std::int64_t idx = 0;
        for (int i = 0; i < g.nx; ++i)
            for (int j = 0; j < g.ny; ++j)
                for (int k = 0; k < g.nz; ++k, ++idx) f.v[idx] = fn(g.x(i), g.y(j), g.z(k));
    };

    if (p.name == "quiescent") {
        std::fill(s.n.v.begin(), s.n.v.end(), p.n0);
        std::fill(s.c.v.begin(), s.c.v.end(), p.c0);
    } else if (p.name == "taylor_green") {
        std::fill(s.n.v.begin(), s.n.v.end(), p.n0);
        std::fill(s.c.v.begin(), s.c.v.end(), p.c0);
        std::int64_t idx = 0;
        for (int i = 0; i < g.nx; ++i)
            for (int j = 0; j < g.ny; ++j)
                for (int k = 0; k < g.nz; ++k, ++idx) {
                    s.u[0][idx] = p.amplitude * std::sin(kf * g.x(i)) * std::cos(kf * g.y(j));
                    s.u[1][idx] = -p.amplitude * std::cos(kf * g.x(i)) * std::sin(kf * g.y(j));
                    s.u[2][idx] = 0.0;
                }
    } else if (p.name == "perturbed_uniform") {
        double ph1 = 0.0, ph2 = 0.0, ph3 = 0.0;
        if (p.seed != 0) {
            std::mt19937_64 rng(p.seed);
            std::uniform_real_distribution<double> dist(0.0, two_pi);
            ph1 = dist(rng);
            ph2 = dist(rng);
            ph3 = dist(rng);
        }
        fill_scalar(s.n, [&](double x, double y, double z) {
            double v = p.n0 * (1.0 + p.amplitude * (std::sin(kf * x + ph1) * std::cos(kf * y + ph2) +
                                                    (g.nz > 1 ? 0.5 * std::sin(kf * z + ph3) : 0.0)));
            return std::max(v, 0.0);
        });
        std::fill(s.c.v.begin(), s.c.v.end(), p.c0);
    } else if (p.name == "gaussian_blob") {
        fill_scalar(s.n, [&](double x, double y, double z) {
            const double dx = g.wrap(x - p.center[0]);
            const double dy = g.wrap(y - p.center[1]);
            const double dz = g.nz == 1 ? 0.0 : g.wrap(z - p.center[2]);
            const double r2 = dx * dx + dy * dy + dz * dz;
            return p.n0 + p.amplitude * std::exp(-r2 / (2.0 * p.sigma * p.sigma));
        });
        std::fill(s.c.v.begin(), s.c.v.end(), p.c0);
    } else {
        throw Error("unknown initial preset: " + p.name);
    }

    Spectral& sp = spectral_for(g);
    sp.project_divfree(s.u);
    s.p = solve_pressure_global(s.u, s.n, gradphi);
    return s;
}

} // namespace ckns

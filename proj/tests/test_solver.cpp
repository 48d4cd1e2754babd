#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ckns/solver.hpp"
#include "ckns/spectral.hpp"

using namespace ckns;

namespace {

double kinetic_energy(const VectorField& u) {
    double acc = 0.0;
    for (int a = 0; a < 3; ++a)
        for (double x : u[a]) acc += x * x;
    return acc * u.grid.cell_volume();
}

double mass(const ScalarField& n) {
    double acc = 0.0;
    for (double x : n.v) acc += x;
    return acc * n.grid.cell_volume();
}

State taylor_green_state(const Grid& g, double amp, double n0, double c0) {
    PresetParams p;
    p.name = "taylor_green";
    p.amplitude = amp;
    p.n0 = n0;
    p.c0 = c0;
    return make_initial_state(g, p, GradPhi{});
}

} // namespace

TEST_CASE("quiescent constant state is an exact steady state") {
    Grid g(16, 16, 16, 2.0);
    SolverConfig cfg;
    cfg.grid = g;
    State s(g, 0.0);
    std::fill(s.c.v.begin(), s.c.v.end(), 1.5); // n = 0, u = 0
    State out = step(s, 0.01, cfg);
    CHECK(out.n.max_abs() <= 1e-12);
    for (std::int64_t i = 0; i < g.size(); ++i) CHECK(out.c.v[i] == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(out.u.max_norm() <= 1e-12);
    CHECK(out.p.max_abs() <= 1e-12);
}

TEST_CASE("taylor-green mode decays by the exact heat factor") {
    const double L = 2.0 * M_PI;
    Grid g(32, 32, 32, L);
    State s = taylor_green_state(g, 1.0, 0.0, 0.0);
    SolverConfig cfg;
    cfg.grid = g;
    const double dt = 5e-3;
    const double e0 = kinetic_energy(s.u);
    State out = step(s, dt, cfg);
    const double expected = e0 * std::exp(-2.0 * 2.0 * dt); // |k|^2 = 2 for the TG mode
    CHECK(kinetic_energy(out.u) == doctest::Approx(expected).epsilon(1e-6));
}

TEST_CASE("uniform n and c reduce to the consumption ODE") {
    Grid g(16, 16, 16, 2.0);
    const double n0 = 0.7, c0 = 2.0, T = 0.5, dt = 0.01;
    SolverConfig cfg;
    cfg.grid = g;
    cfg.dt_max = dt;
    State s(g, 0.0);
    std::fill(s.n.v.begin(), s.n.v.end(), n0);
    std::fill(s.c.v.begin(), s.c.v.end(), c0);
    int steps = int(std::round(T / dt));
    for (int i = 0; i < steps; ++i) s = step(s, dt, cfg);
    const double exact = c0 * std::exp(-n0 * T);
    CHECK(s.n.min() == doctest::Approx(n0).epsilon(1e-12));
    CHECK(s.n.max() == doctest::Approx(n0).epsilon(1e-12));
    CHECK(s.c.min() == doctest::Approx(exact).epsilon(1e-5));
    CHECK(s.c.max() == doctest::Approx(exact).epsilon(1e-5));
}

TEST_CASE("cfl_dt: quiescent floor, arithmetic example, h-linearity") {
    SolverConfig cfg;
    { // quiescent: floor kicks in, capped by dt_max
        Grid g(16, 16, 16, 2.0);
        cfg.grid = g;
        cfg.dt_max = 0.05;
        State s(g, 0.0);
        std::fill(s.c.v.begin(), s.c.v.end(), 1.0);
        CHECK(cfl_dt(s, cfg) == doctest::Approx(0.05));
    }
    { // ||u||_inf = 2, h = 0.1, cfl 0.4 -> 0.02
        Grid g(16, 16, 16, 1.6);
        cfg.grid = g;
        State s(g, 0.0);
        std::fill(s.u[0].begin(), s.u[0].end(), 2.0);
        CHECK(cfl_dt(s, cfg) == doctest::Approx(0.4 * 0.1 / 2.0).epsilon(1e-12));
        // doubling resolution halves dt
        Grid g2(32, 32, 32, 1.6);
        SolverConfig cfg2 = cfg;
        cfg2.grid = g2;
        State s2(g2, 0.0);
        std::fill(s2.u[0].begin(), s2.u[0].end(), 2.0);
        CHECK(cfl_dt(s2, cfg2) == doctest::Approx(0.5 * cfl_dt(s, cfg)).epsilon(1e-12));
    }
}

TEST_CASE("run: quiescent series is constant and relabeled to t = -1") {
    Grid g(16, 16, 16, 2.0);
    SolverConfig cfg;
    cfg.grid = g;
    cfg.t_start = 5.0;
    cfg.t_end = 5.2;
    cfg.dt = 0.02;
    cfg.output_stride = 2;
    PresetParams p;
    p.name = "quiescent";
    p.n0 = 0.0;
    p.c0 = 1.0;
    State init = make_initial_state(g, p, cfg.gradphi);
    RunResult res = run(cfg, init);
    CHECK_FALSE(res.aborted);
    CHECK(res.series.time(0) == doctest::Approx(-1.0));
    CHECK(res.series.time(res.series.size() - 1) == doctest::Approx(-0.8));
    for (int i = 0; i < res.series.size(); ++i) {
        State st = res.series.state(i);
        CHECK(st.n.max_abs() <= 1e-12);
        CHECK(st.u.max_norm() <= 1e-12);
    }
    CHECK(res.monitor.size() == std::size_t(res.series.size()));
}

TEST_CASE("run: smooth preset conserves mass, respects the maximum principle") {
    const double L = 2.0 * M_PI;
    Grid g(32, 32, 32, L);
    SolverConfig cfg;
    cfg.grid = g;
    cfg.t_start = -1.0;
    cfg.t_end = -0.8;
    cfg.dt = 5e-3;
    cfg.gradphi.constant = {0.0, 0.0, -0.1};
    cfg.output_stride = 5;

    State init = taylor_green_state(g, 0.3, 0.0, 0.0);
    PresetParams pn;
    pn.name = "perturbed_uniform";
    pn.n0 = 1.0;
    pn.amplitude = 0.1;
    State nstate = make_initial_state(g, pn, cfg.gradphi);
    init.n = nstate.n;
    std::fill(init.c.v.begin(), init.c.v.end(), 1.0);
    init.p = solve_pressure_global(init.u, init.n, cfg.gradphi);

    RunResult res = run(cfg, init);
    CHECK_FALSE(res.aborted);
    const double m0 = res.monitor.front().mass;
    for (const auto& row : res.monitor) {
        CHECK(std::fabs(row.mass - m0) <= 1e-8 * m0);
        CHECK(row.max_c <= 1.0 + 1e-8);
        CHECK(row.min_n >= -1e-12);
        CHECK(row.min_c >= -1e-12);
    }
    // spectral divergence after projection
    State last = res.series.state(res.series.size() - 1);
    CHECK(spectral_for(g).max_spectral_divergence(last.u) <=
          1e-10 * std::max(last.u.max_norm(), 1e-30));
    CHECK(res.monitor.back().U > 0.0);
}

TEST_CASE("second-order accuracy in dt on a smooth run") {
    const double L = 2.0 * M_PI;
    Grid g(16, 16, 16, L);
    SolverConfig cfg;
    cfg.grid = g;
    cfg.dt_max = 1.0; // let the test pick dt
    State init = taylor_green_state(g, 0.3, 0.0, 0.0);
    PresetParams pn;
    pn.name = "perturbed_uniform";
    pn.n0 = 1.0;
    pn.amplitude = 0.1;
    init.n = make_initial_state(g, pn, GradPhi{}).n;
    std::fill(init.c.v.begin(), init.c.v.end(), 1.0);
    cfg.gradphi.constant = {0.0, 0.0, -0.2};
    init.p = solve_pressure_global(init.u, init.n, cfg.gradphi);

    const double T = 0.04;
    auto advance = [&](double dt) {
        State s = init;
        const int steps = int(std::round(T / dt));
        for (int i = 0; i < steps; ++i) s = step(s, dt, cfg);
        return s;
    };
    State ref = advance(5e-4);
    auto err = [&](const State& s) {
        double e = 0.0;
        for (std::int64_t i = 0; i < g.size(); ++i) {
            e = std::max(e, std::fabs(s.n.v[i] - ref.n.v[i]));
            e = std::max(e, std::fabs(s.c.v[i] - ref.c.v[i]));
            for (int a = 0; a < 3; ++a) e = std::max(e, std::fabs(s.u[a][i] - ref.u[a][i]));
        }
        return e;
    };
    const double e2 = err(advance(4e-3));
    const double e1 = err(advance(2e-3));
    CHECK(e2 / e1 == doctest::Approx(4.0).epsilon(0.45)); // 2nd order, generous band
}

TEST_CASE("positivity: clipping logs mass, reject mode throws") {
    Grid g(16, 16, 16, 2.0);
    PresetParams p;
    p.name = "gaussian_blob";
    p.n0 = 0.0;
    p.amplitude = 50.0;
    p.sigma = 0.06; // near-delta on this grid: truncation ringing goes negative
    p.center = {1.0, 1.0, 1.0};
    p.c0 = 1.0;
    State init = make_initial_state(g, p, GradPhi{});
    SolverConfig cfg;
    cfg.grid = g;
    StepInfo info;
    State out = step(init, 1e-3, cfg, &info);
    CHECK(info.min_n_pre_clip < 0.0);
    CHECK(info.clipped_mass > 0.0);
    CHECK(out.n.min() >= 0.0);
    CHECK(std::fabs(info.mass_pre_clip - mass(init.n)) <= 1e-10 * mass(init.n));

    SolverConfig rej = cfg;
    rej.positivity = SolverConfig::Positivity::Reject;
    CHECK_THROWS_AS(step(init, 1e-3, rej), Error);
}

TEST_CASE("run aborts cleanly under reject policy and persists the last good state") {
    Grid g(16, 16, 16, 2.0);
    SolverConfig cfg;
    cfg.grid = g;
    cfg.t_start = -1.0;
    cfg.t_end = -0.9;
    cfg.dt = 1e-3;
    cfg.positivity = SolverConfig::Positivity::Reject;
    PresetParams p;
    p.name = "gaussian_blob";
    p.n0 = 0.0;
    p.amplitude = 50.0;
    p.sigma = 0.06;
    p.center = {1.0, 1.0, 1.0};
    State init = make_initial_state(g, p, GradPhi{});
    RunResult res = run(cfg, init);
    CHECK(res.aborted);
    CHECK(res.series.size() >= 1);
    CHECK_FALSE(res.abort_reason.empty());
}

TEST_CASE("step rejects a CFL-violating dt") {
    Grid g(16, 16, 16, 1.6);
    SolverConfig cfg;
    cfg.grid = g;
    State s(g, 0.0);
    std::fill(s.u[0].begin(), s.u[0].end(), 2.0);
    std::fill(s.c.v.begin(), s.c.v.end(), 1.0);
    CHECK_THROWS_AS(step(s, 0.03, cfg), Error);
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "ckns/analytic.hpp"
#include "ckns/ball.hpp"
#include "ckns/diagnostics.hpp"
#include "ckns/snapshot.hpp"
#include "ckns/spectral.hpp"

using namespace ckns;

namespace {

ScalarField sample(const Grid& g, auto&& fn) {
    ScalarField f(g);
    std::int64_t idx = 0;
    for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.ny; ++j)
            for (int k = 0; k < g.nz; ++k, ++idx) f.v[idx] = fn(g.x(i), g.y(j), g.z(k));
    return f;
}

// band-limited random field, reproducible
ScalarField random_smooth(const Grid& g, std::uint64_t seed, int kmax = 3) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> amp(-1.0, 1.0);
    struct Mode {
        int kx, ky, kz;
        double a, b;
    };
    std::vector<Mode> modes;
    for (int kx = 0; kx <= kmax; ++kx)
        for (int ky = -kmax; ky <= kmax; ++ky)
            for (int kz = -kmax; kz <= kmax; ++kz) {
                if (kx == 0 && ky == 0 && kz == 0) continue;
                modes.push_back({kx, ky, kz, amp(rng), amp(rng)});
            }
    const double f = 2.0 * M_PI / g.box;
    return sample(g, [&](double x, double y, double z) {
        double acc = 0.0;
        for (const auto& m : modes) {
            const double ph = f * (m.kx * x + m.ky * y + m.kz * z);
            acc += m.a * std::cos(ph) + m.b * std::sin(ph);
        }
        return acc;
    });
}

} // namespace

TEST_CASE("grid rejects non-power-of-two dims and bad boxes") {
    CHECK_THROWS_AS(Grid(24, 32, 32, 1.0), Error);
    CHECK_THROWS_AS(Grid(32, 32, 32, 0.0), Error);
    CHECK_NOTHROW(Grid(32, 16, 1, 2.0));
}

TEST_CASE("spectral gradient of a constant field is exactly zero") {
    Grid g(16, 16, 16, 2.0);
    ScalarField f(g, 0.0, 5.0);
    VectorField grad = spectral_for(g).gradient(f);
    for (int a = 0; a < 3; ++a)
        for (double v : grad[a]) CHECK(v == 0.0);
}

TEST_CASE("spectral gradient matches the analytic derivative of a resolved mode") {
    const double L = 3.0;
    Grid g(32, 32, 32, L);
    const double k = 2.0 * M_PI / L;
    ScalarField f = sample(g, [&](double x, double, double) { return std::sin(k * x); });
    VectorField grad = spectral_for(g).gradient(f);
    double err = 0.0;
    std::int64_t idx = 0;
    for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.ny; ++j)
            for (int kk = 0; kk < g.nz; ++kk, ++idx)
                err = std::max(err, std::fabs(grad[0][idx] - k * std::cos(k * g.x(i))));
    CHECK(err <= 1e-10);
    CHECK(ScalarField{g, 0, 0}.v.size() == grad[1].size());
    for (double v : grad[1]) CHECK(std::fabs(v) <= 1e-10);
}

TEST_CASE("gradient is linear") {
    Grid g(16, 16, 16, 2.0);
    ScalarField f = random_smooth(g, 11), h = random_smooth(g, 22);
    const double a = 1.7, b = -0.3;
    ScalarField combo(g);
    for (std::int64_t i = 0; i < g.size(); ++i) combo.v[i] = a * f.v[i] + b * h.v[i];
    Spectral& sp = spectral_for(g);
    VectorField gc = sp.gradient(combo), gf = sp.gradient(f), gh = sp.gradient(h);
    double scale = 0.0;
    for (int c = 0; c < 3; ++c)
        for (std::int64_t i = 0; i < g.size(); ++i) scale = std::max(scale, std::fabs(gc[c][i]));
    for (int c = 0; c < 3; ++c)
        for (std::int64_t i = 0; i < g.size(); ++i)
            CHECK(std::fabs(gc[c][i] - (a * gf[c][i] + b * gh[c][i])) <= 1e-12 * std::max(1.0, scale));
}

TEST_CASE("gradient rejects non-finite input") {
    Grid g(8, 8, 8, 1.0);
    ScalarField f(g);
    f.v[3] = std::nan("");
    CHECK_THROWS_AS(spectral_for(g).gradient(f), Error);
}

TEST_CASE("divergence of a constant vector field vanishes") {
    Grid g(16, 16, 16, 2.0);
    VectorField v(g);
    std::fill(v[0].begin(), v[0].end(), 1.0);
    std::fill(v[1].begin(), v[1].end(), 2.0);
    std::fill(v[2].begin(), v[2].end(), 3.0);
    ScalarField d = spectral_for(g).divergence(v);
    CHECK(d.max_abs() == 0.0);
}

TEST_CASE("laplacian of a resolved mode and div-grad identity") {
    const double L = 2.0;
    Grid g(32, 32, 32, L);
    const double k = 2.0 * M_PI / L;
    ScalarField f = sample(g, [&](double x, double, double) { return std::sin(k * x); });
    Spectral& sp = spectral_for(g);
    ScalarField lap = sp.laplacian(f);
    double err = 0.0;
    for (std::int64_t i = 0; i < g.size(); ++i)
        err = std::max(err, std::fabs(lap.v[i] + k * k * f.v[i]));
    CHECK(err <= 1e-10 * k * k);

    ScalarField r = random_smooth(g, 7);
    ScalarField lr = sp.laplacian(r);
    ScalarField dgr = sp.divergence(sp.gradient(r));
    double scale = lr.max_abs(), diff = 0.0;
    for (std::int64_t i = 0; i < g.size(); ++i)
        diff = std::max(diff, std::fabs(lr.v[i] - dgr.v[i]));
    CHECK(diff <= 1e-10 * scale);
}

TEST_CASE("ball integration: volume, zero field, and the x^2 moment oracle") {
    const double L = 4.0;
    Grid g(64, 64, 64, L); // h = 1/16 = r/16 at r = 1
    const Vec3 x0{2.0, 2.0, 2.0};

    ScalarField one(g, 0.0, 1.0);
    auto q = integrate_ball(one, x0, 1.0);
    CHECK(q.resolved);
    CHECK(q.value == doctest::Approx(4.0 * M_PI / 3.0).epsilon(0.03));

    ScalarField zero(g, 0.0, 0.0);
    CHECK(integrate_ball(zero, x0, 1.0).value == 0.0);

    // f = x1^2 relative to the center: exact value 4 pi / 15
    ScalarField f = sample(g, [&](double x, double, double) {
        const double d = g.wrap(x - x0[0]);
        return d * d;
    });
    CHECK(integrate_ball(f, x0, 1.0).value == doctest::Approx(4.0 * M_PI / 15.0).epsilon(0.03));

    // halving h from r/8 to r/16 stays inside the 3% band
    Grid g8(32, 32, 32, L);
    ScalarField one8(g8, 0.0, 1.0);
    const double v8 = integrate_ball(one8, x0, 1.0).value;
    CHECK(std::fabs(v8 - q.value) <= 0.03 * q.value);

    CHECK_THROWS_AS(integrate_ball(one, x0, 2.5), Error); // r >= L/2
    CHECK_FALSE(integrate_ball(one, x0, 0.3).resolved);   // h > r/8
}

TEST_CASE("cylinder integration: volume x duration, zero integrand, linearity") {
    const double L = 2.0;
    Grid g(32, 32, 32, L);
    const Vec3 x0{1.0, 1.0, 1.0};
    const double r = 0.5;

    std::vector<State> states;
    for (int j = 0; j <= 16; ++j) {
        State s(g, -r * r + j * r * r / 16.0);
        std::fill(s.n.v.begin(), s.n.v.end(), 1.0);
        states.push_back(std::move(s));
    }
    auto series = SnapshotSeries::from_states(std::move(states));
    ParabolicCylinder q{x0, 0.0, r};

    auto c1 = integrate_cylinder(series, q, [](const State& s, std::int64_t i) { return s.n.v[i]; });
    CHECK(c1.space_resolved);
    CHECK(c1.time_resolved);
    CHECK(c1.value == doctest::Approx(4.0 * M_PI / 3.0 * std::pow(r, 5.0)).epsilon(0.03));

    auto c0 = integrate_cylinder(series, q, [](const State& s, std::int64_t i) {
        return s.u[0][i] * s.u[0][i] + s.u[1][i] * s.u[1][i] + s.u[2][i] * s.u[2][i];
    });
    CHECK(c0.value == 0.0);

    const double kconst = 3.25;
    auto ck = integrate_cylinder(series, q,
                                 [&](const State& s, std::int64_t i) { return kconst * s.n.v[i]; });
    CHECK(ck.value == doctest::Approx(kconst * c1.value).epsilon(1e-12));

    ParabolicCylinder bad{x0, -2.0, r};
    CHECK_THROWS_AS(integrate_cylinder(series, bad, [](const State&, std::int64_t) { return 0.0; }),
                    Error);
}

TEST_CASE("scale transform: identity at lambda 1, constants, and lambda <= 0 rejected") {
    AnalyticState s = AnalyticState::zero();
    s.n = [](const Vec3&, double) { return 1.0; };
    AnalyticState id = scale_transform(s, 1.0);
    CHECK(id.n({0.3, 0.1, 0.7}, -0.2) == doctest::Approx(1.0));
    AnalyticState two = scale_transform(s, 2.0);
    CHECK(two.n({0.3, 0.1, 0.7}, -0.2) == doctest::Approx(4.0));
    CHECK_THROWS_AS(scale_transform(s, 0.0), Error);
    CHECK_THROWS_AS(scale_transform(s, -1.0), Error);
}

namespace {

AnalyticState smooth_generator(double box, int which) {
    // periodic on [0,box)^3, strictly positive n and c
    const double f = 2.0 * M_PI / box;
    AnalyticState s;
    switch (which) {
        case 0:
            s.n = [f](const Vec3& x, double t) {
                return 2.0 + std::sin(f * x[0]) * std::cos(f * x[1]) * (1.0 + 0.3 * std::sin(t));
            };
            s.c = [f](const Vec3& x, double t) {
                return 1.5 + 0.5 * std::cos(f * x[2]) * std::cos(0.7 * t);
            };
            s.u = [f](const Vec3& x, double t) {
                return Vec3{std::sin(f * x[0]) * std::cos(f * x[1]) * std::exp(0.2 * t),
                            -std::cos(f * x[0]) * std::sin(f * x[1]) * std::exp(0.2 * t),
                            0.3 * std::sin(f * x[2])};
            };
            s.p = [f](const Vec3& x, double t) {
                return (std::cos(2 * f * x[0]) + std::cos(2 * f * x[1])) * (1.0 + 0.1 * t);
            };
            return s;
        case 1:
            s.n = [f](const Vec3& x, double t) {
                return 3.0 + std::cos(f * (x[0] + x[1])) * std::sin(f * x[2]) * std::cos(t);
            };
            s.c = [f](const Vec3& x, double t) {
                return 2.0 + 0.4 * std::sin(f * x[0]) * std::sin(f * x[1]) * std::sin(0.5 * t);
            };
            s.u = [f](const Vec3& x, double t) {
                return Vec3{0.5 * std::cos(f * x[1]) * (1.0 + 0.2 * t),
                            0.5 * std::sin(f * x[2]) * (1.0 - 0.1 * t), 0.5 * std::cos(f * x[0])};
            };
            s.p = [f](const Vec3& x, double) { return std::sin(f * x[0]) * std::sin(f * x[1]); };
            return s;
        default:
            s.n = [f](const Vec3& x, double t) {
                return 1.0 + 0.8 * std::sin(f * x[0] + 0.5) * std::sin(f * x[1] - 0.3) *
                                 std::sin(f * x[2]) * std::exp(0.1 * t);
            };
            s.c = [f](const Vec3& x, double t) { return 1.0 + 0.2 * std::cos(f * (x[0] - x[2]) + t); };
            s.u = [f](const Vec3& x, double t) {
                return Vec3{0.2 * std::sin(f * x[2] + t), 0.4 * std::cos(f * x[0]),
                            0.3 * std::sin(f * x[1] - 0.5 * t)};
            };
            s.p = [f](const Vec3& x, double t) { return 0.7 * std::cos(f * x[2]) * (1.0 + t * t); };
            return s;
    }
}

QuantityReport eval_on_grid(const AnalyticState& a, double box, int n, const Vec3& x0, double t0,
                            double r) {
    Grid g(n, n, n, box);
    std::vector<double> times;
    for (int j = 0; j <= 16; ++j) times.push_back(t0 - r * r + j * (r * r) / 16.0);
    auto series = SnapshotSeries::synthesize(a, g, times);
    return quantities(series, {x0, t0, r});
}

} // namespace

TEST_CASE("scaling invariance of the nine quantities on matched grids") {
    // q(scaled, r) computed on (N, L) must match q(original, lambda r) on (N, lambda L)
    const int N = 32;
    const double Ls = 2.0, r = 0.35;
    const Vec3 x0{0.8, 1.1, 0.9};
    for (int which = 0; which < 2; ++which) {
        for (double lambda : {2.0, 4.0}) {
            AnalyticState orig = smooth_generator(lambda * Ls, which);
            AnalyticState scaled = scale_transform(orig, lambda);
            QuantityReport qs = eval_on_grid(scaled, Ls, N, x0, 0.0, r);
            QuantityReport qo =
                eval_on_grid(orig, lambda * Ls, N, lambda * x0, 0.0, lambda * r);
            const auto vs = qs.values(), vo = qo.values();
            for (std::size_t i = 0; i < vs.size(); ++i) {
                INFO("generator ", which, " lambda ", lambda, " quantity ",
                     QuantityReport::names()[i]);
                CHECK(vs[i] == doctest::Approx(vo[i]).epsilon(1e-6));
            }
        }
    }
}

TEST_CASE("trapezoid window clips and interpolates endpoints") {
    std::vector<double> t{0.0, 1.0, 2.0, 3.0};
    std::vector<double> v{0.0, 1.0, 2.0, 3.0}; // integral of identity
    CHECK(trapezoid_window(t, v, 0.5, 2.5) == doctest::Approx(0.5 * (2.5 * 2.5 - 0.25)));
    CHECK_THROWS_AS(trapezoid_window(t, v, -1.0, 2.0), Error);
}

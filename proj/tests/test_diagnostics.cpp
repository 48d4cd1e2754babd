#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ckns/diagnostics.hpp"
#include "ckns/mathutil.hpp"
#include "ckns/testfn.hpp"

using namespace ckns;

namespace {

SnapshotSeries constant_series(const Grid& g, double n0, double c0, const Vec3& u0, double p0,
                               double t0 = 0.0, double r = 0.5, int nt = 16) {
    AnalyticState a;
    a.n = [n0](const Vec3&, double) { return n0; };
    a.c = [c0](const Vec3&, double) { return c0; };
    a.u = [u0](const Vec3&, double) { return u0; };
    a.p = [p0](const Vec3&, double) { return p0; };
    std::vector<double> times;
    for (int j = 0; j <= nt; ++j) times.push_back(t0 - r * r + j * r * r / nt);
    return SnapshotSeries::synthesize(a, g, times);
}

} // namespace

TEST_CASE("lambda constants: paper formulas and the alpha cap") {
    Grid g(8, 8, 8, 1.0);
    ScalarField c0(g);
    Constants k = lambda_constants(c0, GradPhi{}, 1.0);
    CHECK(k.lambda0 == doctest::Approx(108.0));
    CHECK(k.lambda1 == doctest::Approx(1.0));
    CHECK(k.alpha == doctest::Approx(1.0 / 20.0)); // min(1/20, 1/10)

    ScalarField c1(g, 0.0, 1.0);
    GradPhi gp;
    gp.constant = {0.0, 0.0, 2.0};
    Constants k2 = lambda_constants(c1, gp, 1.0);
    CHECK(k2.lambda0 == doctest::Approx(216.0));
    CHECK(k2.lambda1 == doctest::Approx(3.0));

    Constants k3 = lambda_constants(c0, GradPhi{}, 0.01);
    CHECK(k3.alpha == doctest::Approx(0.01 / 4.06));
    CHECK(k3.alpha < 1.0 / 20.0);
    CHECK_THROWS_AS(lambda_constants(c0, GradPhi{}, 0.0), Error);
}

TEST_CASE("quantities: zero solution, constant velocity, constant pressure") {
    Grid g(64, 64, 64, 2.0);
    const Vec3 x0{1.0, 1.0, 1.0};
    const double r = 0.5;
    ParabolicCylinder q{x0, 0.0, r};

    auto zero = constant_series(g, 0.0, 0.0, {0, 0, 0}, 0.0);
    QuantityReport rz = quantities(zero, q);
    for (double v : rz.values()) CHECK(v == 0.0);
    CHECK(rz.space_resolved);
    CHECK(rz.time_resolved);

    auto cs = constant_series(g, 0.0, 0.0, {1, 0, 0}, 0.0);
    QuantityReport rc = quantities(cs, q);
    CHECK(rc.A_u == doctest::Approx(M_PI / 3.0).epsilon(0.03)); // r^{-1} (4pi/3) r^3
    CHECK(rc.E_u == 0.0);
    CHECK(rc.C_u_tilde == 0.0);
    CHECK(rc.C_u > 0.0);

    auto ps = constant_series(g, 0.0, 0.0, {0, 0, 0}, 1.0);
    QuantityReport rp = quantities(ps, q);
    CHECK(rp.D == doctest::Approx(M_PI / 6.0).epsilon(0.03)); // (4pi/3) r^3

    ParabolicCylinder big{x0, 0.0, 1.5};
    QuantityReport rb = quantities(zero, big);
    CHECK_FALSE(rb.flags.empty());
    CHECK(std::isnan(rb.D));
}

TEST_CASE("backward heat kernel point values and caloric identity") {
    for (int level : {2, 3, 5}) {
        BackwardHeatKernel psi(level);
        const double rn = std::pow(2.0, -level);
        CHECK(psi.value({0, 0, 0}, 0.0) == doctest::Approx(std::pow(rn, -3.0)));
        CHECK(psi.value({0, 0, 0}, -rn * rn) ==
              doctest::Approx(std::pow(2.0 * rn * rn, -1.5)));
        // analytic caloric identity at scattered points
        const Vec3 x{0.4 * rn, -0.2 * rn, 0.3 * rn};
        const double t = -0.5 * rn * rn;
        CHECK(psi.dt(x, t) + psi.lap(x, t) ==
              doctest::Approx(0.0).scale(std::pow(rn, -5.0)).epsilon(1e-13));
    }
    CHECK_THROWS_AS(BackwardHeatKernel(2).value({0, 0, 0}, 0.1), Error);
}

TEST_CASE("phi_n properties: kernel bounds and 2nd-order FD convergence") {
    for (int level : {3, 5}) {
        auto rep = phi_properties_check(level);
        CHECK(rep.bounds_hold);
        CHECK(rep.c2_empirical <= 1.0 + 1e-12);
        CHECK(rep.c1_empirical >= rep.c1_bound - 1e-12);
        CHECK(rep.caloric_ratio >= 3.5);
        CHECK(rep.caloric_ratio <= 4.6);
        CHECK(rep.plateau_residual_fine <= rep.plateau_residual_coarse);
    }
}

TEST_CASE("entropy norms: constants, ln e = 1, split bounds hold pointwise") {
    Grid g(64, 64, 64, 4.0);
    const Vec3 x0{2.0, 2.0, 2.0};
    const double r = 1.0, vol = 4.0 * M_PI / 3.0;

    ScalarField one(g, 0.0, 1.0);
    EntropyNorms e1 = entropy_norms(one, x0, r);
    CHECK(e1.mass == doctest::Approx(vol).epsilon(0.03));
    CHECK(e1.n_abs_ln == 0.0);
    CHECK(e1.nlnn_32 == 0.0);
    CHECK(e1.split_violations == 0);

    ScalarField fe(g, 0.0, std::exp(1.0));
    EntropyNorms ee = entropy_norms(fe, x0, r);
    CHECK(ee.n_abs_ln == doctest::Approx(std::exp(1.0) * vol).epsilon(0.03));

    // mixed-magnitude field exercises both split branches
    ScalarField mixed(g);
    std::int64_t idx = 0;
    for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.ny; ++j)
            for (int k = 0; k < g.nz; ++k, ++idx)
                mixed.v[idx] = 150.0 * std::fabs(std::sin(g.x(i))) + 1e-4 * (j % 7);
    EntropyNorms em = entropy_norms(mixed, x0, r);
    CHECK(em.split_violations == 0);
    CHECK(em.split_low > 0.0);
    CHECK(em.split_high > 0.0);

    ScalarField neg(g, 0.0, -1.0);
    CHECK_THROWS_AS(entropy_norms(neg, x0, r), Error);
}

TEST_CASE("entropy weight maximum matches the independent dense-scan oracle") {
    const double alpha = 1.0 / 20.0;
    // oracle: dense scan in s = -ln n with parabolic refinement
    double best_s = 0.0, best_v = 0.0;
    const int nscan = 2000000;
    for (int i = 1; i <= nscan; ++i) {
        const double s = 60.0 * i / nscan;
        const double v = s * std::exp(-alpha * s);
        if (v > best_v) {
            best_v = v;
            best_s = s;
        }
    }
    auto [n_star, val] = max_entropy_weight(alpha);
    CHECK(val == doctest::Approx(best_v).epsilon(1e-9));
    CHECK(val == doctest::Approx(20.0 / std::exp(1.0)).epsilon(1e-6));
    CHECK(n_star == doctest::Approx(std::exp(-best_s)).epsilon(1e-4));
    CHECK(n_star == doctest::Approx(std::exp(-20.0)).epsilon(1e-4));

    // pointwise split constants exist and bound the seam points
    auto b = entropy_split_bounds();
    CHECK(std::isfinite(b.k_low));
    CHECK(std::isfinite(b.k_high));
    const double seam = std::pow(std::fabs(xlnx(100.0)), 1.5);
    CHECK(seam <= b.k_low * std::pow(100.0, 4.0 / 3.0) * (1.0 + 1e-12));
}

TEST_CASE("luxemburg norm: zero field, constant e, bisection oracle") {
    Grid g(8, 8, 8, 1.0); // unit-volume box
    ScalarField zero(g);
    CHECK(luxemburg_norm(zero) == 0.0);

    ScalarField fe(g, 0.0, std::exp(1.0));
    // independent oracle: solve y ln y = 1 by bisection, k = e / y
    double lo = 1.0, hi = 3.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (mid * std::log(mid) >= 1.0 ? hi : lo) = mid;
    }
    const double k_star = std::exp(1.0) / hi;
    CHECK(luxemburg_norm(fe) == doctest::Approx(k_star).epsilon(1e-6));

    // fields below 1 in modulus have vanishing Zygmund integrand for k >= 1
    ScalarField half(g, 0.0, 0.5);
    CHECK(luxemburg_norm(half) <= 0.5 + 1e-6);
}

TEST_CASE("global apriori: zero solution, unit mass, weighted-quartic flag") {
    Grid g(16, 16, 16, 2.0);
    State z(g);
    std::fill(z.c.v.begin(), z.c.v.end(), 1.0);
    GlobalApriori az = global_apriori_state(z);
    CHECK(az.U == 0.0);
    CHECK(az.V == 0.0);
    CHECK_FALSE(az.weighted_quartic_infinite);

    State m(g);
    std::fill(m.n.v.begin(), m.n.v.end(), 1.0);
    std::fill(m.c.v.begin(), m.c.v.end(), 1.0);
    GlobalApriori am = global_apriori_state(m);
    CHECK(am.n_l1 == doctest::Approx(8.0).epsilon(1e-12)); // box volume

    // c touching zero with nonzero gradient flags the quartic term
    State f(g);
    std::int64_t idx = 0;
    for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.ny; ++j)
            for (int k = 0; k < g.nz; ++k, ++idx)
                f.c.v[idx] = 0.5 * (1.0 + std::cos(2.0 * M_PI * g.x(i) / g.box));
    GlobalApriori af = global_apriori_state(f);
    CHECK(af.weighted_quartic_infinite);
    CHECK(std::isinf(af.V));
}

TEST_CASE("local energy residual: zero solution vanishes group by group") {
    Grid g(32, 32, 32, 2.5);
    AnalyticState a = AnalyticState::zero();
    a.c = [](const Vec3&, double) { return 2.0; };
    std::vector<double> times;
    for (int j = 0; j <= 40; ++j) times.push_back(-1.0 + j / 40.0);
    auto s = SnapshotSeries::synthesize(a, g, times);
    Constants k = lambda_constants_from_sups(2.0, 0.0, 1.0);
    PhiN phi(5);
    EnergyResidual r = local_energy_residual(s, phi, {1.25, 1.25, 1.25}, -0.005, k, GradPhi{});
    for (double v : r.lhs_terms) CHECK(v == 0.0);
    for (double v : r.rhs_terms) CHECK(v == 0.0);
    CHECK(r.margin == 0.0);
}

TEST_CASE("local energy residual on an exact caloric oxygen field") {
    // n = 0, u = 0, c a decaying single heat mode: the c-equation is exactly
    // the heat equation, so (2.2) must hold up to quadrature error
    const double L = 2.5;
    Grid g(32, 32, 32, L);
    const double kf = 2.0 * M_PI / L;
    const double k2 = kf * kf;
    AnalyticState a = AnalyticState::zero();
    a.c = [kf, k2](const Vec3& x, double t) {
        return 1.0 + 0.5 * std::exp(-k2 * (t + 1.0)) * std::cos(kf * x[0]);
    };
    std::vector<double> times;
    for (double t = -1.0; t < -0.02; t += 0.02) times.push_back(t);
    for (double t = -0.02; t <= 0.0; t += 5e-4) times.push_back(t);
    auto s = SnapshotSeries::synthesize(a, g, times);
    Constants k = lambda_constants_from_sups(1.5, 0.0, 1.0);
    PhiN phi(5);
    const Vec3 x0{1.25, 1.25, 1.25};
    for (double t : {-0.01, -0.005, -0.001}) {
        EnergyResidual r = local_energy_residual(s, phi, x0, t, k, GradPhi{});
        INFO("t = ", t, " margin = ", r.margin, " rhs = ", r.rhs);
        CHECK(r.margin >= -0.05 * std::fabs(r.rhs));
    }
}

TEST_CASE("local energy residual rejects cutoffs violating the boundary condition") {
    Grid g(16, 16, 16, 2.5);
    auto s = constant_series(g, 0.0, 1.0, {0, 0, 0}, 0.0, 0.0, 0.5, 8);
    Constants k = lambda_constants_from_sups(1.0, 0.0, 1.0);
    BumpCutoff too_big(1.3); // support exceeds Q_1
    CHECK_THROWS_AS(local_energy_residual(s, too_big, {1.25, 1.25, 1.25}, -0.01, k, GradPhi{}),
                    Error);
}

#include "ckns/pressure.hpp"

#include <algorithm>
#include <cmath>

#include "ckns/engine.hpp"
#include "ckns/spectral.hpp"

namespace ckns {

namespace {

// quintic smoothstep, C^2 at both ends
double smooth01(double t) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    return t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}

// eta = 1 on B_{rho/2}, 0 outside B_rho
double eta_cutoff(double dist, double rho) {
    return 1.0 - smooth01((dist - 0.5 * rho) / (0.5 * rho));
}

} // namespace

double GradPhi::sup_norm() const {
    if (field) return field->max_norm();
    return norm(constant);
}

bool GradPhi::is_zero() const {
    if (field) return field->max_norm() == 0.0;
    return constant[0] == 0.0 && constant[1] == 0.0 && constant[2] == 0.0;
}

void GradPhi::sample(const Grid& g, VectorField& out) const {
    if (field) {
        if (!(field->grid == g)) throw Error("grad phi field lives on a different grid");
        out = *field;
        return;
    }
    out = VectorField(g);
    for (int a = 0; a < 3; ++a) std::fill(out[a].begin(), out[a].end(), constant[a]);
}

ScalarField pressure_source(const VectorField& u, const ScalarField& n, const GradPhi& gradphi,
                            bool dealias) {
    require_finite(u, "velocity");
    require_finite(n, "cell concentration");
    const Grid& g = u.grid;
    Spectral& sp = spectral_for(g);
    const std::int64_t m = g.size();

    Spectral::Spectrum src(sp.spec_size(), {0.0, 0.0});
    std::vector<double> prod(m);
    // div div (u x u): -k_i k_j F[u_i u_j], symmetric off-diagonal doubled
    for (int a = 0; a < 3; ++a) {
        for (int b = a; b < 3; ++b) {
            for (std::int64_t i = 0; i < m; ++i) prod[i] = u[a][i] * u[b][i];
            if (Spectral::is_constant(prod)) continue;
            auto ph = sp.forward(prod);
            if (dealias) sp.dealias(ph);
            const double mult = (a == b) ? 1.0 : 2.0;
            const int nzc = g.nz / 2 + 1;
            std::int64_t idx = 0;
            for (int i = 0; i < g.nx; ++i)
                for (int j = 0; j < g.ny; ++j)
                    for (int k = 0; k < nzc; ++k, ++idx) {
                        const double ka = a == 0 ? sp.kx()[i] : a == 1 ? sp.ky()[j] : sp.kz()[k];
                        const double kb = b == 0 ? sp.kx()[i] : b == 1 ? sp.ky()[j] : sp.kz()[k];
                        src[idx] += -mult * ka * kb * ph[idx];
                    }
        }
    }
    // div(n grad phi): i k . F[n grad phi]
    if (!gradphi.is_zero()) {
        for (int a = 0; a < 3; ++a) {
            if (gradphi.field)
                for (std::int64_t i = 0; i < m; ++i) prod[i] = n.v[i] * (*gradphi.field)[a][i];
            else {
                if (gradphi.constant[a] == 0.0) continue;
                for (std::int64_t i = 0; i < m; ++i) prod[i] = n.v[i] * gradphi.constant[a];
            }
            if (Spectral::is_constant(prod)) continue;
            auto ph = sp.forward(prod);
            if (dealias) sp.dealias(ph);
            const int nzc = g.nz / 2 + 1;
            std::int64_t idx = 0;
            for (int i = 0; i < g.nx; ++i)
                for (int j = 0; j < g.ny; ++j)
                    for (int k = 0; k < nzc; ++k, ++idx) {
                        const double ka = a == 0 ? sp.kdx()[i] : a == 1 ? sp.kdy()[j] : sp.kdz()[k];
                        src[idx] += std::complex<double>(0.0, ka) * ph[idx];
                    }
        }
    }
    ScalarField out(g, u.time);
    sp.inverse(std::move(src), out.v);
    return out;
}

ScalarField solve_pressure_global(const VectorField& u, const ScalarField& n,
                                  const GradPhi& gradphi, bool dealias) {
    ScalarField src = pressure_source(u, n, gradphi, dealias);
    ScalarField p = spectral_for(u.grid).solve_neg_laplace(src);
    p.time = u.time;
    return p;
}

std::array<ScalarField, 3> localized_pressure_source_vec(const VectorField& u,
                                                         const ScalarField& n,
                                                         const GradPhi& gradphi, const Vec3& center,
                                                         double rho, bool subtract_mean) {
    const Grid& g = u.grid;
    if (!(rho < 0.5 * g.box)) throw Error("decompose_local: rho does not fit in the box");
    if (0.5 * rho < 8.0 * g.h_max())
        throw Error("decompose_local: cutoff transition under-resolved (needs >= 8 cells)");

    Spectral& sp = spectral_for(g);
    const std::int64_t m = g.size();

    Vec3 umean{0, 0, 0};
    if (subtract_mean) {
        BallIndex ball(g, center, rho);
        if (ball.node_count() > 0)
            for (int a = 0; a < 3; ++a) umean[a] = ball.sum(u[a]) / double(ball.node_count());
    }

    // eta sampled once
    std::vector<double> eta(m);
    {
        std::int64_t idx = 0;
        for (int i = 0; i < g.nx; ++i)
            for (int j = 0; j < g.ny; ++j)
                for (int k = 0; k < g.nz; ++k, ++idx) {
                    const double dx = g.wrap(g.x(i) - center[0]);
                    const double dy = g.wrap(g.y(j) - center[1]);
                    const double dz = g.nz == 1 ? g.wrap(-center[2]) : g.wrap(g.z(k) - center[2]);
                    eta[idx] = eta_cutoff(std::sqrt(dx * dx + dy * dy + dz * dz), rho);
                }
    }

    std::array<ScalarField, 3> V;
    for (int a = 0; a < 3; ++a) V[a] = ScalarField(g, u.time);
    std::vector<double> prod(m), d(m);
    for (int a = 0; a < 3; ++a) {
        // sum_j d_j((u_a - mean)(u_j - mean) eta)
        for (int b = 0; b < 3; ++b) {
            for (std::int64_t i = 0; i < m; ++i)
                prod[i] = (u[a][i] - umean[a]) * (u[b][i] - umean[b]) * eta[i];
            sp.derivative(prod, b, d);
            for (std::int64_t i = 0; i < m; ++i) V[a].v[i] += d[i];
        }
        // + n (grad phi)_a eta
        if (!gradphi.is_zero()) {
            if (gradphi.field)
                for (std::int64_t i = 0; i < m; ++i) V[a].v[i] += n.v[i] * (*gradphi.field)[a][i] * eta[i];
            else if (gradphi.constant[a] != 0.0)
                for (std::int64_t i = 0; i < m; ++i) V[a].v[i] += n.v[i] * gradphi.constant[a] * eta[i];
        }
    }
    return V;
}

namespace {

// discrete kernel of d_a G, G = 1/(4 pi |x|); odd symmetry fixes the origin cell to 0
double kernel_component(double dx, double dy, double dz, int a) {
    const double r2 = dx * dx + dy * dy + dz * dz;
    if (r2 == 0.0) return 0.0;
    const double r = std::sqrt(r2);
    const double da = a == 0 ? dx : a == 1 ? dy : dz;
    return -da / (4.0 * M_PI * r2 * r);
}

} // namespace

ScalarField newtonian_potential_direct(const std::array<ScalarField, 3>& V) {
    const Grid& g = V[0].grid;
    ScalarField out(g);
    const double w = g.cell_volume();
    std::int64_t it = 0;
    for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.ny; ++j)
            for (int k = 0; k < g.nz; ++k, ++it) {
                double acc = 0.0;
                std::int64_t is = 0;
                for (int i2 = 0; i2 < g.nx; ++i2)
                    for (int j2 = 0; j2 < g.ny; ++j2)
                        for (int k2 = 0; k2 < g.nz; ++k2, ++is) {
                            // free-space displacement (no wrap): the padded convolution
                            // sees every source-target pair at its true distance
                            const double dx = g.x(i) - g.x(i2);
                            const double dy = g.y(j) - g.y(j2);
                            const double dz = g.z(k) - g.z(k2);
                            for (int a = 0; a < 3; ++a)
                                acc += kernel_component(dx, dy, dz, a) * V[a].v[is];
                        }
                out.v[it] = acc * w;
            }
    return out;
}

ScalarField newtonian_potential_fft(const std::array<ScalarField, 3>& V) {
    const Grid& g = V[0].grid;
    // zero-padded 2x grid; equal spacing, so box nodes embed as the low block
    const Grid gp(2 * g.nx, 2 * g.ny, g.nz == 1 ? 1 : 2 * g.nz, 2.0 * g.box);
    Spectral& spp = spectral_for(gp);
    const std::int64_t mp = gp.size();

    std::vector<double> pad(mp), kern(mp), p1pad(mp, 0.0);
    for (int a = 0; a < 3; ++a) {
        if (Spectral::is_constant(V[a].v) && V[a].v[0] == 0.0) continue;
        std::fill(pad.begin(), pad.end(), 0.0);
        for (int i = 0; i < g.nx; ++i)
            for (int j = 0; j < g.ny; ++j)
                for (int k = 0; k < g.nz; ++k)
                    pad[gp.index(i, j, k)] = V[a].v[g.index(i, j, k)];
        std::int64_t idx = 0;
        for (int i = 0; i < gp.nx; ++i)
            for (int j = 0; j < gp.ny; ++j)
                for (int k = 0; k < gp.nz; ++k, ++idx) {
                    const double dx = gp.wrap(i * gp.hx());
                    const double dy = gp.wrap(j * gp.hy());
                    const double dz = gp.nz == 1 ? 0.0 : gp.wrap(k * gp.hz());
                    kern[idx] = kernel_component(dx, dy, dz, a);
                }
        auto fa = spp.forward(pad);
        auto fk = spp.forward(kern);
        for (std::int64_t i = 0; i < std::int64_t(fa.size()); ++i) fa[i] *= fk[i];
        spp.inverse(std::move(fa), pad);
        // circular conv = M * ifft(fft*fft) with the normalized-forward convention
        for (std::int64_t i = 0; i < mp; ++i) p1pad[i] += pad[i] * double(mp);
    }

    ScalarField out(g, V[0].time);
    const double w = g.cell_volume();
    for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.ny; ++j)
            for (int k = 0; k < g.nz; ++k)
                out.v[g.index(i, j, k)] = p1pad[gp.index(i, j, k)] * w;
    return out;
}

PressureDecomposition decompose_local(const ScalarField& p, const VectorField& u,
                                      const ScalarField& n, const GradPhi& gradphi,
                                      const Vec3& center, double rho, bool subtract_mean) {
    require_finite(p, "pressure");
    const Grid& g = p.grid;
    auto V = localized_pressure_source_vec(u, n, gradphi, center, rho, subtract_mean);

    PressureDecomposition out;
    out.center = center;
    out.rho = rho;
    out.p1 = newtonian_potential_fft(V);
    out.p1.time = p.time;
    out.p2 = ScalarField(g, p.time);
    for (std::int64_t i = 0; i < g.size(); ++i) out.p2.v[i] = p.v[i] - out.p1.v[i];

    // FD laplacian residual on the inner ball, stencil kept clear of the
    // cutoff transition
    auto lap_fd = [&](const ScalarField& f, int i, int j, int k) {
        auto mod = [](int a, int nn) { return ((a % nn) + nn) % nn; };
        const double c0 = f.at(i, j, k);
        double acc = (f.at(mod(i + 1, g.nx), j, k) - 2 * c0 + f.at(mod(i - 1, g.nx), j, k)) / (g.hx() * g.hx());
        acc += (f.at(i, mod(j + 1, g.ny), k) - 2 * c0 + f.at(i, mod(j - 1, g.ny), k)) / (g.hy() * g.hy());
        if (g.nz > 1)
            acc += (f.at(i, j, mod(k + 1, g.nz)) - 2 * c0 + f.at(i, j, mod(k - 1, g.nz))) / (g.hz() * g.hz());
        return acc;
    };
    const double r_eval = 0.5 * rho - 2.0 * g.h_max();
    if (r_eval > 0.0) {
        BallIndex inner(g, center, r_eval);
        double res = 0.0, scale = 0.0;
        for (const auto& run : inner.runs()) {
            // recover (i,j,k) from the run base; runs advance along z
            std::int64_t base = run.base;
            const int k0 = int(base % g.nz);
            const int j0 = int((base / g.nz) % g.ny);
            const int i0 = int(base / (std::int64_t(g.nz) * g.ny));
            for (int m2 = 0; m2 < run.len; ++m2) {
                res = std::max(res, std::fabs(lap_fd(out.p2, i0, j0, k0 + m2)));
                scale = std::max(scale, std::fabs(lap_fd(out.p1, i0, j0, k0 + m2)));
            }
        }
        out.harmonic_residual = res;
        out.residual_scale = scale;
    }
    return out;
}

double mean_value_check(const ScalarField& f, const Vec3& center, double rho, double r,
                        double q_exp, double p_exp, int k) {
    const Grid& g = f.grid;
    if (!(r > 0.0 && r < rho)) throw Error("mean_value_check: need 0 < r < rho");
    if (rho - r < 2.0 * g.h_max()) throw Error("mean_value_check: r too close to rho");
    if (q_exp < 1.0 || p_exp < 1.0) throw Error("mean_value_check: exponents must be >= 1");
    if (k != 0 && k != 1) throw Error("mean_value_check: only k in {0,1} supported");

    const double w = g.cell_volume();
    auto lp_norm = [&](const std::vector<double>& vals, const BallIndex& b, double e) {
        double acc = b.sum_mapped(vals, [e](double x) { return std::pow(std::fabs(x), e); });
        return std::pow(acc * w, 1.0 / e);
    };

    BallIndex inner(g, center, r), outer(g, center, rho);
    double num;
    if (k == 0) {
        num = lp_norm(f.v, inner, q_exp);
    } else {
        // central differences, local so non-periodic samples stay clean inside
        std::vector<double> gradmag(f.v.size(), 0.0);
        auto mod = [](int a, int nn) { return ((a % nn) + nn) % nn; };
        for (const auto& run : inner.runs()) {
            std::int64_t base = run.base;
            const int k0 = int(base % g.nz);
            const int j0 = int((base / g.nz) % g.ny);
            const int i0 = int(base / (std::int64_t(g.nz) * g.ny));
            for (int m2 = 0; m2 < run.len; ++m2) {
                const int kk = k0 + m2;
                const double gx = (f.at(mod(i0 + 1, g.nx), j0, kk) - f.at(mod(i0 - 1, g.nx), j0, kk)) / (2 * g.hx());
                const double gy = (f.at(i0, mod(j0 + 1, g.ny), kk) - f.at(i0, mod(j0 - 1, g.ny), kk)) / (2 * g.hy());
                const double gz = g.nz > 1 ? (f.at(i0, j0, mod(kk + 1, g.nz)) - f.at(i0, j0, mod(kk - 1, g.nz))) / (2 * g.hz())
                                           : 0.0;
                gradmag[base + m2] = std::sqrt(gx * gx + gy * gy + gz * gz);
            }
        }
        num = lp_norm(gradmag, inner, q_exp);
    }
    const double den_norm = lp_norm(f.v, outer, p_exp);
    const double den = std::pow(r, 3.0 / q_exp) / std::pow(rho - r, 3.0 / p_exp + double(k)) * den_norm;
    return den == 0.0 ? 0.0 : num / den;
}

DDecayTable d_decay_monitor(const SnapshotSeries& s, const Vec3& x0, double t0, double theta0,
                            double rho0, int levels) {
    if (!(theta0 > 0.0 && theta0 < 0.25)) throw Error("d_decay_monitor: theta0 must lie in (0, 1/4)");
    if (levels < 0) throw Error("d_decay_monitor: negative level count");

    DDecayTable table;
    std::vector<ParabolicCylinder> cyls;
    for (int k = 0; k <= levels; ++k) {
        const double r = rho0 * std::pow(theta0, k);
        if (r < 2.0 * s.grid().h_max()) {
            table.truncated = true;
            table.warning = "radius sequence truncated at level " + std::to_string(k) +
                            ": ball degenerate at grid resolution";
            break;
        }
        cyls.push_back({x0, t0, r});
    }
    auto evals = evaluate_cylinders(s, cyls,
                                    {Iq::P32, Iq::U2, Iq::GradU2, Iq::N, Iq::GradSqrtN2});
    for (std::size_t k = 0; k < evals.size(); ++k) {
        const auto& e = evals[k];
        DDecayRow row;
        row.level = int(k);
        row.radius = e.q.r;
        const double r = e.q.r;
        row.D = std::pow(r, -2.0) * e.time_integral(Iq::P32);
        const double A_u = e.sup(Iq::U2) / r, E_u = e.time_integral(Iq::GradU2) / r;
        const double A_n = e.sup(Iq::N) / r, E_n = e.time_integral(Iq::GradSqrtN2) / r;
        row.G = A_u + E_u + A_n + E_n;
        row.resolved = e.space_resolved && e.time_resolved;
        if (k > 0) {
            const auto& prev = table.rows.back();
            row.bound_rhs = 0.5 * prev.D + std::pow(theta0, -2.0) * std::pow(prev.G, 1.5);
            row.ratio = row.bound_rhs > 0.0 ? row.D / row.bound_rhs : 0.0;
        }
        table.rows.push_back(row);
        if (!e.space_resolved) {
            table.truncated = true;
            table.warning = "level " + std::to_string(k) + " under-resolved (h > r/8)";
            table.rows.back().resolved = false;
            break;
        }
    }
    return table;
}

} // namespace ckns

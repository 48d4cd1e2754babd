#include "ckns/analytic.hpp"

namespace ckns {

AnalyticState AnalyticState::zero() {
    AnalyticState s;
    s.n = [](const Vec3&, double) { return 0.0; };
    s.c = [](const Vec3&, double) { return 0.0; };
    s.u = [](const Vec3&, double) { return Vec3{0, 0, 0}; };
    s.p = [](const Vec3&, double) { return 0.0; };
    return s;
}

AnalyticState scale_transform(const AnalyticState& s, double lambda) {
    if (!(lambda > 0.0)) throw Error("scale_transform: lambda must be positive");
    const double l = lambda, l2 = lambda * lambda;
    AnalyticState out;
    out.n = [f = s.n, l, l2](const Vec3& x, double t) { return l2 * f(l * x, l2 * t); };
    out.c = [f = s.c, l, l2](const Vec3& x, double t) { return f(l * x, l2 * t); };
    out.u = [f = s.u, l, l2](const Vec3& x, double t) { return l * f(l * x, l2 * t); };
    out.p = [f = s.p, l, l2](const Vec3& x, double t) { return l2 * f(l * x, l2 * t); };
    return out;
}

ScalarField sample_scalar(const std::function<double(const Vec3&, double)>& f, const Grid& g,
                          double t) {
    ScalarField out(g, t);
    std::int64_t idx = 0;
    for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.ny; ++j)
            for (int k = 0; k < g.nz; ++k, ++idx) out.v[idx] = f({g.x(i), g.y(j), g.z(k)}, t);
    return out;
}

VectorField sample_vector(const std::function<Vec3(const Vec3&, double)>& f, const Grid& g,
                          double t) {
    VectorField out(g, t);
    std::int64_t idx = 0;
    for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.ny; ++j)
            for (int k = 0; k < g.nz; ++k, ++idx) {
                const Vec3 v = f({g.x(i), g.y(j), g.z(k)}, t);
                out[0][idx] = v[0];
                out[1][idx] = v[1];
                out[2][idx] = v[2];
            }
    return out;
}

} // namespace ckns

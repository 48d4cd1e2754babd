#pragma once

#include <cstdint>
#include <functional>

#include "ckns/grid.hpp"

namespace ckns {

/// Closed-form (n, c, u, p) state, evaluable at arbitrary (x, t). Used for
/// exact sampling of rescaled fields and for synthetic snapshot series.
struct AnalyticState {
    std::function<double(const Vec3&, double)> n;
    std::function<double(const Vec3&, double)> c;
    std::function<Vec3(const Vec3&, double)> u;
    std::function<double(const Vec3&, double)> p;

    static AnalyticState zero();
};

/// Parabolic rescaling of a closed-form state:
///   n_l(x,t) = l^2 n(lx, l^2 t),  c_l = c(lx, l^2 t),
///   u_l = l u(lx, l^2 t),         p_l = l^2 p(lx, l^2 t).
AnalyticState scale_transform(const AnalyticState& s, double lambda);

ScalarField sample_scalar(const std::function<double(const Vec3&, double)>& f, const Grid& g,
                          double t);
VectorField sample_vector(const std::function<Vec3(const Vec3&, double)>& f, const Grid& g,
                          double t);

} // namespace ckns

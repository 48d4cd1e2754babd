#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace ckns {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using Vec3 = std::array<double, 3>;

inline Vec3 operator+(const Vec3& a, const Vec3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Vec3 operator*(double s, const Vec3& a) { return {s * a[0], s * a[1], s * a[2]}; }
inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

/// Uniform periodic grid on [0,L)^3. Dims must be powers of two; Nz=1 selects
/// the cheap planar mode (all formulas keep their 3D exponents).
struct Grid {
    int nx = 0, ny = 0, nz = 0;
    double box = 0.0;

    Grid() = default;
    Grid(int nx_, int ny_, int nz_, double box_) : nx(nx_), ny(ny_), nz(nz_), box(box_) {
        auto pow2 = [](int n) { return n > 0 && (n & (n - 1)) == 0; };
        if (!pow2(nx) || !pow2(ny) || !pow2(nz))
            throw Error("grid dims must be powers of two, got " + std::to_string(nx) + "x" +
                        std::to_string(ny) + "x" + std::to_string(nz));
        if (!(box > 0.0)) throw Error("grid box length must be positive");
    }

    std::int64_t size() const { return std::int64_t(nx) * ny * nz; }
    double hx() const { return box / nx; }
    double hy() const { return box / ny; }
    double hz() const { return box / nz; }
    double cell_volume() const { return hx() * hy() * hz(); }
    /// Coarsest spacing that participates in resolution contracts. The z axis
    /// is exempt in planar mode (nz==1), where hz degenerates to L.
    double h_max() const { return nz == 1 ? std::max(hx(), hy()) : std::max(hx(), std::max(hy(), hz())); }

    std::int64_t index(int i, int j, int k) const { return (std::int64_t(i) * ny + j) * nz + k; }
    double x(int i) const { return i * hx(); }
    double y(int j) const { return j * hy(); }
    double z(int k) const { return k * hz(); }

    /// Minimal-image displacement of coordinate a from b along one axis.
    double wrap(double d) const {
        d = std::fmod(d, box);
        if (d > 0.5 * box) d -= box;
        if (d < -0.5 * box) d += box;
        return d;
    }

    bool operator==(const Grid& o) const {
        return nx == o.nx && ny == o.ny && nz == o.nz && box == o.box;
    }
};

struct ScalarField {
    Grid grid;
    double time = 0.0;
    std::vector<double> v;

    ScalarField() = default;
    explicit ScalarField(const Grid& g, double t = 0.0, double fill = 0.0)
        : grid(g), time(t), v(g.size(), fill) {}

    double& at(int i, int j, int k) { return v[grid.index(i, j, k)]; }
    double at(int i, int j, int k) const { return v[grid.index(i, j, k)]; }

    double min() const;
    double max() const;
    double max_abs() const;
    bool finite() const;
};

struct VectorField {
    Grid grid;
    double time = 0.0;
    std::array<std::vector<double>, 3> comp;

    VectorField() = default;
    explicit VectorField(const Grid& g, double t = 0.0) : grid(g), time(t) {
        for (auto& c : comp) c.assign(g.size(), 0.0);
    }

    std::vector<double>& operator[](int c) { return comp[c]; }
    const std::vector<double>& operator[](int c) const { return comp[c]; }

    /// Pointwise sup of the Euclidean magnitude.
    double max_norm() const;
    bool finite() const;
};

void require_finite(const ScalarField& f, const char* what);
void require_finite(const VectorField& f, const char* what);

} // namespace ckns

#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "ckns/analytic.hpp"
#include "ckns/ball.hpp"
#include "ckns/grid.hpp"

namespace ckns {

struct State {
    ScalarField n, c, p;
    VectorField u;
    double t = 0.0;

    State() = default;
    explicit State(const Grid& g, double time = 0.0) : n(g, time), c(g, time), p(g, time), u(g, time), t(time) {}
};

enum class FieldKind : int { N = 0, C = 1, Ux = 2, Uy = 3, Uz = 4, P = 5 };

/// Parabolic cylinder Q_r(z0) = B_r(x0) x (t0 - r^2, t0).
struct ParabolicCylinder {
    Vec3 x0{0, 0, 0};
    double t0 = 0.0;
    double r = 0.0;
    double t_begin() const { return t0 - r * r; }
};

/// Time-ordered (n, c, u, p) snapshots on one grid. Backends may hold states
/// in memory, read them from a snapshot directory, or synthesize them from a
/// closed-form state; fields are served one at a time so large grids stream.
class SnapshotSeries {
  public:
    SnapshotSeries() = default;

    static SnapshotSeries from_states(std::vector<State> states);
    static SnapshotSeries open_dir(const std::string& dir);
    static SnapshotSeries synthesize(const AnalyticState& s, const Grid& g,
                                     std::vector<double> times);

    bool empty() const { return times_.empty(); }
    int size() const { return int(times_.size()); }
    const Grid& grid() const { return grid_; }
    double time(int i) const { return times_.at(i); }
    const std::vector<double>& times() const { return times_; }
    double dt_max() const;

    ScalarField scalar(int snap, FieldKind kind) const;
    VectorField velocity(int snap) const;
    State state(int snap) const;
    /// Non-null only for the in-memory backend.
    const State* state_ptr(int snap) const;

    /// True when [t0 - r^2, t0] lies inside the sampled time range.
    bool covers(const ParabolicCylinder& q) const;
    /// dt_max <= r^2/16 within the cylinder window.
    bool time_resolved(const ParabolicCylinder& q) const;

  private:
    Grid grid_;
    std::vector<double> times_;
    std::shared_ptr<std::vector<State>> states_; // in-memory backend
    std::function<ScalarField(int, FieldKind)> loader_; // lazy backends
};

/// Trapezoid-in-time of integrate_ball slices of a pointwise functional of
/// the state. The reference path for cylinder integrals; materializes one
/// state per snapshot.
struct CylinderQuad {
    double value = 0.0;
    bool space_resolved = true;
    bool time_resolved = true;
};
CylinderQuad integrate_cylinder(const SnapshotSeries& s, const ParabolicCylinder& q,
                                const std::function<double(const State&, std::int64_t)>& integrand);

// --- snapshot binary format ------------------------------------------------
// little-endian: magic "CKNS", u32 version, u32 Nx Ny Nz, f64 L, f64 t, then
// row-major f64 arrays n, c, u_x, u_y, u_z, p. One file per snapshot; a series
// directory holds a manifest listing files and times in ascending order.

constexpr std::uint32_t kSnapshotFormatVersion = 1;

void write_snapshot(const std::string& path, const State& s);
State read_snapshot(const std::string& path);

void write_series_manifest(const std::string& dir, const Grid& g,
                           const std::vector<std::pair<std::string, double>>& files);
SnapshotSeries write_series(const std::string& dir, const std::vector<State>& states);

} // namespace ckns

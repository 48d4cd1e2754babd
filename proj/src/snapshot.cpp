#include "ckns/snapshot.hpp"

#include <algorithm>
#include <bit>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace ckns {

static_assert(std::endian::native == std::endian::little,
              "snapshot format is little-endian; big-endian hosts unsupported");

namespace {

void check_times(const std::vector<double>& t) {
    for (std::size_t i = 1; i < t.size(); ++i)
        if (!(t[i] > t[i - 1])) throw Error("snapshot times must be strictly increasing");
}

} // namespace

SnapshotSeries SnapshotSeries::from_states(std::vector<State> states) {
    SnapshotSeries s;
    if (states.empty()) return s;
    s.grid_ = states.front().n.grid;
    for (const auto& st : states) {
        if (!(st.n.grid == s.grid_) || !(st.c.grid == s.grid_) || !(st.u.grid == s.grid_) ||
            !(st.p.grid == s.grid_))
            throw Error("all snapshots must share one grid");
        s.times_.push_back(st.t);
    }
    check_times(s.times_);
    s.states_ = std::make_shared<std::vector<State>>(std::move(states));
    return s;
}

SnapshotSeries SnapshotSeries::synthesize(const AnalyticState& a, const Grid& g,
                                          std::vector<double> times) {
    check_times(times);
    SnapshotSeries s;
    s.grid_ = g;
    s.times_ = std::move(times);
    auto st = std::make_shared<AnalyticState>(a);
    auto ts = s.times_;
    s.loader_ = [st, g, ts](int snap, FieldKind kind) -> ScalarField {
        const double t = ts.at(snap);
        switch (kind) {
            case FieldKind::N: return sample_scalar(st->n, g, t);
            case FieldKind::C: return sample_scalar(st->c, g, t);
            case FieldKind::P: return sample_scalar(st->p, g, t);
            default: {
                const int comp = int(kind) - int(FieldKind::Ux);
                auto f = [&](const Vec3& x, double tt) { return st->u(x, tt)[comp]; };
                return sample_scalar(f, g, t);
            }
        }
    };
    return s;
}

double SnapshotSeries::dt_max() const {
    double m = 0.0;
    for (std::size_t i = 1; i < times_.size(); ++i) m = std::max(m, times_[i] - times_[i - 1]);
    return m;
}

ScalarField SnapshotSeries::scalar(int snap, FieldKind kind) const {
    if (states_) {
        const State& st = states_->at(snap);
        switch (kind) {
            case FieldKind::N: return st.n;
            case FieldKind::C: return st.c;
            case FieldKind::P: return st.p;
            default: {
                ScalarField f(grid_, st.t);
                f.v = st.u[int(kind) - int(FieldKind::Ux)];
                return f;
            }
        }
    }
    if (!loader_) throw Error("empty snapshot series");
    return loader_(snap, kind);
}

VectorField SnapshotSeries::velocity(int snap) const {
    VectorField u(grid_, time(snap));
    for (int a = 0; a < 3; ++a) u[a] = scalar(snap, FieldKind(int(FieldKind::Ux) + a)).v;
    return u;
}

State SnapshotSeries::state(int snap) const {
    if (states_) return states_->at(snap);
    State st(grid_, time(snap));
    st.n = scalar(snap, FieldKind::N);
    st.c = scalar(snap, FieldKind::C);
    st.p = scalar(snap, FieldKind::P);
    st.u = velocity(snap);
    return st;
}

const State* SnapshotSeries::state_ptr(int snap) const {
    return states_ ? &states_->at(snap) : nullptr;
}

bool SnapshotSeries::covers(const ParabolicCylinder& q) const {
    if (times_.empty()) return false;
    const double slack = 1e-12 * (1.0 + std::fabs(q.t0));
    return times_.front() <= q.t_begin() + slack && times_.back() >= q.t0 - slack;
}

bool SnapshotSeries::time_resolved(const ParabolicCylinder& q) const {
    if (!covers(q)) return false;
    double m = 0.0;
    for (std::size_t i = 1; i < times_.size(); ++i) {
        if (times_[i] < q.t_begin() || times_[i - 1] > q.t0) continue;
        m = std::max(m, times_[i] - times_[i - 1]);
    }
    return m <= q.r * q.r / 16.0 + 1e-14;
}

CylinderQuad integrate_cylinder(const SnapshotSeries& s, const ParabolicCylinder& q,
                                const std::function<double(const State&, std::int64_t)>& integrand) {
    if (!s.covers(q)) throw Error("snapshot series does not cover the cylinder time window");
    BallIndex ball(s.grid(), q.x0, q.r);
    CylinderQuad out;
    out.space_resolved = ball.resolved();
    out.time_resolved = s.time_resolved(q);

    std::vector<double> tt, vv;
    const double w = s.grid().cell_volume();
    for (int i = 0; i < s.size(); ++i) {
        // only snapshots participating in the window matter, keep neighbors for interpolation
        State st = s.state(i);
        double acc = 0.0;
        for (const auto& run : ball.runs())
            for (int m = 0; m < run.len; ++m) acc += integrand(st, run.base + m);
        tt.push_back(s.time(i));
        vv.push_back(acc * w);
    }
    out.value = trapezoid_window(tt, vv, q.t_begin(), q.t0);
    return out;
}

// --- binary I/O -------------------------------------------------------------

namespace {

void write_raw(std::ofstream& os, const void* p, std::size_t bytes) {
    os.write(static_cast<const char*>(p), std::streamsize(bytes));
    if (!os) throw Error("snapshot write failed");
}

void read_raw(std::ifstream& is, void* p, std::size_t bytes) {
    is.read(static_cast<char*>(p), std::streamsize(bytes));
    if (!is || is.gcount() != std::streamsize(bytes)) throw Error("snapshot read truncated");
}

} // namespace

void write_snapshot(const std::string& path, const State& s) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw Error("cannot open snapshot file for writing: " + path);
    const Grid& g = s.n.grid;
    write_raw(os, "CKNS", 4);
    const std::uint32_t ver = kSnapshotFormatVersion;
    const std::uint32_t nx = g.nx, ny = g.ny, nz = g.nz;
    write_raw(os, &ver, 4);
    write_raw(os, &nx, 4);
    write_raw(os, &ny, 4);
    write_raw(os, &nz, 4);
    write_raw(os, &g.box, 8);
    write_raw(os, &s.t, 8);
    const std::size_t bytes = std::size_t(g.size()) * 8;
    write_raw(os, s.n.v.data(), bytes);
    write_raw(os, s.c.v.data(), bytes);
    for (int a = 0; a < 3; ++a) write_raw(os, s.u[a].data(), bytes);
    write_raw(os, s.p.v.data(), bytes);
}

State read_snapshot(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error("cannot open snapshot file: " + path);
    char magic[4];
    read_raw(is, magic, 4);
    if (std::memcmp(magic, "CKNS", 4) != 0)
        throw Error("bad snapshot magic in " + path + " (expected \"CKNS\")");
    std::uint32_t ver, nx, ny, nz;
    read_raw(is, &ver, 4);
    if (ver != kSnapshotFormatVersion)
        throw Error("unsupported snapshot format version " + std::to_string(ver) + " in " + path);
    read_raw(is, &nx, 4);
    read_raw(is, &ny, 4);
    read_raw(is, &nz, 4);
    double box, t;
    read_raw(is, &box, 8);
    read_raw(is, &t, 8);
    Grid g(int(nx), int(ny), int(nz), box);
    State s(g, t);
    const std::size_t bytes = std::size_t(g.size()) * 8;
    read_raw(is, s.n.v.data(), bytes);
    read_raw(is, s.c.v.data(), bytes);
    for (int a = 0; a < 3; ++a) read_raw(is, s.u[a].data(), bytes);
    read_raw(is, s.p.v.data(), bytes);
    s.n.time = s.c.time = s.p.time = s.u.time = t;
    return s;
}

void write_series_manifest(const std::string& dir, const Grid& g,
                           const std::vector<std::pair<std::string, double>>& files) {
    ordered_json j;
    j["format"] = "ckns-series";
    j["version"] = kSnapshotFormatVersion;
    j["grid"] = {{"nx", g.nx}, {"ny", g.ny}, {"nz", g.nz}, {"box", g.box}};
    ordered_json snaps = ordered_json::array();
    for (const auto& [name, t] : files) snaps.push_back({{"file", name}, {"time", t}});
    j["snapshots"] = snaps;
    std::ofstream os(fs::path(dir) / "manifest.json");
    if (!os) throw Error("cannot write manifest in " + dir);
    os << j.dump(2) << "\n";
}

SnapshotSeries write_series(const std::string& dir, const std::vector<State>& states) {
    fs::create_directories(dir);
    std::vector<std::pair<std::string, double>> files;
    for (std::size_t i = 0; i < states.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof(name), "snap_%05zu.ckns", i);
        write_snapshot((fs::path(dir) / name).string(), states[i]);
        files.emplace_back(name, states[i].t);
    }
    if (!states.empty()) write_series_manifest(dir, states.front().n.grid, files);
    return SnapshotSeries::open_dir(dir);
}

SnapshotSeries SnapshotSeries::open_dir(const std::string& dir) {
    std::ifstream is(fs::path(dir) / "manifest.json");
    if (!is) throw Error("no manifest.json in " + dir);
    ordered_json j;
    try {
        is >> j;
    } catch (const std::exception& e) {
        throw Error("malformed manifest in " + dir + ": " + e.what());
    }
    if (j.value("format", "") != std::string("ckns-series"))
        throw Error("manifest in " + dir + " is not a ckns-series manifest");
    Grid g(j["grid"]["nx"].get<int>(), j["grid"]["ny"].get<int>(), j["grid"]["nz"].get<int>(),
           j["grid"]["box"].get<double>());
    SnapshotSeries s;
    s.grid_ = g;
    std::vector<std::string> paths;
    for (const auto& e : j["snapshots"]) {
        paths.push_back((fs::path(dir) / e["file"].get<std::string>()).string());
        s.times_.push_back(e["time"].get<double>());
    }
    check_times(s.times_);
    s.loader_ = [paths, g](int snap, FieldKind kind) -> ScalarField {
        // seek straight to the requested field; one field resident at a time
        const std::string& path = paths.at(std::size_t(snap));
        std::ifstream is(path, std::ios::binary);
        if (!is) throw Error("cannot open snapshot file: " + path);
        char header[36]; // magic + version + dims + box + time
        read_raw(is, header, 36);
        if (std::memcmp(header, "CKNS", 4) != 0) throw Error("bad snapshot magic in " + path);
        double t;
        std::memcpy(&t, header + 28, 8);
        const std::size_t bytes = std::size_t(g.size()) * 8;
        // file slot order n, c, u_x, u_y, u_z, p matches FieldKind numbering
        is.seekg(std::streamoff(36 + bytes * std::size_t(int(kind))));
        ScalarField f(g, t);
        read_raw(is, f.v.data(), bytes);
        return f;
    };
    return s;
}

} // namespace ckns

#include "ckns/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

namespace ckns {

namespace {

std::vector<double> wavenumbers(int n, double box, bool zero_nyquist) {
    std::vector<double> k(n);
    const double f = 2.0 * M_PI / box;
    for (int i = 0; i < n; ++i) {
        int m = (i <= n / 2) ? i : i - n;
        k[i] = f * m;
    }
    if (zero_nyquist && n > 1 && n % 2 == 0) k[n / 2] = 0.0;
    return k;
}

std::vector<char> dealias_keep(int n) {
    // keep |m| <= n/3
    std::vector<char> keep(n, 0);
    for (int i = 0; i < n; ++i) {
        int m = (i <= n / 2) ? i : i - n;
        keep[i] = (std::abs(m) <= n / 3) ? 1 : 0;
    }
    if (n == 1) keep[0] = 1;
    return keep;
}

} // namespace

struct Spectral::Plans {
    fftw_plan fwd = nullptr;
    fftw_plan inv = nullptr;
    std::vector<double> real_buf;
    Spectrum spec_buf;
    std::mutex mtx; // fftw execute on shared buffers is not reentrant

    // buffers and plans materialize on first transform; constant-field
    // short-circuits never pay for them
    void ensure(const Grid& g, std::int64_t spec_n) {
        if (fwd) return;
        real_buf.assign(g.size(), 0.0);
        spec_buf.assign(spec_n, {0.0, 0.0});
        // FFTW_ESTIMATE: deterministic plans, no input-dependent tuning
        fwd = fftw_plan_dft_r2c_3d(g.nx, g.ny, g.nz, real_buf.data(),
                                   reinterpret_cast<fftw_complex*>(spec_buf.data()), FFTW_ESTIMATE);
        inv = fftw_plan_dft_c2r_3d(g.nx, g.ny, g.nz,
                                   reinterpret_cast<fftw_complex*>(spec_buf.data()), real_buf.data(),
                                   FFTW_ESTIMATE);
        if (!fwd || !inv) throw Error("fftw plan creation failed");
    }
    ~Plans() {
        if (fwd) fftw_destroy_plan(fwd);
        if (inv) fftw_destroy_plan(inv);
    }
};

Spectral::Spectral(const Grid& g) : grid_(g), plans_(std::make_unique<Plans>()) {
    kx_ = wavenumbers(g.nx, g.box, false);
    ky_ = wavenumbers(g.ny, g.box, false);
    kz_ = wavenumbers(g.nz, g.box, false);
    kdx_ = wavenumbers(g.nx, g.box, true);
    kdy_ = wavenumbers(g.ny, g.box, true);
    kdz_ = wavenumbers(g.nz, g.box, true);
    dealias_keep_x_ = dealias_keep(g.nx);
    dealias_keep_y_ = dealias_keep(g.ny);
    dealias_keep_z_ = dealias_keep(g.nz);
}

Spectral::~Spectral() = default;

bool Spectral::is_constant(const std::vector<double>& f) {
    if (f.empty()) return true;
    const double v0 = f[0];
    for (double x : f)
        if (x != v0) return false;
    return true;
}

Spectral::Spectrum Spectral::forward(const std::vector<double>& real) const {
    auto& p = *plans_;
    std::lock_guard<std::mutex> lock(p.mtx);
    p.ensure(grid_, spec_size());
    std::copy(real.begin(), real.end(), p.real_buf.begin());
    fftw_execute(p.fwd);
    Spectrum out = p.spec_buf;
    const double scale = 1.0 / double(grid_.size());
    for (auto& c : out) c *= scale;
    return out;
}

void Spectral::inverse(Spectrum spec, std::vector<double>& real_out) const {
    auto& p = *plans_;
    std::lock_guard<std::mutex> lock(p.mtx);
    p.ensure(grid_, spec_size());
    std::copy(spec.begin(), spec.end(), p.spec_buf.begin());
    fftw_execute(p.inv);
    real_out.assign(p.real_buf.begin(), p.real_buf.end());
}

void Spectral::derivative(const std::vector<double>& f, int axis, std::vector<double>& out) const {
    if (is_constant(f)) { // exact: trig interpolant of constant data
        out.assign(f.size(), 0.0);
        return;
    }
    derivative(forward(f), axis, out);
}

void Spectral::derivative(const Spectrum& fh, int axis, std::vector<double>& out) const {
    const int nzc = grid_.nz / 2 + 1;
    Spectrum d(fh.size());
    std::int64_t idx = 0;
    for (int i = 0; i < grid_.nx; ++i) {
        for (int j = 0; j < grid_.ny; ++j) {
            for (int k = 0; k < nzc; ++k, ++idx) {
                const double kk = axis == 0 ? kdx_[i] : axis == 1 ? kdy_[j] : kdz_[k];
                d[idx] = std::complex<double>(0.0, kk) * fh[idx];
            }
        }
    }
    inverse(std::move(d), out);
}

void Spectral::second_derivative(const Spectrum& fh, int a, int b, std::vector<double>& out) const {
    const int nzc = grid_.nz / 2 + 1;
    Spectrum d(fh.size());
    std::int64_t idx = 0;
    for (int i = 0; i < grid_.nx; ++i) {
        for (int j = 0; j < grid_.ny; ++j) {
            for (int k = 0; k < nzc; ++k, ++idx) {
                const double ka = a == 0 ? kx_[i] : a == 1 ? ky_[j] : kz_[k];
                const double kb = b == 0 ? kx_[i] : b == 1 ? ky_[j] : kz_[k];
                d[idx] = -ka * kb * fh[idx];
            }
        }
    }
    inverse(std::move(d), out);
}

ScalarField Spectral::gradient_component(const ScalarField& f, int axis) const {
    require_finite(f, "gradient input");
    ScalarField g(grid_, f.time);
    derivative(f.v, axis, g.v);
    return g;
}

VectorField Spectral::gradient(const ScalarField& f) const {
    require_finite(f, "gradient input");
    VectorField g(grid_, f.time);
    if (is_constant(f.v)) return g;
    const Spectrum fh = forward(f.v);
    for (int a = 0; a < 3; ++a) derivative(fh, a, g[a]);
    return g;
}

ScalarField Spectral::divergence(const VectorField& v) const {
    require_finite(v, "divergence input");
    ScalarField d(grid_, v.time);
    std::vector<double> tmp;
    for (int a = 0; a < 3; ++a) {
        if (is_constant(v[a])) continue;
        derivative(v[a], a, tmp);
        for (std::int64_t i = 0; i < grid_.size(); ++i) d.v[i] += tmp[i];
    }
    return d;
}

ScalarField Spectral::laplacian(const ScalarField& f) const {
    require_finite(f, "laplacian input");
    ScalarField out(grid_, f.time);
    if (is_constant(f.v)) return out;
    Spectrum fh = forward(f.v);
    const int nzc = grid_.nz / 2 + 1;
    std::int64_t idx = 0;
    for (int i = 0; i < grid_.nx; ++i) {
        for (int j = 0; j < grid_.ny; ++j) {
            for (int k = 0; k < nzc; ++k, ++idx) {
                const double k2 = kx_[i] * kx_[i] + ky_[j] * ky_[j] + kz_[k] * kz_[k];
                fh[idx] *= -k2;
            }
        }
    }
    inverse(std::move(fh), out.v);
    return out;
}

void Spectral::project_divfree(Spectrum& ux, Spectrum& uy, Spectrum& uz) const {
    const int nzc = grid_.nz / 2 + 1;
    std::int64_t idx = 0;
    for (int i = 0; i < grid_.nx; ++i) {
        for (int j = 0; j < grid_.ny; ++j) {
            for (int k = 0; k < nzc; ++k, ++idx) {
                const double a = kx_[i], b = ky_[j], c = kz_[k];
                const double k2 = a * a + b * b + c * c;
                if (k2 == 0.0) continue;
                const std::complex<double> kd = (a * ux[idx] + b * uy[idx] + c * uz[idx]) / k2;
                ux[idx] -= a * kd;
                uy[idx] -= b * kd;
                uz[idx] -= c * kd;
            }
        }
    }
}

void Spectral::project_divfree(VectorField& u) const {
    Spectrum sx = forward(u[0]), sy = forward(u[1]), sz = forward(u[2]);
    project_divfree(sx, sy, sz);
    inverse(std::move(sx), u[0]);
    inverse(std::move(sy), u[1]);
    inverse(std::move(sz), u[2]);
}

ScalarField Spectral::solve_neg_laplace(const ScalarField& rhs) const {
    require_finite(rhs, "poisson rhs");
    ScalarField out(grid_, rhs.time);
    if (is_constant(rhs.v)) return out;
    Spectrum fh = forward(rhs.v);
    const int nzc = grid_.nz / 2 + 1;
    std::int64_t idx = 0;
    for (int i = 0; i < grid_.nx; ++i) {
        for (int j = 0; j < grid_.ny; ++j) {
            for (int k = 0; k < nzc; ++k, ++idx) {
                const double k2 = kx_[i] * kx_[i] + ky_[j] * ky_[j] + kz_[k] * kz_[k];
                fh[idx] = (k2 == 0.0) ? 0.0 : fh[idx] / k2;
            }
        }
    }
    inverse(std::move(fh), out.v);
    return out;
}

void Spectral::dealias(Spectrum& s) const {
    const int nzc = grid_.nz / 2 + 1;
    std::int64_t idx = 0;
    for (int i = 0; i < grid_.nx; ++i) {
        for (int j = 0; j < grid_.ny; ++j) {
            for (int k = 0; k < nzc; ++k, ++idx) {
                if (!(dealias_keep_x_[i] && dealias_keep_y_[j] && dealias_keep_z_[k])) s[idx] = 0.0;
            }
        }
    }
}

double Spectral::max_spectral_divergence(const VectorField& u) const {
    return divergence(u).max_abs();
}

Spectral& spectral_for(const Grid& g) {
    struct Key {
        int nx, ny, nz;
        double box;
        bool operator<(const Key& o) const {
            if (nx != o.nx) return nx < o.nx;
            if (ny != o.ny) return ny < o.ny;
            if (nz != o.nz) return nz < o.nz;
            return box < o.box;
        }
    };
    static std::map<Key, std::unique_ptr<Spectral>> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    Key key{g.nx, g.ny, g.nz, g.box};
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, std::make_unique<Spectral>(g)).first;
    return *it->second;
}

} // namespace ckns

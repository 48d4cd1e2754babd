#pragma once

#include <complex>
#include <memory>
#include <vector>

#include "ckns/grid.hpp"

namespace ckns {

/// Fourier-space scratch and plans for one grid. All derivative operators are
/// exact for resolved modes; first derivatives zero the Nyquist mode. Plans
/// use FFTW_ESTIMATE so results are reproducible run to run.
class Spectral {
  public:
    explicit Spectral(const Grid& g);
    ~Spectral();
    Spectral(const Spectral&) = delete;
    Spectral& operator=(const Spectral&) = delete;

    const Grid& grid() const { return grid_; }

    using Spectrum = std::vector<std::complex<double>>;
    std::int64_t spec_size() const { return std::int64_t(grid_.nx) * grid_.ny * (grid_.nz / 2 + 1); }

    Spectrum forward(const std::vector<double>& real) const;
    void inverse(Spectrum spec, std::vector<double>& real_out) const; // consumes spec

    // wavenumbers along each axis (2*pi/L scaling); kd_* have Nyquist zeroed
    const std::vector<double>& kx() const { return kx_; }
    const std::vector<double>& ky() const { return ky_; }
    const std::vector<double>& kz() const { return kz_; }
    const std::vector<double>& kdx() const { return kdx_; }
    const std::vector<double>& kdy() const { return kdy_; }
    const std::vector<double>& kdz() const { return kdz_; }

    /// d/dx_axis applied in Fourier space. Constant fields short-circuit to an
    /// exact zero (the trig interpolant of constant data has zero derivative).
    void derivative(const std::vector<double>& f, int axis, std::vector<double>& out) const;
    void derivative(const Spectrum& fh, int axis, std::vector<double>& out) const;
    void second_derivative(const Spectrum& fh, int axis_a, int axis_b, std::vector<double>& out) const;

    ScalarField gradient_component(const ScalarField& f, int axis) const;
    VectorField gradient(const ScalarField& f) const;
    ScalarField divergence(const VectorField& v) const;
    ScalarField laplacian(const ScalarField& f) const;

    /// Leray projection onto divergence-free fields (k=0 mode untouched).
    void project_divfree(Spectrum& ux, Spectrum& uy, Spectrum& uz) const;
    void project_divfree(VectorField& u) const;

    /// -Delta p = rhs with zero-mean periodic solution; k=0 of rhs discarded.
    ScalarField solve_neg_laplace(const ScalarField& rhs) const;

    /// 2/3-rule dealias mask applied in place.
    void dealias(Spectrum& s) const;

    double max_spectral_divergence(const VectorField& u) const;

    static bool is_constant(const std::vector<double>& f);

  private:
    Grid grid_;
    struct Plans;
    std::unique_ptr<Plans> plans_;
    std::vector<double> kx_, ky_, kz_, kdx_, kdy_, kdz_;
    std::vector<char> dealias_keep_x_, dealias_keep_y_, dealias_keep_z_;
};

/// Shared per-grid Spectral instances (plan creation is not free).
Spectral& spectral_for(const Grid& g);

} // namespace ckns

#pragma once

#include <memory>

#include "ckns/grid.hpp"

namespace ckns {

/// Smooth space-time cutoff evaluated analytically (values and derivatives),
/// centered at a point supplied by the caller; positions are displacements.
class Cutoff {
  public:
    virtual ~Cutoff() = default;
    virtual double value(const Vec3& dx, double t) const = 0;
    virtual Vec3 grad(const Vec3& dx, double t) const = 0;
    /// dt psi + laplace psi, the parabolic combination every estimate uses.
    virtual double dt_plus_lap(const Vec3& dx, double t) const = 0;
    virtual double support_radius() const = 0;
    virtual double support_t_begin() const = 0;
    /// Quadrature refinement factor appropriate for this profile on spacing h.
    virtual int supersample(double h) const { return 1; }
};

/// Backward heat kernel Psi_n(x,t) = (r_n^2 - t)^{-3/2} exp(-|x|^2 / (4 (r_n^2 - t))),
/// r_n = 2^{-n}, defined for t < r_n^2. Satisfies dt Psi + lap Psi = 0.
struct BackwardHeatKernel {
    int level;
    double rn;

    explicit BackwardHeatKernel(int n);
    double value(const Vec3& dx, double t) const;
    Vec3 grad(const Vec3& dx, double t) const;
    double dt(const Vec3& dx, double t) const;
    double lap(const Vec3& dx, double t) const;
};

/// Space-time cutoff xi: 1 on Q_{r4}, 0 outside Q_{r3} (quintic C^2 ramps),
/// with the paper's default radii r4 = 1/16, r3 = 1/8.
struct XiCutoff {
    double r_plateau = 1.0 / 16.0;
    double r_support = 1.0 / 8.0;

    double value(const Vec3& dx, double t) const;
    Vec3 grad(const Vec3& dx, double t) const;
    double dt(const Vec3& dx, double t) const;
    double lap(const Vec3& dx, double t) const;
};

/// phi_n = Psi_n xi. The caloric part cancels exactly; only xi's ramps
/// contribute to dt phi + lap phi.
class PhiN : public Cutoff {
  public:
    explicit PhiN(int level, XiCutoff xi = {});
    double value(const Vec3& dx, double t) const override;
    Vec3 grad(const Vec3& dx, double t) const override;
    double dt_plus_lap(const Vec3& dx, double t) const override;
    double support_radius() const override { return xi_.r_support; }
    double support_t_begin() const override { return -xi_.r_support * xi_.r_support; }
    int supersample(double h) const override;

    const BackwardHeatKernel& kernel() const { return psi_; }
    const XiCutoff& xi() const { return xi_; }

  private:
    BackwardHeatKernel psi_;
    XiCutoff xi_;
};

/// Generic smooth bump: 1 on Q_{r/2}(0), 0 outside Q_r(0).
class BumpCutoff : public Cutoff {
  public:
    explicit BumpCutoff(double r) : r_(r) {}
    double value(const Vec3& dx, double t) const override;
    Vec3 grad(const Vec3& dx, double t) const override;
    double dt_plus_lap(const Vec3& dx, double t) const override;
    double support_radius() const override { return r_; }
    double support_t_begin() const override { return -r_ * r_; }

  private:
    double r_;
};

/// Proposition-style sanity report for phi_n: empirical kernel bounds on
/// Q_{r_n} and finite-difference residuals of the caloric and plateau
/// identities at two refinement levels.
struct PhiPropertiesReport {
    int level = 0;
    double c1_bound = 0.0;   // 2^{-3/2} e^{-1/4} * min xi over the sample set
    double c1_empirical = 0.0; // min of phi * r_n^3 over Q_{r_n} samples
    double c2_empirical = 0.0; // max of phi * r_n^3
    double caloric_residual_coarse = 0.0;
    double caloric_residual_fine = 0.0; // h and dt halved
    double caloric_ratio = 0.0;         // coarse / fine, ~4 for a 2nd-order stencil
    double plateau_residual_coarse = 0.0;
    double plateau_residual_fine = 0.0;
    double plateau_ratio = 0.0;
    bool bounds_hold = false;
};

PhiPropertiesReport phi_properties_check(int level, double h = 1e-3, double dt = 1e-6);

} // namespace ckns

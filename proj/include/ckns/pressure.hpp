#pragma once

#include <array>
#include <optional>

#include "ckns/snapshot.hpp"

namespace ckns {

/// Either a constant vector or a full periodic field; only grad(phi) ever
/// enters the dynamics, phi itself is never needed.
struct GradPhi {
    Vec3 constant{0, 0, 0};
    std::optional<VectorField> field;

    double sup_norm() const;
    void sample(const Grid& g, VectorField& out) const;
    bool is_zero() const;
};

/// RHS of -Delta p = div div (u x u) + div(n grad phi), assembled spectrally.
ScalarField pressure_source(const VectorField& u, const ScalarField& n, const GradPhi& gradphi,
                            bool dealias = false);

/// Zero-mean periodic solution of -Delta p = source(u, n, grad phi); the k=0
/// mode of the source is discarded.
ScalarField solve_pressure_global(const VectorField& u, const ScalarField& n,
                                  const GradPhi& gradphi, bool dealias = false);

struct PressureDecomposition {
    ScalarField p1; // Newtonian-potential part of the eta-localized source
    ScalarField p2; // harmonic remainder p - p1
    Vec3 center{0, 0, 0};
    double rho = 0.0;
    double harmonic_residual = 0.0; // sup |FD-laplacian p2| on the inner ball
    double residual_scale = 0.0;    // sup |FD-laplacian p1| there, for context
};

/// Local p1/p2 split: p1 is the free-space Newtonian potential of
///   d_j((u_i - (u_i)_rho)(u_j - (u_j)_rho) eta) + n (grad phi)_i eta
/// evaluated by zero-padded (2x per axis) convolution with the exact kernel
/// -x_i / (4 pi |x|^3); p2 = p - p1. The eta cutoff is 1 on B_{rho/2},
/// vanishes outside B_rho, with a C^2 polynomial transition.
PressureDecomposition decompose_local(const ScalarField& p, const VectorField& u,
                                      const ScalarField& n, const GradPhi& gradphi,
                                      const Vec3& center, double rho, bool subtract_mean = true);

/// Free-space potential sum_i (d_i G) * V_i of a compactly supported source
/// vector, by zero-padded (2x) FFT convolution with the sampled kernel.
ScalarField newtonian_potential_fft(const std::array<ScalarField, 3>& source_vec);

/// Same discrete sum as the convolution path, by direct O(N^2) summation.
/// Small-grid oracle for the FFT path.
ScalarField newtonian_potential_direct(const std::array<ScalarField, 3>& source_vec);

/// Assembles the localized source vector V_i used by decompose_local (exposed
/// so the direct-summation oracle exercises the identical input).
std::array<ScalarField, 3> localized_pressure_source_vec(const VectorField& u,
                                                         const ScalarField& n,
                                                         const GradPhi& gradphi, const Vec3& center,
                                                         double rho, bool subtract_mean);

/// Empirical constant of the harmonic mean-value inequality
///   ||grad^k f||_{L^q(B_r)} <= C r^{3/q} / (rho - r)^{3/p + k} ||f||_{L^p(B_rho)}
/// for k in {0, 1}; gradients by central differences.
double mean_value_check(const ScalarField& f, const Vec3& center, double rho, double r,
                        double q_exp, double p_exp, int k);

struct DDecayRow {
    int level = 0;
    double radius = 0.0;
    double D = 0.0;     // r^{-2} ||p||^{3/2}_{L^{3/2}(Q_r)}
    double G = 0.0;     // A_u + E_u + A_n + E_n at this radius
    double bound_rhs = 0.0; // D(rho)/2 + theta0^{-2} G(rho)^{3/2} from the previous level
    double ratio = 0.0;     // D / bound_rhs (0 when bound_rhs = 0)
    bool resolved = true;
};

struct DDecayTable {
    std::vector<DDecayRow> rows;
    bool truncated = false;
    std::string warning;
};

/// Tabulates D along the geometric radius sequence rho0 * theta0^k together
/// with the one-step decay bound; asserts nothing (the paper's constant is
/// unspecified).
DDecayTable d_decay_monitor(const SnapshotSeries& s, const Vec3& x0, double t0, double theta0,
                            double rho0, int levels);

} // namespace ckns

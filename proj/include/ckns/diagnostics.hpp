#pragma once

#include <array>
#include <string>
#include <vector>

#include "ckns/engine.hpp"
#include "ckns/pressure.hpp"
#include "ckns/snapshot.hpp"
#include "ckns/testfn.hpp"

namespace ckns {

/// Theorem-1.5 constants plus the Step-IV exponent and the entropy split
/// parameters; everything downstream takes these explicitly.
struct Constants {
    double lambda0 = 108.0; // 108 (||c(.,-1)||_inf + 1)
    double lambda1 = 1.0;   // ||grad phi||_inf + 1
    double alpha0 = 1.0;
    double alpha = 0.05; // min(1/20, alpha0 / (4 + 6 alpha0))

    static constexpr double kSplitA = 100.0;
    static constexpr double kSplitDelta = 1.0 / 6.0;

    /// 112 ||c~(.,-1)||_inf, the velocity-group weight of the local energy
    /// inequality (= 112 lambda0 / 108).
    double velocity_weight() const { return 112.0 * lambda0 / 108.0; }
};

Constants lambda_constants(const ScalarField& c_init, const GradPhi& gradphi, double alpha0);
Constants lambda_constants_from_sups(double c_sup, double gradphi_sup, double alpha0);

/// The nine scale-invariant quantities on one parabolic cylinder.
struct QuantityReport {
    ParabolicCylinder q;
    double A_u = 0, E_u = 0, A_c = 0, E_c = 0, A_n = 0, E_n = 0;
    double C_u = 0, C_u_tilde = 0, D = 0;
    bool space_resolved = false;
    bool time_resolved = false;
    bool covered = false;
    std::vector<std::string> flags;

    std::array<double, 9> values() const { return {A_u, E_u, A_c, E_c, A_n, E_n, C_u, C_u_tilde, D}; }
    static const std::array<const char*, 9>& names();
};

QuantityReport quantities(const SnapshotSeries& s, const ParabolicCylinder& q);

/// Entropy integrals of the cell concentration over a ball, n ln n := 0 at 0.
struct EntropyNorms {
    double mass = 0;          // integral n
    double n_abs_ln = 0;      // integral n |ln n|
    double nlnn_32 = 0;       // integral |n ln n|^{3/2}
    double split_low = 0;     // integral n^{4/3} over {n <= 100}
    double split_high = 0;    // integral n^{5/3} over {n > 100}
    std::int64_t split_violations = 0; // nodes violating the pointwise split bounds
};
EntropyNorms entropy_norms(const ScalarField& n, const Vec3& x0, double r);

/// Luxemburg norm of Definition 1.2 over the whole box: the smallest k with
/// integral (|f|/k) log+ (|f|/k) <= 1, by bisection on [1e-12, 1e12].
double luxemburg_norm(const ScalarField& f, double tol = 1e-8);

/// Definition-1.3 global quantities at one time.
struct GlobalApriori {
    double U = 0;
    double V = 0;
    double n_l1 = 0;
    double n_llogl = 0;
    double grad_sqrt_c_sq = 0;
    double u_sq = 0;
    double v_grad_sqrt_np1 = 0;
    double v_hess_sqrt_c = 0;
    double v_grad_u = 0;
    double v_weighted_quartic = 0; // (sqrt c)^{-2} |grad sqrt c|^4
    double v_n_grad_sqrt_c = 0;
    bool weighted_quartic_infinite = false; // c touches 0 where the weight is needed
};
GlobalApriori global_apriori_state(const State& s);
std::vector<GlobalApriori> global_apriori(const SnapshotSeries& s);

/// Every group of the local energy inequality (2.2) at one evaluation time,
/// cutoff-weighted; lhs/rhs are the signed sums. Space quadrature runs on a
/// supersampled lattice with trilinear field interpolation so sharply peaked
/// test functions integrate cleanly.
struct EnergyResidual {
    double t = 0.0;
    std::array<double, 8> lhs_terms{};  // T1..T8 (n ln n slice, grad sqrt n, ...)
    std::array<double, 11> rhs_terms{}; // I1..I11
    double lhs = 0.0, rhs = 0.0, margin = 0.0;
    static const std::array<const char*, 8>& lhs_names();
    static const std::array<const char*, 11>& rhs_names();
};

EnergyResidual local_energy_residual(const SnapshotSeries& s, const Cutoff& psi, const Vec3& x0,
                                     double t, const Constants& k, const GradPhi& gradphi);

} // namespace ckns

#pragma once

#include <string>
#include <vector>

#include "ckns/diagnostics.hpp"

namespace ckns {

enum class Criterion { Thm15, Thm16i, Thm16ii, Thm19 };

const char* criterion_name(Criterion c);
Criterion criterion_from_name(const std::string& name);

/// Classifier thresholds: eps1/eps3 and the unspecified absolute constant C
/// are configuration (the paper proves existence, not values).
struct RegularityConfig {
    double eps1 = 1e-3;
    double eps3 = 1e-3;
    double big_c = 1.0;
    int k_min = 1; // dyadic radius range for thm19 / flagging
    int k_max = 5;
};

double criterion_threshold(Criterion c, const Constants& k, const RegularityConfig& cfg);

/// One-sided verdict: smallness below the threshold concludes regularity,
/// anything else stays "not concluded"; no input yields "singular".
struct RegularityVerdict {
    Vec3 x0{0, 0, 0};
    double t0 = 0.0;
    Criterion criterion = Criterion::Thm15;
    double lhs = 0.0;
    double threshold = 0.0;
    bool regular = false;
    bool concluded_radii_ok = true; // thm19: at least 3 resolved radii
    std::vector<double> radii_used;
    struct Row {
        double r = 0.0;
        double lhs = 0.0;
        double entropy_rescaled = 0.0; // r^{-1} int_{B_r} n |ln(r^2 n)|, sup over slices
        bool resolved = true;
    };
    std::vector<Row> rows;
    double eps_used = 0.0;
    double big_c_used = 1.0;
};

/// Scale-covariant criterion value at radius r (the unit-cylinder statement
/// applied to the parabolically rescaled solution).
double criterion_lhs_at_radius(const CylinderEval& e, Criterion c);

RegularityVerdict classify_thm15(const SnapshotSeries& s, const Vec3& x0, const Constants& k,
                                 double eps1);
RegularityVerdict classify_thm16(const SnapshotSeries& s, const Vec3& x0, const Constants& k,
                                 bool variant_ii, double eps1, double big_c);
RegularityVerdict classify_thm19(const SnapshotSeries& s, const Vec3& x0, const Constants& k,
                                 double eps3, int k_min, int k_max);
RegularityVerdict classify(const SnapshotSeries& s, const Vec3& x0, Criterion c, const Constants& k,
                           const RegularityConfig& cfg);

/// Per-k table of the induction quantity
///   r_k^{-3} sup_t int_{B_{r_k}} (n + |n ln n| + |grad sqrt(c+1)|^2 + |u|^2)
/// + r_k^{-3} int_{Q_{r_k}} (|grad sqrt n|^2 + |grad^2 sqrt(c+1)|^2 + |grad u|^2).
struct SweepRow {
    int k = 0;
    double r = 0.0;
    double sup_part = 0.0;
    double int_part = 0.0;
    double value = 0.0;
    bool space_resolved = true;
    bool time_resolved = true;
};
std::vector<SweepRow> dyadic_sweep(const SnapshotSeries& s, const Vec3& x0, int levels);

/// Candidate extraction: a center is flagged when its criterion value exceeds
/// the threshold at every resolved dyadic radius; the flagged cylinder gets
/// the smallest resolved radius.
std::vector<ParabolicCylinder> flag_singular_candidates(const SnapshotSeries& s,
                                                        const std::vector<Vec3>& centers,
                                                        Criterion criterion, double threshold,
                                                        const RegularityConfig& cfg = {});

/// Vitali covering estimate in the parabolic metric
/// d(z, z') = max(|x - x'|, sqrt |t - t'|).
struct SingularSetEstimate {
    std::vector<ParabolicCylinder> flagged;
    std::vector<ParabolicCylinder> chosen; // greedy disjoint subfamily
    double premeasure = 0.0;               // sum of chosen r^{exponent}
    double exponent = 5.0 / 3.0;
    double delta = 0.0; // covering scale bound (largest flagged radius)
};

double parabolic_distance(const Vec3& xa, double ta, const Vec3& xb, double tb);

SingularSetEstimate vitali_cover(const std::vector<ParabolicCylinder>& flagged,
                                 double exponent = 5.0 / 3.0);

} // namespace ckns

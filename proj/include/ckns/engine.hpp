#pragma once

#include <map>
#include <vector>

#include "ckns/snapshot.hpp"

namespace ckns {

/// Pointwise integrands the cylinder-evaluation engine knows how to stream.
/// Separable ones (plain powers and component squares) never hold more than
/// one derived field in memory, so they scale to grids where a whole derived
/// state would not fit.
enum class Iq {
    N,             // n
    AbsNLnN,       // |n ln n|
    NLnNSigned,    // n ln n
    N43Low,        // n^{4/3} on {n <= 100}
    N53High,       // n^{5/3} on {n > 100}
    N32LnP,        // n^{3/2} (|ln n| + 1)^{3/2}
    N53,           // n^{5/3}
    AbsNLnR2N,     // n |ln(r^2 n)|, r = cylinder radius
    GradSqrtN2,    // |grad sqrt(n)|^2
    U2,            // |u|^2
    U3,            // |u|^3
    U103,          // |u|^{10/3}
    UT3,           // |u - (u)_r|^3, (u)_r = per-slice ball mean
    GradU2,        // |grad u|^2
    GradC2,        // |grad c|^2
    HessC2,        // |grad^2 c|^2
    GradSqrtCt2,   // |grad sqrt(c+1)|^2
    HessSqrtCt2,   // |grad^2 sqrt(c+1)|^2
    GradSqrtCt3,   // |grad sqrt(c+1)|^3
    GradSqrtCt103, // |grad sqrt(c+1)|^{10/3}
    P32,           // |p|^{3/2}
    P53,           // |p|^{5/3}
};

struct CylinderEval {
    ParabolicCylinder q;
    bool covered = false;
    bool space_resolved = false;
    bool time_resolved = false;
    std::int64_t ball_nodes = 0;
    /// Ball integrals (x cell volume) per stored snapshot, one row per integrand.
    std::map<Iq, std::vector<double>> slices;
    std::vector<double> slice_times;

    /// sup over stored snapshots inside [t0 - r^2, t0].
    double sup(Iq iq) const;
    /// trapezoid over (t0 - r^2, t0).
    double time_integral(Iq iq) const;
};

/// One pass over the series: per snapshot every requested primitive field is
/// materialized once, derived pieces are produced one at a time, and ball
/// sums accumulate for every cylinder. Deterministic summation order.
std::vector<CylinderEval> evaluate_cylinders(const SnapshotSeries& s,
                                             const std::vector<ParabolicCylinder>& cylinders,
                                             const std::vector<Iq>& integrands);

} // namespace ckns

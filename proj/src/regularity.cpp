#include "ckns/regularity.hpp"

#include <algorithm>
#include <cmath>

namespace ckns {

const char* criterion_name(Criterion c) {
    switch (c) {
        case Criterion::Thm15: return "thm15";
        case Criterion::Thm16i: return "thm16i";
        case Criterion::Thm16ii: return "thm16ii";
        case Criterion::Thm19: return "thm19";
    }
    return "?";
}

Criterion criterion_from_name(const std::string& name) {
    if (name == "thm15") return Criterion::Thm15;
    if (name == "thm16i") return Criterion::Thm16i;
    if (name == "thm16ii") return Criterion::Thm16ii;
    if (name == "thm19") return Criterion::Thm19;
    throw Error("unknown criterion: " + name + " (expected thm15|thm16i|thm16ii|thm19)");
}

double criterion_threshold(Criterion c, const Constants& k, const RegularityConfig& cfg) {
    const double ll = k.lambda0 * k.lambda1;
    switch (c) {
        case Criterion::Thm15: return cfg.eps1 / std::pow(ll, 4.0 + 4.0 * k.alpha0);
        case Criterion::Thm16i:
            return std::pow(cfg.eps1, 3.0) / (cfg.big_c * std::pow(ll, 15.0 + 12.0 * k.alpha0));
        case Criterion::Thm16ii:
            return std::pow(cfg.eps1, 15.0 / 4.0) /
                   (cfg.big_c * std::pow(ll, 75.0 / 4.0 + 15.0 * k.alpha0));
        case Criterion::Thm19: return cfg.eps3 / std::pow(ll, 4.0 + k.alpha0);
    }
    return 0.0;
}

namespace {

std::vector<Iq> criterion_integrands(Criterion c, bool with_table) {
    switch (c) {
        case Criterion::Thm15:
            return {Iq::N, Iq::AbsNLnN, Iq::GradSqrtCt2, Iq::U2, Iq::GradSqrtN2, Iq::GradU2,
                    Iq::HessSqrtCt2, Iq::P32};
        case Criterion::Thm16i: return {Iq::N32LnP, Iq::GradSqrtCt3, Iq::U3, Iq::P32};
        case Criterion::Thm16ii: return {Iq::N53, Iq::GradSqrtCt103, Iq::U103, Iq::P53};
        case Criterion::Thm19: {
            std::vector<Iq> v{Iq::N, Iq::AbsNLnN, Iq::GradSqrtCt2, Iq::U2, Iq::GradSqrtN2,
                              Iq::GradU2, Iq::HessSqrtCt2};
            if (with_table) v.push_back(Iq::AbsNLnR2N);
            return v;
        }
    }
    return {};
}

/// sup over stored slices of a sum of per-integrand ball values
double sup_of_sum(const CylinderEval& e, const std::vector<Iq>& iqs) {
    const double ta = e.q.t_begin(), tb = e.q.t0;
    double m = 0.0;
    bool any = false;
    for (std::size_t i = 0; i < e.slice_times.size(); ++i) {
        if (e.slice_times[i] < ta - 1e-14 || e.slice_times[i] > tb + 1e-14) continue;
        double v = 0.0;
        for (Iq q : iqs) v += e.slices.at(q)[i];
        m = any ? std::max(m, v) : v;
        any = true;
    }
    if (!any)
        for (Iq q : iqs) m += e.sup(q); // endpoint-interpolated fallback
    return m;
}

} // namespace

double criterion_lhs_at_radius(const CylinderEval& e, Criterion c) {
    const double r = e.q.r;
    switch (c) {
        case Criterion::Thm15: {
            const double sup = sup_of_sum(e, {Iq::N, Iq::AbsNLnN, Iq::GradSqrtCt2, Iq::U2});
            const double ti = e.time_integral(Iq::GradSqrtN2) + e.time_integral(Iq::GradU2) +
                              e.time_integral(Iq::HessSqrtCt2);
            return sup / r + ti / r + e.time_integral(Iq::P32) / (r * r);
        }
        case Criterion::Thm16i: {
            const double ti = e.time_integral(Iq::N32LnP) + e.time_integral(Iq::GradSqrtCt3) +
                              e.time_integral(Iq::U3) + e.time_integral(Iq::P32);
            return ti / (r * r);
        }
        case Criterion::Thm16ii: {
            const double ti = e.time_integral(Iq::N53) + e.time_integral(Iq::GradSqrtCt103) +
                              e.time_integral(Iq::U103) + e.time_integral(Iq::P53);
            return ti / std::pow(r, 5.0 / 3.0);
        }
        case Criterion::Thm19: {
            const double sup = sup_of_sum(e, {Iq::N, Iq::AbsNLnN, Iq::GradSqrtCt2, Iq::U2});
            const double ti = e.time_integral(Iq::GradSqrtN2) + e.time_integral(Iq::GradU2) +
                              e.time_integral(Iq::HessSqrtCt2);
            return (sup + ti) / r;
        }
    }
    return 0.0;
}

RegularityVerdict classify_thm15(const SnapshotSeries& s, const Vec3& x0, const Constants& k,
                                 double eps1) {
    RegularityConfig cfg;
    cfg.eps1 = eps1;
    RegularityVerdict v;
    v.x0 = x0;
    v.t0 = s.time(s.size() - 1); // first-blow-up-time framing
    v.criterion = Criterion::Thm15;
    v.eps_used = eps1;
    ParabolicCylinder q{x0, v.t0, 1.0};
    if (!s.covers(q)) throw Error("classify_thm15: series shorter than the unit time window");
    auto evals = evaluate_cylinders(s, {q}, criterion_integrands(Criterion::Thm15, false));
    v.lhs = criterion_lhs_at_radius(evals[0], Criterion::Thm15);
    v.threshold = criterion_threshold(Criterion::Thm15, k, cfg);
    v.regular = v.lhs <= v.threshold;
    v.radii_used = {1.0};
    return v;
}

RegularityVerdict classify_thm16(const SnapshotSeries& s, const Vec3& x0, const Constants& k,
                                 bool variant_ii, double eps1, double big_c) {
    RegularityConfig cfg;
    cfg.eps1 = eps1;
    cfg.big_c = big_c;
    const Criterion crit = variant_ii ? Criterion::Thm16ii : Criterion::Thm16i;
    RegularityVerdict v;
    v.x0 = x0;
    v.t0 = s.time(s.size() - 1);
    v.criterion = crit;
    v.eps_used = eps1;
    v.big_c_used = big_c;
    ParabolicCylinder q{x0, v.t0, 1.0};
    if (!s.covers(q)) throw Error("classify_thm16: series shorter than the unit time window");
    auto evals = evaluate_cylinders(s, {q}, criterion_integrands(crit, false));
    v.lhs = criterion_lhs_at_radius(evals[0], crit);
    v.threshold = criterion_threshold(crit, k, cfg);
    v.regular = v.lhs <= v.threshold;
    v.radii_used = {1.0};
    return v;
}

RegularityVerdict classify_thm19(const SnapshotSeries& s, const Vec3& x0, const Constants& k,
                                 double eps3, int k_min, int k_max) {
    if (k_min < 1 || k_max < k_min) throw Error("classify_thm19: bad dyadic range");
    RegularityConfig cfg;
    cfg.eps3 = eps3;
    RegularityVerdict v;
    v.x0 = x0;
    v.t0 = s.time(s.size() - 1);
    v.criterion = Criterion::Thm19;
    v.eps_used = eps3;
    v.threshold = criterion_threshold(Criterion::Thm19, k, cfg);

    std::vector<ParabolicCylinder> cyls;
    for (int kk = k_min; kk <= k_max; ++kk) {
        const double r = std::pow(2.0, -kk);
        if (r >= 0.5 * s.grid().box || r < 2.0 * s.grid().h_max()) continue;
        cyls.push_back({x0, v.t0, r});
    }
    auto evals = evaluate_cylinders(s, cyls, criterion_integrands(Criterion::Thm19, true));
    std::vector<double> resolved_lhs;
    for (const auto& e : evals) {
        RegularityVerdict::Row row;
        row.r = e.q.r;
        row.lhs = criterion_lhs_at_radius(e, Criterion::Thm19);
        row.entropy_rescaled = sup_of_sum(e, {Iq::AbsNLnR2N}) / e.q.r;
        row.resolved = e.space_resolved && e.covered;
        v.rows.push_back(row);
        if (row.resolved) {
            v.radii_used.push_back(row.r);
            resolved_lhs.push_back(row.lhs);
        }
    }
    if (resolved_lhs.size() < 3) {
        v.concluded_radii_ok = false;
        v.regular = false; // not concluded
        return v;
    }
    // limsup proxy: max over the three smallest resolved radii
    std::vector<std::size_t> order(resolved_lhs.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return v.radii_used[a] < v.radii_used[b]; });
    double m = 0.0;
    for (std::size_t i = 0; i < 3; ++i) m = std::max(m, resolved_lhs[order[i]]);
    v.lhs = m;
    v.regular = v.lhs <= v.threshold;
    return v;
}

RegularityVerdict classify(const SnapshotSeries& s, const Vec3& x0, Criterion c, const Constants& k,
                           const RegularityConfig& cfg) {
    switch (c) {
        case Criterion::Thm15: return classify_thm15(s, x0, k, cfg.eps1);
        case Criterion::Thm16i: return classify_thm16(s, x0, k, false, cfg.eps1, cfg.big_c);
        case Criterion::Thm16ii: return classify_thm16(s, x0, k, true, cfg.eps1, cfg.big_c);
        case Criterion::Thm19: return classify_thm19(s, x0, k, cfg.eps3, cfg.k_min, cfg.k_max);
    }
    throw Error("classify: bad criterion");
}

std::vector<SweepRow> dyadic_sweep(const SnapshotSeries& s, const Vec3& x0, int levels) {
    if (levels < 1) throw Error("dyadic_sweep: need at least one level");
    const double t0 = s.time(s.size() - 1);
    std::vector<ParabolicCylinder> cyls;
    std::vector<int> ks;
    for (int k = 1; k <= levels; ++k) {
        const double r = std::pow(2.0, -k);
        if (r >= 0.5 * s.grid().box) continue; // box too small for this level
        if (r < 2.0 * s.grid().h_max()) break; // ball degenerate: truncate the table
        cyls.push_back({x0, t0, r});
        ks.push_back(k);
    }
    auto evals = evaluate_cylinders(s, cyls,
                                    {Iq::N, Iq::AbsNLnN, Iq::GradSqrtCt2, Iq::U2, Iq::GradSqrtN2,
                                     Iq::HessSqrtCt2, Iq::GradU2});
    std::vector<SweepRow> rows;
    for (std::size_t i = 0; i < evals.size(); ++i) {
        const auto& e = evals[i];
        SweepRow row;
        row.k = ks[i];
        row.r = e.q.r;
        const double r3 = std::pow(e.q.r, -3.0);
        row.sup_part = r3 * sup_of_sum(e, {Iq::N, Iq::AbsNLnN, Iq::GradSqrtCt2, Iq::U2});
        row.int_part = r3 * (e.time_integral(Iq::GradSqrtN2) + e.time_integral(Iq::HessSqrtCt2) +
                             e.time_integral(Iq::GradU2));
        row.value = row.sup_part + row.int_part;
        row.space_resolved = e.space_resolved;
        row.time_resolved = e.time_resolved;
        rows.push_back(row);
    }
    return rows;
}

std::vector<ParabolicCylinder> flag_singular_candidates(const SnapshotSeries& s,
                                                        const std::vector<Vec3>& centers,
                                                        Criterion criterion, double threshold,
                                                        const RegularityConfig& cfg) {
    if (centers.empty()) throw Error("flag_singular_candidates: empty center set");
    const double t0 = s.time(s.size() - 1);
    std::vector<double> radii;
    for (int k = cfg.k_min; k <= cfg.k_max; ++k) {
        const double r = std::pow(2.0, -k);
        if (r >= 0.5 * s.grid().box) continue;
        if (s.grid().h_max() > r / 8.0) break; // keep only resolved radii
        radii.push_back(r);
    }
    if (radii.empty()) throw Error("flag_singular_candidates: no resolved dyadic radius");

    std::vector<ParabolicCylinder> flagged;
    const auto iqs = criterion_integrands(criterion, false);
    for (const Vec3& x0 : centers) {
        std::vector<ParabolicCylinder> cyls;
        for (double r : radii) cyls.push_back({x0, t0, r});
        auto evals = evaluate_cylinders(s, cyls, iqs);
        bool all_exceed = true;
        for (const auto& e : evals)
            if (criterion_lhs_at_radius(e, criterion) <= threshold) {
                all_exceed = false;
                break;
            }
        if (all_exceed) flagged.push_back({x0, t0, radii.back()});
    }
    return flagged;
}

double parabolic_distance(const Vec3& xa, double ta, const Vec3& xb, double tb) {
    return std::max(norm(xa - xb), std::sqrt(std::fabs(ta - tb)));
}

SingularSetEstimate vitali_cover(const std::vector<ParabolicCylinder>& flagged, double exponent) {
    SingularSetEstimate est;
    est.flagged = flagged;
    est.exponent = exponent;
    for (const auto& q : flagged) est.delta = std::max(est.delta, q.r);

    // greedy by descending radius, ties broken lexicographically on (x, t)
    std::vector<std::size_t> order(flagged.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (flagged[a].r != flagged[b].r) return flagged[a].r > flagged[b].r;
        if (flagged[a].x0 != flagged[b].x0) return flagged[a].x0 < flagged[b].x0;
        return flagged[a].t0 < flagged[b].t0;
    });
    for (std::size_t i : order) {
        const auto& q = flagged[i];
        bool disjoint = true;
        for (const auto& c : est.chosen) {
            if (parabolic_distance(q.x0, q.t0, c.x0, c.t0) < q.r + c.r) {
                disjoint = false;
                break;
            }
        }
        if (disjoint) {
            est.chosen.push_back(q);
            est.premeasure += std::pow(q.r, exponent);
        }
    }
    return est;
}

} // namespace ckns

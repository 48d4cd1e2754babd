#include "ckns/report.hpp"

#include <fstream>

namespace ckns {

ordered_json report_header(const std::string& kind) {
    ordered_json j;
    j["report"] = kind;
    j["schema_version"] = kReportSchemaVersion;
    return j;
}

namespace {

ordered_json cylinder_json(const ParabolicCylinder& q) {
    return {{"x0", {q.x0[0], q.x0[1], q.x0[2]}}, {"t0", q.t0}, {"r", q.r}};
}

ParabolicCylinder cylinder_from_json(const ordered_json& j) {
    ParabolicCylinder q;
    q.x0 = {j["x0"][0].get<double>(), j["x0"][1].get<double>(), j["x0"][2].get<double>()};
    q.t0 = j["t0"].get<double>();
    q.r = j["r"].get<double>();
    return q;
}

} // namespace

ordered_json to_json(const QuantityReport& r) {
    ordered_json j = report_header("quantities");
    j["cylinder"] = cylinder_json(r.q);
    const auto vals = r.values();
    for (std::size_t i = 0; i < vals.size(); ++i) j[QuantityReport::names()[i]] = vals[i];
    j["space_resolved"] = r.space_resolved;
    j["time_resolved"] = r.time_resolved;
    j["covered"] = r.covered;
    j["flags"] = r.flags;
    return j;
}

QuantityReport quantity_report_from_json(const ordered_json& j) {
    QuantityReport r;
    r.q = cylinder_from_json(j["cylinder"]);
    std::array<double, 9> vals{};
    for (std::size_t i = 0; i < vals.size(); ++i) vals[i] = j[QuantityReport::names()[i]].get<double>();
    r.A_u = vals[0];
    r.E_u = vals[1];
    r.A_c = vals[2];
    r.E_c = vals[3];
    r.A_n = vals[4];
    r.E_n = vals[5];
    r.C_u = vals[6];
    r.C_u_tilde = vals[7];
    r.D = vals[8];
    r.space_resolved = j["space_resolved"].get<bool>();
    r.time_resolved = j["time_resolved"].get<bool>();
    r.covered = j["covered"].get<bool>();
    r.flags = j["flags"].get<std::vector<std::string>>();
    return r;
}

ordered_json to_json(const EnergyResidual& r) {
    ordered_json j = report_header("energy_residual");
    j["t"] = r.t;
    ordered_json lhs, rhs;
    for (std::size_t i = 0; i < r.lhs_terms.size(); ++i)
        lhs[EnergyResidual::lhs_names()[i]] = r.lhs_terms[i];
    for (std::size_t i = 0; i < r.rhs_terms.size(); ++i)
        rhs[EnergyResidual::rhs_names()[i]] = r.rhs_terms[i];
    j["lhs_terms"] = lhs;
    j["rhs_terms"] = rhs;
    j["lhs"] = r.lhs;
    j["rhs"] = r.rhs;
    j["margin"] = r.margin;
    return j;
}

ordered_json to_json(const EntropyNorms& e) {
    ordered_json j = report_header("entropy_norms");
    j["mass"] = e.mass;
    j["n_abs_ln_n"] = e.n_abs_ln;
    j["abs_n_ln_n_3_2"] = e.nlnn_32;
    j["split_low_n_4_3"] = e.split_low;
    j["split_high_n_5_3"] = e.split_high;
    j["split_violations"] = e.split_violations;
    return j;
}

ordered_json to_json(const Constants& k) {
    ordered_json j = report_header("constants");
    j["lambda0"] = k.lambda0;
    j["lambda1"] = k.lambda1;
    j["alpha0"] = k.alpha0;
    j["alpha"] = k.alpha;
    j["A_split"] = Constants::kSplitA;
    j["delta_split"] = Constants::kSplitDelta;
    return j;
}

ordered_json to_json(const GlobalApriori& a) {
    ordered_json j;
    j["U"] = a.U;
    j["V"] = a.weighted_quartic_infinite ? ordered_json("inf") : ordered_json(a.V);
    j["n_L1"] = a.n_l1;
    j["n_LlogL"] = a.n_llogl;
    j["grad_sqrt_c_sq"] = a.grad_sqrt_c_sq;
    j["u_sq"] = a.u_sq;
    j["V_grad_sqrt_np1"] = a.v_grad_sqrt_np1;
    j["V_hess_sqrt_c"] = a.v_hess_sqrt_c;
    j["V_grad_u"] = a.v_grad_u;
    j["V_weighted_quartic"] =
        a.weighted_quartic_infinite ? ordered_json("inf") : ordered_json(a.v_weighted_quartic);
    j["V_n_grad_sqrt_c"] = a.v_n_grad_sqrt_c;
    return j;
}

ordered_json to_json(const RegularityVerdict& v) {
    ordered_json j = report_header("verdict");
    j["criterion"] = criterion_name(v.criterion);
    j["x0"] = {v.x0[0], v.x0[1], v.x0[2]};
    j["t0"] = v.t0;
    j["lhs"] = v.lhs;
    j["threshold"] = v.threshold;
    j["verdict"] = v.regular ? "regular" : "not_concluded";
    j["eps"] = v.eps_used;
    j["big_C"] = v.big_c_used;
    j["radii_used"] = v.radii_used;
    if (!v.rows.empty()) {
        ordered_json rows = ordered_json::array();
        for (const auto& r : v.rows)
            rows.push_back({{"r", r.r},
                            {"lhs", r.lhs},
                            {"entropy_rescaled", r.entropy_rescaled},
                            {"resolved", r.resolved}});
        j["radius_table"] = rows;
    }
    if (!v.concluded_radii_ok) j["note"] = "fewer than 3 resolved radii";
    return j;
}

ordered_json to_json(const SingularSetEstimate& e) {
    ordered_json j = report_header("singular_set_estimate");
    j["exponent"] = e.exponent;
    j["delta"] = e.delta;
    j["premeasure"] = e.premeasure;
    auto cyl_list = [](const std::vector<ParabolicCylinder>& v) {
        ordered_json a = ordered_json::array();
        for (const auto& q : v) a.push_back(cylinder_json(q));
        return a;
    };
    j["flagged"] = cyl_list(e.flagged);
    j["chosen"] = cyl_list(e.chosen);
    return j;
}

ordered_json to_json(const std::vector<SweepRow>& rows) {
    ordered_json j = report_header("dyadic_sweep");
    ordered_json arr = ordered_json::array();
    for (const auto& r : rows)
        arr.push_back({{"k", r.k},
                       {"r", r.r},
                       {"sup_part", r.sup_part},
                       {"int_part", r.int_part},
                       {"value", r.value},
                       {"space_resolved", r.space_resolved},
                       {"time_resolved", r.time_resolved}});
    j["rows"] = arr;
    return j;
}

ordered_json to_json(const DDecayTable& t) {
    ordered_json j = report_header("d_decay");
    ordered_json arr = ordered_json::array();
    for (const auto& r : t.rows)
        arr.push_back({{"level", r.level},
                       {"radius", r.radius},
                       {"D", r.D},
                       {"G", r.G},
                       {"bound_rhs", r.bound_rhs},
                       {"ratio", r.ratio},
                       {"resolved", r.resolved}});
    j["rows"] = arr;
    j["truncated"] = t.truncated;
    if (!t.warning.empty()) j["warning"] = t.warning;
    return j;
}

void write_json(const std::string& path, const ordered_json& j) {
    std::ofstream os(path);
    if (!os) throw Error("cannot write report: " + path);
    os << j.dump(2) << "\n";
}

ordered_json read_json(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw Error("cannot open report: " + path);
    ordered_json j;
    is >> j;
    return j;
}

} // namespace ckns

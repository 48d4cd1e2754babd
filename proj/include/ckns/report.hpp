#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ckns/diagnostics.hpp"
#include "ckns/regularity.hpp"

namespace ckns {

using ordered_json = nlohmann::ordered_json;

/// Structured report schema. Every report document carries
/// {"report": <kind>, "schema_version": 1} and uses the paper's symbol names
/// (A_u..D, T1..T8, I1..I11) as keys.
constexpr int kReportSchemaVersion = 1;

ordered_json report_header(const std::string& kind);
ordered_json to_json(const QuantityReport& r);
ordered_json to_json(const EnergyResidual& r);
ordered_json to_json(const EntropyNorms& e);
ordered_json to_json(const Constants& k);
ordered_json to_json(const GlobalApriori& a);
ordered_json to_json(const RegularityVerdict& v);
ordered_json to_json(const SingularSetEstimate& e);
ordered_json to_json(const std::vector<SweepRow>& rows);
ordered_json to_json(const DDecayTable& t);

/// Round-trip support for the diagnose report (emit then re-parse).
QuantityReport quantity_report_from_json(const ordered_json& j);

void write_json(const std::string& path, const ordered_json& j);
ordered_json read_json(const std::string& path);

} // namespace ckns

#pragma once

#include "conefact/factorizer.hpp"
#include "conefact/polyhedron.hpp"
#include "conefact/psd_geometry.hpp"
#include "conefact/psd_pipeline.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace conefact {

using ordered_json = nlohmann::ordered_json;

/// Plain comma-separated decimal CSV, no header. Saved files use the
/// shortest round-trip decimal form, so load-then-save is byte-stable.
std::vector<std::vector<double>> load_matrix_csv(const std::string& path);
void save_matrix_csv(const std::string& path, const std::vector<std::vector<double>>& m);
std::string format_double(double v);

ordered_json polyhedron_to_json(const HPolyhedron& p);
HPolyhedron polyhedron_from_json(const ordered_json& j);

ordered_json covering_to_json(const Covering& c);
Covering covering_from_json(const ordered_json& j);

ordered_json factor_pair_to_json(const FactorPair& f);
FactorPair factor_pair_from_json(const ordered_json& j);

ordered_json psd_factorization_to_json(const PsdFactorization& f);
PsdFactorization psd_factorization_from_json(const ordered_json& j);

ordered_json load_json(const std::string& path);
void save_json(const std::string& path, const ordered_json& j);

/// FNV-1a 64 of the file bytes, as hex.
std::string file_hash(const std::string& path);

struct RunReport {
    std::string command;
    std::vector<std::pair<std::string, std::string>> inputs; // (path, hash)
    ordered_json config;
    std::string outcome; // ok | not_found | guarantee_violation | error
    std::optional<double> achieved_error;
    std::uint64_t seed = 0;
    std::optional<std::string> output_path;
    double wall_time_s = 0.0; // stderr only; stdout reports stay replay-stable
};

/// Machine-readable report (stdout). Wall time is deliberately left out so
/// replays with the same seed are byte-identical; it goes to the stderr log.
ordered_json report_to_json(const RunReport& r);

} // namespace conefact

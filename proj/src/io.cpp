#include "conefact/io.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace conefact {

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw std::runtime_error("cannot write file: " + path);
    out << content;
}

} // namespace

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::vector<std::vector<double>> load_matrix_csv(const std::string& path) {
    std::string text = read_file(path);
    std::vector<std::vector<double>> rows;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        std::vector<double> row;
        std::istringstream ls(line);
        std::string field;
        int field_no = 0;
        while (std::getline(ls, field, ',')) {
            ++field_no;
            try {
                std::size_t used = 0;
                double v = std::stod(field, &used);
                while (used < field.size() && std::isspace(static_cast<unsigned char>(field[used])))
                    ++used;
                if (used != field.size())
                    throw std::invalid_argument("trailing characters");
                row.push_back(v);
            } catch (const std::exception&) {
                std::ostringstream msg;
                msg << path << ": line " << line_no << ", field " << field_no
                    << ": not a number: '" << field << "'";
                throw std::runtime_error(msg.str());
            }
        }
        if (!rows.empty() && row.size() != rows[0].size()) {
            std::ostringstream msg;
            msg << path << ": line " << line_no << ": expected " << rows[0].size()
                << " fields, got " << row.size();
            throw std::runtime_error(msg.str());
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty())
        throw std::runtime_error(path + ": empty matrix");
    return rows;
}

void save_matrix_csv(const std::string& path, const std::vector<std::vector<double>>& m) {
    std::ostringstream out;
    for (const auto& row : m) {
        for (std::size_t j = 0; j < row.size(); ++j) {
            if (j)
                out << ',';
            out << format_double(row[j]);
        }
        out << '\n';
    }
    write_file(path, out.str());
}

ordered_json polyhedron_to_json(const HPolyhedron& p) {
    ordered_json j;
    j["dim"] = p.dim();
    j["inequalities"] = ordered_json::array();
    for (const auto& h : p.halfspaces())
        j["inequalities"].push_back({{"a", h.a}, {"b", h.b}});
    return j;
}

HPolyhedron polyhedron_from_json(const ordered_json& j) {
    HPolyhedron p(j.at("dim").get<int>());
    for (const auto& ineq : j.at("inequalities")) {
        Halfspace h;
        h.a = ineq.at("a").get<std::vector<double>>();
        h.b = ineq.at("b").get<double>();
        p.add(std::move(h));
    }
    return p;
}

ordered_json covering_to_json(const Covering& c) {
    ordered_json j;
    j["r"] = c.r;
    j["epsilon"] = c.epsilon;
    j["points"] = ordered_json::array();
    for (const auto& p : c.points)
        j["points"].push_back(svec(p));
    j["validation"] = {{"samples", c.validation.samples},
                       {"max_observed_gap", c.validation.max_observed_gap}};
    return j;
}

Covering covering_from_json(const ordered_json& j) {
    Covering c;
    c.r = j.at("r").get<int>();
    c.epsilon = j.at("epsilon").get<double>();
    for (const auto& p : j.at("points"))
        c.points.push_back(smat(p.get<std::vector<double>>()));
    if (j.contains("validation")) {
        c.validation.samples = j["validation"].value("samples", 0);
        c.validation.max_observed_gap = j["validation"].value("max_observed_gap", 0.0);
    }
    return c;
}

ordered_json factor_pair_to_json(const FactorPair& f) {
    ordered_json j;
    j["U"] = f.u_rows;
    j["V"] = f.v_cols;
    j["residual"] = f.residual;
    j["membership_violation"] = f.membership_violation;
    return j;
}

FactorPair factor_pair_from_json(const ordered_json& j) {
    FactorPair f;
    f.u_rows = j.at("U").get<std::vector<std::vector<double>>>();
    f.v_cols = j.at("V").get<std::vector<std::vector<double>>>();
    f.residual = j.value("residual", 0.0);
    f.membership_violation = j.value("membership_violation", 0.0);
    return f;
}

ordered_json psd_factorization_to_json(const PsdFactorization& f) {
    ordered_json j;
    j["r"] = f.r;
    j["U_rows"] = ordered_json::array();
    for (const auto& u : f.u_rows)
        j["U_rows"].push_back(u.dense_rowmajor());
    j["V_cols"] = ordered_json::array();
    for (const auto& v : f.v_cols)
        j["V_cols"].push_back(v.dense_rowmajor());
    j["achieved_error"] = f.achieved_error;
    j["epsilon_requested"] = f.epsilon_requested;
    j["epsilon_internal"] = f.epsilon_internal;
    if (!f.u_raw.empty())
        j["U_raw"] = f.u_raw;
    if (!f.v_raw.empty())
        j["V_raw"] = f.v_raw;
    return j;
}

PsdFactorization psd_factorization_from_json(const ordered_json& j) {
    PsdFactorization f;
    f.r = j.at("r").get<int>();
    for (const auto& u : j.at("U_rows"))
        f.u_rows.push_back(SymMat::from_dense(f.r, u.get<std::vector<double>>()));
    for (const auto& v : j.at("V_cols"))
        f.v_cols.push_back(SymMat::from_dense(f.r, v.get<std::vector<double>>()));
    f.achieved_error = j.value("achieved_error", 0.0);
    f.epsilon_requested = j.value("epsilon_requested", 0.0);
    f.epsilon_internal = j.value("epsilon_internal", 0.0);
    if (j.contains("U_raw"))
        f.u_raw = j["U_raw"].get<std::vector<std::vector<double>>>();
    if (j.contains("V_raw"))
        f.v_raw = j["V_raw"].get<std::vector<std::vector<double>>>();
    return f;
}

ordered_json load_json(const std::string& path) {
    try {
        return ordered_json::parse(read_file(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
}

void save_json(const std::string& path, const ordered_json& j) {
    write_file(path, j.dump(2) + "\n");
}

std::string file_hash(const std::string& path) {
    std::string bytes = read_file(path);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

ordered_json report_to_json(const RunReport& r) {
    ordered_json j;
    j["command"] = r.command;
    j["inputs"] = ordered_json::array();
    for (const auto& [path, hash] : r.inputs)
        j["inputs"].push_back({{"path", path}, {"fnv1a64", hash}});
    j["config"] = r.config;
    j["outcome"] = r.outcome;
    if (r.achieved_error)
        j["achieved_error"] = *r.achieved_error;
    j["seed"] = r.seed;
    if (r.output_path)
        j["output"] = *r.output_path;
    return j;
}

} // namespace conefact

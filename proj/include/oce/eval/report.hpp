#pragma once

#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "oce/eval/protocol.hpp"

namespace oce::eval {

inline void to_json(nlohmann::json& j, const Prediction& p)
{
    j = {{"sample_id", p.sample_id}, {"fold", p.fold}, {"true", p.truth}, {"pred", p.pred}};
}

inline void from_json(const nlohmann::json& j, Prediction& p)
{
    j.at("sample_id").get_to(p.sample_id);
    j.at("fold").get_to(p.fold);
    j.at("true").get_to(p.truth);
    j.at("pred").get_to(p.pred);
}

inline void to_json(nlohmann::json& j, const FoldSummary& f)
{
    j = {{"held_out_concentration", f.held_out_concentration}, {"selection", f.selection}, {"imputed", f.imputed}};
}

inline void from_json(const nlohmann::json& j, FoldSummary& f)
{
    j.at("held_out_concentration").get_to(f.held_out_concentration);
    f.selection = j.at("selection");
    j.at("imputed").get_to(f.imputed);
}

inline void to_json(nlohmann::json& j, const ModelResult& r)
{
    j = {{"name", r.name}, {"status", r.ok ? "ok" : "failed"}};
    if (!r.ok) {
        j["error"] = r.error;
        return;
    }
    j["mae"] = r.mae;
    j["mae_std"] = r.mae_std;
    j["rmae"] = r.rmae;
    j["rmae_std"] = r.rmae_std;
    j["acc"] = r.acc ? nlohmann::json(*r.acc) : nlohmann::json(nullptr);
    j["imputed"] = r.imputed;
    j["folds"] = r.folds;
    j["predictions"] = r.predictions;
}

inline void from_json(const nlohmann::json& j, ModelResult& r)
{
    r = ModelResult{};
    j.at("name").get_to(r.name);
    r.ok = j.at("status").get<std::string>() == "ok";
    if (!r.ok) {
        r.error = j.value("error", std::string{});
        return;
    }
    j.at("mae").get_to(r.mae);
    j.at("mae_std").get_to(r.mae_std);
    j.at("rmae").get_to(r.rmae);
    j.at("rmae_std").get_to(r.rmae_std);
    if (!j.at("acc").is_null())
        r.acc = j.at("acc").get<double>();
    j.at("imputed").get_to(r.imputed);
    j.at("folds").get_to(r.folds);
    j.at("predictions").get_to(r.predictions);
}

inline void to_json(nlohmann::json& j, const VelocityRow& v)
{
    j = {{"concentration_pct", v.concentration_pct},
         {"mean_mps", v.mean_mps},
         {"std_mps", v.std_mps},
         {"n_valid", v.n_valid},
         {"n_total", v.n_total}};
}

inline void from_json(const nlohmann::json& j, VelocityRow& v)
{
    j.at("concentration_pct").get_to(v.concentration_pct);
    j.at("mean_mps").get_to(v.mean_mps);
    j.at("std_mps").get_to(v.std_mps);
    j.at("n_valid").get_to(v.n_valid);
    j.at("n_total").get_to(v.n_total);
}

inline void to_json(nlohmann::json& j, const SampleRecord& s)
{
    j = {{"sample_id", s.sample_id},
         {"concentration_pct", s.concentration_pct},
         {"v_mps", s.v_mps ? nlohmann::json(*s.v_mps) : nlohmann::json(nullptr)},
         {"failure", s.failure}};
}

inline void from_json(const nlohmann::json& j, SampleRecord& s)
{
    j.at("sample_id").get_to(s.sample_id);
    j.at("concentration_pct").get_to(s.concentration_pct);
    s.v_mps.reset();
    if (!j.at("v_mps").is_null())
        s.v_mps = j.at("v_mps").get<double>();
    j.at("failure").get_to(s.failure);
}

inline void to_json(nlohmann::json& j, const MetricsReport& r)
{
    j = {{"preset", r.preset},
         {"seed", r.seed},
         {"sigma", r.sigma},
         {"concentrations", r.concentrations},
         {"velocity", r.velocity},
         {"models", r.models},
         {"samples", r.samples}};
}

inline void from_json(const nlohmann::json& j, MetricsReport& r)
{
    j.at("preset").get_to(r.preset);
    j.at("seed").get_to(r.seed);
    j.at("sigma").get_to(r.sigma);
    j.at("concentrations").get_to(r.concentrations);
    j.at("velocity").get_to(r.velocity);
    j.at("models").get_to(r.models);
    j.at("samples").get_to(r.samples);
}

/// Serialized report; the same report always yields the same bytes.
inline std::string dump_report(const MetricsReport& r) { return nlohmann::json(r).dump(1) + "\n"; }

inline MetricsReport parse_report(const std::string& text)
{
    try {
        return nlohmann::json::parse(text).get<MetricsReport>();
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::ConfigError, std::string("malformed report: ") + e.what());
    }
}

namespace detail {

inline std::string fmt(const char* f, double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

inline std::string exact(double v) { return fmt("%.17g", v); }

} // namespace detail

/// Fixed-width table with one row per model.
inline std::string render_table(const MetricsReport& r)
{
    std::ostringstream os;
    char line[160];
    std::snprintf(line, sizeof line, "%-8s  %-15s  %-13s  %-6s\n", "Model", "MAE (p.p.)", "rMAE", "ACC");
    os << line;
    for (const auto& m : r.models) {
        if (!m.ok) {
            std::snprintf(line, sizeof line, "%-8s  failed: %s\n", m.name.c_str(), m.error.c_str());
            os << line;
            continue;
        }
        const std::string mae = detail::fmt("%.2f", m.mae) + " +- " + detail::fmt("%.2f", m.mae_std);
        const std::string rm = detail::fmt("%.2f", m.rmae) + " +- " + detail::fmt("%.2f", m.rmae_std);
        const std::string acc = m.acc ? detail::fmt("%.2f", *m.acc) : "n/a";
        std::snprintf(line, sizeof line, "%-8s  %-15s  %-13s  %-6s\n", m.name.c_str(), mae.c_str(), rm.c_str(),
                      acc.c_str());
        os << line;
    }
    return os.str();
}

/// One row per model: name,status,mae,mae_std,rmae,rmae_std,acc,imputed.
inline std::string render_csv(const MetricsReport& r)
{
    std::ostringstream os;
    os << "model,status,mae,mae_std,rmae,rmae_std,acc,imputed\n";
    for (const auto& m : r.models) {
        os << m.name << ',' << (m.ok ? "ok" : "failed");
        if (m.ok)
            os << ',' << detail::exact(m.mae) << ',' << detail::exact(m.mae_std) << ',' << detail::exact(m.rmae) << ','
               << detail::exact(m.rmae_std) << ',' << (m.acc ? detail::exact(*m.acc) : "") << ',' << m.imputed;
        else
            os << ",,,,,,";
        os << '\n';
    }
    return os.str();
}

/// Metric rows read back from render_csv output (predictions and fold
/// details are not part of the CSV).
inline std::vector<ModelResult> parse_csv(const std::string& text)
{
    std::istringstream is(text);
    std::string line;
    std::getline(is, line);
    if (line != "model,status,mae,mae_std,rmae,rmae_std,acc,imputed")
        throw Error(Errc::ConfigError, "unexpected report CSV header");
    std::vector<ModelResult> rows;
    while (std::getline(is, line)) {
        if (line.empty())
            continue;
        std::vector<std::string> cells;
        std::size_t start = 0;
        for (;;) {
            const auto comma = line.find(',', start);
            cells.push_back(line.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
            if (comma == std::string::npos)
                break;
            start = comma + 1;
        }
        if (cells.size() != 8)
            throw Error(Errc::ConfigError, "report CSV row has " + std::to_string(cells.size()) + " cells");
        ModelResult m;
        m.name = cells[0];
        m.ok = cells[1] == "ok";
        if (m.ok) {
            m.mae = std::stod(cells[2]);
            m.mae_std = std::stod(cells[3]);
            m.rmae = std::stod(cells[4]);
            m.rmae_std = std::stod(cells[5]);
            if (!cells[6].empty())
                m.acc = std::stod(cells[6]);
            m.imputed = std::stoul(cells[7]);
        }
        rows.push_back(std::move(m));
    }
    return rows;
}

/// Velocity per concentration: concentration_pct,velocity_mean_mps,velocity_std_mps,n_valid.
inline std::string render_fig3_csv(const MetricsReport& r)
{
    std::ostringstream os;
    os << "concentration_pct,velocity_mean_mps,velocity_std_mps,n_valid\n";
    for (const auto& v : r.velocity)
        os << detail::exact(v.concentration_pct) << ',' << detail::exact(v.mean_mps) << ','
           << detail::exact(v.std_mps) << ',' << v.n_valid << '\n';
    return os.str();
}

} // namespace oce::eval

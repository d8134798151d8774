#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "oce/core/error.hpp"
#include "oce/core/types.hpp"

namespace oce {

struct Manifest {
    std::filesystem::path root; ///< directory that tensor paths are relative to
    std::vector<Sample> samples;

    std::filesystem::path resolve(const std::string& relative) const { return root / relative; }
};

inline void write_manifest(const std::filesystem::path& path, const std::vector<Sample>& samples)
{
    nlohmann::json j = nlohmann::json::array();
    for (const auto& s : samples)
        j.push_back(s);
    std::ofstream os(path, std::ios::trunc);
    if (!os)
        throw Error(Errc::IoError, "cannot write manifest " + path.string());
    os << j.dump(1) << '\n';
}

inline Manifest read_manifest(const std::filesystem::path& path)
{
    std::ifstream is(path);
    if (!is)
        throw Error(Errc::IoError, "cannot open manifest " + path.string());
    nlohmann::json j;
    try {
        is >> j;
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::ConfigError, "manifest " + path.string() + " is not valid JSON: " + e.what());
    }
    if (!j.is_array())
        throw Error(Errc::ConfigError, "manifest must be a JSON array of samples");
    Manifest m;
    m.root = path.parent_path();
    for (const auto& item : j) {
        Sample s;
        try {
            s = item.get<Sample>();
        } catch (const nlohmann::json::exception& e) {
            throw Error(Errc::ConfigError, std::string("bad sample record: ") + e.what());
        }
        s.validate();
        m.samples.push_back(std::move(s));
    }
    return m;
}

} // namespace oce

#pragma once

#include <algorithm>
#include <initializer_list>
#include <string>
#include <string_view>

#include "json.hpp"
#include "oce/core/error.hpp"

namespace oce::json_util {

/// Throws ConfigError if `j` has a key outside `allowed`.
inline void reject_unknown(const nlohmann::json& j, std::initializer_list<std::string_view> allowed,
                           std::string_view context)
{
    if (!j.is_object())
        throw Error(Errc::ConfigError, std::string(context) + " must be a JSON object");
    for (const auto& [key, value] : j.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            throw Error(Errc::ConfigError, "unknown key '" + key + "' in " + std::string(context));
    }
}

template <typename T>
void read_opt(const nlohmann::json& j, const char* key, T& target)
{
    if (auto it = j.find(key); it != j.end()) {
        try {
            target = it->get<T>();
        } catch (const nlohmann::json::exception& e) {
            throw Error(Errc::ConfigError, std::string("bad value for '") + key + "': " + e.what());
        }
    }
}

} // namespace oce::json_util

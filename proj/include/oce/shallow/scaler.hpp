#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "json.hpp"

namespace oce::shallow {

/// Standardizes a scalar feature with training statistics (population std).
struct FeatureScaler {
    double mean = 0.0;
    double std = 1.0;

    static FeatureScaler fit(std::span<const double> x)
    {
        FeatureScaler s;
        if (x.empty())
            return s;
        double m = 0;
        for (double v : x)
            m += v;
        m /= static_cast<double>(x.size());
        double var = 0;
        for (double v : x)
            var += (v - m) * (v - m);
        var /= static_cast<double>(x.size());
        const double sd = std::sqrt(var);
        if (sd > 0.0 && std::isfinite(sd)) {
            s.mean = m;
            s.std = sd;
        }
        return s;
    }

    double transform(double x) const { return (x - mean) / std; }

    std::vector<double> transform(std::span<const double> x) const
    {
        std::vector<double> out(x.size());
        for (std::size_t i = 0; i < x.size(); ++i)
            out[i] = transform(x[i]);
        return out;
    }
};

inline void to_json(nlohmann::json& j, const FeatureScaler& s) { j = {{"mean", s.mean}, {"std", s.std}}; }

inline void from_json(const nlohmann::json& j, FeatureScaler& s)
{
    j.at("mean").get_to(s.mean);
    j.at("std").get_to(s.std);
}

} // namespace oce::shallow

#pragma once

#include <cmath>
#include <span>

#include "json.hpp"
#include "oce/core/error.hpp"

namespace oce::shallow {

/// concentration = intercept + slope * velocity
struct LinearModel {
    double slope = 0.0;
    double intercept = 0.0;

    double predict(double x) const { return intercept + slope * x; }
};

inline LinearModel fit_linreg(std::span<const double> x, std::span<const double> y)
{
    if (x.size() != y.size())
        throw Error(Errc::ShapeMismatch, "x and y lengths differ");
    if (x.size() < 2)
        throw Error(Errc::DegenerateDesign, "linear regression needs at least two points");
    const double n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (!(sxx > 0.0))
        throw Error(Errc::DegenerateDesign, "predictor has zero variance");
    LinearModel m;
    m.slope = sxy / sxx;
    m.intercept = my - m.slope * mx;
    if (!std::isfinite(m.slope) || !std::isfinite(m.intercept))
        throw Error(Errc::DegenerateDesign, "non-finite least-squares solution");
    return m;
}

inline void to_json(nlohmann::json& j, const LinearModel& m)
{
    j = {{"kind", "linear"}, {"slope", m.slope}, {"intercept", m.intercept}};
}

inline void from_json(const nlohmann::json& j, LinearModel& m)
{
    j.at("slope").get_to(m.slope);
    j.at("intercept").get_to(m.intercept);
}

} // namespace oce::shallow

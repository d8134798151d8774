#pragma once

// Central-difference gradient verification in double precision.

#include <algorithm>
#include <cmath>
#include <string>

#include "oce/core/random.hpp"
#include "oce/nn/network.hpp"

namespace oce::nn {

struct GradCheckResult {
    double max_rel_error = 0.0;
    std::string worst; ///< parameter name (or "input") of the worst entry
    std::size_t checked = 0;
};

/// |a - n| / max(|a|, |n|, floor). The floor keeps entries whose true
/// gradient is ~0 from turning round-off into large relative errors.
inline double relative_error(double analytic, double numeric, double floor = 1e-4)
{
    return std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), floor});
}

namespace detail {

inline void track(GradCheckResult& r, double err, const std::string& name)
{
    ++r.checked;
    if (err > r.max_rel_error) {
        r.max_rel_error = err;
        r.worst = name;
    }
}

} // namespace detail

/// Checks d(output)/d(parameter) for every parameter of a scalar network.
inline GradCheckResult grad_check(Network<double>& net, const Feature<double>& x, double h = 1e-5)
{
    GradCheckResult r;
    net.zero_grad();
    net.forward(x);
    net.backward(1.0);
    for (auto* p : net.params())
        for (std::size_t i = 0; i < p->size(); ++i) {
            const double orig = p->value[i];
            p->value[i] = orig + h;
            const double fp = net.forward(x);
            p->value[i] = orig - h;
            const double fm = net.forward(x);
            p->value[i] = orig;
            detail::track(r, relative_error(p->grad[i], (fp - fm) / (2.0 * h)), p->name);
        }
    return r;
}

/// Checks a single layer through the scalar loss sum_i r_i * out_i with a
/// fixed random projection r: parameter gradients and the input gradient.
inline GradCheckResult grad_check_layer(Layer<double>& layer, const Feature<double>& x, std::uint64_t seed = 1,
                                        double h = 1e-5)
{
    Rng rng(seed);
    const Shape out_shape = layer.output_shape(x.shape);
    Feature<double> proj(out_shape);
    for (auto& v : proj.data)
        v = rng.normal();
    auto loss = [&](const Feature<double>& in) {
        const auto y = layer.forward(in);
        double s = 0.0;
        for (std::size_t i = 0; i < y.data.size(); ++i)
            s += proj.data[i] * y.data[i];
        return s;
    };

    std::vector<Param<double>*> params;
    layer.collect_params(params);
    for (auto* p : params)
        std::fill(p->grad.begin(), p->grad.end(), 0.0);
    layer.forward(x);
    const Feature<double> gx = layer.backward(proj);

    GradCheckResult r;
    for (auto* p : params)
        for (std::size_t i = 0; i < p->size(); ++i) {
            const double orig = p->value[i];
            p->value[i] = orig + h;
            const double fp = loss(x);
            p->value[i] = orig - h;
            const double fm = loss(x);
            p->value[i] = orig;
            detail::track(r, relative_error(p->grad[i], (fp - fm) / (2.0 * h)), p->name);
        }
    Feature<double> xp = x;
    for (std::size_t i = 0; i < x.data.size(); ++i) {
        xp.data[i] = x.data[i] + h;
        const double fp = loss(xp);
        xp.data[i] = x.data[i] - h;
        const double fm = loss(xp);
        xp.data[i] = x.data[i];
        detail::track(r, relative_error(gx.data[i], (fp - fm) / (2.0 * h)), "input");
    }
    return r;
}

} // namespace oce::nn

#pragma once

#include <cmath>
#include <vector>

#include "oce/nn/layer.hpp"

namespace oce::nn {

struct AdamConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

template <typename T>
struct AdamState {
    std::vector<std::vector<T>> m;
    std::vector<std::vector<T>> v;
    std::size_t step = 0;
};

/// One bias-corrected Adam update of every parameter from its .grad.
/// A fresh (empty) state is sized on first use.
template <typename T>
void adam_step(const std::vector<Param<T>*>& params, AdamState<T>& state, const AdamConfig& cfg)
{
    if (state.m.empty() && state.step == 0) {
        for (auto* p : params) {
            state.m.emplace_back(p->size(), T{});
            state.v.emplace_back(p->size(), T{});
        }
    }
    if (state.m.size() != params.size() || state.v.size() != params.size())
        throw Error(Errc::ShapeMismatch, "optimizer state does not match parameter list");
    for (std::size_t i = 0; i < params.size(); ++i)
        if (state.m[i].size() != params[i]->size() || state.v[i].size() != params[i]->size() ||
            params[i]->grad.size() != params[i]->size())
            throw Error(Errc::ShapeMismatch, "optimizer state does not match parameter " + params[i]->name);

    ++state.step;
    const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
    const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
    const T b1 = static_cast<T>(cfg.beta1), b2 = static_cast<T>(cfg.beta2);
    for (std::size_t i = 0; i < params.size(); ++i) {
        auto& p = *params[i];
        auto& m = state.m[i];
        auto& v = state.v[i];
        for (std::size_t k = 0; k < p.size(); ++k) {
            const T g = p.grad[k];
            m[k] = b1 * m[k] + (T(1) - b1) * g;
            v[k] = b2 * v[k] + (T(1) - b2) * g * g;
            const double mhat = static_cast<double>(m[k]) / c1;
            const double vhat = static_cast<double>(v[k]) / c2;
            p.value[k] -= static_cast<T>(cfg.lr * mhat / (std::sqrt(vhat) + cfg.epsilon));
        }
    }
}

} // namespace oce::nn

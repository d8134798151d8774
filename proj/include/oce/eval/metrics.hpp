#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "oce/core/error.hpp"

namespace oce::eval {

inline double mean(std::span<const double> v)
{
    if (v.empty())
        throw Error(Errc::ShapeMismatch, "mean of an empty series");
    double s = 0.0;
    for (double x : v)
        s += x;
    return s / static_cast<double>(v.size());
}

/// Standard deviation with divisor n.
inline double population_std(std::span<const double> v)
{
    const double m = mean(v);
    double s = 0.0;
    for (double x : v)
        s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size()));
}

inline void check_pair(std::span<const double> pred, std::span<const double> truth)
{
    if (pred.size() != truth.size() || pred.empty())
        throw Error(Errc::ShapeMismatch, "prediction and target series must have equal, non-zero length");
}

inline std::vector<double> absolute_errors(std::span<const double> pred, std::span<const double> truth)
{
    check_pair(pred, truth);
    std::vector<double> e(pred.size());
    for (std::size_t i = 0; i < pred.size(); ++i)
        e[i] = std::abs(pred[i] - truth[i]);
    return e;
}

/// Mean absolute error in the targets' unit (percentage points).
inline double mae(std::span<const double> pred, std::span<const double> truth)
{
    const auto e = absolute_errors(pred, truth);
    return mean(e);
}

/// MAE relative to the spread `sigma` of the target values.
inline double rmae(double mae_value, double sigma)
{
    if (!(sigma > 0.0))
        throw Error(Errc::ConfigInvalid, "target spread must be positive");
    return mae_value / sigma;
}

/// Pearson correlation coefficient.
inline double acc(std::span<const double> pred, std::span<const double> truth)
{
    check_pair(pred, truth);
    const double mp = mean(pred), mt = mean(truth);
    double spp = 0.0, stt = 0.0, spt = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double a = pred[i] - mp, b = truth[i] - mt;
        spp += a * a;
        stt += b * b;
        spt += a * b;
    }
    if (spp == 0.0 || stt == 0.0)
        throw Error(Errc::UndefinedCorrelation, "correlation undefined for a constant series");
    return spt / std::sqrt(spp * stt);
}

/// Spearman rank correlation (average ranks for ties).
inline double spearman(std::span<const double> a, std::span<const double> b)
{
    check_pair(a, b);
    auto ranks = [](std::span<const double> v) {
        std::vector<std::size_t> idx(v.size());
        for (std::size_t i = 0; i < idx.size(); ++i)
            idx[i] = i;
        std::sort(idx.begin(), idx.end(), [&](std::size_t x, std::size_t y) { return v[x] < v[y]; });
        std::vector<double> r(v.size());
        for (std::size_t i = 0; i < idx.size();) {
            std::size_t j = i;
            while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]])
                ++j;
            for (std::size_t k = i; k <= j; ++k)
                r[idx[k]] = 0.5 * static_cast<double>(i + j) + 1.0;
            i = j + 1;
        }
        return r;
    };
    const auto ra = ranks(a), rb = ranks(b);
    return acc(ra, rb);
}

} // namespace oce::eval

#pragma once

// epsilon-SVR solved in the dual by sequential minimal optimization.
//
// The 2l dual variables are stacked as beta = [alpha; alpha*] with signs
// s = [+1; -1]; the problem is
//     min 0.5 beta' Q beta + p' beta,  s' beta = 0,  0 <= beta <= C
// with Q_ab = s_a s_b K(x_a, x_b), p = [eps - y; eps + y]. Working pairs
// are chosen with second-order information as in Fan, Chen and Lin (2005).

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "oce/core/error.hpp"

namespace oce::shallow {

struct Kernel {
    enum class Kind { Linear, Rbf };
    Kind kind = Kind::Linear;
    double gamma = 1.0;

    static Kernel linear() { return {Kind::Linear, 1.0}; }
    static Kernel rbf(double gamma) { return {Kind::Rbf, gamma}; }

    double operator()(double u, double v) const;
};

inline double rbf_kernel(double u, double v, double gamma)
{
    if (!(gamma > 0.0))
        throw Error(Errc::ConfigInvalid, "rbf gamma must be positive");
    const double d = u - v;
    return std::exp(-gamma * d * d);
}

inline double Kernel::operator()(double u, double v) const
{
    return kind == Kind::Linear ? u * v : rbf_kernel(u, v, gamma);
}

struct SvrParams {
    Kernel kernel{};
    double C = 1.0;
    double epsilon = 0.1;
    double tol = 1e-3;
    std::size_t max_iterations = 100000;
};

struct SvrModel {
    Kernel kernel{};
    double C = 1.0;
    double epsilon = 0.1;
    std::vector<double> coef; ///< alpha_i - alpha*_i for support vectors
    std::vector<double> support;
    double bias = 0.0;
    std::size_t iterations = 0;
    double final_violation = 0.0;

    double predict(double x) const
    {
        double f = bias;
        for (std::size_t i = 0; i < coef.size(); ++i)
            f += coef[i] * kernel(support[i], x);
        return f;
    }
};

inline SvrModel fit_svr(std::span<const double> x, std::span<const double> y, const SvrParams& params)
{
    if (x.size() != y.size())
        throw Error(Errc::ShapeMismatch, "x and y lengths differ");
    if (x.size() < 2)
        throw Error(Errc::DegenerateDesign, "SVR needs at least two points");
    if (!(params.C > 0.0) || params.epsilon < 0.0 || !(params.tol > 0.0))
        throw Error(Errc::ConfigInvalid, "SVR requires C > 0, epsilon >= 0, tol > 0");

    const std::size_t l = x.size();
    const std::size_t n = 2 * l;
    const double C = params.C;
    constexpr double tau = 1e-12;

    std::vector<double> K(l * l);
    for (std::size_t i = 0; i < l; ++i)
        for (std::size_t j = 0; j <= i; ++j)
            K[i * l + j] = K[j * l + i] = params.kernel(x[i], x[j]);

    auto sign = [l](std::size_t a) { return a < l ? 1.0 : -1.0; };
    auto base = [l](std::size_t a) { return a < l ? a : a - l; };
    auto q = [&](std::size_t a, std::size_t b) { return sign(a) * sign(b) * K[base(a) * l + base(b)]; };

    std::vector<double> beta(n, 0.0), grad(n);
    for (std::size_t i = 0; i < l; ++i) {
        grad[i] = params.epsilon - y[i];
        grad[i + l] = params.epsilon + y[i];
    }
    auto at_upper = [&](std::size_t a) { return beta[a] >= C; };
    auto at_lower = [&](std::size_t a) { return beta[a] <= 0.0; };

    SvrModel model;
    model.kernel = params.kernel;
    model.C = C;
    model.epsilon = params.epsilon;

    std::size_t iter = 0;
    for (;; ++iter) {
        // i: maximal violator from the "up" set
        double gmax = -std::numeric_limits<double>::infinity();
        std::ptrdiff_t gi = -1;
        for (std::size_t t = 0; t < n; ++t) {
            if (sign(t) > 0) {
                if (!at_upper(t) && -grad[t] >= gmax) {
                    gmax = -grad[t];
                    gi = static_cast<std::ptrdiff_t>(t);
                }
            } else if (!at_lower(t) && grad[t] >= gmax) {
                gmax = grad[t];
                gi = static_cast<std::ptrdiff_t>(t);
            }
        }
        double gmax2 = -std::numeric_limits<double>::infinity();
        std::ptrdiff_t gj = -1;
        double best = std::numeric_limits<double>::infinity();
        if (gi >= 0) {
            const auto i = static_cast<std::size_t>(gi);
            const double qii = K[base(i) * l + base(i)];
            for (std::size_t t = 0; t < n; ++t) {
                const double qtt = K[base(t) * l + base(t)];
                if (sign(t) > 0) {
                    if (at_lower(t))
                        continue;
                    const double diff = gmax + grad[t];
                    gmax2 = std::max(gmax2, grad[t]);
                    if (diff > 0) {
                        const double quad = qii + qtt - 2.0 * sign(i) * q(i, t);
                        const double obj = -(diff * diff) / std::max(quad, tau);
                        if (obj <= best) {
                            best = obj;
                            gj = static_cast<std::ptrdiff_t>(t);
                        }
                    }
                } else {
                    if (at_upper(t))
                        continue;
                    const double diff = gmax - grad[t];
                    gmax2 = std::max(gmax2, -grad[t]);
                    if (diff > 0) {
                        const double quad = qii + qtt + 2.0 * sign(i) * q(i, t);
                        const double obj = -(diff * diff) / std::max(quad, tau);
                        if (obj <= best) {
                            best = obj;
                            gj = static_cast<std::ptrdiff_t>(t);
                        }
                    }
                }
            }
        }
        model.final_violation = gmax + gmax2;
        if (gi < 0 || gj < 0 || gmax + gmax2 < params.tol)
            break;
        if (iter >= params.max_iterations)
            throw Error(Errc::NoConvergence, "SMO did not reach tolerance within " +
                                                 std::to_string(params.max_iterations) + " iterations");

        const auto i = static_cast<std::size_t>(gi);
        const auto j = static_cast<std::size_t>(gj);
        const double old_i = beta[i], old_j = beta[j];
        const double qii = K[base(i) * l + base(i)], qjj = K[base(j) * l + base(j)];
        const double qij = q(i, j);
        if (sign(i) != sign(j)) {
            double quad = qii + qjj + 2.0 * qij;
            if (quad <= 0)
                quad = tau;
            const double delta = (-grad[i] - grad[j]) / quad;
            const double diff = beta[i] - beta[j];
            beta[i] += delta;
            beta[j] += delta;
            if (diff > 0) {
                if (beta[j] < 0) {
                    beta[j] = 0;
                    beta[i] = diff;
                }
            } else if (beta[i] < 0) {
                beta[i] = 0;
                beta[j] = -diff;
            }
            if (diff > 0) {
                if (beta[i] > C) {
                    beta[i] = C;
                    beta[j] = C - diff;
                }
            } else if (beta[j] > C) {
                beta[j] = C;
                beta[i] = C + diff;
            }
        } else {
            double quad = qii + qjj - 2.0 * qij;
            if (quad <= 0)
                quad = tau;
            const double delta = (grad[i] - grad[j]) / quad;
            const double sum = beta[i] + beta[j];
            beta[i] -= delta;
            beta[j] += delta;
            if (sum > C) {
                if (beta[i] > C) {
                    beta[i] = C;
                    beta[j] = sum - C;
                }
            } else if (beta[j] < 0) {
                beta[j] = 0;
                beta[i] = sum;
            }
            if (sum > C) {
                if (beta[j] > C) {
                    beta[j] = C;
                    beta[i] = sum - C;
                }
            } else if (beta[i] < 0) {
                beta[i] = 0;
                beta[j] = sum;
            }
        }
        const double di = beta[i] - old_i, dj = beta[j] - old_j;
        for (std::size_t t = 0; t < n; ++t)
            grad[t] += q(t, i) * di + q(t, j) * dj;
    }
    model.iterations = iter;

    // offset from free variables, else midpoint of the feasible interval
    double ub = std::numeric_limits<double>::infinity();
    double lb = -std::numeric_limits<double>::infinity();
    double sum_free = 0;
    std::size_t n_free = 0;
    for (std::size_t t = 0; t < n; ++t) {
        const double yg = sign(t) * grad[t];
        if (at_upper(t)) {
            if (sign(t) < 0)
                ub = std::min(ub, yg);
            else
                lb = std::max(lb, yg);
        } else if (at_lower(t)) {
            if (sign(t) > 0)
                ub = std::min(ub, yg);
            else
                lb = std::max(lb, yg);
        } else {
            ++n_free;
            sum_free += yg;
        }
    }
    const double rho = n_free > 0 ? sum_free / static_cast<double>(n_free) : 0.5 * (ub + lb);
    model.bias = -rho;

    for (std::size_t i = 0; i < l; ++i) {
        const double c = beta[i] - beta[i + l];
        if (c != 0.0) {
            model.coef.push_back(c);
            model.support.push_back(x[i]);
        }
    }
    return model;
}

inline void to_json(nlohmann::json& j, const SvrModel& m)
{
    j = {{"kind", "svr"},
         {"kernel", m.kernel.kind == Kernel::Kind::Linear ? "linear" : "rbf"},
         {"gamma", m.kernel.gamma},
         {"C", m.C},
         {"epsilon", m.epsilon},
         {"coef", m.coef},
         {"support", m.support},
         {"bias", m.bias}};
}

inline void from_json(const nlohmann::json& j, SvrModel& m)
{
    const auto kind = j.at("kernel").get<std::string>();
    m.kernel = kind == "rbf" ? Kernel::rbf(j.at("gamma").get<double>()) : Kernel::linear();
    j.at("C").get_to(m.C);
    j.at("epsilon").get_to(m.epsilon);
    j.at("coef").get_to(m.coef);
    j.at("support").get_to(m.support);
    j.at("bias").get_to(m.bias);
}

} // namespace oce::shallow

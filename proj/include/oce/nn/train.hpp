#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <ostream>
#include <vector>

#include "oce/core/random.hpp"
#include "oce/nn/adam.hpp"
#include "oce/nn/network.hpp"

namespace oce::nn {

struct TrainConfig {
    AdamConfig adam{};
    std::size_t batch_size = 10;
    std::size_t max_epochs = 300;
    std::size_t patience = 30;
    std::uint64_t seed = 0;
    /// Evaluate the training MSE of the initial parameters (one extra pass).
    bool record_initial_mse = false;
};

template <typename T>
struct Dataset {
    std::vector<Feature<T>> inputs;
    std::vector<T> targets;

    std::size_t size() const { return inputs.size(); }
};

struct EpochRecord {
    std::size_t epoch = 0;
    double train_mse = 0.0;
    double val_mae = 0.0;
};

struct TrainResult {
    std::vector<EpochRecord> history;
    std::size_t best_epoch = 0; ///< 0 when no epoch ran
    double best_val_mae = 0.0;
    double initial_train_mse = 0.0;
    bool stopped_early = false;
};

template <typename T>
std::vector<double> predict_all(Network<T>& net, const std::vector<Feature<T>>& inputs)
{
    std::vector<double> out;
    out.reserve(inputs.size());
    for (const auto& x : inputs)
        out.push_back(static_cast<double>(net.forward(x)));
    return out;
}

template <typename T>
double mean_abs_error(Network<T>& net, const Dataset<T>& d)
{
    double s = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i)
        s += std::abs(static_cast<double>(net.forward(d.inputs[i])) - static_cast<double>(d.targets[i]));
    return s / static_cast<double>(d.size());
}

template <typename T>
double mean_squared_error(Network<T>& net, const Dataset<T>& d)
{
    double s = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        const double e = static_cast<double>(net.forward(d.inputs[i])) - static_cast<double>(d.targets[i]);
        s += e * e;
    }
    return s / static_cast<double>(d.size());
}

/// Minibatch MSE training with Adam. The network ends up holding the
/// parameters of the epoch with the lowest validation MAE (or its initial
/// parameters when no epoch runs).
template <typename T>
TrainResult train_model(Network<T>& net, const Dataset<T>& train, const Dataset<T>& val, const TrainConfig& cfg)
{
    if (train.size() == 0 || val.size() == 0)
        throw Error(Errc::ShapeMismatch, "training and validation sets must be non-empty");
    if (train.inputs.size() != train.targets.size() || val.inputs.size() != val.targets.size())
        throw Error(Errc::ShapeMismatch, "inputs and targets differ in length");
    if (cfg.batch_size == 0)
        throw Error(Errc::ConfigInvalid, "batch size must be positive");

    TrainResult result;
    if (cfg.record_initial_mse)
        result.initial_train_mse = mean_squared_error(net, train);
    if (cfg.max_epochs == 0)
        return result;

    Rng rng(cfg.seed);
    AdamState<T> state;
    std::vector<std::size_t> order(train.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::vector<T> best = net.flat_parameters();
    double best_mae = std::numeric_limits<double>::infinity();
    std::size_t since_best = 0;

    for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
        rng.shuffle(order.begin(), order.end());
        double sq_sum = 0.0;
        for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
            const std::size_t end = std::min(order.size(), start + cfg.batch_size);
            const auto batch = static_cast<T>(end - start);
            net.zero_grad();
            double batch_sq = 0.0;
            for (std::size_t k = start; k < end; ++k) {
                const std::size_t i = order[k];
                const T err = net.forward(train.inputs[i]) - train.targets[i];
                batch_sq += static_cast<double>(err) * static_cast<double>(err);
                net.backward(T(2) * err / batch);
            }
            if (!std::isfinite(batch_sq))
                throw Error(Errc::NonFiniteLoss, "training loss diverged in epoch " + std::to_string(epoch));
            sq_sum += batch_sq;
            adam_step(net.params(), state, cfg.adam);
        }
        EpochRecord rec;
        rec.epoch = epoch;
        rec.train_mse = sq_sum / static_cast<double>(train.size());
        rec.val_mae = mean_abs_error(net, val);
        if (!std::isfinite(rec.val_mae))
            throw Error(Errc::NonFiniteLoss, "validation error is not finite in epoch " + std::to_string(epoch));
        result.history.push_back(rec);
        if (rec.val_mae < best_mae) {
            best_mae = rec.val_mae;
            best = net.flat_parameters();
            result.best_epoch = epoch;
            since_best = 0;
        } else if (++since_best >= cfg.patience) {
            result.stopped_early = epoch < cfg.max_epochs;
            break;
        }
    }
    net.set_flat_parameters(best);
    result.best_val_mae = best_mae;
    return result;
}

inline void write_history_csv(std::ostream& os, const std::vector<EpochRecord>& history)
{
    os << "epoch,train_mse,val_mae\n";
    os.precision(17);
    for (const auto& r : history)
        os << r.epoch << ',' << r.train_mse << ',' << r.val_mae << '\n';
}

} // namespace oce::nn

#pragma once

// Leave-one-concentration-out folds: the held-out concentration's samples
// are split evenly into test and validation subsets, stratified by needle
// distance; all other samples form the optimization subset.

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "oce/core/error.hpp"
#include "oce/core/random.hpp"
#include "oce/core/seed.hpp"
#include "oce/core/types.hpp"

namespace oce::eval {

struct Fold {
    double held_out_concentration = 0.0;
    std::vector<std::string> test_ids;
    std::vector<std::string> validation_ids;
    std::vector<std::string> optimization_ids;
};

struct FoldPlanConfig {
    std::size_t samples_per_concentration = 64;
};

/// Folds ordered by descending concentration.
inline std::vector<Fold> make_sixfold_plan(const std::vector<Sample>& samples, std::uint64_t seed,
                                           const FoldPlanConfig& cfg = {})
{
    std::map<double, std::vector<const Sample*>, std::greater<>> by_conc;
    for (const auto& s : samples)
        by_conc[s.concentration_pct].push_back(&s);
    if (by_conc.size() < 2)
        throw Error(Errc::BadCounts, "need at least two concentrations");

    std::vector<Fold> folds;
    for (const auto& [conc, members] : by_conc) {
        if (members.size() != cfg.samples_per_concentration)
            throw Error(Errc::BadCounts, "concentration " + std::to_string(conc) + " has " +
                                             std::to_string(members.size()) + " samples, expected " +
                                             std::to_string(cfg.samples_per_concentration));
        std::map<double, std::vector<std::string>> strata;
        for (const auto* s : members)
            strata[s->needle_distance_m].push_back(s->id);

        Fold f;
        f.held_out_concentration = conc;
        Rng rng(derive_sample_seed(seed, "fold:" + std::to_string(conc)));
        for (auto& [dist, ids] : strata) {
            if (ids.size() % 2 != 0)
                throw Error(Errc::BadCounts, "needle-distance stratum of odd size " + std::to_string(ids.size()));
            std::sort(ids.begin(), ids.end());
            rng.shuffle(ids.begin(), ids.end());
            const auto half = static_cast<std::ptrdiff_t>(ids.size() / 2);
            f.test_ids.insert(f.test_ids.end(), ids.begin(), ids.begin() + half);
            f.validation_ids.insert(f.validation_ids.end(), ids.begin() + half, ids.end());
        }
        for (const auto& s : samples)
            if (s.concentration_pct != conc)
                f.optimization_ids.push_back(s.id);
        folds.push_back(std::move(f));
    }
    return folds;
}

inline void to_json(nlohmann::json& j, const Fold& f)
{
    j = {{"held_out_concentration", f.held_out_concentration},
         {"test_ids", f.test_ids},
         {"validation_ids", f.validation_ids},
         {"optimization_ids", f.optimization_ids}};
}

} // namespace oce::eval

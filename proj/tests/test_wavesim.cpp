#include <cmath>
#include <filesystem>
#include <numbers>
#include <map>
#include <set>

#include <catch_amalgamated.hpp>

#include "oce/wavesim.hpp"

using namespace oce;
using Catch::Approx;

namespace {

NoiseSpec quiet()
{
    NoiseSpec n;
    n.phase_noise_sigma_rad = 0.0;
    n.dead_row_fraction = 0.0;
    return n;
}

AcquisitionConfig small_acquisition()
{
    AcquisitionConfig a;
    a.depth_pixels = 24;
    return a;
}

} // namespace

TEST_CASE("velocity follows the power law in concentration")
{
    const VelocityModel m;
    CHECK(concentration_to_velocity(m.c_ref_pct, m) == Approx(m.v_ref_mps));
    CHECK(concentration_to_velocity(2 * m.c_ref_pct, m) == Approx(m.v_ref_mps * std::pow(2.0, m.gamma)));
    double prev = 0.0;
    for (double c : {4.2, 4.8, 5.6, 6.7, 8.3, 11.1}) {
        const double v = concentration_to_velocity(c, m);
        CHECK(v > prev);
        prev = v;
    }
    CHECK_THROWS_AS(concentration_to_velocity(0.0, m), Error);
    CHECK_THROWS_AS(concentration_to_velocity(-1.0, m), Error);
}

TEST_CASE("wrapped phase lies in (-pi, pi] and differs from the input by 2 pi k")
{
    Rng rng(3);
    for (int i = 0; i < 10000; ++i) {
        const double phi = rng.uniform(-100.0, 100.0);
        const float w = wrap_phase(phi);
        CHECK(w > -std::numbers::pi_v<float>);
        CHECK(w <= std::numbers::pi_v<float>);
        const double k = (phi - w) / (2 * std::numbers::pi);
        CHECK(std::abs(k - std::round(k)) < 1e-5);
    }
    CHECK(wrap_phase(std::numbers::pi) <= std::numbers::pi_v<float>);
    CHECK(wrap_phase(-std::numbers::pi) > -std::numbers::pi_v<float>);
}

TEST_CASE("burst waveform is zero outside its support")
{
    CHECK(burst_waveform(-1e-6, 1000, 1, 1) == 0.0);
    CHECK(burst_waveform(1.0001e-3, 1000, 1, 1) == 0.0);
    CHECK(std::abs(burst_waveform(0.25e-3, 1000, 1, 1)) > 0.1);
}

TEST_CASE("simulated measurement has the expected layout")
{
    const auto a = small_acquisition();
    PhantomSpec p;
    p.surface_index = 5;
    const auto m = simulate_measurement(p, a, NoiseSpec{}, 5e-3, 11);
    CHECK(m.phase.axes() == "yzt");
    CHECK(m.phase.extent(0) == a.lateral_pixels);
    CHECK(m.phase.extent(1) == a.depth_pixels);
    CHECK(m.phase.extent(2) > a.frames_kept);
    CHECK(m.intensity.axes() == "yz");
    for (float v : m.phase.values()) {
        REQUIRE(v > -std::numbers::pi_v<float>);
        REQUIRE(v <= std::numbers::pi_v<float>);
    }
    for (float v : m.intensity.values())
        REQUIRE(v >= 0.0f);
    CHECK(m.true_velocity_mps == Approx(concentration_to_velocity(p.concentration_pct, p.velocity_model)));
}

TEST_CASE("simulation is deterministic per seed")
{
    const auto a = small_acquisition();
    PhantomSpec p;
    p.surface_index = 5;
    const auto m1 = simulate_measurement(p, a, NoiseSpec{}, 10e-3, 99);
    const auto m2 = simulate_measurement(p, a, NoiseSpec{}, 10e-3, 99);
    const auto m3 = simulate_measurement(p, a, NoiseSpec{}, 10e-3, 100);
    CHECK(m1.phase == m2.phase);
    CHECK(m1.intensity == m2.intensity);
    CHECK_FALSE(m1.phase == m3.phase);
}

TEST_CASE("noise-free gel phase is zero before the wave can arrive")
{
    const auto a = small_acquisition();
    PhantomSpec p;
    p.surface_index = 4;
    const double r = 10e-3;
    const auto m = simulate_measurement(p, a, quiet(), r, 5);
    const double dt = a.frame_interval_s();
    const double v = m.true_velocity_mps;
    for (std::size_t y = 0; y < a.lateral_pixels; ++y) {
        const double ry = r + static_cast<double>(y) * a.pixel_pitch_m();
        const double onset = ry / v - m.acquisition_delay_s;
        bool nonzero_after = false;
        for (std::size_t t = 0; t < m.phase.extent(2); ++t) {
            const float ph = m.phase(y, p.surface_index, t);
            if (static_cast<double>(t) * dt < onset)
                REQUIRE(ph == 0.0f);
            else
                nonzero_after |= ph != 0.0f;
        }
        CHECK(nonzero_after);
    }
}

TEST_CASE("far pixels see the wave later")
{
    const auto a = small_acquisition();
    PhantomSpec p;
    p.surface_index = 4;
    // a near-zero trigger delay keeps the onset inside the recording
    p.excitation.delay_window_s = 1e-6;
    const auto m = simulate_measurement(p, a, quiet(), 5e-3, 8);
    auto first_motion = [&](std::size_t y) {
        for (std::size_t t = 0; t < m.phase.extent(2); ++t)
            if (m.phase(y, p.surface_index, t) != 0.0f)
                return t;
        return m.phase.extent(2);
    };
    CHECK(first_motion(0) < first_motion(a.lateral_pixels - 1));
}

TEST_CASE("invalid simulation inputs are rejected")
{
    const auto a = small_acquisition();
    PhantomSpec p;
    p.surface_index = 4;
    CHECK_THROWS_AS(simulate_measurement(p, a, NoiseSpec{}, 0.0, 1), Error);
    NoiseSpec bad;
    bad.dead_row_fraction = 1.5;
    CHECK_THROWS_AS(simulate_measurement(p, a, bad, 5e-3, 1), Error);
    p.surface_index = a.depth_pixels;
    CHECK_THROWS_AS(simulate_measurement(p, a, NoiseSpec{}, 5e-3, 1), Error);
}

TEST_CASE("dataset plan enumerates the full factorial design")
{
    const DatasetConfig cfg;
    const auto plan = plan_dataset(cfg, 42);
    REQUIRE(plan.size() == 6 * 4 * 2 * 2 * 4);
    std::set<std::string> ids;
    std::map<double, int> per_conc;
    for (const auto& ps : plan) {
        ids.insert(ps.sample.id);
        per_conc[ps.sample.concentration_pct] += 1;
        CHECK(ps.phantom.surface_index >= cfg.surface_index_min);
        CHECK(ps.phantom.surface_index <= cfg.surface_index_max);
    }
    CHECK(ids.size() == plan.size());
    for (const auto& [c, n] : per_conc)
        CHECK(n == 64);

    const auto again = plan_dataset(cfg, 42);
    for (std::size_t i = 0; i < plan.size(); ++i) {
        CHECK(again[i].sample == plan[i].sample);
        CHECK(again[i].phantom.velocity_scale == plan[i].phantom.velocity_scale);
    }
}

TEST_CASE("dataset config validation")
{
    DatasetConfig cfg;
    cfg.concentrations_pct = {};
    CHECK_THROWS_AS(cfg.validate(), Error);
    cfg = DatasetConfig{};
    cfg.instances = 0;
    CHECK_THROWS_AS(cfg.validate(), Error);
    cfg = DatasetConfig{};
    cfg.surface_index_min = 70;
    CHECK_THROWS_AS(cfg.validate(), Error);
}

TEST_CASE("dataset generation writes loadable tensors")
{
    namespace fs = std::filesystem;
    const auto dir = fs::temp_directory_path() / "oce_test_dataset";
    fs::remove_all(dir);
    DatasetConfig cfg;
    cfg.acquisition.depth_pixels = 24;
    cfg.surface_index_min = 2;
    cfg.surface_index_max = 6;
    cfg.concentrations_pct = {8.3};
    cfg.needle_distances_m = {5e-3};
    cfg.instances = 1;
    cfg.orientations = 1;
    cfg.repetitions = 2;
    const auto samples = generate_dataset(cfg, 1, dir);
    REQUIRE(samples.size() == 2);
    const auto manifest = read_manifest(dir / "manifest.json");
    REQUIRE(manifest.samples == samples);
    const auto m = load_measurement(manifest, samples[0]);
    CHECK(m.phase.extent(1) == 24);
    CHECK(m.surface_index >= 2);
    CHECK(m.surface_index <= 6);
    CHECK(m.true_velocity_mps > 0.0);
}

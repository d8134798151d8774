#include <algorithm>
#include <cmath>
#include <numbers>

#include <catch_amalgamated.hpp>

#include "oce/phasepipe.hpp"

using namespace oce;
using Catch::Approx;

namespace {

constexpr double kPi = std::numbers::pi;

double wrap_exact(double phi) { return wrap_step(phi); }

/// Sorts the 27 edge-replicated neighbours of every voxel.
Tensor median_oracle(const Tensor& v)
{
    const auto n0 = static_cast<long>(v.extent(0)), n1 = static_cast<long>(v.extent(1)),
               n2 = static_cast<long>(v.extent(2));
    Tensor out(v.shape(), v.axes());
    auto at = [&](long a, long b, long c) {
        a = std::clamp(a, 0L, n0 - 1);
        b = std::clamp(b, 0L, n1 - 1);
        c = std::clamp(c, 0L, n2 - 1);
        return v(static_cast<std::size_t>(a), static_cast<std::size_t>(b), static_cast<std::size_t>(c));
    };
    for (long a = 0; a < n0; ++a)
        for (long b = 0; b < n1; ++b)
            for (long c = 0; c < n2; ++c) {
                std::vector<float> w;
                for (long da = -1; da <= 1; ++da)
                    for (long db = -1; db <= 1; ++db)
                        for (long dc = -1; dc <= 1; ++dc)
                            w.push_back(at(a + da, b + db, c + dc));
                std::sort(w.begin(), w.end());
                out(static_cast<std::size_t>(a), static_cast<std::size_t>(b), static_cast<std::size_t>(c)) = w[13];
            }
    return out;
}

Tensor random_volume(Rng& rng, std::size_t n0, std::size_t n1, std::size_t n2)
{
    Tensor t({n0, n1, n2}, "yzt");
    for (auto& x : t.values())
        x = static_cast<float>(rng.normal());
    return t;
}

} // namespace

TEST_CASE("unwrapping a wrapped admissible sequence restores it up to one 2 pi offset")
{
    Rng rng(17);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 2 + rng.below(300);
        std::vector<double> x(n), w(n);
        x[0] = rng.uniform(-20.0, 20.0);
        for (std::size_t k = 1; k < n; ++k)
            x[k] = x[k - 1] + rng.uniform(-0.999 * kPi, 0.999 * kPi);
        for (std::size_t k = 0; k < n; ++k)
            w[k] = wrap_exact(x[k]);
        const auto u = unwrap_temporal(w);
        const double offset = x[0] - u[0];
        CHECK(std::abs(std::remainder(offset, 2 * kPi)) < 1e-9);
        double worst = 0.0;
        for (std::size_t k = 0; k < n; ++k)
            worst = std::max(worst, std::abs(u[k] + offset - x[k]));
        REQUIRE(worst < 1e-9);
    }
}

TEST_CASE("wrap_step maps into (-pi, pi]")
{
    CHECK(wrap_step(kPi) == Approx(kPi));
    CHECK(wrap_step(-kPi) == Approx(kPi));
    CHECK(wrap_step(3 * kPi) == Approx(kPi));
    CHECK(wrap_step(0.5) == Approx(0.5));
    CHECK(wrap_step(0.5 + 4 * kPi) == Approx(0.5));
}

TEST_CASE("volume unwrapping works per pixel along time")
{
    Tensor v({2, 1, 5}, "yzt");
    const std::vector<double> series{3.0, -3.0, 3.0, -3.0, 3.0};
    for (std::size_t t = 0; t < 5; ++t) {
        v(0, 0, t) = static_cast<float>(series[t]);
        v(1, 0, t) = 0.1f * static_cast<float>(t);
    }
    const auto u = unwrap_volume(v);
    for (std::size_t t = 1; t < 5; ++t) {
        CHECK(std::abs(u(0, 0, t) - u(0, 0, t - 1)) < kPi);
        CHECK(u(1, 0, t) == Approx(0.1 * static_cast<double>(t)).margin(1e-6));
    }
    const auto d = temporal_phase_difference(u);
    CHECK(d.extent(2) == 4);
    CHECK(d(1, 0, 0) == Approx(0.1).margin(1e-6));
}

TEST_CASE("phase difference needs two frames and time last")
{
    CHECK_THROWS_AS(temporal_phase_difference(Tensor({2, 2, 1}, "yzt")), Error);
    CHECK_THROWS_AS(temporal_phase_difference(Tensor({2, 2, 3}, "tyz")), Error);
}

TEST_CASE("median filter equals a brute-force sort oracle")
{
    Rng rng(23);
    for (int trial = 0; trial < 50; ++trial) {
        const auto v = random_volume(rng, 5, 5, 7);
        REQUIRE(median_filter_3(v) == median_oracle(v));
    }
    // ties, long time axis crossing several blocks, degenerate extents
    Tensor ties({3, 4, 150}, "yzt");
    for (auto& x : ties.values())
        x = static_cast<float>(rng.below(3));
    CHECK(median_filter_3(ties) == median_oracle(ties));
    const auto thin = random_volume(rng, 1, 1, 9);
    CHECK(median_filter_3(thin) == median_oracle(thin));
}

TEST_CASE("median filter removes an isolated spike")
{
    Tensor v({5, 5, 5}, "yzt", 1.0f);
    v(2, 2, 2) = 100.0f;
    const auto m = median_filter_3(v);
    for (float x : m.values())
        CHECK(x == 1.0f);
}

TEST_CASE("row quality mask drops the dimmest rows")
{
    Tensor intensity({4, 10}, "yz");
    for (std::size_t y = 0; y < 4; ++y)
        for (std::size_t z = 0; z < 10; ++z)
            intensity(y, z) = static_cast<float>(z + 1);
    const auto keep = row_quality_mask(intensity, 0.1);
    CHECK(keep[0] == 0);
    for (std::size_t z = 1; z < 10; ++z)
        CHECK(keep[z] == 1);
    CHECK_THROWS_AS(row_quality_mask(intensity, 1.0), Error);
    const auto all = row_quality_mask(intensity, 0.0);
    CHECK(std::count(all.begin(), all.end(), 1) == 10);
}

TEST_CASE("axial mean ignores masked rows")
{
    Rng rng(31);
    for (int trial = 0; trial < 20; ++trial) {
        auto v = random_volume(rng, 4, 6, 12);
        RowMask keep(6, 1);
        keep[1] = keep[4] = 0;
        const auto before = axial_mean(v, keep);
        for (std::size_t y = 0; y < 4; ++y)
            for (std::size_t t = 0; t < 12; ++t) {
                v(y, 1, t) += static_cast<float>(rng.normal(0.0, 1000.0));
                v(y, 4, t) = std::numeric_limits<float>::quiet_NaN();
            }
        const auto after = axial_mean(v, keep);
        REQUIRE(after.values == before.values);
        double expect = 0.0;
        for (std::size_t z : {0, 2, 3, 5})
            expect += v(2, z, 7);
        CHECK(after.values(2, 7) == Approx(expect / 4.0).epsilon(1e-6));
    }
}

TEST_CASE("axial mean errors")
{
    Tensor v({2, 3, 4}, "yzt");
    CHECK_THROWS_AS(axial_mean(v, RowMask(3, 0)), Error);
    CHECK_THROWS_AS(axial_mean(v, RowMask(2, 1)), Error);
}

TEST_CASE("cropping and row elimination")
{
    Tensor v({2, 5, 6}, "yzt");
    for (std::size_t i = 0; i < v.size(); ++i)
        v(i) = static_cast<float>(i);
    const auto c = crop_above_surface(v, 2);
    CHECK(c.extent(1) == 3);
    CHECK(c(1, 0, 0) == v(1, 2, 0));
    const auto f = crop_frames(v, 4);
    CHECK(f.extent(2) == 4);
    CHECK(f(1, 4, 3) == v(1, 4, 3));
    CHECK_THROWS_AS(crop_frames(v, 7), Error);
    CHECK_THROWS_AS(crop_above_surface(v, 5), Error);

    RowMask keep{1, 0, 1, 0, 0};
    const auto e = eliminate_rows(v, keep);
    CHECK(e.extent(1) == 2);
    CHECK(e(1, 1, 5) == v(1, 2, 5));
    CHECK_THROWS_AS(eliminate_rows(v, RowMask(5, 0)), Error);
}

TEST_CASE("full preprocessing produces a 400-frame map over gel rows")
{
    AcquisitionConfig a;
    a.depth_pixels = 30;
    PhantomSpec p;
    p.surface_index = 6;
    const auto raw = simulate_measurement(p, a, NoiseSpec{}, 5e-3, 4);
    const auto pre = preprocess(raw, PipelineConfig{}, a);
    CHECK(pre.row_mask.size() == 24);
    CHECK(pre.volume.extent(2) == 400);
    CHECK(pre.volume.extent(1) == static_cast<std::size_t>(std::count(pre.row_mask.begin(), pre.row_mask.end(), 1)));
    CHECK(pre.map.lateral() == 32);
    CHECK(pre.map.frames() == 400);
    CHECK(pre.map.frame_interval_s == Approx(1.0 / 30000.0));
}

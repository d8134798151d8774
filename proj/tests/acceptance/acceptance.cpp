// Acceptance run: one PASS/FAIL line per criterion 1-10.
// Exit status is nonzero only when a criterion fails that is not listed in kExpectedFailures.

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstring>
#include <functional>
#include <iostream>
#include <numbers>
#include <set>

#include "CLI11.hpp"
#include "oce/oce.hpp"

namespace fs = std::filesystem;
using namespace oce;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what)
    {
        if (!ok) {
            pass = false;
            if (!detail.empty())
                detail += "; ";
            detail += what;
        }
    }
};

/// The reference table's SVR (Linear) and MLP (100,100) rows disagree with
/// their own MAE / sigma, so criterion 7 cannot pass as written.
const std::set<int> kExpectedFailures{7};

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string num(double v, int digits = 4)
{
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

// ---------------------------------------------------------------- 1

Outcome roundtrips()
{
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    Rng rng(101);
    const std::string labels = "cyzt";
    std::size_t tensor_bad = 0, report_bad = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t rank = 1 + rng.below(4);
        std::vector<std::size_t> shape;
        std::string axes;
        std::size_t count = 1;
        for (std::size_t r = 0; r < rank; ++r) {
            shape.push_back(1 + rng.below(8));
            axes += labels[4 - rank + r];
            count *= shape.back();
        }
        std::vector<float> data(count);
        for (auto& v : data)
            v = std::bit_cast<float>(static_cast<std::uint32_t>(rng.next_u64()));
        const nlohmann::json meta = {{"trial", trial}, {"x", rng.normal()}};
        const auto bytes = detail::encode_tensor(shape, axes, data, meta);
        const auto back = decode_tensor(std::span(reinterpret_cast<const unsigned char*>(bytes.data()), bytes.size()));
        const auto vals = back.tensor.values();
        if (back.tensor.shape() != shape || back.tensor.axes() != axes || back.meta != meta ||
            vals.size() != data.size() || std::memcmp(vals.data(), data.data(), data.size() * sizeof(float)) != 0)
            ++tensor_bad;

        eval::MetricsReport r;
        r.preset = "desk";
        r.seed = rng.next_u64();
        r.sigma = rng.uniform(0.1, 5);
        const std::size_t nc = 2 + rng.below(5);
        for (std::size_t c = 0; c < nc; ++c) {
            r.concentrations.push_back(rng.uniform(1, 20));
            r.velocity.push_back({r.concentrations.back(), rng.normal(), rng.uniform(), rng.below(64), 64});
            r.samples.push_back({"s" + std::to_string(c), r.concentrations.back(),
                                 rng.uniform() < 0.7 ? std::optional<double>(rng.normal()) : std::nullopt,
                                 rng.uniform() < 0.3 ? "NoWavefront" : ""});
        }
        for (const char* name : {"LR", "MLP50", "CNN-2Dt"}) {
            eval::ModelResult m;
            m.name = name;
            m.ok = rng.uniform() < 0.9;
            if (!m.ok) {
                m.error = "NonFiniteLoss: diverged";
            } else {
                m.mae = rng.uniform(0, 3);
                m.mae_std = rng.uniform(0, 3);
                m.rmae = m.mae / r.sigma;
                m.rmae_std = m.mae_std / r.sigma;
                if (rng.uniform() < 0.8)
                    m.acc = rng.uniform(-1, 1);
                m.imputed = rng.below(4);
                for (std::size_t k = 0; k < 3; ++k)
                    m.predictions.push_back({"s" + std::to_string(k), k, rng.uniform(1, 20), rng.normal(5, 2)});
                m.folds.push_back({r.concentrations[0], {{"C", rng.uniform(0, 100)}, {"epoch", rng.below(100)}}, 0});
            }
            r.models.push_back(m);
        }
        const auto text = eval::dump_report(r);
        if (eval::dump_report(eval::parse_report(text)) != text)
            ++report_bad;
    }
    const double secs = seconds_since(t0);
    o.require(tensor_bad == 0, std::to_string(tensor_bad) + " tensor mismatches");
    o.require(report_bad == 0, std::to_string(report_bad) + " report mismatches");
    o.require(secs < 10.0, "runtime " + num(secs) + " s");
    if (o.pass)
        o.detail = "1000 tensor + 1000 report round trips bit-exact in " + num(secs, 3) + " s";
    return o;
}

// ---------------------------------------------------------------- 2

Tensor median_oracle(const Tensor& v)
{
    const auto n0 = static_cast<long>(v.extent(0)), n1 = static_cast<long>(v.extent(1)),
               n2 = static_cast<long>(v.extent(2));
    Tensor out(v.shape(), v.axes());
    auto at = [&](long a, long b, long c) {
        return v(static_cast<std::size_t>(std::clamp(a, 0L, n0 - 1)), static_cast<std::size_t>(std::clamp(b, 0L, n1 - 1)),
                 static_cast<std::size_t>(std::clamp(c, 0L, n2 - 1)));
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

Outcome phase_oracles()
{
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    constexpr double pi = std::numbers::pi;
    Rng rng(202);
    double worst_unwrap = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 2 + rng.below(400);
        std::vector<double> x(n), w(n);
        x[0] = rng.uniform(-30.0, 30.0);
        for (std::size_t k = 1; k < n; ++k)
            x[k] = x[k - 1] + rng.uniform(-0.999 * pi, 0.999 * pi);
        for (std::size_t k = 0; k < n; ++k)
            w[k] = wrap_step(x[k]);
        const auto u = unwrap_temporal(w);
        const double offset = x[0] - u[0];
        worst_unwrap = std::max(worst_unwrap, std::abs(std::remainder(offset, 2 * pi)));
        for (std::size_t k = 0; k < n; ++k)
            worst_unwrap = std::max(worst_unwrap, std::abs(u[k] + offset - x[k]));
    }
    o.require(worst_unwrap < 1e-9, "unwrap error " + num(worst_unwrap));

    std::size_t median_bad = 0;
    for (int trial = 0; trial < 50; ++trial) {
        const auto v = random_volume(rng, 5, 5, 7);
        if (!(median_filter_3(v) == median_oracle(v)))
            ++median_bad;
    }
    o.require(median_bad == 0, std::to_string(median_bad) + " median mismatches");

    std::size_t axial_bad = 0;
    for (int trial = 0; trial < 50; ++trial) {
        auto v = random_volume(rng, 4, 8, 16);
        RowMask keep(8, 1);
        for (std::size_t z = 0; z < 8; ++z)
            keep[z] = rng.uniform() < 0.6 ? 1 : 0;
        keep[rng.below(8)] = 1;
        const auto before = axial_mean(v, keep);
        for (std::size_t z = 0; z < 8; ++z)
            if (!keep[z])
                for (std::size_t y = 0; y < 4; ++y)
                    for (std::size_t t = 0; t < 16; ++t)
                        v(y, z, t) = trial % 2 ? std::numeric_limits<float>::quiet_NaN()
                                               : v(y, z, t) + static_cast<float>(rng.normal(0.0, 1e3));
        if (!(axial_mean(v, keep).values == before.values))
            ++axial_bad;
    }
    o.require(axial_bad == 0, std::to_string(axial_bad) + " axial-mean perturbations leaked");
    const double secs = seconds_since(t0);
    o.require(secs < 30.0, "runtime " + num(secs) + " s");
    if (o.pass)
        o.detail = "unwrap max error " + num(worst_unwrap, 2) + ", 50/50 median volumes, 50/50 masked perturbations, " +
                   num(secs, 3) + " s";
    return o;
}

// ---------------------------------------------------------------- 3

/// The needle sits v * 9 ms from the field of view so the wavefront crosses it
/// inside the 400-frame recording window for every tested speed.
std::optional<double> recovered_velocity(double v, const NoiseSpec& noise, std::uint64_t seed)
{
    const AcquisitionConfig a;
    PhantomSpec p;
    p.velocity_model.v_ref_mps = v;
    p.velocity_model.c_ref_pct = p.concentration_pct;
    const double r = v * 9e-3;
    p.reference_distance_m = r;
    const auto raw = simulate_measurement(p, a, noise, r, seed);
    const auto pre = preprocess(raw, PipelineConfig{}, a);
    const auto f = extract_velocity(pre.map);
    if (!f.ok())
        return std::nullopt;
    return f.estimate->v_mps;
}

Outcome velocity_recovery()
{
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    NoiseSpec quiet;
    quiet.phase_noise_sigma_rad = 0.0;
    quiet.dead_row_fraction = 0.0;
    std::string summary;
    for (double v : {1.0, 2.0, 3.0, 4.0}) {
        const auto clean = recovered_velocity(v, quiet, 900 + static_cast<std::uint64_t>(v));
        const double clean_err = clean ? std::abs(*clean - v) / v : 1.0;
        o.require(clean && clean_err < 0.03, "noise-free v=" + num(v) + " error " + num(clean_err));

        std::vector<double> errs(32);
        parallel_for(errs.size(), [&](std::size_t i) {
            const auto est = recovered_velocity(v, NoiseSpec{}, derive_sample_seed(7, "vel:" + num(v) + ":" + std::to_string(i)));
            errs[i] = est ? std::abs(*est - v) / v : std::numeric_limits<double>::infinity();
        });
        std::sort(errs.begin(), errs.end());
        const double median = 0.5 * (errs[15] + errs[16]);
        o.require(median <= 0.10, "noisy v=" + num(v) + " median error " + num(median));
        summary += " v=" + num(v) + ": clean " + num(100 * clean_err, 2) + "%, noisy median " + num(100 * median, 2) + "%;";
    }
    const double secs = seconds_since(t0);
    o.require(secs < 120.0, "runtime " + num(secs) + " s");
    if (o.pass)
        o.detail = summary.substr(1) + " " + num(secs, 3) + " s";
    return o;
}

// ---------------------------------------------------------------- 4

Outcome unit_conversion()
{
    Outcome o;
    const AcquisitionConfig a;
    WavefrontTrack t;
    for (std::size_t y = 0; y < 32; ++y) {
        t.arrival_frame.push_back(5.0 + 2.0 * static_cast<double>(y));
        t.confidence.push_back(1.0);
        t.valid.push_back(1);
    }
    const auto est = fit_velocity(t, a.pixel_pitch_m(), a.frame_interval_s());
    const double err = std::abs(est.v_mps - 1.40625);
    o.require(err < 1e-9, "got " + num(est.v_mps, 17));
    o.require(std::abs(a.pixel_pitch_m() - 93.75e-6) < 1e-15, "pitch " + num(a.pixel_pitch_m(), 17));
    if (o.pass)
        o.detail = "pitch " + num(a.pixel_pitch_m() * 1e6, 6) + " um, dt " + num(a.frame_interval_s() * 1e6, 6) +
                   " us, 0.5 px/frame -> " + num(est.v_mps, 12) + " m/s";
    return o;
}

// ---------------------------------------------------------------- 5

nn::Feature<double> random_feature(const nn::Shape& s, Rng& rng)
{
    nn::Feature<double> f(s);
    for (auto& v : f.data)
        v = rng.normal();
    return f;
}

void randomize(nn::Layer<double>& layer, Rng& rng)
{
    std::vector<nn::Param<double>*> params;
    layer.collect_params(params);
    for (auto* p : params)
        for (auto& v : p->value)
            v = rng.normal(0.0, 0.5);
}

nn::Shape random_shape(Rng& rng, std::size_t channels, std::size_t max_ext)
{
    return nn::Shape{channels, {1 + rng.below(max_ext), 1 + rng.below(max_ext), 1 + rng.below(2 * max_ext)}};
}

Outcome gradients()
{
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    constexpr double tol = 1e-5;
    std::map<std::string, double> worst;
    auto record = [&](const std::string& kind, const nn::GradCheckResult& r) {
        worst[kind] = std::max(worst[kind], r.max_rel_error);
    };
    Rng rng(505);
    auto odd = [&] { return 1 + 2 * rng.below(2); };
    for (int trial = 0; trial < 20; ++trial) {
        nn::ConvGeometry g;
        g.in_channels = 1 + rng.below(3);
        g.out_channels = 1 + rng.below(4);
        g.kernel = {odd(), 1 + rng.below(3), 1 + rng.below(5)};
        if (trial % 2)
            g.stride = {1 + rng.below(2), 1 + rng.below(2), 1 + rng.below(3)};
        nn::ConvSt<double> conv(g);
        randomize(conv, rng);
        record("conv_st", nn::grad_check_layer(conv, random_feature(random_shape(rng, g.in_channels, 5), rng), trial));

        const nn::Shape in = random_shape(rng, 1 + rng.below(3), 5);
        const auto x = random_feature(in, rng);
        nn::Relu<double> relu;
        record("relu", nn::grad_check_layer(relu, x, trial));
        nn::GlobalAvgPool<double> gap;
        record("global_avg_pool", nn::grad_check_layer(gap, x, trial));
        const std::array<bool, 3> axes{rng.below(2) == 1, true, true};
        nn::Shape pooled = in;
        for (std::size_t a = 0; a < 3; ++a)
            if (axes[a])
                pooled.ext[a] = std::max<std::size_t>(2, pooled.ext[a]);
        nn::AvgPool<double> pool(axes);
        record("avg_pool", nn::grad_check_layer(pool, random_feature(pooled, rng), trial));
        nn::FullyConnected<double> fc(in.size(), 1 + rng.below(4));
        randomize(fc, rng);
        record("fully_connected", nn::grad_check_layer(fc, x, trial));
        nn::DenseBlock<double> block(in.channels, 1 + rng.below(3), 1 + rng.below(3), {odd(), odd(), 3});
        randomize(block, rng);
        record("dense_block", nn::grad_check_layer(block, x, trial));
    }
    for (int dims : {1, 2}) {
        nn::CnnArch a;
        a.spatial_dims = dims;
        a.k0 = 3;
        a.blocks = 2;
        a.layers_per_block = 2;
        a.growth = 2;
        a.stem_temporal_stride = 2;
        auto net = nn::build_cnn<double>(a, 40 + static_cast<std::uint64_t>(dims));
        const nn::Shape in = dims == 1 ? nn::Shape{1, {1, 6, 24}} : nn::Shape{1, {4, 4, 16}};
        record(dims == 1 ? "cnn_1d_reduced" : "cnn_2d_reduced", nn::grad_check(net, random_feature(in, rng)));
    }
    auto mlp = nn::build_mlp<double>({5, 4}, 43);
    record("mlp", nn::grad_check(mlp, nn::Feature<double>(nn::Shape{}, {0.7})));

    std::string summary;
    for (const auto& [kind, err] : worst) {
        o.require(err < tol, kind + " error " + num(err));
        summary += " " + kind + "=" + num(err, 2);
    }
    const double secs = seconds_since(t0);
    o.require(secs < 300.0, "runtime " + num(secs) + " s");
    if (o.pass)
        o.detail = "max relative error:" + summary + ", " + num(secs, 3) + " s";
    return o;
}

// ---------------------------------------------------------------- 6

Outcome architecture()
{
    Outcome o;
    const auto paper = eval::paper_preset();
    for (const nn::CnnArch& arch : {paper.cnn_1d, paper.cnn_2d}) {
        const std::string tag = arch.spatial_dims == 1 ? "1D+t" : "2D+t";
        o.require(arch.k0 == 16, tag + " k0 " + std::to_string(arch.k0));
        o.require(arch.head_channels() == 96, tag + " head " + std::to_string(arch.head_channels()));
        auto net = nn::build_cnn<float>(arch, 1);
        const nn::Shape in = arch.spatial_dims == 1 ? nn::Shape{1, {1, 32, 400}} : nn::Shape{1, {32, 32, 400}};
        const auto shapes = net.propagate(in);
        std::size_t blocks = 0;
        for (std::size_t i = 0; i < net.layer_count(); ++i)
            if (net.layer(i).describe().at("kind").get<std::string>() == "dense_block") {
                ++blocks;
                o.require(shapes[i + 1].channels == shapes[i].channels + 20,
                          tag + " block " + std::to_string(blocks) + ": " + std::to_string(shapes[i].channels) +
                              " -> " + std::to_string(shapes[i + 1].channels));
            }
        o.require(blocks == 4, tag + " has " + std::to_string(blocks) + " dense blocks");
        o.require(shapes[shapes.size() - 2].channels == 96,
                  tag + " head input " + std::to_string(shapes[shapes.size() - 2].channels));
        o.require(shapes.back().size() == 1, tag + " output is not scalar");
    }
    if (o.pass)
        o.detail = "k0 16 -> 36 -> 56 -> 76 -> 96 channels, head input 96 for 1D+t and 2D+t";
    return o;
}

// ---------------------------------------------------------------- 7

Outcome table_consistency()
{
    Outcome o;
    const double sigma = eval::concentration_sigma({11.1, 8.3, 6.7, 5.6, 4.8, 4.2});
    o.require(std::abs(sigma - 2.3434) < 5e-5, "sigma " + num(sigma, 8));
    struct Row {
        const char* name;
        double mae, rmae;
    };
    const Row rows[] = {{"LR", 1.57, 0.67},          {"SVR (Linear)", 1.50, 0.63}, {"SVR (RBF)", 1.41, 0.60},
                        {"MLP (50,50)", 1.29, 0.55}, {"MLP (100,100)", 1.32, 0.60}, {"1D+t CNN", 1.04, 0.44},
                        {"2D+t CNN", 0.90, 0.38}};
    std::size_t ok = 0;
    for (const auto& r : rows) {
        const double got = eval::rmae(r.mae, sigma);
        const double diff = std::abs(got - r.rmae);
        if (diff <= 0.005)
            ++ok;
        o.require(diff <= 0.005, std::string(r.name) + ": " + num(r.mae, 3) + "/sigma = " + num(got, 4) +
                                     " vs printed " + num(r.rmae, 2) + " (diff " + num(diff, 2) + ")");
    }
    o.detail = "sigma " + num(sigma, 6) + ", " + std::to_string(ok) + "/7 rows consistent" +
               (o.detail.empty() ? "" : "; " + o.detail);
    return o;
}

// ---------------------------------------------------------------- 8

Outcome protocol_integrity(const std::vector<Sample>& samples, std::uint64_t seed)
{
    Outcome o;
    const auto folds = eval::make_sixfold_plan(samples, seed);
    o.require(folds.size() == 6, std::to_string(folds.size()) + " folds");
    std::map<std::string, const Sample*> by_id;
    for (const auto& s : samples)
        by_id[s.id] = &s;
    std::set<double> held;
    for (const auto& f : folds) {
        const std::string tag = "fold " + num(f.held_out_concentration, 3) + ": ";
        held.insert(f.held_out_concentration);
        o.require(f.test_ids.size() == 32 && f.validation_ids.size() == 32, tag + "split sizes");
        std::set<std::string> test(f.test_ids.begin(), f.test_ids.end());
        std::set<std::string> val(f.validation_ids.begin(), f.validation_ids.end());
        std::set<std::string> opt(f.optimization_ids.begin(), f.optimization_ids.end());
        o.require(test.size() == 32 && val.size() == 32 && opt.size() == f.optimization_ids.size(), tag + "duplicates");
        o.require(test.size() + val.size() + opt.size() == samples.size(), tag + "does not cover the dataset");
        for (const auto& id : test)
            o.require(!val.count(id) && !opt.count(id), tag + "test id leaks: " + id);
        for (const auto& id : val)
            o.require(!opt.count(id), tag + "validation id leaks: " + id);
        for (const auto* ids : {&test, &val})
            for (const auto& id : *ids)
                o.require(by_id.count(id) && by_id[id]->concentration_pct == f.held_out_concentration,
                          tag + "held-out set contains another concentration");
        for (const auto& id : opt)
            o.require(by_id.count(id) && by_id[id]->concentration_pct != f.held_out_concentration,
                      tag + "optimization set contains the held-out concentration");
    }
    o.require(held.size() == 6, "held-out concentrations not distinct");
    if (o.pass)
        o.detail = "6 folds, 32/32/320 split, each concentration held out once, no leakage";
    return o;
}

// ---------------------------------------------------------------- 9, 10

struct EndToEnd {
    std::string report_text;
    eval::MetricsReport report;
    double seconds = 0.0;
};

EndToEnd run_desk(const fs::path& dir, std::uint64_t seed)
{
    const auto t0 = std::chrono::steady_clock::now();
    auto log = [&](const std::string& msg) {
        std::cerr << "  [" << static_cast<long>(seconds_since(t0)) << " s] " << msg << std::endl;
    };
    fs::remove_all(dir);
    fs::create_directories(dir);
    const DatasetConfig dc;
    generate_dataset(dc, seed, dir);
    log("dataset generated");
    const auto manifest = read_manifest(dir / "manifest.json");
    const auto cfg = eval::desk_preset();
    const auto data = eval::prepare_samples(manifest, cfg.prepare);
    log("samples prepared");
    const auto folds = eval::make_sixfold_plan(manifest.samples, seed, cfg.folds);
    EndToEnd e;
    e.report = eval::run_protocol(data, folds, cfg, seed, log);
    e.report_text = eval::dump_report(e.report);
    e.seconds = seconds_since(t0);
    return e;
}

Outcome desk_criteria(const EndToEnd& e)
{
    Outcome o;
    const auto& r = e.report;
    o.require(r.models.size() == 7, std::to_string(r.models.size()) + " model rows");
    std::string table;
    std::optional<double> mlp50, cnn2d;
    for (const auto& m : r.models) {
        o.require(m.ok, m.name + " failed: " + m.error);
        if (!m.ok)
            continue;
        o.require(m.predictions.size() == 192, m.name + " has " + std::to_string(m.predictions.size()) + " predictions");
        table += " " + m.name + "=" + num(m.rmae, 3);
        if (m.name == "MLP50")
            mlp50 = m.rmae;
        if (m.name == "CNN-2Dt")
            cnn2d = m.rmae;
    }
    o.require(mlp50 && *mlp50 < 0.8, "MLP50 rMAE " + (mlp50 ? num(*mlp50) : std::string("missing")));
    o.require(cnn2d && *cnn2d < 0.8, "CNN-2Dt rMAE " + (cnn2d ? num(*cnn2d) : std::string("missing")));

    std::vector<double> conc, means;
    std::string trend;
    for (const auto& v : r.velocity) {
        conc.push_back(v.concentration_pct);
        means.push_back(v.mean_mps);
        trend += " " + num(v.concentration_pct, 3) + "%:" + num(v.mean_mps, 3);
    }
    const double rho = conc.size() >= 2 ? eval::spearman(conc, means) : 0.0;
    o.require(conc.size() == 6 && rho == 1.0, "velocity Spearman " + num(rho));
    o.require(e.seconds <= 1800.0, "runtime " + num(e.seconds) + " s");

    std::vector<const eval::ModelResult*> ranked;
    for (const auto& m : r.models)
        if (m.ok)
            ranked.push_back(&m);
    std::sort(ranked.begin(), ranked.end(), [](auto* a, auto* b) { return a->rmae < b->rmae; });
    const std::string best = ranked.empty() ? "none" : ranked.front()->name;
    o.detail = "rMAE" + table + "; velocity means" + trend + "; Spearman " + num(rho) + "; best model " + best +
               " (reference best: CNN-2Dt, not gated); " + num(e.seconds, 4) + " s" +
               (o.pass ? "" : "; " + o.detail);
    return o;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"acceptance checks"};
    std::string work = (fs::temp_directory_path() / "oce_acceptance").string();
    std::vector<int> only;
    std::uint64_t seed = 42;
    app.add_option("--work", work, "scratch directory for the desk-scale dataset");
    app.add_option("--only", only, "run only these criteria");
    app.add_option("--seed", seed, "master seed for the desk-scale run");
    CLI11_PARSE(app, argc, argv);

    auto wanted = [&](int c) { return only.empty() || std::find(only.begin(), only.end(), c) != only.end(); };
    std::map<int, Outcome> results;
    auto report = [&](int c, const Outcome& o) {
        results[c] = o;
        const bool expected = !o.pass && kExpectedFailures.count(c);
        std::cout << "criterion " << c << ": " << (o.pass ? "PASS" : "FAIL") << (expected ? " (expected)" : "")
                  << " - " << o.detail << std::endl;
    };
    auto guarded = [&](int c, const std::function<Outcome()>& fn) {
        if (!wanted(c))
            return;
        try {
            report(c, fn());
        } catch (const std::exception& e) {
            report(c, Outcome{false, std::string("exception: ") + e.what()});
        }
    };

    guarded(1, roundtrips);
    guarded(2, phase_oracles);
    guarded(3, velocity_recovery);
    guarded(4, unit_conversion);
    guarded(5, gradients);
    guarded(6, architecture);
    guarded(7, table_consistency);
    guarded(8, [&] {
        std::vector<Sample> samples;
        for (const auto& p : plan_dataset(DatasetConfig{}, seed))
            samples.push_back(p.sample);
        return protocol_integrity(samples, seed);
    });

    std::optional<EndToEnd> first;
    guarded(9, [&] {
        first = run_desk(fs::path(work) / "run1", seed);
        return desk_criteria(*first);
    });
    guarded(10, [&] {
        if (!first)
            first = run_desk(fs::path(work) / "run1", seed);
        const auto second = run_desk(fs::path(work) / "run2", seed);
        Outcome o;
        o.require(second.report_text == first->report_text, "reports differ");
        o.detail = (o.pass ? "byte-identical report (" : "reports differ (") + std::to_string(first->report_text.size()) +
                   " bytes), rerun " + num(second.seconds, 4) + " s";
        return o;
    });

    int unexpected = 0, expected = 0;
    for (const auto& [c, o] : results) {
        if (o.pass)
            continue;
        if (kExpectedFailures.count(c))
            ++expected;
        else
            ++unexpected;
    }
    std::size_t passed = 0;
    for (const auto& [c, o] : results)
        passed += o.pass ? 1 : 0;
    std::cout << "summary: " << passed << "/" << results.size() << " passed, " << expected
              << " expected failure(s) (criterion 7: the reference table's SVR (Linear) and MLP (100,100) rows are "
                 "inconsistent with MAE/sigma), "
              << unexpected << " unexpected failure(s)" << std::endl;
    return unexpected == 0 ? 0 : 1;
}

// oce: simulate -> preprocess -> velocity -> train -> evaluate -> report.

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>

#include "CLI11.hpp"
#include "oce/oce.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

struct Common {
    std::string config_path;
    std::string preset = "desk";
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::size_t threads = 0;
};

/// Top-level config file: {"seed", "threads", "dataset", "protocol"}.
struct FileConfig {
    json dataset = json::object();
    json protocol = json::object();
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> threads;
};

FileConfig load_config(const std::string& path)
{
    FileConfig fc;
    if (path.empty())
        return fc;
    std::ifstream is(path);
    if (!is)
        throw oce::Error(oce::Errc::ConfigError, "cannot open config " + path);
    json j;
    try {
        is >> j;
    } catch (const json::exception& e) {
        throw oce::Error(oce::Errc::ConfigError, "config " + path + " is not valid JSON: " + e.what());
    }
    oce::json_util::reject_unknown(j, {"seed", "threads", "dataset", "protocol"}, "config file");
    if (j.contains("dataset"))
        fc.dataset = j.at("dataset");
    if (j.contains("protocol"))
        fc.protocol = j.at("protocol");
    if (j.contains("seed"))
        fc.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("threads"))
        fc.threads = j.at("threads").get<std::size_t>();
    return fc;
}

std::uint64_t resolve_seed(const Common& c, const FileConfig& fc)
{
    if (c.seed_set)
        return c.seed;
    return fc.seed.value_or(0);
}

void apply_threads(const Common& c, const FileConfig& fc)
{
    const std::size_t n = c.threads ? c.threads : fc.threads.value_or(0);
    if (n > 0)
        ::setenv("OCE_THREADS", std::to_string(n).c_str(), 1);
}

/// Preset defaults, then the config file's "protocol" overlay.
oce::eval::ProtocolConfig protocol_config(const Common& c, const FileConfig& fc)
{
    auto cfg = oce::eval::preset_config(c.preset);
    from_json(fc.protocol, cfg);
    return cfg;
}

void write_text(const fs::path& path, const std::string& text)
{
    if (path.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(path.parent_path(), ec);
    }
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os)
        throw oce::Error(oce::Errc::IoError, "cannot write " + path.string());
    os << text;
}

void ensure_dir(const fs::path& dir)
{
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
        throw oce::Error(oce::Errc::IoError, "cannot create " + dir.string() + ": " + ec.message());
}

class Timer {
public:
    double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count(); }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

json run_metadata(const std::string& sub, int argc, char** argv, std::uint64_t seed, const json& config, double secs)
{
    json args = json::array();
    for (int i = 0; i < argc; ++i)
        args.push_back(argv[i]);
    return {{"subcommand", sub},     {"argv", args},
            {"seed", seed},          {"config", config},
            {"version", kVersion},   {"threads", oce::worker_count()},
            {"timing_s", secs}};
}

oce::Manifest load_manifest(const std::string& path) { return oce::read_manifest(path); }

std::string csv_number(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Optical coherence elastography: simulation, velocity estimation and regression benchmark"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    Common common;
    auto add_common = [&](CLI::App* sub, bool with_preset) {
        sub->add_option("--config", common.config_path, "JSON config file")->check(CLI::ExistingFile);
        sub->add_option_function<std::uint64_t>(
            "--seed", [&](const std::uint64_t& s) { common.seed = s, common.seed_set = true; }, "master seed");
        sub->add_option("--threads", common.threads, "worker threads (overrides OCE_THREADS)");
        if (with_preset)
            sub->add_option("--preset", common.preset, "paper | desk")->check(CLI::IsMember({"paper", "desk"}));
    };

    std::string out, manifest_path, models = "all", in_path, format = "table", plot_path, model_name;
    std::size_t fold = 0;

    auto* simulate = app.add_subcommand("simulate", "generate a synthetic dataset (tensors + manifest)");
    add_common(simulate, false);
    simulate->add_option("--out", out, "output directory")->required();

    auto* preprocess = app.add_subcommand("preprocess", "write filtered volumes and depth-averaged maps");
    add_common(preprocess, true);
    preprocess->add_option("--manifest", manifest_path, "dataset manifest")->required();
    preprocess->add_option("--out", out, "output directory")->required();

    auto* velocity = app.add_subcommand("velocity", "estimate shear wave velocity per sample (CSV)");
    add_common(velocity, true);
    velocity->add_option("--manifest", manifest_path, "dataset manifest")->required();
    velocity->add_option("--out", out, "output directory")->required();

    auto* train = app.add_subcommand("train", "train one model on one fold");
    add_common(train, true);
    train->add_option("--manifest", manifest_path, "dataset manifest")->required();
    train->add_option("--model", model_name, "LR | SVR-lin | SVR-RBF | MLP50 | MLP100 | CNN-1Dt | CNN-2Dt")
        ->required();
    train->add_option("--fold", fold, "fold index (0-based, descending concentration)")->required();
    train->add_option("--out", out, "output directory")->required();

    auto* evaluate = app.add_subcommand("evaluate", "run the leave-one-concentration-out protocol");
    add_common(evaluate, true);
    evaluate->add_option("--manifest", manifest_path, "dataset manifest")->required();
    evaluate->add_option("--models", models, "'all' or comma-separated model names");
    evaluate->add_option("--out", out, "report JSON path")->required();

    auto* report = app.add_subcommand("report", "render a report as a table or CSV");
    report->add_option("--in", in_path, "report JSON")->required()->check(CLI::ExistingFile);
    report->add_option("--format", format, "table | csv | json")->check(CLI::IsMember({"table", "csv", "json"}));
    report->add_option("--plot", plot_path, "write velocity-per-concentration CSV here");
    report->add_option("--out", out, "write the rendering here instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0)
            return app.exit(e);
        app.exit(e);
        std::cerr << app.help();
        return 2;
    }

    try {
        const FileConfig fc = load_config(common.config_path);
        apply_threads(common, fc);
        const std::uint64_t seed = resolve_seed(common, fc);
        const Timer timer;

        if (*simulate) {
            oce::DatasetConfig dc;
            from_json(fc.dataset, dc);
            dc.validate();
            const fs::path dir(out);
            ensure_dir(dir);
            oce::generate_dataset(dc, seed, dir);
            write_text(dir / "run_metadata.json",
                       run_metadata("simulate", argc, argv, seed, {{"dataset", dc}}, timer.seconds()).dump(1) + "\n");
            return 0;
        }

        if (*report) {
            std::ifstream is(in_path);
            const std::string text{std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
            const auto rep = oce::eval::parse_report(text);
            std::string rendered = format == "table" ? oce::eval::render_table(rep)
                                   : format == "csv" ? oce::eval::render_csv(rep)
                                                     : oce::eval::dump_report(rep);
            if (out.empty())
                std::cout << rendered;
            else
                write_text(out, rendered);
            if (!plot_path.empty())
                write_text(plot_path, oce::eval::render_fig3_csv(rep));
            return 0;
        }

        const auto cfg = protocol_config(common, fc);
        const auto manifest = load_manifest(manifest_path);
        const json cfg_json = {{"protocol", cfg}};

        if (*preprocess) {
            const fs::path dir(out);
            ensure_dir(dir / "tensors");
            json index = json::array();
            std::vector<json> rows(manifest.samples.size());
            oce::parallel_for(manifest.samples.size(), [&](std::size_t i) {
                const auto& s = manifest.samples[i];
                const auto raw = oce::load_measurement(manifest, s);
                const auto pre = oce::preprocess(raw, cfg.prepare.pipeline, cfg.prepare.acquisition);
                const std::string vol = "tensors/" + s.id + ".volume.tnsr";
                const std::string map = "tensors/" + s.id + ".map.tnsr";
                oce::write_tensor(dir / vol, pre.volume, {{"sample_id", s.id}});
                oce::write_tensor(dir / map, pre.map.values,
                                  {{"sample_id", s.id},
                                   {"frame_interval_s", pre.map.frame_interval_s},
                                   {"pixel_pitch_m", pre.map.pixel_pitch_m}});
                std::size_t kept = 0;
                for (char k : pre.row_mask)
                    kept += k ? 1 : 0;
                rows[i] = {{"sample_id", s.id},
                           {"volume_path", vol},
                           {"map_path", map},
                           {"rows_kept", kept},
                           {"rows_total", pre.row_mask.size()}};
            });
            for (auto& r : rows)
                index.push_back(std::move(r));
            write_text(dir / "preprocessed.json", index.dump(1) + "\n");
            write_text(dir / "run_metadata.json",
                       run_metadata("preprocess", argc, argv, seed, cfg_json, timer.seconds()).dump(1) + "\n");
            return 0;
        }

        if (*velocity) {
            auto pc = cfg.prepare;
            pc.need_1d = pc.need_2d = false;
            const auto data = oce::eval::prepare_samples(manifest, pc);
            std::string csv = "sample_id,concentration_pct,v_px_per_frame,v_mps,r_squared,failure\n";
            for (const auto& d : data) {
                csv += d.sample.id + "," + csv_number(d.sample.concentration_pct) + ",";
                if (d.velocity.ok()) {
                    const auto& e = *d.velocity.estimate;
                    csv += csv_number(e.v_px_per_frame) + "," + csv_number(e.v_mps) + "," + csv_number(e.r_squared) +
                           ",\n";
                } else {
                    csv += ",,," + d.velocity.failure + "\n";
                }
            }
            const fs::path dir(out);
            write_text(dir / "velocity.csv", csv);
            write_text(dir / "run_metadata.json",
                       run_metadata("velocity", argc, argv, seed, cfg_json, timer.seconds()).dump(1) + "\n");
            return 0;
        }

        const auto folds = oce::eval::make_sixfold_plan(manifest.samples, seed, cfg.folds);
        std::mutex log_mutex;
        const oce::eval::ProgressFn progress = [&](const std::string& msg) {
            std::lock_guard lock(log_mutex);
            std::cerr << "[" << static_cast<long>(timer.seconds()) << " s] " << msg << '\n';
        };

        if (*train) {
            if (fold >= folds.size())
                throw oce::Error(oce::Errc::UsageError, "fold must be below " + std::to_string(folds.size()));
            auto tcfg = cfg;
            tcfg.models = {oce::eval::parse_model(model_name)};
            const bool cnn = !oce::eval::uses_velocity(tcfg.models.front());
            tcfg.prepare.need_1d = cnn && tcfg.models.front() == oce::eval::ModelKind::Cnn1Dt;
            tcfg.prepare.need_2d = cnn && tcfg.models.front() == oce::eval::ModelKind::Cnn2Dt;
            const auto data = oce::eval::prepare_samples(manifest, tcfg.prepare);
            const auto fold_data = oce::eval::resolve_folds(data, {folds[fold]});
            progress("training " + model_name + " on fold " + std::to_string(fold));
            const auto outcome =
                oce::eval::train_fold(tcfg.models.front(), fold, folds[fold], fold_data.front(), data, tcfg, seed);
            oce::eval::ModelResult m;
            m.name = oce::eval::model_name(tcfg.models.front());
            m.ok = true;
            m.predictions = outcome.predictions;
            m.folds = {outcome.summary};
            m.imputed = outcome.summary.imputed;
            std::vector<double> pred, truth;
            for (const auto& p : m.predictions) {
                pred.push_back(p.pred);
                truth.push_back(p.truth);
            }
            const auto errs = oce::eval::absolute_errors(pred, truth);
            m.mae = oce::eval::mean(errs);
            m.mae_std = oce::eval::population_std(errs);

            const fs::path dir(out);
            ensure_dir(dir);
            json model_json = {{"name", m.name},
                               {"fold", fold},
                               {"held_out_concentration", outcome.summary.held_out_concentration},
                               {"selection", outcome.summary.selection},
                               {"imputed", m.imputed},
                               {"test_mae", m.mae},
                               {"test_mae_std", m.mae_std},
                               {"fitted", outcome.model},
                               {"predictions", m.predictions}};
            if (outcome.network) {
                oce::nn::write_checkpoint(dir / "checkpoint.tnsr", *outcome.network,
                                          {{"model", m.name}, {"fold", fold}});
                model_json["checkpoint"] = "checkpoint.tnsr";
                std::ostringstream hist;
                oce::nn::write_history_csv(hist, outcome.history);
                write_text(dir / "history.csv", hist.str());
            }
            write_text(dir / "model.json", model_json.dump(1) + "\n");
            write_text(dir / "fold.json", json(folds[fold]).dump(1) + "\n");
            write_text(dir / "run_metadata.json",
                       run_metadata("train", argc, argv, seed, cfg_json, timer.seconds()).dump(1) + "\n");
            return 0;
        }

        if (*evaluate) {
            auto ecfg = cfg;
            ecfg.models = oce::eval::parse_model_list(models);
            ecfg.prepare.need_1d = false;
            ecfg.prepare.need_2d = false;
            for (auto mk : ecfg.models) {
                ecfg.prepare.need_1d |= mk == oce::eval::ModelKind::Cnn1Dt;
                ecfg.prepare.need_2d |= mk == oce::eval::ModelKind::Cnn2Dt;
            }
            progress("preprocessing " + std::to_string(manifest.samples.size()) + " samples");
            const auto data = oce::eval::prepare_samples(manifest, ecfg.prepare);
            const auto rep = oce::eval::run_protocol(data, folds, ecfg, seed, progress);
            const fs::path path(out);
            write_text(path, oce::eval::dump_report(rep));
            fs::path meta = path;
            meta.replace_extension(".run.json");
            write_text(meta, run_metadata("evaluate", argc, argv, seed, {{"protocol", ecfg}}, timer.seconds()).dump(1) +
                                 "\n");
            return 0;
        }
    } catch (const oce::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        const auto c = e.code();
        return c == oce::Errc::UsageError || c == oce::Errc::ConfigError ? 2 : 1;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: ConfigError: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

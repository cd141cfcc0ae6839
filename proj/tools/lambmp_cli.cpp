// lambmp command-line tool: synthesis, decomposition, database generation,
// feature extraction, localization and the end-to-end pipeline.
//
// Every subcommand accepts --config FILE.json; command-line flags override
// values from the file. The output directory defaults to $LAMBMP_OUTPUT_DIR,
// then the working directory.

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "lambmp/atom.hpp"
#include "lambmp/damage_db.hpp"
#include "lambmp/dispersion.hpp"
#include "lambmp/error.hpp"
#include "lambmp/io.hpp"
#include "lambmp/pipeline.hpp"
#include "lambmp/sacmpm.hpp"
#include "lambmp/sampm.hpp"
#include "svg.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace lambmp;

namespace {

/// JSON config reader for CLI11. Top-level keys belong to the subcommand that
/// was invoked; a nested object named after a subcommand addresses it explicitly.
class JsonConfig : public CLI::Config {
public:
    explicit JsonConfig(const CLI::App* root) : root_(root) {}

    std::string to_config(const CLI::App*, bool, bool, std::string) const override { return {}; }

    std::vector<CLI::ConfigItem> from_config(std::istream& in) const override {
        json j;
        try {
            j = json::parse(in);
        } catch (const json::exception& e) {
            throw CLI::ConversionError("config is not valid JSON: " + std::string(e.what()));
        }
        if (!j.is_object()) throw CLI::ConversionError("config must be a JSON object");
        std::vector<std::string> path;
        const CLI::App* app = root_;
        while (true) {
            const auto subs = app->get_subcommands();
            if (subs.empty()) break;
            app = subs.front();
            path.push_back(app->get_name());
        }
        std::vector<CLI::ConfigItem> items;
        flatten(j, path, app, items);
        return items;
    }

private:
    static const CLI::App* find_sub(const CLI::App* app, const std::string& name) {
        try {
            return const_cast<CLI::App*>(app)->get_subcommand(name);
        } catch (const CLI::OptionNotFound&) {
            return nullptr;
        }
    }

    void flatten(const json& obj, const std::vector<std::string>& parents, const CLI::App* app,
                 std::vector<CLI::ConfigItem>& items) const {
        for (const auto& [key, value] : obj.items()) {
            std::string name = key;
            std::replace(name.begin(), name.end(), '_', '-');
            if (value.is_object()) {
                // Relative to the current command first, then from the top.
                std::vector<std::string> next = parents;
                const CLI::App* sub = find_sub(app, name);
                if (sub == nullptr) {
                    sub = find_sub(root_, name);
                    next.clear();
                }
                if (sub == nullptr) throw CLI::ConversionError("config key '" + key + "' is not a subcommand");
                next.push_back(name);
                flatten(value, next, sub, items);
                continue;
            }
            CLI::ConfigItem item;
            item.parents = parents;
            item.name = name;
            if (value.is_array()) {
                for (const auto& v : value) item.inputs.push_back(scalar(v));
            } else {
                item.inputs.push_back(scalar(value));
            }
            items.push_back(std::move(item));
        }
    }

    static std::string scalar(const json& v) {
        if (v.is_string()) return v.get<std::string>();
        if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
        if (v.is_number()) return v.dump();
        throw CLI::ConversionError("unsupported config value " + v.dump());
    }

    const CLI::App* root_;
};

/// Files produced by one command; removed again unless the command succeeds.
class Outputs {
public:
    explicit Outputs(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }
    Outputs(const Outputs&) = delete;
    Outputs& operator=(const Outputs&) = delete;
    ~Outputs() {
        if (committed_) return;
        for (const auto& p : created_) {
            std::error_code ec;
            fs::remove_all(p, ec);
        }
    }

    const fs::path& dir() const { return dir_; }
    fs::path file(const std::string& name) { return track(dir_ / name); }
    fs::path track(fs::path p) {
        created_.push_back(p);
        return p;
    }
    void commit() { committed_ = true; }

private:
    fs::path dir_;
    std::vector<fs::path> created_;
    bool committed_ = false;
};

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out.precision(17);
    return out;
}

void add_out(CLI::App* sub, std::string& out) {
    sub->add_option("-o,--out", out, "output directory")->envname("LAMBMP_OUTPUT_DIR")->capture_default_str();
}

void add_burst(CLI::App* sub, BurstSpec& b, bool with_fs) {
    sub->add_option("--f0", b.f0_hz, "burst centre frequency (Hz)")->capture_default_str();
    sub->add_option("--cycles", b.n_cycles, "cycles under the half-sine window")->capture_default_str();
    if (with_fs) sub->add_option("--fs", b.sample_rate_hz, "sample rate (Hz)")->capture_default_str();
    sub->add_option("--amp", b.amplitude, "burst amplitude")->capture_default_str();
}

void add_plate(CLI::App* sub, PlateModel& p) {
    sub->add_option("--modulus", p.E, "Young's modulus (Pa)")->capture_default_str();
    sub->add_option("--nu", p.nu, "Poisson ratio")->capture_default_str();
    sub->add_option("--rho", p.rho, "density (kg/m^3)")->capture_default_str();
    sub->add_option("--thickness", p.h, "thickness (m)")->capture_default_str();
}

std::vector<double> time_axis(const Signal& x) {
    std::vector<double> t(x.size());
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = static_cast<double>(i) * x.dt();
    return t;
}

std::vector<double> values(const Signal& x) { return {x.samples().begin(), x.samples().end()}; }

// ---------------------------------------------------------------- synth

struct SynthArgs {
    std::string out = ".";
    double d_min = 0.15, d_max = 0.55, d_step = 0.05;
    BurstSpec burst;
    PlateModel plate;
    std::size_t len = 1024;
    std::string modes = "s0,a0";
    std::string a0_form = "mindlin";
    bool svg = false;
};

void cmd_synth(const SynthArgs& a) {
    if (!(a.d_step > 0.0) || !(a.d_min >= 0.0) || a.d_max < a.d_min)
        throw PreconditionError("need 0 <= d-min <= d-max and d-step > 0");
    const ModeSet modes = ModeSet::parse(a.modes);
    const A0Form form = parse_a0_form(a.a0_form);
    const Signal burst = make_tone_burst(a.burst);
    Outputs out(a.out);

    write_signal_csv(out.file("burst.csv"), burst);
    svg::Plot plot{"Synthesized signals", "time (s)", "signal (offset by distance)", {}};
    const auto n = static_cast<long>(std::floor((a.d_max - a.d_min) / a.d_step + 1e-9));
    for (long i = 0; i <= n; ++i) {
        const double d = a.d_min + static_cast<double>(i) * a.d_step;
        const Signal s = propagate(burst, d, a.plate, modes, PropagateOptions{a.len, form});
        const auto mm = std::llround(d * 1000.0);
        write_signal_csv(out.file("signal_" + std::to_string(mm) + "mm.csv"), s);
        std::printf("d = %.3f m -> signal_%lldmm.csv (%zu samples)\n", d, static_cast<long long>(mm), s.size());
        if (a.svg) {
            auto y = values(s);
            for (double& v : y) v = v / a.burst.amplitude + 2.0 * static_cast<double>(i);
            plot.series.push_back({std::to_string(mm) + " mm", time_axis(s), y});
        }
    }

    auto csv = open_out(out.file("dispersion.csv"));
    csv << "f_hz,k_s0,k_a0,cp_s0,cp_a0,cg_s0,cg_a0\n";
    const double f_lo = a.burst.f0_hz / 50.0, f_hi = 3.0 * a.burst.f0_hz;
    constexpr int kPoints = 300;
    svg::Plot disp{"Group velocity", "frequency (Hz)", "c_g (m/s)", {{"S0", {}, {}}, {"A0", {}, {}}}};
    for (int k = 0; k < kPoints; ++k) {
        const double f = f_lo + (f_hi - f_lo) * k / (kPoints - 1);
        const Velocities vs = velocities(f, a.plate, LambMode::S0, form);
        const Velocities va = velocities(f, a.plate, LambMode::A0, form);
        csv << f << ',' << k_s0(f, a.plate) << ',' << k_a0(f, a.plate, form) << ',' << vs.c_phase << ','
            << va.c_phase << ',' << vs.c_group << ',' << va.c_group << '\n';
        disp.series[0].x.push_back(f);
        disp.series[0].y.push_back(vs.c_group);
        disp.series[1].x.push_back(f);
        disp.series[1].y.push_back(va.c_group);
    }
    csv.close();
    if (a.svg) {
        svg::write_plot(out.file("signals.svg"), plot);
        svg::write_plot(out.file("dispersion.svg"), disp);
    }
    out.commit();
}

// ---------------------------------------------------------------- atom

struct AtomArgs {
    std::string out = ".";
    std::string name = "atom.csv";
    BurstSpec burst;
};

void cmd_atom(const AtomArgs& a) {
    const Signal burst = make_tone_burst(a.burst);
    Outputs out(a.out);
    write_signal_csv(out.file(a.name), burst);
    std::printf("%zu samples, %.6g s\n", burst.size(), a.burst.duration_s());
    out.commit();
}

// ---------------------------------------------------------------- decompose

struct DecomposeArgs {
    std::string out = ".";
    std::string signal;
    std::string atom;
    BurstSpec burst;
    std::string method = "sampm";
    double tol = 10.0;
    int max_terms = 50;
    int n = 40;
    double ridge_lambda = 1e-10;
    std::optional<double> tau_min, tau_max;
    bool svg = false;
};

void cmd_decompose(const DecomposeArgs& a) {
    const Method method = parse_method(a.method);
    const Signal s = read_signal_csv(a.signal);
    Signal atom = Signal::zeros(1, s.sample_rate_hz());
    if (!a.atom.empty()) {
        atom = load_atom(a.atom);
    } else {
        BurstSpec b = a.burst;
        b.sample_rate_hz = s.sample_rate_hz();
        atom = make_tone_burst(b);
    }
    require_same_rate(s.sample_rate_hz(), atom.sample_rate_hz());
    std::optional<DelayGrid> grid;
    if (a.tau_min || a.tau_max) {
        DelayGrid g = DelayGrid::covering(s.size(), atom.size(), s.sample_rate_hz());
        if (a.tau_min) g.min_delay_s = *a.tau_min;
        if (a.tau_max) g.max_delay_s = *a.tau_max;
        g.validate();
        grid = g;
    }

    json doc;
    Signal recon = Signal::zeros(s.size(), s.sample_rate_hz());
    std::vector<Signal> terms;
    std::vector<double> history;
    std::vector<Signal> impulse;
    std::string stop;
    if (method == Method::Sampm) {
        const auto d = sampm_decompose(s, atom, SampmOptions{a.max_terms, a.tol, grid});
        doc = to_json(d);
        recon = d.reconstruction();
        for (std::size_t i = 0; i < d.terms.size(); ++i) terms.push_back(d.term_signal(i));
        history = d.error_history_pct;
        stop = to_string(d.stop);
    } else {
        const auto d = sacmpm_decompose(s, atom, SacmpmOptions{a.n, a.max_terms, a.tol, a.ridge_lambda, grid});
        doc = to_json(d);
        recon = d.reconstruction();
        for (std::size_t i = 0; i < d.terms.size(); ++i) {
            terms.push_back(d.term_signal(i));
            impulse.push_back(d.impulse_response(i));
        }
        history = d.error_history_pct;
        stop = to_string(d.stop);
    }
    const Signal residual = s - recon;
    const double s_norm = norm_time(s);
    doc["final_error_pct"] = history.empty() ? 100.0 : history.back();
    doc["reconstruction_error_pct"] = s_norm > 0.0 ? 100.0 * norm_time(residual) / s_norm : 0.0;

    Outputs out(a.out);
    write_json(out.file("decomposition.json"), doc);
    {
        auto csv = open_out(out.file("reconstruction.csv"));
        csv << "time_s,signal,reconstruction,residual\n";
        for (std::size_t i = 0; i < s.size(); ++i)
            csv << static_cast<double>(i) * s.dt() << ',' << s[i] << ',' << recon[i] << ',' << residual[i] << '\n';
    }
    {
        auto csv = open_out(out.file("convergence.csv"));
        csv << "terms,error_pct\n0,100\n";
        for (std::size_t i = 0; i < history.size(); ++i) csv << i + 1 << ',' << history[i] << '\n';
    }
    {
        auto csv = open_out(out.file("terms.csv"));
        csv << "time_s";
        for (std::size_t k = 0; k < terms.size(); ++k) csv << ",term_" << k + 1;
        csv << '\n';
        for (std::size_t i = 0; i < s.size(); ++i) {
            csv << static_cast<double>(i) * s.dt();
            for (const auto& t : terms) csv << ',' << t[i];
            csv << '\n';
        }
    }
    if (!impulse.empty()) {
        auto csv = open_out(out.file("impulse_responses.csv"));
        csv << "time_s";
        for (std::size_t k = 0; k < impulse.size(); ++k) csv << ",alpha_" << k + 1;
        csv << '\n';
        for (std::size_t i = 0; i < impulse.front().size(); ++i) {
            csv << static_cast<double>(i) * s.dt();
            for (const auto& t : impulse) csv << ',' << t[i];
            csv << '\n';
        }
    }
    if (a.svg) {
        svg::Plot conv{"Convergence (" + a.method + ")", "terms", "relative error (%)", {{a.method, {0.0}, {100.0}}}};
        for (std::size_t i = 0; i < history.size(); ++i) {
            conv.series[0].x.push_back(static_cast<double>(i + 1));
            conv.series[0].y.push_back(history[i]);
        }
        svg::write_plot(out.file("convergence.svg"), conv);
        svg::write_plot(out.file("reconstruction.svg"),
                        {"Reconstruction (" + a.method + ")", "time (s)", "amplitude",
                         {{"signal", time_axis(s), values(s)}, {"reconstruction", time_axis(s), values(recon)}}});
    }
    std::printf("%s: %zu terms, error %.4g%%, stop: %s\n", a.method.c_str(), terms.size(),
                history.empty() ? 100.0 : history.back(), stop.c_str());
    out.commit();
}

// ---------------------------------------------------------------- db gen

struct DbArgs {
    std::string out = ".";
    DatabaseConfig config;
    std::string a0_form = "mindlin";
    bool no_noise = false;
};

void add_db_options(CLI::App* sub, DatabaseConfig& c, std::string& a0_form, bool& no_noise) {
    sub->add_option("--seed", c.seed, "noise and split seed")->capture_default_str();
    sub->add_option("--reflection", c.reflection_coeff, "damage reflection coefficient in [0, 1]")
        ->capture_default_str();
    sub->add_option("--snr-db", c.snr_db, "measurement SNR (dB)")->capture_default_str();
    sub->add_flag("--no-noise", no_noise, "skip measurement noise");
    sub->add_option("--len", c.signal_len, "samples per signal")->capture_default_str();
    sub->add_option("--n-test", c.n_test, "held-out cases")->capture_default_str();
    sub->add_option("--a0-form", a0_form, "A0 dispersion relation: mindlin | printed")->capture_default_str();
}

void finish_db_config(DatabaseConfig& c, const std::string& a0_form, bool no_noise) {
    c.a0_form = parse_a0_form(a0_form);
    if (no_noise) c.add_noise = false;
}

void cmd_db_gen(DbArgs a) {
    finish_db_config(a.config, a.a0_form, a.no_noise);
    const Database db = gen_database(a.config);
    Outputs out(a.out);
    const fs::path dir = out.dir() / "db";
    if (fs::exists(dir)) fs::remove_all(dir);
    write_database(db, out.track(dir));
    std::printf("%zu cases (%zu train, %zu test) -> %s\n", db.cases.size(), db.indices(Split::Train).size(),
                db.indices(Split::Test).size(), dir.string().c_str());
    out.commit();
}

// ---------------------------------------------------------------- features

struct FeaturesArgs {
    std::string out = ".";
    std::string db;
    std::string method = "both";
    DecomposeSettings settings;
};

std::vector<Method> parse_methods(const std::string& s) {
    if (s == "both") return {Method::Sampm, Method::Sacmpm};
    return {parse_method(s)};
}

void cmd_features(const FeaturesArgs& a) {
    Outputs out(a.out);
    const fs::path db_dir = a.db.empty() ? out.dir() / "db" : fs::path(a.db);
    const Database db = read_database(db_dir);
    for (Method m : parse_methods(a.method)) {
        const FeatureTable table = extract_features(db, m, a.settings);
        const fs::path csv = out.file("features_" + std::string(to_string(m)) + ".csv");
        out.track(schema_path_for(csv));
        write_feature_table(csv, table);
        std::printf("%s: %zu cases x %td features -> %s\n", std::string(to_string(m)).c_str(), table.labels.size(),
                    table.values.cols(), csv.string().c_str());
    }
    write_targets(out.file("targets.csv"), targets_of(db));
    out.commit();
}

// ---------------------------------------------------------------- localize

struct TrainArgs {
    std::string out = ".";
    std::string features, targets, model;
    TrainConfig train;
};

void cmd_train(const TrainArgs& a) {
    const FeatureTable table = read_feature_table(a.features);
    const LabeledData data = join(table, read_targets(a.targets), Split::Train);
    const TrainResult res = nn_train(data.features, data.targets, a.train);
    const std::string method(to_string(table.schema.method));
    Outputs out(a.out);
    const fs::path model_path = a.model.empty() ? out.file("model_" + method + ".json") : out.track(a.model);
    json j = to_json(res.model);
    j["feature_schema"] = to_json(table.schema);
    write_json(model_path, j);
    {
        auto csv = open_out(out.file("loss_" + method + ".csv"));
        csv << "epoch,loss\n";
        for (std::size_t i = 0; i < res.loss_history.size(); ++i) csv << i + 1 << ',' << res.loss_history[i] << '\n';
    }
    std::printf("%s: %zu training cases, %zu epochs, final loss %.6g -> %s\n", method.c_str(), data.labels.size(),
                res.loss_history.size(), res.loss_history.empty() ? 0.0 : res.loss_history.back(),
                model_path.string().c_str());
    out.commit();
}

struct EvalArgs {
    std::string out = ".";
    std::string model, features, targets;
    std::string split = "test";
    double x_range = 0.0, y_range = 0.0;
    bool svg = false;
};

void cmd_eval(const EvalArgs& a) {
    const json mj = read_json(a.model);
    const NNModel model = model_from_json(mj);
    const FeatureTable table = read_feature_table(a.features);
    if (mj.contains("feature_schema")) {
        const FeatureSchema trained = schema_from_json(mj["feature_schema"]);
        if (trained.method != table.schema.method || trained.m != table.schema.m ||
            trained.n_funcs != table.schema.n_funcs || trained.paths != table.schema.paths)
            throw PreconditionError("feature table schema does not match the one the model was trained on");
    }
    const auto targets = read_targets(a.targets);

    LabeledData data;
    if (a.split == "all") {
        const LabeledData tr = join(table, targets, Split::Train), te = join(table, targets, Split::Test);
        data.labels = tr.labels;
        data.labels.insert(data.labels.end(), te.labels.begin(), te.labels.end());
        data.features.resize(tr.features.rows() + te.features.rows(), tr.features.cols());
        data.features << tr.features, te.features;
        data.targets.resize(tr.targets.rows() + te.targets.rows(), 2);
        data.targets << tr.targets, te.targets;
    } else if (a.split == "train" || a.split == "test") {
        data = join(table, targets, a.split == "train" ? Split::Train : Split::Test);
    } else {
        throw PreconditionError("split must be train, test or all");
    }

    double xr = a.x_range, yr = a.y_range;
    if (xr <= 0.0 || yr <= 0.0) {
        double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
        for (const auto& t : targets) {
            x0 = std::min(x0, t.x_m), x1 = std::max(x1, t.x_m);
            y0 = std::min(y0, t.y_m), y1 = std::max(y1, t.y_m);
        }
        if (xr <= 0.0) xr = x1 - x0;
        if (yr <= 0.0) yr = y1 - y0;
    }
    const EvalReport rep = nn_evaluate(model, data.features, data.targets, xr, yr);
    const std::string method(to_string(table.schema.method));
    Outputs out(a.out);
    {
        auto csv = open_out(out.file("eval_" + method + "_" + a.split + ".csv"));
        csv << "label,x_true_m,y_true_m,x_pred_m,y_pred_m\n";
        for (std::size_t i = 0; i < rep.rows.size(); ++i)
            csv << data.labels[i] << ',' << rep.rows[i].truth(0) << ',' << rep.rows[i].truth(1) << ','
                << rep.rows[i].prediction(0) << ',' << rep.rows[i].prediction(1) << '\n';
    }
    if (a.svg) {
        svg::Plot p{"Predicted vs true (" + method + ", " + a.split + ")", "x (m)", "y (m)",
                    {{"true", {}, {}, true}, {"predicted", {}, {}, true}}};
        for (const auto& r : rep.rows) {
            p.series[0].x.push_back(r.truth(0));
            p.series[0].y.push_back(r.truth(1));
            p.series[1].x.push_back(r.prediction(0));
            p.series[1].y.push_back(r.prediction(1));
        }
        svg::write_plot(out.file("eval_" + method + "_" + a.split + ".svg"), p);
    }
    std::printf("%s (%s, %zu cases): x error %.3f%%, y error %.3f%%\n", method.c_str(), a.split.c_str(),
                rep.rows.size(), rep.x_error_pct, rep.y_error_pct);
    out.commit();
}

// ---------------------------------------------------------------- pipeline

struct PipelineArgs {
    std::string out = ".";
    PipelineConfig config;
    std::string a0_form = "mindlin";
    bool no_noise = false;
    std::string methods = "both";
    bool svg = false;
};

void cmd_pipeline(PipelineArgs a) {
    finish_db_config(a.config.db, a.a0_form, a.no_noise);
    a.config.methods = parse_methods(a.methods);
    const PipelineResult res = run_pipeline(a.config);
    Outputs out(a.out);
    out.file("report.csv");
    for (const auto& mr : res.methods) out.file("scatter_" + std::string(to_string(mr.method)) + ".csv");
    write_report(res, out.dir());
    write_targets(out.file("targets.csv"), res.targets);
    for (const auto& mr : res.methods) {
        const std::string name(to_string(mr.method));
        const fs::path csv = out.file("features_" + name + ".csv");
        out.track(schema_path_for(csv));
        write_feature_table(csv, mr.features);
        json j = to_json(mr.trained.model);
        j["feature_schema"] = to_json(mr.features.schema);
        write_json(out.file("model_" + name + ".json"), j);
        if (a.svg) {
            svg::Plot p{"Test predictions (" + name + ")", "x (m)", "y (m)",
                        {{"true", {}, {}, true}, {"predicted", {}, {}, true}}};
            for (const auto& r : mr.test_report.rows) {
                p.series[0].x.push_back(r.truth(0));
                p.series[0].y.push_back(r.truth(1));
                p.series[1].x.push_back(r.prediction(0));
                p.series[1].y.push_back(r.prediction(1));
            }
            svg::write_plot(out.file("scatter_" + name + ".svg"), p);
        }
        std::printf("%s: test x %.3f%%, y %.3f%% | train x %.3f%%, y %.3f%% | %zu epochs\n", name.c_str(),
                    mr.test_report.x_error_pct, mr.test_report.y_error_pct, mr.train_report.x_error_pct,
                    mr.train_report.y_error_pct, mr.trained.loss_history.size());
    }
    out.commit();
}

void add_decompose_settings(CLI::App* sub, DecomposeSettings& s) {
    sub->add_option("--m", s.m, "terms kept per path")->capture_default_str();
    sub->add_option("--n", s.n_funcs, "Chebyshev functions (SACMPM)")->capture_default_str();
    sub->add_option("--ridge-lambda", s.ridge_lambda, "relative ridge weight (SACMPM)")->capture_default_str();
}

void add_train(CLI::App* sub, TrainConfig& t) {
    sub->add_option("--train-seed", t.seed, "network initialization seed")->capture_default_str();
    sub->add_option("--epochs", t.max_epochs, "maximum full-batch epochs")->capture_default_str();
    sub->add_option("--lr", t.learning_rate, "initial learning rate")->capture_default_str();
    sub->add_option("--loss-target", t.loss_target, "stop once the loss falls below this")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Single-atom matching pursuit for Lamb-wave signals"};
    app.require_subcommand(1);
    app.fallthrough();
    app.allow_config_extras(CLI::config_extras_mode::error);
    app.config_formatter(std::make_shared<JsonConfig>(&app));
    app.set_config("--config", "", "JSON file with option values; flags override it");

    SynthArgs synth;
    auto* s = app.add_subcommand("synth", "propagate a tone burst to a range of distances");
    add_out(s, synth.out);
    s->add_option("--d-min", synth.d_min, "first distance (m)")->capture_default_str();
    s->add_option("--d-max", synth.d_max, "last distance (m)")->capture_default_str();
    s->add_option("--d-step", synth.d_step, "distance step (m)")->capture_default_str();
    add_burst(s, synth.burst, true);
    add_plate(s, synth.plate);
    s->add_option("--len", synth.len, "samples per signal (0 = shortest sufficient window)")->capture_default_str();
    s->add_option("--modes", synth.modes, "s0, a0 or s0,a0")->capture_default_str();
    s->add_option("--a0-form", synth.a0_form, "mindlin | printed")->capture_default_str();
    s->add_flag("--svg", synth.svg, "also write SVG plots");

    AtomArgs atom;
    auto* at = app.add_subcommand("atom", "write the excitation burst");
    add_out(at, atom.out);
    at->add_option("--name", atom.name, "file name")->capture_default_str();
    add_burst(at, atom.burst, true);

    DecomposeArgs dec;
    auto* d = app.add_subcommand("decompose", "decompose a signal with SAMPM or SACMPM");
    add_out(d, dec.out);
    d->add_option("--signal", dec.signal, "signal CSV (time_s,value)")->required()->check(CLI::ExistingFile);
    d->add_option("--atom", dec.atom, "atom CSV; default: tone burst from --f0/--cycles at the signal rate")
        ->check(CLI::ExistingFile);
    add_burst(d, dec.burst, false);
    d->add_option("--method", dec.method, "sampm | sacmpm")->capture_default_str();
    d->add_option("--tol", dec.tol, "stop at this relative error (%)")->capture_default_str();
    d->add_option("--max-terms", dec.max_terms, "term limit")->capture_default_str();
    d->add_option("--n", dec.n, "Chebyshev functions (SACMPM)")->capture_default_str();
    d->add_option("--ridge-lambda", dec.ridge_lambda, "relative ridge weight (SACMPM)")->capture_default_str();
    d->add_option("--tau-min", dec.tau_min, "smallest delay searched (s)");
    d->add_option("--tau-max", dec.tau_max, "largest delay searched (s)");
    d->add_flag("--svg", dec.svg, "also write SVG plots");

    auto* db = app.add_subcommand("db", "damage database");
    db->require_subcommand(1);
    DbArgs dba;
    auto* gen = db->add_subcommand("gen", "generate the synthetic damage database into <out>/db");
    add_out(gen, dba.out);
    add_db_options(gen, dba.config, dba.a0_form, dba.no_noise);

    FeaturesArgs fa;
    auto* f = app.add_subcommand("features", "decompose every database path into feature rows");
    add_out(f, fa.out);
    f->add_option("--db", fa.db, "database directory (default <out>/db)");
    f->add_option("--method", fa.method, "sampm | sacmpm | both")->capture_default_str();
    add_decompose_settings(f, fa.settings);

    auto* loc = app.add_subcommand("localize", "damage localization network");
    loc->require_subcommand(1);
    TrainArgs ta;
    auto* tr = loc->add_subcommand("train", "train on the train split");
    add_out(tr, ta.out);
    tr->add_option("--features", ta.features, "feature CSV")->required()->check(CLI::ExistingFile);
    tr->add_option("--targets", ta.targets, "targets CSV")->required()->check(CLI::ExistingFile);
    tr->add_option("--model", ta.model, "model JSON path (default <out>/model_<method>.json)");
    tr->add_option("--seed", ta.train.seed, "network initialization seed")->capture_default_str();
    tr->add_option("--epochs", ta.train.max_epochs, "maximum full-batch epochs")->capture_default_str();
    tr->add_option("--lr", ta.train.learning_rate, "initial learning rate")->capture_default_str();
    tr->add_option("--loss-target", ta.train.loss_target, "stop once the loss falls below this")
        ->capture_default_str();

    EvalArgs ea;
    auto* ev = loc->add_subcommand("eval", "evaluate a trained model");
    add_out(ev, ea.out);
    ev->add_option("--model", ea.model, "model JSON")->required()->check(CLI::ExistingFile);
    ev->add_option("--features", ea.features, "feature CSV")->required()->check(CLI::ExistingFile);
    ev->add_option("--targets", ea.targets, "targets CSV")->required()->check(CLI::ExistingFile);
    ev->add_option("--split", ea.split, "train | test | all")->capture_default_str();
    ev->add_option("--x-range", ea.x_range, "x error denominator (m); default: target extent");
    ev->add_option("--y-range", ea.y_range, "y error denominator (m); default: target extent");
    ev->add_flag("--svg", ea.svg, "also write an SVG scatter plot");

    PipelineArgs pa;
    auto* p = app.add_subcommand("pipeline", "database -> features -> training -> evaluation for both methods");
    add_out(p, pa.out);
    add_db_options(p, pa.config.db, pa.a0_form, pa.no_noise);
    add_decompose_settings(p, pa.config.decompose);
    add_train(p, pa.config.train);
    p->add_option("--methods", pa.methods, "sampm | sacmpm | both")->capture_default_str();
    p->add_flag("--svg", pa.svg, "also write SVG scatter plots");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (s->parsed()) cmd_synth(synth);
        else if (at->parsed()) cmd_atom(atom);
        else if (d->parsed()) cmd_decompose(dec);
        else if (gen->parsed()) cmd_db_gen(dba);
        else if (f->parsed()) cmd_features(fa);
        else if (tr->parsed()) cmd_train(ta);
        else if (ev->parsed()) cmd_eval(ea);
        else if (p->parsed()) cmd_pipeline(pa);
    } catch (const Error& e) {
        std::fprintf(stderr, "lambmp: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "lambmp: unexpected failure: %s\n", e.what());
        return 1;
    }
    return 0;
}

#include "lambmp/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>

#include "lambmp/error.hpp"
#include "lambmp/sacmpm.hpp"
#include "lambmp/sampm.hpp"

namespace lambmp {

FeatureTable extract_features(const Database& db, Method method, const DecomposeSettings& settings) {
    if (db.cases.empty()) throw PreconditionError("database holds no cases");
    const Signal atom = make_tone_burst(db.config.burst);
    FeatureTable table;
    std::vector<std::vector<double>> rows;
    for (const auto& rec : db.cases) {
        FeatureVector fv;
        if (method == Method::Sampm) {
            std::vector<SampmDecomposition> per_path;
            for (const auto& p : rec.paths)
                per_path.push_back(sampm_decompose(p.residual, atom, SampmOptions{settings.m, 0.0, std::nullopt}));
            fv = extract(per_path, settings.m);
        } else {
            std::vector<SacmpmDecomposition> per_path;
            for (const auto& p : rec.paths)
                per_path.push_back(sacmpm_decompose(
                    p.residual, atom,
                    SacmpmOptions{settings.n_funcs, settings.m, 0.0, settings.ridge_lambda, std::nullopt}));
            fv = extract(per_path, settings.m);
        }
        if (rows.empty()) table.schema = fv.schema;
        else if (!(fv.schema == table.schema)) throw PreconditionError("cases produced different feature layouts");
        table.labels.push_back(rec.damage.label);
        rows.push_back(std::move(fv.values));
    }
    table.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(table.schema.length()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[i].size(); ++j)
            table.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    return table;
}

std::vector<TargetRow> targets_of(const Database& db) {
    std::vector<TargetRow> out;
    for (const auto& rec : db.cases) out.push_back({rec.damage.label, rec.damage.x_m, rec.damage.y_m, rec.split});
    return out;
}

Eigen::Vector2d grid_ranges(const DatabaseConfig& config) {
    const auto span = [](const std::vector<double>& v) {
        const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
        return *hi - *lo;
    };
    return {span(config.damage_x_m), span(config.damage_y_m)};
}

PipelineResult run_pipeline(const PipelineConfig& config) {
    PipelineResult result;
    result.db = gen_database(config.db);
    result.targets = targets_of(result.db);
    result.ranges = grid_ranges(config.db);
    if (!(result.ranges(0) > 0.0) || !(result.ranges(1) > 0.0))
        throw PreconditionError("damage grid needs at least two positions along each axis");
    for (Method method : config.methods) {
        MethodResult mr;
        mr.method = method;
        mr.features = extract_features(result.db, method, config.decompose);
        mr.train_data = join(mr.features, result.targets, Split::Train);
        mr.test_data = join(mr.features, result.targets, Split::Test);
        mr.trained = nn_train(mr.train_data.features, mr.train_data.targets, config.train);
        mr.train_report = nn_evaluate(mr.trained.model, mr.train_data.features, mr.train_data.targets,
                                      result.ranges(0), result.ranges(1));
        mr.test_report = nn_evaluate(mr.trained.model, mr.test_data.features, mr.test_data.targets,
                                     result.ranges(0), result.ranges(1));
        result.methods.push_back(std::move(mr));
    }
    return result;
}

namespace {

void write_scatter(const std::filesystem::path& path, const MethodResult& mr) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << "label,split,x_true_m,y_true_m,x_pred_m,y_pred_m\n" << std::setprecision(10);
    const auto emit = [&](const LabeledData& data, const EvalReport& rep, const char* split) {
        for (std::size_t i = 0; i < rep.rows.size(); ++i) {
            const auto& r = rep.rows[i];
            out << data.labels[i] << ',' << split << ',' << r.truth(0) << ',' << r.truth(1) << ',' << r.prediction(0)
                << ',' << r.prediction(1) << '\n';
        }
    };
    emit(mr.train_data, mr.train_report, "train");
    emit(mr.test_data, mr.test_report, "test");
}

}  // namespace

void write_report(const PipelineResult& result, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    std::ofstream out(dir / "report.csv");
    if (!out) throw Error("cannot write " + (dir / "report.csv").string());
    out << "method,coordinate,test_error_pct,train_error_pct,final_loss,epochs\n" << std::setprecision(10);
    for (const auto& mr : result.methods) {
        const double loss = mr.trained.loss_history.empty() ? 0.0 : mr.trained.loss_history.back();
        const auto epochs = mr.trained.loss_history.size();
        out << to_string(mr.method) << ",x," << mr.test_report.x_error_pct << ',' << mr.train_report.x_error_pct << ','
            << loss << ',' << epochs << '\n';
        out << to_string(mr.method) << ",y," << mr.test_report.y_error_pct << ',' << mr.train_report.y_error_pct << ','
            << loss << ',' << epochs << '\n';
        write_scatter(dir / ("scatter_" + std::string(to_string(mr.method)) + ".csv"), mr);
    }
}

}  // namespace lambmp

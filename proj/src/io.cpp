#include "lambmp/io.hpp"

#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include "lambmp/error.hpp"

namespace lambmp {

using nlohmann::json;

namespace {

json atom_meta(const Signal& atom) {
    return {{"samples", atom.size()}, {"sample_rate_hz", atom.sample_rate_hz()}, {"norm", norm_time(atom)}};
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

double parse_double(const std::string& s, const std::filesystem::path& file, std::size_t line) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size() && s.find_first_not_of(" \r", used) != std::string::npos) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw FormatError(file.string() + ":" + std::to_string(line) + ": '" + s + "' is not a number");
    }
}

std::string strip_cr(std::string s) {
    if (!s.empty() && s.back() == '\r') s.pop_back();
    return s;
}

}  // namespace

json to_json(const SampmDecomposition& d) {
    json terms = json::array();
    for (const auto& t : d.terms) terms.push_back({{"tau_s", t.tau_s}, {"alpha", t.alpha}});
    return {{"method", "sampm"},
            {"atom_meta", atom_meta(d.atom)},
            {"terms", terms},
            {"error_history_pct", d.error_history_pct},
            {"tol_pct", d.tol_pct},
            {"max_terms", d.max_terms},
            {"stop", std::string(to_string(d.stop))}};
}

json to_json(const SacmpmDecomposition& d) {
    json terms = json::array();
    for (const auto& t : d.terms)
        terms.push_back({{"tau_s", t.tau_s}, {"beta", std::vector<double>(t.beta.data(), t.beta.data() + t.beta.size())}});
    return {{"method", "sacmpm"},
            {"atom_meta", atom_meta(d.atom)},
            {"N", d.basis.n_funcs},
            {"support_s", d.basis.support_s},
            {"ridge_lambda", d.ridge_lambda},
            {"terms", terms},
            {"error_history_pct", d.error_history_pct},
            {"tol_pct", d.tol_pct},
            {"max_terms", d.max_terms},
            {"stop", std::string(to_string(d.stop))}};
}

std::vector<SampmTerm> sampm_terms_from_json(const json& j) {
    try {
        if (j.at("method") != "sampm") throw FormatError("decomposition is not a SAMPM result");
        std::vector<SampmTerm> out;
        for (const auto& t : j.at("terms")) out.push_back({t.at("tau_s"), t.at("alpha")});
        return out;
    } catch (const json::exception& e) {
        throw FormatError(std::string("malformed decomposition: ") + e.what());
    }
}

std::vector<SacmpmTerm> sacmpm_terms_from_json(const json& j) {
    try {
        if (j.at("method") != "sacmpm") throw FormatError("decomposition is not a SACMPM result");
        const int n = j.at("N");
        std::vector<SacmpmTerm> out;
        for (const auto& t : j.at("terms")) {
            const auto beta = t.at("beta").get<std::vector<double>>();
            if (static_cast<int>(beta.size()) != n) throw FormatError("beta length differs from N");
            out.push_back({t.at("tau_s"), Eigen::Map<const Eigen::VectorXd>(beta.data(), n)});
        }
        return out;
    } catch (const json::exception& e) {
        throw FormatError(std::string("malformed decomposition: ") + e.what());
    }
}

namespace {

std::vector<double> to_vec(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

Eigen::VectorXd from_vec(const json& j) {
    const auto v = j.get<std::vector<double>>();
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

json to_json(const NNModel& model) {
    json layers = json::array();
    for (std::size_t l = 0; l < model.weights.size(); ++l) {
        std::vector<double> w;
        w.reserve(static_cast<std::size_t>(model.weights[l].size()));
        for (Eigen::Index i = 0; i < model.weights[l].rows(); ++i)
            for (Eigen::Index k = 0; k < model.weights[l].cols(); ++k) w.push_back(model.weights[l](i, k));
        layers.push_back({{"weights_row_major", w}, {"bias", to_vec(model.biases[l])}});
    }
    return {{"layer_dims", model.layer_dims},
            {"hidden_activation", "tanh"},
            {"output_activation", "linear"},
            {"layers", layers},
            {"input_mean", to_vec(model.input.mean)},
            {"input_scale", to_vec(model.input.scale)},
            {"target_mean", {model.target_mean(0), model.target_mean(1)}},
            {"target_scale", {model.target_scale(0), model.target_scale(1)}}};
}

NNModel model_from_json(const json& j) {
    try {
        NNModel m;
        m.layer_dims = j.at("layer_dims").get<std::vector<int>>();
        const auto& layers = j.at("layers");
        if (layers.size() + 1 != m.layer_dims.size()) throw FormatError("layer count does not match layer_dims");
        for (std::size_t l = 0; l < layers.size(); ++l) {
            const auto w = layers[l].at("weights_row_major").get<std::vector<double>>();
            const int rows = m.layer_dims[l + 1], cols = m.layer_dims[l];
            if (w.size() != static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols))
                throw FormatError("weight array of layer " + std::to_string(l) + " has the wrong size");
            m.weights.push_back(Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
                w.data(), rows, cols));
            m.biases.push_back(from_vec(layers[l].at("bias")));
        }
        m.input.mean = from_vec(j.at("input_mean"));
        m.input.scale = from_vec(j.at("input_scale"));
        m.target_mean = Eigen::Vector2d(j.at("target_mean").at(0), j.at("target_mean").at(1));
        m.target_scale = Eigen::Vector2d(j.at("target_scale").at(0), j.at("target_scale").at(1));
        m.validate();
        return m;
    } catch (const json::exception& e) {
        throw FormatError(std::string("malformed model file: ") + e.what());
    }
}

json to_json(const FeatureSchema& s) {
    return {{"method", std::string(to_string(s.method))},
            {"m", s.m},
            {"N", s.n_funcs},
            {"paths", s.paths},
            {"ordering", s.ordering},
            {"length", s.length()},
            {"columns", s.column_names()}};
}

FeatureSchema schema_from_json(const json& j) {
    try {
        FeatureSchema s;
        s.method = parse_method(j.at("method").get<std::string>());
        s.m = j.at("m");
        s.n_funcs = j.at("N");
        s.paths = j.at("paths");
        s.ordering = j.at("ordering");
        return s;
    } catch (const json::exception& e) {
        throw FormatError(std::string("malformed feature schema: ") + e.what());
    }
}

json read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

void write_json(const std::filesystem::path& path, const json& j) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

std::filesystem::path schema_path_for(const std::filesystem::path& csv) {
    auto p = csv;
    p.replace_extension(".schema.json");
    return p;
}

void write_feature_table(const std::filesystem::path& csv, const FeatureTable& table) {
    if (table.values.rows() != static_cast<Eigen::Index>(table.labels.size()) ||
        table.values.cols() != static_cast<Eigen::Index>(table.schema.length()))
        throw PreconditionError("feature table shape does not match its labels and schema");
    if (csv.has_parent_path()) std::filesystem::create_directories(csv.parent_path());
    std::ofstream out(csv);
    if (!out) throw Error("cannot write " + csv.string());
    out << "label";
    for (const auto& c : table.schema.column_names()) out << ',' << c;
    out << '\n' << std::setprecision(17);
    for (Eigen::Index i = 0; i < table.values.rows(); ++i) {
        out << table.labels[static_cast<std::size_t>(i)];
        for (Eigen::Index j = 0; j < table.values.cols(); ++j) out << ',' << table.values(i, j);
        out << '\n';
    }
    write_json(schema_path_for(csv), to_json(table.schema));
}

FeatureTable read_feature_table(const std::filesystem::path& csv) {
    FeatureTable t;
    t.schema = schema_from_json(read_json(schema_path_for(csv)));
    std::ifstream in(csv);
    if (!in) throw FormatError("cannot open " + csv.string());
    std::string line;
    if (!std::getline(in, line)) throw FormatError(csv.string() + ": empty file");
    const auto header = split_csv(strip_cr(line));
    if (header.empty() || header.front() != "label" || header.size() != t.schema.length() + 1)
        throw FormatError(csv.string() + ": header does not match the companion schema");
    std::vector<std::vector<double>> rows;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        line = strip_cr(line);
        if (line.empty()) continue;
        const auto cells = split_csv(line);
        if (cells.size() != header.size())
            throw FormatError(csv.string() + ":" + std::to_string(lineno) + ": wrong column count");
        t.labels.push_back(cells[0]);
        std::vector<double> r;
        for (std::size_t k = 1; k < cells.size(); ++k) r.push_back(parse_double(cells[k], csv, lineno));
        rows.push_back(std::move(r));
    }
    t.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(t.schema.length()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[i].size(); ++j)
            t.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    return t;
}

void write_targets(const std::filesystem::path& csv, const std::vector<TargetRow>& rows) {
    if (csv.has_parent_path()) std::filesystem::create_directories(csv.parent_path());
    std::ofstream out(csv);
    if (!out) throw Error("cannot write " + csv.string());
    out << "label,x_m,y_m,split\n" << std::setprecision(17);
    for (const auto& r : rows)
        out << r.label << ',' << r.x_m << ',' << r.y_m << ',' << (r.split == Split::Train ? "train" : "test") << '\n';
}

std::vector<TargetRow> read_targets(const std::filesystem::path& csv) {
    std::ifstream in(csv);
    if (!in) throw FormatError("cannot open " + csv.string());
    std::string line;
    if (!std::getline(in, line) || strip_cr(line) != "label,x_m,y_m,split")
        throw FormatError(csv.string() + ": expected header label,x_m,y_m,split");
    std::vector<TargetRow> out;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        line = strip_cr(line);
        if (line.empty()) continue;
        const auto c = split_csv(line);
        if (c.size() != 4) throw FormatError(csv.string() + ":" + std::to_string(lineno) + ": wrong column count");
        if (c[3] != "train" && c[3] != "test")
            throw FormatError(csv.string() + ":" + std::to_string(lineno) + ": split must be train or test");
        out.push_back({c[0], parse_double(c[1], csv, lineno), parse_double(c[2], csv, lineno),
                       c[3] == "train" ? Split::Train : Split::Test});
    }
    return out;
}

LabeledData join(const FeatureTable& table, const std::vector<TargetRow>& targets, Split split) {
    std::map<std::string, Eigen::Index> row_of;
    for (std::size_t i = 0; i < table.labels.size(); ++i) row_of[table.labels[i]] = static_cast<Eigen::Index>(i);
    std::vector<const TargetRow*> picked;
    for (const auto& t : targets) {
        if (t.split != split) continue;
        if (!row_of.count(t.label)) throw FormatError("no feature row for case " + t.label);
        picked.push_back(&t);
    }
    LabeledData out;
    out.features.resize(static_cast<Eigen::Index>(picked.size()), table.values.cols());
    out.targets.resize(static_cast<Eigen::Index>(picked.size()), 2);
    for (std::size_t i = 0; i < picked.size(); ++i) {
        const auto r = static_cast<Eigen::Index>(i);
        out.labels.push_back(picked[i]->label);
        out.features.row(r) = table.values.row(row_of.at(picked[i]->label));
        out.targets(r, 0) = picked[i]->x_m;
        out.targets(r, 1) = picked[i]->y_m;
    }
    return out;
}

}  // namespace lambmp

#include "lambmp/damage_db.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>

#include <json.hpp>

#include "lambmp/error.hpp"

namespace lambmp {

using nlohmann::json;

double distance(const Point& a, const Point& b) noexcept { return std::hypot(a.x_m - b.x_m, a.y_m - b.y_m); }

SensorLayout SensorLayout::default_layout() {
    return SensorLayout{{{0.05, 0.05}, {0.25, 0.05}, {0.25, 0.25}, {0.05, 0.25}, {0.15, 0.05}}, 0, 0.3, 0.3};
}

bool SensorLayout::contains(const Point& p) const noexcept {
    return p.x_m >= 0.0 && p.x_m <= plate_width_m && p.y_m >= 0.0 && p.y_m <= plate_height_m;
}

void SensorLayout::validate() const {
    if (pzt_positions.size() < 2) throw PreconditionError("layout needs at least two PZTs");
    if (actuator_index >= pzt_positions.size()) throw PreconditionError("actuator index out of range");
    for (const auto& p : pzt_positions)
        if (!contains(p)) throw PreconditionError("PZT position outside the plate");
}

std::vector<std::size_t> Database::indices(Split split) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < cases.size(); ++i)
        if (cases[i].split == split) out.push_back(i);
    return out;
}

Signal gen_baseline(const Point& actuator, const Point& sensor, const PlateModel& plate, const Signal& burst,
                    std::size_t out_len, A0Form form) {
    const double d = distance(actuator, sensor);
    if (!(d > 0.0)) throw PreconditionError("actuator and sensor coincide");
    return propagate(burst, d, plate, ModeSet{}, PropagateOptions{out_len, form});
}

Signal gen_damaged(const Point& actuator, const Point& sensor, const DamageCase& damage, const PlateModel& plate,
                   const Signal& burst, std::size_t out_len, A0Form form) {
    Signal out = gen_baseline(actuator, sensor, plate, burst, out_len, form);
    if (damage.reflection_coeff == 0.0) return out;
    const double scatter = distance(actuator, damage.position()) + distance(damage.position(), sensor);
    out += damage.reflection_coeff * propagate(burst, scatter, plate, ModeSet{}, PropagateOptions{out_len, form});
    return out;
}

Signal add_noise(const Signal& x, double snr_db, std::uint64_t seed) {
    if (!std::isfinite(snr_db)) throw PreconditionError("SNR must be finite");
    double power = 0.0;
    for (double v : x.samples()) power += v * v;
    power /= static_cast<double>(x.size());
    const double sigma = std::sqrt(power * std::pow(10.0, -snr_db / 10.0));
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, 1.0);
    std::vector<double> out(x.samples().begin(), x.samples().end());
    for (double& v : out) v += sigma * noise(rng);
    return Signal(std::move(out), x.sample_rate_hz());
}

std::string case_label(double x_m, double y_m) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "x%03ld_y%03ld", std::lround(x_m * 1000.0), std::lround(y_m * 1000.0));
    return buf;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Independent stream per (case, path, role) so results do not depend on generation order.
std::uint64_t stream_seed(std::uint64_t master, std::size_t case_index, std::size_t path, std::size_t role) {
    std::uint64_t s = splitmix64(master);
    s = splitmix64(s ^ (case_index + 1));
    s = splitmix64(s ^ ((path + 1) << 8));
    return splitmix64(s ^ (role + 1));
}

}  // namespace

Database gen_database(const DatabaseConfig& config) {
    config.plate.validate();
    config.layout.validate();
    if (config.damage_x_m.empty() || config.damage_y_m.empty()) throw PreconditionError("damage grid is empty");
    // 0 is accepted as a damage-free control run.
    if (!(config.reflection_coeff >= 0.0 && config.reflection_coeff <= 1.0))
        throw PreconditionError("reflection coefficient must lie in [0, 1]");

    const Signal burst = make_tone_burst(config.burst);
    const auto& pzts = config.layout.pzt_positions;
    const std::size_t act = config.layout.actuator_index;

    Database db{config, {}};
    std::vector<Signal> baselines;
    for (std::size_t s = 0; s < pzts.size(); ++s) {
        if (s == act) continue;
        baselines.push_back(gen_baseline(pzts[act], pzts[s], config.plate, burst, config.signal_len, config.a0_form));
    }

    for (double x : config.damage_x_m) {
        for (double y : config.damage_y_m) {
            const std::size_t ci = db.cases.size();
            DamageCase damage{x, y, config.reflection_coeff, case_label(x, y)};
            if (!config.layout.contains(damage.position())) throw PreconditionError("damage outside the plate");
            CaseRecord rec{damage, {}, Split::Train};
            std::size_t pi = 0;
            for (std::size_t s = 0; s < pzts.size(); ++s) {
                if (s == act) continue;
                const Signal& clean_base = baselines[pi];
                const Signal clean_dam =
                    gen_damaged(pzts[act], pzts[s], damage, config.plate, burst, config.signal_len, config.a0_form);
                Signal base = clean_base;
                Signal dam = clean_dam;
                if (config.add_noise) {
                    base = add_noise(clean_base, config.snr_db, stream_seed(config.seed, ci, pi, 0));
                    dam = add_noise(clean_dam, config.snr_db, stream_seed(config.seed, ci, pi, 1));
                }
                Signal residual = dam - base;
                rec.paths.push_back(PathRecord{act, s, std::move(base), std::move(dam), std::move(residual),
                                               config.add_noise ? config.snr_db : std::numeric_limits<double>::infinity()});
                ++pi;
            }
            db.cases.push_back(std::move(rec));
        }
    }

    if (config.n_test >= db.cases.size()) throw PreconditionError("test split leaves no training cases");
    std::vector<std::size_t> order(db.cases.size());
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(splitmix64(config.seed ^ 0x5eedULL));
    for (std::size_t i = order.size() - 1; i > 0; --i) {
        std::uniform_int_distribution<std::size_t> pick(0, i);
        std::swap(order[i], order[pick(rng)]);
    }
    for (std::size_t i = 0; i < config.n_test; ++i) db.cases[order[i]].split = Split::Test;
    return db;
}

namespace {

json layout_json(const SensorLayout& layout) {
    json pos = json::array();
    for (const auto& p : layout.pzt_positions) pos.push_back({p.x_m, p.y_m});
    return {{"pzt_positions", pos},
            {"actuator_index", layout.actuator_index},
            {"plate_width_m", layout.plate_width_m},
            {"plate_height_m", layout.plate_height_m}};
}

std::string path_file(std::size_t a, std::size_t s) { return std::to_string(a) + "-" + std::to_string(s) + ".csv"; }

}  // namespace

void write_database(const Database& db, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    const auto& c = db.config;
    json cases = json::array();
    for (const auto& rec : db.cases) {
        const auto case_dir = dir / rec.damage.label;
        std::filesystem::create_directories(case_dir);
        json paths = json::array();
        for (const auto& p : rec.paths) {
            write_signal_csv(case_dir / path_file(p.actuator, p.sensor), p.residual);
            paths.push_back({{"actuator", p.actuator},
                             {"sensor", p.sensor},
                             {"file", rec.damage.label + "/" + path_file(p.actuator, p.sensor)}});
        }
        cases.push_back({{"label", rec.damage.label},
                         {"x_m", rec.damage.x_m},
                         {"y_m", rec.damage.y_m},
                         {"reflection_coeff", rec.damage.reflection_coeff},
                         {"split", rec.split == Split::Train ? "train" : "test"},
                         {"paths", paths}});
    }
    json manifest = {
        {"plate", {{"E", c.plate.E}, {"nu", c.plate.nu}, {"rho", c.plate.rho}, {"h", c.plate.h}}},
        {"burst",
         {{"f0_hz", c.burst.f0_hz},
          {"n_cycles", c.burst.n_cycles},
          {"sample_rate_hz", c.burst.sample_rate_hz},
          {"amplitude", c.burst.amplitude}}},
        {"layout", layout_json(c.layout)},
        {"damage_x_m", c.damage_x_m},
        {"damage_y_m", c.damage_y_m},
        {"reflection_coeff", c.reflection_coeff},
        {"snr_db", c.snr_db},
        {"add_noise", c.add_noise},
        {"seed", c.seed},
        {"signal_len", c.signal_len},
        {"n_test", c.n_test},
        {"a0_form", std::string(to_string(c.a0_form))},
        {"cases", cases},
    };
    std::ofstream out(dir / "manifest.json");
    if (!out) throw Error("cannot write manifest in " + dir.string());
    out << manifest.dump(2) << '\n';
}

Database read_database(const std::filesystem::path& dir) {
    std::ifstream in(dir / "manifest.json");
    if (!in) throw FormatError("no manifest.json in " + dir.string());
    json m;
    try {
        in >> m;
        DatabaseConfig c;
        c.plate = PlateModel{m.at("plate").at("E"), m.at("plate").at("nu"), m.at("plate").at("rho"),
                             m.at("plate").at("h")};
        const auto& b = m.at("burst");
        c.burst = BurstSpec{b.at("f0_hz"), b.at("n_cycles"), b.at("sample_rate_hz"), b.at("amplitude")};
        const auto& l = m.at("layout");
        c.layout.pzt_positions.clear();
        for (const auto& p : l.at("pzt_positions")) c.layout.pzt_positions.push_back({p.at(0), p.at(1)});
        c.layout.actuator_index = l.at("actuator_index");
        c.layout.plate_width_m = l.at("plate_width_m");
        c.layout.plate_height_m = l.at("plate_height_m");
        c.damage_x_m = m.at("damage_x_m").get<std::vector<double>>();
        c.damage_y_m = m.at("damage_y_m").get<std::vector<double>>();
        c.reflection_coeff = m.at("reflection_coeff");
        c.snr_db = m.at("snr_db");
        c.add_noise = m.at("add_noise");
        c.seed = m.at("seed");
        c.signal_len = m.at("signal_len");
        c.n_test = m.at("n_test");
        c.a0_form = parse_a0_form(m.at("a0_form").get<std::string>());

        Database db{c, {}};
        for (const auto& jc : m.at("cases")) {
            CaseRecord rec{DamageCase{jc.at("x_m"), jc.at("y_m"), jc.at("reflection_coeff"), jc.at("label")},
                           {},
                           jc.at("split") == "test" ? Split::Test : Split::Train};
            for (const auto& jp : jc.at("paths")) {
                Signal r = read_signal_csv(dir / jp.at("file").get<std::string>());
                Signal zero = Signal::zeros(r.size(), r.sample_rate_hz());
                rec.paths.push_back(PathRecord{jp.at("actuator"), jp.at("sensor"), zero, r, r, c.snr_db});
            }
            db.cases.push_back(std::move(rec));
        }
        return db;
    } catch (const json::exception& e) {
        throw FormatError(dir.string() + "/manifest.json: " + e.what());
    }
}

}  // namespace lambmp

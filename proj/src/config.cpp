#include "tkv/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

extern char** environ;

namespace tkv::config {
namespace {

using nlohmann::json;

// --- schema tables ---------------------------------------------------------

const std::map<std::string, std::set<std::string>>& section_schema() {
    static const std::map<std::string, std::set<std::string>> schema = {
        {"beam", {"rho1", "rho2", "k1", "k2", "length"}},
        {"damping", {"kind", "d0", "alpha", "beta", "pieces", "floor"}},
        {"grid", {"n_cells"}},
        {"time", {"dt", "t_final", "stride"}},
        {"initial", {"n_max", "amplitude_power"}},
        {"fit", {"t_lo", "t_hi"}},
        {"spectral", {"c", "case_override"}},
        {"spectrum", {"branches", "n_lo", "n_hi", "verify_boxes"}},
        {"resolvent", {"n_lo", "n_hi", "tol", "frequencies"}},
        {"verify", {"suite"}},
    };
    return schema;
}

const std::set<std::string>& top_level_scalars() {
    static const std::set<std::string> keys = {"bc", "seed", "threads", "out"};
    return keys;
}

// --- typed field access with path-tagged errors ----------------------------

class SectionReader {
  public:
    SectionReader(const json& node, std::string path)
        : node_(node), path_(std::move(path)) {
        if (!node_.is_object())
            throw ConfigError(path_, "expected an object");
    }

    void finish(const std::set<std::string>& allowed) const {
        for (const auto& item : node_.items())
            if (!allowed.count(item.key()))
                throw ConfigError(path_ + "." + item.key(), "unknown key");
    }

    bool has(const char* key) const { return node_.contains(key); }

    double number(const char* key, double fallback) const {
        if (!has(key)) return fallback;
        const json& v = node_.at(key);
        if (!v.is_number()) throw ConfigError(field(key), "expected a number");
        const double x = v.get<double>();
        if (!std::isfinite(x)) throw ConfigError(field(key), "must be finite");
        return x;
    }

    double positive(const char* key, double fallback) const {
        const double x = number(key, fallback);
        if (!(x > 0.0)) throw ConfigError(field(key), "must be positive");
        return x;
    }

    long integer(const char* key, long fallback) const {
        if (!has(key)) return fallback;
        const json& v = node_.at(key);
        if (!v.is_number_integer())
            throw ConfigError(field(key), "expected an integer");
        return v.get<long>();
    }

    bool boolean(const char* key, bool fallback) const {
        if (!has(key)) return fallback;
        const json& v = node_.at(key);
        if (!v.is_boolean()) throw ConfigError(field(key), "expected a boolean");
        return v.get<bool>();
    }

    std::string text(const char* key, const std::string& fallback) const {
        if (!has(key)) return fallback;
        const json& v = node_.at(key);
        if (!v.is_string()) throw ConfigError(field(key), "expected a string");
        return v.get<std::string>();
    }

    std::string enumeration(const char* key, const std::string& fallback,
                            std::initializer_list<const char*> values) const {
        const std::string s = text(key, fallback);
        for (const char* v : values)
            if (s == v) return s;
        std::ostringstream msg;
        msg << "must be one of {";
        bool first = true;
        for (const char* v : values) {
            if (!first) msg << ", ";
            msg << v;
            first = false;
        }
        msg << "}, got \"" << s << "\"";
        throw ConfigError(field(key), msg.str());
    }

    const json& raw(const char* key) const { return node_.at(key); }
    std::string field(const char* key) const { return path_ + "." + key; }

  private:
    const json& node_;
    std::string path_;
};

json empty_object() { return json::object(); }

const json& section_or_empty(const json& doc, const char* name) {
    static const json empty = empty_object();
    if (!doc.contains(name)) return empty;
    return doc.at(name);
}

DampingProfile build_damping(const json& doc, const BeamParameters& beam,
                             std::string* kind_out) {
    const SectionReader sec(section_or_empty(doc, "damping"), "damping");
    sec.finish(section_schema().at("damping"));
    const std::string kind =
        sec.enumeration("kind", "constant", {"zero", "constant", "piecewise"});
    *kind_out = kind;

    if (kind == "zero") return DampingProfile::zero();

    if (kind == "constant") {
        const double d0 = sec.positive("d0", 1.0);
        const double alpha = sec.number("alpha", 0.0);
        const double beta = sec.number("beta", beam.length);
        if (!(alpha >= 0.0 && alpha < beta && beta <= beam.length))
            throw ConfigError("damping",
                              "support must satisfy 0 <= alpha < beta <= length");
        if (alpha == 0.0 && beta == beam.length)
            return DampingProfile::global_constant(d0, beam.length);
        return DampingProfile::piecewise_constant(d0, alpha, beta);
    }

    // piecewise: explicit table
    if (!sec.has("pieces"))
        throw ConfigError("damping.pieces", "required for kind \"piecewise\"");
    const json& arr = sec.raw("pieces");
    if (!arr.is_array() || arr.empty())
        throw ConfigError("damping.pieces", "expected a non-empty array");
    DampingProfile profile;
    profile.kind = DampingProfile::Kind::PiecewiseConstant;
    double min_pos = 0.0, lo = beam.length, hi = 0.0;
    bool any_pos = false;
    for (std::size_t i = 0; i < arr.size(); ++i) {
        const std::string path = "damping.pieces[" + std::to_string(i) + "]";
        const SectionReader piece(arr[i], path);
        piece.finish({"x_lo", "x_hi", "value"});
        DampingProfile::Piece p;
        p.x_lo = piece.number("x_lo", 0.0);
        p.x_hi = piece.number("x_hi", 0.0);
        p.value = piece.number("value", 0.0);
        if (!(p.x_lo < p.x_hi))
            throw ConfigError(path, "requires x_lo < x_hi");
        if (p.value < 0.0) throw ConfigError(path + ".value", "must be >= 0");
        if (p.value > 0.0) {
            any_pos = true;
            lo = std::min(lo, p.x_lo);
            hi = std::max(hi, p.x_hi);
            min_pos = min_pos > 0.0 ? std::min(min_pos, p.value) : p.value;
        }
        profile.pieces.push_back(p);
    }
    if (!any_pos)
        throw ConfigError("damping.pieces",
                          "needs at least one piece with positive value");
    profile.support_lo = sec.number("alpha", lo);
    profile.support_hi = sec.number("beta", hi);
    profile.floor = sec.positive("floor", min_pos);
    return profile;
}

std::string to_lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return s;
}

std::vector<std::string> split_path(const std::string& s) {
    std::vector<std::string> parts;
    std::size_t pos = 0;
    while (pos <= s.size()) {
        const std::size_t sep = s.find("__", pos);
        if (sep == std::string::npos) {
            parts.push_back(s.substr(pos));
            break;
        }
        parts.push_back(s.substr(pos, sep - pos));
        pos = sep + 2;
    }
    return parts;
}

}  // namespace

void apply_env_overrides(nlohmann::json& doc, const std::string& prefix) {
    for (char** env = environ; *env != nullptr; ++env) {
        const std::string entry(*env);
        if (entry.compare(0, prefix.size(), prefix) != 0) continue;
        const std::size_t eq = entry.find('=');
        if (eq == std::string::npos) continue;
        const std::string name = entry.substr(prefix.size(), eq - prefix.size());
        if (name == "SIMD" || name == "CLI_PATH") continue;  // runtime knobs
        const std::string value = entry.substr(eq + 1);

        const std::vector<std::string> parts = split_path(to_lower(name));
        const bool known =
            (parts.size() == 1 && top_level_scalars().count(parts[0])) ||
            (parts.size() == 2 && section_schema().count(parts[0]) &&
             section_schema().at(parts[0]).count(parts[1]));
        if (!known)
            throw ConfigError(prefix + name,
                              "does not name a configuration key");

        json parsed = json::parse(value, nullptr, /*allow_exceptions=*/false);
        if (parsed.is_discarded()) parsed = value;  // plain string

        if (parts.size() == 1) {
            doc[parts[0]] = parsed;
        } else {
            if (!doc.contains(parts[0]) || !doc[parts[0]].is_object())
                doc[parts[0]] = json::object();
            doc[parts[0]][parts[1]] = parsed;
        }
    }
}

RunConfig parse_run_config(const nlohmann::json& doc) {
    if (!doc.is_object()) throw ConfigError("", "top level must be an object");
    for (const auto& item : doc.items()) {
        if (!section_schema().count(item.key()) &&
            !top_level_scalars().count(item.key()))
            throw ConfigError(item.key(), "unknown key");
    }

    RunConfig cfg;

    {
        const SectionReader sec(section_or_empty(doc, "beam"), "beam");
        sec.finish(section_schema().at("beam"));
        cfg.beam.rho1 = sec.positive("rho1", 1.0);
        cfg.beam.rho2 = sec.positive("rho2", 1.0);
        cfg.beam.k1 = sec.positive("k1", 1.0);
        cfg.beam.k2 = sec.positive("k2", 1.0);
        cfg.beam.length = sec.positive("length", 1.0);
    }
    {
        const SectionReader top(doc, "");
        const std::string bc = top.enumeration(
            "bc", "dirichlet-neumann", {"fully-dirichlet", "dirichlet-neumann"});
        cfg.bc = bc == "fully-dirichlet" ? BoundaryConditions::FullyDirichlet
                                         : BoundaryConditions::DirichletNeumann;
        const long seed = top.integer("seed", 42);
        if (seed < 0) throw ConfigError("seed", "must be >= 0");
        cfg.seed = static_cast<std::uint64_t>(seed);
        const long threads = top.integer("threads", 1);
        if (threads < 1) throw ConfigError("threads", "must be >= 1");
        cfg.threads = static_cast<int>(threads);
        cfg.out = top.text("out", "");
    }
    cfg.damping = build_damping(doc, cfg.beam, &cfg.damping_kind);
    {
        const SectionReader sec(section_or_empty(doc, "grid"), "grid");
        sec.finish(section_schema().at("grid"));
        const long n = sec.integer("n_cells", 400);
        if (n < 8) throw ConfigError("grid.n_cells", "must be >= 8");
        cfg.n_cells = static_cast<std::size_t>(n);
    }
    {
        const SectionReader sec(section_or_empty(doc, "time"), "time");
        sec.finish(section_schema().at("time"));
        cfg.dt = sec.number("dt", 0.0);
        if (cfg.dt < 0.0) throw ConfigError("time.dt", "must be >= 0");
        cfg.t_final = sec.positive("t_final", 200.0);
        const long stride = sec.integer("stride", 1);
        if (stride < 1) throw ConfigError("time.stride", "must be >= 1");
        cfg.stride = static_cast<std::size_t>(stride);
    }
    {
        const SectionReader sec(section_or_empty(doc, "initial"), "initial");
        sec.finish(section_schema().at("initial"));
        const long n_max = sec.integer("n_max", 64);
        if (n_max < 1) throw ConfigError("initial.n_max", "must be >= 1");
        cfg.init_n_max = static_cast<std::size_t>(n_max);
        cfg.init_amplitude_power = sec.number("amplitude_power", -0.5);
    }
    {
        const SectionReader sec(section_or_empty(doc, "fit"), "fit");
        sec.finish(section_schema().at("fit"));
        cfg.fit_t_lo = sec.number("t_lo", 0.0);
        cfg.fit_t_hi = sec.number("t_hi", 0.0);
        if (cfg.fit_t_lo < 0.0 || cfg.fit_t_hi < 0.0)
            throw ConfigError("fit", "window endpoints must be >= 0");
        if (cfg.fit_t_hi > 0.0 && !(cfg.fit_t_lo < cfg.fit_t_hi))
            throw ConfigError("fit", "requires t_lo < t_hi");
    }
    {
        const SectionReader sec(section_or_empty(doc, "spectral"), "spectral");
        sec.finish(section_schema().at("spectral"));
        cfg.c = sec.positive("c", 1.0);
        const long ov = sec.integer("case_override", 0);
        if (ov < 0 || ov > 3)
            throw ConfigError("spectral.case_override", "must be 0..3");
        cfg.case_override = static_cast<int>(ov);
    }
    {
        const SectionReader sec(section_or_empty(doc, "spectrum"), "spectrum");
        sec.finish(section_schema().at("spectrum"));
        if (sec.has("branches")) {
            const json& arr = sec.raw("branches");
            if (!arr.is_array() || arr.empty())
                throw ConfigError("spectrum.branches",
                                  "expected a non-empty array");
            cfg.branches.clear();
            for (const auto& b : arr) {
                if (!b.is_number_integer() ||
                    (b.get<long>() != 1 && b.get<long>() != 2))
                    throw ConfigError("spectrum.branches",
                                      "entries must be 1 or 2");
                cfg.branches.push_back(static_cast<int>(b.get<long>()));
            }
        }
        cfg.n_lo = sec.integer("n_lo", 50);
        cfg.n_hi = sec.integer("n_hi", 100);
        cfg.verify_boxes = sec.boolean("verify_boxes", true);
    }
    {
        const SectionReader sec(section_or_empty(doc, "resolvent"), "resolvent");
        sec.finish(section_schema().at("resolvent"));
        cfg.res_n_lo = sec.integer("n_lo", 10);
        cfg.res_n_hi = sec.integer("n_hi", 80);
        if (cfg.res_n_lo < 1 || cfg.res_n_hi < cfg.res_n_lo)
            throw ConfigError("resolvent", "requires 1 <= n_lo <= n_hi");
        cfg.res_tol = sec.positive("tol", 1e-6);
        cfg.res_frequencies = sec.enumeration(
            "frequencies", "auto", {"auto", "blowup", "branch1", "branch2"});
    }
    {
        const SectionReader sec(section_or_empty(doc, "verify"), "verify");
        sec.finish(section_schema().at("verify"));
        cfg.suite = sec.enumeration(
            "suite", "all",
            {"identities", "decay", "blowup", "resolvent", "all"});
    }

    // normalized echo of the effective configuration
    json damping_echo = {{"kind", cfg.damping_kind}};
    if (cfg.damping_kind != "zero") {
        damping_echo["alpha"] = cfg.damping.support_lo;
        damping_echo["beta"] = cfg.damping.support_hi;
        damping_echo["floor"] = cfg.damping.floor;
        // constant profiles are uniform, so the floor IS the level; echoing
        // it under its input name keeps the echo reparseable to the same
        // effective configuration
        if (cfg.damping_kind == "constant")
            damping_echo["d0"] = cfg.damping.floor;
        if (cfg.damping_kind == "piecewise") {
            json pieces = json::array();
            for (const auto& p : cfg.damping.pieces)
                pieces.push_back(
                    {{"x_lo", p.x_lo}, {"x_hi", p.x_hi}, {"value", p.value}});
            damping_echo["pieces"] = pieces;
        }
    }
    cfg.echo = {
        {"beam",
         {{"rho1", cfg.beam.rho1},
          {"rho2", cfg.beam.rho2},
          {"k1", cfg.beam.k1},
          {"k2", cfg.beam.k2},
          {"length", cfg.beam.length}}},
        {"bc", cfg.bc == BoundaryConditions::FullyDirichlet
                   ? "fully-dirichlet"
                   : "dirichlet-neumann"},
        {"damping", damping_echo},
        {"grid", {{"n_cells", cfg.n_cells}}},
        {"time",
         {{"dt", cfg.dt}, {"t_final", cfg.t_final}, {"stride", cfg.stride}}},
        {"initial",
         {{"n_max", cfg.init_n_max},
          {"amplitude_power", cfg.init_amplitude_power}}},
        {"fit", {{"t_lo", cfg.fit_t_lo}, {"t_hi", cfg.fit_t_hi}}},
        {"spectral", {{"c", cfg.c}, {"case_override", cfg.case_override}}},
        {"spectrum",
         {{"branches", cfg.branches},
          {"n_lo", cfg.n_lo},
          {"n_hi", cfg.n_hi},
          {"verify_boxes", cfg.verify_boxes}}},
        {"resolvent",
         {{"n_lo", cfg.res_n_lo},
          {"n_hi", cfg.res_n_hi},
          {"tol", cfg.res_tol},
          {"frequencies", cfg.res_frequencies}}},
        {"verify", {{"suite", cfg.suite}}},
        {"seed", cfg.seed},
        {"threads", cfg.threads},
        {"out", cfg.out},
    };
    return cfg;
}

RunConfig load_run_config(const std::string& path, bool env_overrides) {
    std::ifstream in(path);
    if (!in) throw ConfigError("", "cannot open config file: " + path);
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("", std::string("JSON parse failure: ") + e.what());
    }
    if (env_overrides) apply_env_overrides(doc);
    return parse_run_config(doc);
}

}  // namespace tkv::config

#include "kerrnet/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace kerrnet {

using nlohmann::json;

ConfigError::ConfigError(const std::string& source, int line, const std::string& message)
    : ContractError(source + (line > 0 ? ":" + std::to_string(line) : std::string()) + ": " + message), line_(line) {}

namespace {

std::optional<double> parse_number(std::string_view s) {
    if (s.empty()) {
        return std::nullopt;
    }
    if (s.front() == '+') {
        s.remove_prefix(1);
    }
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
        return std::nullopt;
    }
    return v;
}

std::string join(const std::vector<std::string>& path) {
    std::string out;
    for (const auto& p : path) {
        out += (out.empty() ? "" : ".") + p;
    }
    return out;
}

/// Error context: maps dotted paths back to lines of the source text.
class Doc {
public:
    Doc(const std::string& text, std::string source) : text_(text), source_(std::move(source)) {}

    void mark_override(const std::string& path) { overridden_.insert(path); }

    [[noreturn]] void fail(const std::vector<std::string>& path, const std::string& message) const {
        const std::string dotted = join(path);
        for (const auto& o : overridden_) {
            if (dotted == o || dotted.starts_with(o + ".") || o.starts_with(dotted + ".")) {
                throw ConfigError(source_, 0, "--set " + o + ": " + dotted + ": " + message);
            }
        }
        throw ConfigError(source_, line_of(path), (dotted.empty() ? std::string() : dotted + ": ") + message);
    }

    int line_of(const std::vector<std::string>& path) const {
        std::size_t pos = 0;
        std::size_t found = std::string::npos;
        for (const auto& key : path) {
            const auto hit = text_.find("\"" + key + "\"", pos);
            if (hit == std::string::npos) {
                break;
            }
            found = hit;
            pos = hit + key.size() + 2;
        }
        if (found == std::string::npos) {
            return 0;
        }
        return 1 + static_cast<int>(std::count(text_.begin(), text_.begin() + static_cast<long>(found), '\n'));
    }

private:
    const std::string& text_;
    std::string source_;
    std::set<std::string> overridden_;
};

/// Typed view of one JSON object section.
class Section {
public:
    Section(const Doc& doc, const json& root, std::vector<std::string> path) : doc_(doc), path_(std::move(path)) {
        const json* node = &root;
        for (const auto& key : path_) {
            if (!node->contains(key)) {
                node = nullptr;
                break;
            }
            node = &(*node)[key];
        }
        if (node && !node->is_object()) {
            doc_.fail(path_, "must be an object");
        }
        obj_ = node;
    }

    void allow(std::initializer_list<const char*> keys) const {
        if (!obj_) {
            return;
        }
        for (const auto& [key, value] : obj_->items()) {
            if (std::none_of(keys.begin(), keys.end(), [&](const char* k) { return key == k; })) {
                doc_.fail(at(key), "unknown key");
            }
        }
    }

    bool has(const std::string& key) const { return obj_ && obj_->contains(key) && !(*obj_)[key].is_null(); }
    const json& raw(const std::string& key) const { return (*obj_)[key]; }
    std::vector<std::string> at(const std::string& key) const {
        auto p = path_;
        p.push_back(key);
        return p;
    }
    [[noreturn]] void fail(const std::string& key, const std::string& message) const { doc_.fail(at(key), message); }

    double number(const std::string& key, double fallback) const {
        if (!has(key)) {
            return fallback;
        }
        const json& v = raw(key);
        if (!v.is_number()) {
            fail(key, "expected a number");
        }
        const double x = v.get<double>();
        if (!std::isfinite(x)) {
            fail(key, "must be finite");
        }
        return x;
    }

    std::optional<double> optional_number(const std::string& key) const {
        if (!has(key)) {
            return std::nullopt;
        }
        return number(key, 0.0);
    }

    double phase(const std::string& key, double fallback) const {
        if (!has(key)) {
            return fallback;
        }
        const json& v = raw(key);
        if (v.is_string()) {
            const auto p = parse_phase(v.get<std::string>());
            if (!p) {
                fail(key, "cannot parse phase '" + v.get<std::string>() + "'");
            }
            return *p;
        }
        return number(key, fallback);
    }

    std::optional<double> optional_phase(const std::string& key) const {
        if (!has(key)) {
            return std::nullopt;
        }
        return phase(key, 0.0);
    }

    long long integer(const std::string& key, long long fallback) const {
        if (!has(key)) {
            return fallback;
        }
        const json& v = raw(key);
        if (!v.is_number_integer()) {
            if (v.is_number_float()) {
                const double x = v.get<double>();
                if (std::floor(x) == x && std::abs(x) < 1e15) {
                    return static_cast<long long>(x);
                }
            }
            fail(key, "expected an integer");
        }
        return v.get<long long>();
    }

    bool boolean(const std::string& key, bool fallback) const {
        if (!has(key)) {
            return fallback;
        }
        if (!raw(key).is_boolean()) {
            fail(key, "expected true or false");
        }
        return raw(key).get<bool>();
    }

    std::string string(const std::string& key, const std::string& fallback) const {
        if (!has(key)) {
            return fallback;
        }
        if (!raw(key).is_string()) {
            fail(key, "expected a string");
        }
        return raw(key).get<std::string>();
    }

    /// Array of numbers, a single number, or {start, stop, count|step}.
    std::vector<double> grid(const std::string& key, const std::vector<double>& fallback) const {
        if (!has(key)) {
            return fallback;
        }
        const json& v = raw(key);
        std::vector<double> out;
        if (v.is_number()) {
            out.push_back(v.get<double>());
        } else if (v.is_array()) {
            for (const auto& item : v) {
                if (item.is_string()) {
                    const auto p = parse_phase(item.get<std::string>());
                    if (!p) {
                        fail(key, "cannot parse grid value '" + item.get<std::string>() + "'");
                    }
                    out.push_back(*p);
                } else if (item.is_number()) {
                    out.push_back(item.get<double>());
                } else {
                    fail(key, "grid entries must be numbers");
                }
            }
        } else if (v.is_object()) {
            Section g(doc_, v, {});
            g.path_ = at(key);
            g.obj_ = &v;
            g.allow({"start", "stop", "count", "step"});
            if (!g.has("start") || !g.has("stop")) {
                fail(key, "range grids need start and stop");
            }
            const double start = g.phase("start", 0.0);
            const double stop = g.phase("stop", 0.0);
            if (g.has("count") == g.has("step")) {
                fail(key, "range grids need exactly one of count or step");
            }
            if (g.has("count")) {
                const long long n = g.integer("count", 0);
                if (n < 1 || n > 1000000) {
                    g.fail("count", "must lie in [1, 1e6]");
                }
                const double step = n > 1 ? (stop - start) / static_cast<double>(n - 1) : 0.0;
                for (long long i = 0; i < n; ++i) {
                    out.push_back(i + 1 == n && n > 1 ? stop : start + step * static_cast<double>(i));
                }
            } else {
                const double step = g.number("step", 0.0);
                if (!(step > 0.0) || !(stop >= start)) {
                    g.fail("step", "must be > 0 with stop >= start");
                }
                const auto n = static_cast<long long>(std::floor((stop - start) / step + 1e-9)) + 1;
                if (n > 1000000) {
                    g.fail("step", "range has too many points");
                }
                for (long long i = 0; i < n; ++i) {
                    out.push_back(start + step * static_cast<double>(i));
                }
            }
        } else {
            fail(key, "expected an array, a number, or a {start, stop, count|step} range");
        }
        for (double x : out) {
            if (!std::isfinite(x)) {
                fail(key, "grid values must be finite");
            }
        }
        return out;
    }

    const json* node() const { return obj_; }

private:
    const Doc& doc_;
    std::vector<std::string> path_;
    const json* obj_ = nullptr;
};

void apply_override(json& root, const std::string& expr, Doc& doc, const std::string& source) {
    const auto eq = expr.find('=');
    if (eq == std::string::npos || eq == 0) {
        throw ConfigError(source, 0, "--set " + expr + ": expected key=value");
    }
    const std::string path = expr.substr(0, eq);
    const std::string value = expr.substr(eq + 1);
    std::vector<std::string> keys;
    std::stringstream ss(path);
    for (std::string k; std::getline(ss, k, '.');) {
        if (k.empty()) {
            throw ConfigError(source, 0, "--set " + expr + ": empty path component");
        }
        keys.push_back(k);
    }
    json parsed = json::parse(value, nullptr, false);
    if (parsed.is_discarded()) {
        parsed = value;  // bare strings such as phase expressions or names
    }
    json* node = &root;
    for (std::size_t i = 0; i + 1 < keys.size(); ++i) {
        if (!node->is_object()) {
            throw ConfigError(source, 0, "--set " + expr + ": path crosses a non-object value");
        }
        node = &(*node)[keys[i]];
        if (node->is_null()) {
            *node = json::object();
        }
    }
    if (!node->is_object()) {
        throw ConfigError(source, 0, "--set " + expr + ": parent of '" + keys.back() + "' is not an object");
    }
    (*node)[keys.back()] = std::move(parsed);
    doc.mark_override(path);
}

std::string topology_name(Topology t) { return t == Topology::periodic ? "periodic" : "open"; }

json grid_json(const std::vector<double>& g) { return json(g); }

}  // namespace

std::optional<double> parse_phase(const std::string& raw) {
    std::string s;
    for (char c : raw) {
        if (!std::isspace(static_cast<unsigned char>(c))) {
            s += c;
        }
    }
    const auto pi_at = s.find("pi");
    if (pi_at == std::string::npos) {
        return parse_number(s);
    }
    std::string coef = s.substr(0, pi_at);
    std::string rest = s.substr(pi_at + 2);
    double factor = 1.0;
    if (!coef.empty() && coef.back() == '*') {
        coef.pop_back();
        if (coef.empty() || coef == "-" || coef == "+") {
            return std::nullopt;
        }
    }
    if (coef == "-") {
        factor = -1.0;
    } else if (!coef.empty() && coef != "+") {
        const auto c = parse_number(coef);
        if (!c) {
            return std::nullopt;
        }
        factor = *c;
    }
    if (!rest.empty()) {
        if (rest.front() != '/') {
            return std::nullopt;
        }
        const auto d = parse_number(rest.substr(1));
        if (!d || *d == 0.0) {
            return std::nullopt;
        }
        factor /= *d;
    }
    return factor * std::numbers::pi;
}

RunConfig parse_config(const std::string& text, const std::string& source, const std::vector<std::string>& overrides) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        const auto byte = std::min<std::size_t>(e.byte, text.size());
        const int line =
            1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<long>(byte ? byte - 1 : 0), '\n'));
        throw ConfigError(source, line, std::string("malformed JSON: ") + e.what());
    }
    Doc doc(text, source);
    if (!root.is_object()) {
        throw ConfigError(source, 1, "top level must be a JSON object");
    }
    for (const auto& o : overrides) {
        apply_override(root, o, doc, source);
    }

    RunConfig cfg;
    Section top(doc, root, {});
    top.allow({"schema_version", "model", "noise", "ramp", "integrator", "spectrum", "passage", "alpha_scan",
               "lossy_prep", "robustness", "output", "description"});
    cfg.schema_version = static_cast<int>(top.integer("schema_version", kSchemaVersion));
    if (cfg.schema_version != kSchemaVersion) {
        top.fail("schema_version", "unsupported version " + std::to_string(cfg.schema_version) + " (expected " +
                                       std::to_string(kSchemaVersion) + ")");
    }

    {
        Section s(doc, root, {"model"});
        s.allow({"n_cavities", "hopping", "phi_a", "phi_b", "k", "k_a", "k_b", "k_int", "topology", "n_max",
                 "species_total"});
        auto& m = cfg.model;
        m.n_cavities = static_cast<int>(s.integer("n_cavities", m.n_cavities));
        m.hopping = s.grid("hopping", m.hopping);
        m.phi_a = s.phase("phi_a", m.phi_a);
        m.phi_b = s.phase("phi_b", m.phi_b);
        if (s.has("k")) {
            if (s.has("k_a") || s.has("k_b") || s.has("k_int")) {
                s.fail("k", "give either k or the explicit k_a, k_b, k_int");
            }
            const double k = s.number("k", 1.0);
            m.k_a = k;
            m.k_b = k;
            m.k_int = -2.0 * k;
        }
        m.k_a = s.number("k_a", m.k_a);
        m.k_b = s.number("k_b", m.k_b);
        m.k_int = s.number("k_int", m.k_int);
        const std::string topo = s.string("topology", topology_name(m.topology));
        if (topo == "periodic") {
            m.topology = Topology::periodic;
        } else if (topo == "open" || topo == "open_chain" || topo == "open-chain") {
            m.topology = Topology::open_chain;
        } else {
            s.fail("topology", "expected 'open' or 'periodic'");
        }
        m.n_max = static_cast<int>(s.integer("n_max", m.n_max));
        m.species_total = static_cast<int>(s.integer("species_total", m.species_total));
        try {
            m.validate();
        } catch (const ContractError& e) {
            doc.fail({"model"}, e.what());
        }
    }
    {
        Section s(doc, root, {"noise"});
        s.allow({"kind", "gamma_a", "gamma_b", "gamma", "theta"});
        auto& n = cfg.noise;
        try {
            n.kind = noise_kind_from_string(s.string("kind", to_string(n.kind)));
        } catch (const ContractError& e) {
            s.fail("kind", e.what());
        }
        n.gamma_a = s.number("gamma_a", n.gamma_a);
        n.gamma_b = s.number("gamma_b", n.gamma_b);
        n.gamma = s.number("gamma", n.gamma);
        n.theta = s.phase("theta", n.theta);
        try {
            n.validate();
        } catch (const ContractError& e) {
            doc.fail({"noise"}, e.what());
        }
    }
    {
        Section s(doc, root, {"ramp"});
        s.allow({"alpha", "phi_start", "phi_target"});
        auto& r = cfg.ramp;
        r.alpha = s.number("alpha", r.alpha);
        r.phi_start = s.phase("phi_start", r.phi_start);
        if (s.node() && s.node()->contains("phi_target")) {
            r.phi_target = s.optional_phase("phi_target");
        }
        try {
            r.validate();
        } catch (const ContractError& e) {
            doc.fail({"ramp"}, e.what());
        }
    }
    {
        Section s(doc, root, {"integrator"});
        s.allow({"dt_closed", "dt_open", "t_max", "hold_time", "cadence"});
        auto& it = cfg.integrator;
        it.dt_closed = s.number("dt_closed", it.dt_closed);
        it.dt_open = s.number("dt_open", it.dt_open);
        it.t_max = s.optional_number("t_max");
        it.hold_time = s.number("hold_time", it.hold_time);
        it.cadence = static_cast<int>(s.integer("cadence", it.cadence));
        if (!(it.dt_closed > 0.0)) s.fail("dt_closed", "must be > 0");
        if (!(it.dt_open > 0.0)) s.fail("dt_open", "must be > 0");
        if (it.t_max && !(*it.t_max >= 0.0)) s.fail("t_max", "must be >= 0");
        if (!(it.hold_time >= 0.0)) s.fail("hold_time", "must be >= 0");
        if (it.cadence < 1) s.fail("cadence", "must be >= 1");
    }
    {
        Section s(doc, root, {"spectrum"});
        s.allow({"grid_points", "phi_min", "phi_max", "n_levels", "alc_level", "track_level"});
        auto& sp = cfg.spectrum;
        sp.grid_points = static_cast<int>(s.integer("grid_points", sp.grid_points));
        sp.phi_min = s.phase("phi_min", sp.phi_min);
        sp.phi_max = s.phase("phi_max", sp.phi_max);
        sp.n_levels = static_cast<int>(s.integer("n_levels", sp.n_levels));
        sp.alc_level = static_cast<int>(s.integer("alc_level", sp.alc_level));
        sp.track_level = static_cast<int>(s.integer("track_level", sp.track_level));
        if (sp.grid_points < 3 || sp.grid_points > 1000000) s.fail("grid_points", "must lie in [3, 1e6]");
        if (!(sp.phi_max > sp.phi_min)) s.fail("phi_max", "must exceed phi_min");
        if (sp.n_levels < 0) s.fail("n_levels", "must be >= 0 (0 keeps every level)");
        if (sp.alc_level < 0) s.fail("alc_level", "must be >= 0");
        if (sp.track_level < -1) s.fail("track_level", "must be >= -1");
    }
    {
        Section s(doc, root, {"passage"});
        s.allow({"initial", "mes_m", "entanglement"});
        auto& p = cfg.passage;
        p.initial = s.string("initial", p.initial);
        p.mes_m = static_cast<int>(s.integer("mes_m", p.mes_m));
        p.entanglement = s.boolean("entanglement", p.entanglement);
        if (p.initial != "ground" && p.initial != "mes") s.fail("initial", "expected 'ground' or 'mes'");
    }
    {
        Section s(doc, root, {"alpha_scan"});
        s.allow({"alphas"});
        cfg.alpha_scan.alphas = s.grid("alphas", cfg.alpha_scan.alphas);
        if (cfg.alpha_scan.alphas.empty()) s.fail("alphas", "must be nonempty");
        for (double a : cfg.alpha_scan.alphas) {
            if (!(a > 0.0)) s.fail("alphas", "values must be > 0");
        }
    }
    {
        Section s(doc, root, {"lossy_prep"});
        s.allow({"kind", "curves", "gammas", "alpha_grid", "gamma_c"});
        auto& lp = cfg.lossy_prep;
        lp.kind = s.string("kind", lp.kind);
        if (lp.kind != "single_mode_loss" && lp.kind != "coupled_two_mode_loss") {
            s.fail("kind", "expected 'single_mode_loss' or 'coupled_two_mode_loss'");
        }
        if (s.has("curves")) {
            const json& arr = s.raw("curves");
            if (!arr.is_array() || arr.empty()) {
                s.fail("curves", "expected a nonempty array of {k, alpha}");
            }
            lp.curves.clear();
            for (const auto& item : arr) {
                if (!item.is_object()) {
                    s.fail("curves", "entries must be objects");
                }
                for (const auto& [key, value] : item.items()) {
                    if (key != "k" && key != "alpha") {
                        s.fail("curves", "unknown key '" + key + "' in a curve");
                    }
                }
                LossyCurve curve;
                if (!item.contains("k") || !item["k"].is_number()) {
                    s.fail("curves", "every curve needs a numeric k");
                }
                curve.k = item["k"].get<double>();
                if (item.contains("alpha") && !item["alpha"].is_null()) {
                    if (!item["alpha"].is_number() || !(item["alpha"].get<double>() > 0.0)) {
                        s.fail("curves", "curve alpha must be a positive number or null");
                    }
                    curve.alpha = item["alpha"].get<double>();
                }
                lp.curves.push_back(curve);
            }
        }
        lp.gammas = s.grid("gammas", lp.gammas);
        lp.alpha_grid = s.grid("alpha_grid", lp.alpha_grid);
        if (lp.gammas.empty()) s.fail("gammas", "must be nonempty");
        for (double g : lp.gammas) {
            if (!(g >= 0.0)) s.fail("gammas", "values must be >= 0");
        }
        for (double a : lp.alpha_grid) {
            if (!(a > 0.0)) s.fail("alpha_grid", "values must be > 0");
        }
        const bool needs_scan =
            std::any_of(lp.curves.begin(), lp.curves.end(), [](const LossyCurve& c) { return !c.alpha; });
        if (needs_scan && lp.alpha_grid.empty()) s.fail("alpha_grid", "needed for curves without alpha");

        Section g(doc, root, {"lossy_prep", "gamma_c"});
        g.allow({"enabled", "k", "alpha", "grid", "window_lo", "window_hi"});
        auto& gc = lp.gamma_c;
        gc.enabled = g.boolean("enabled", gc.enabled);
        gc.k = g.number("k", gc.k);
        gc.alpha = g.number("alpha", gc.alpha);
        std::vector<double> default_grid;
        for (int i = 0; i <= 20; ++i) {
            default_grid.push_back(0.0025 * i);
        }
        gc.grid = g.grid("grid", gc.grid.empty() ? default_grid : gc.grid);
        gc.window_lo = g.phase("window_lo", gc.window_lo);
        gc.window_hi = g.phase("window_hi", gc.window_hi);
        if (!(gc.alpha > 0.0)) g.fail("alpha", "must be > 0");
        if (gc.grid.empty()) g.fail("grid", "must be nonempty");
        for (std::size_t i = 0; i < gc.grid.size(); ++i) {
            if (!(gc.grid[i] >= 0.0) || (i > 0 && !(gc.grid[i] > gc.grid[i - 1]))) {
                g.fail("grid", "must be strictly ascending and >= 0");
            }
        }
        if (!(gc.window_lo >= 0.0 && gc.window_hi > gc.window_lo)) g.fail("window_hi", "window needs 0 <= lo < hi");
    }
    {
        Section s(doc, root, {"robustness"});
        s.allow({"pair", "gamma", "t_max", "phi", "mes_m"});
        auto& r = cfg.robustness;
        r.pair = s.string("pair", r.pair);
        r.gamma = s.number("gamma", r.gamma);
        r.t_max = s.number("t_max", r.t_max);
        r.phi = s.phase("phi", r.phi);
        r.mes_m = static_cast<int>(s.integer("mes_m", r.mes_m));
        if (r.pair != "loss" && r.pair != "phase_flip") s.fail("pair", "expected 'loss' or 'phase_flip'");
        if (!(r.gamma >= 0.0)) s.fail("gamma", "must be >= 0");
        if (!(r.t_max > 0.0)) s.fail("t_max", "must be > 0");
    }
    {
        Section s(doc, root, {"output"});
        s.allow({"dir"});
        cfg.output_dir = s.string("dir", cfg.output_dir);
        if (cfg.output_dir.empty()) s.fail("dir", "must be nonempty");
    }
    return cfg;
}

RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides) {
    std::ifstream f(path, std::ios::binary);
    if (!f) {
        throw ConfigError(path, 0, "cannot open config file");
    }
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str(), path, overrides);
}

json RunConfig::to_json() const {
    json j;
    j["schema_version"] = schema_version;
    j["model"] = {{"n_cavities", model.n_cavities},
                  {"hopping", model.hopping},
                  {"phi_a", model.phi_a},
                  {"phi_b", model.phi_b},
                  {"k_a", model.k_a},
                  {"k_b", model.k_b},
                  {"k_int", model.k_int},
                  {"topology", topology_name(model.topology)},
                  {"n_max", model.n_max},
                  {"species_total", model.species_total}};
    j["noise"] = {{"kind", to_string(noise.kind)},
                  {"gamma_a", noise.gamma_a},
                  {"gamma_b", noise.gamma_b},
                  {"gamma", noise.gamma},
                  {"theta", noise.theta}};
    j["ramp"] = {{"alpha", ramp.alpha},
                 {"phi_start", ramp.phi_start},
                 {"phi_target", ramp.phi_target ? json(*ramp.phi_target) : json(nullptr)}};
    j["integrator"] = {{"dt_closed", integrator.dt_closed},
                       {"dt_open", integrator.dt_open},
                       {"t_max", integrator.t_max ? json(*integrator.t_max) : json(nullptr)},
                       {"hold_time", integrator.hold_time},
                       {"cadence", integrator.cadence}};
    j["spectrum"] = {{"grid_points", spectrum.grid_points}, {"phi_min", spectrum.phi_min},
                     {"phi_max", spectrum.phi_max},         {"n_levels", spectrum.n_levels},
                     {"alc_level", spectrum.alc_level},     {"track_level", spectrum.track_level}};
    j["passage"] = {{"initial", passage.initial}, {"mes_m", passage.mes_m}, {"entanglement", passage.entanglement}};
    j["alpha_scan"] = {{"alphas", grid_json(alpha_scan.alphas)}};
    json curves = json::array();
    for (const auto& c : lossy_prep.curves) {
        curves.push_back({{"k", c.k}, {"alpha", c.alpha ? json(*c.alpha) : json(nullptr)}});
    }
    const auto& gc = lossy_prep.gamma_c;
    j["lossy_prep"] = {{"kind", lossy_prep.kind},
                       {"curves", curves},
                       {"gammas", grid_json(lossy_prep.gammas)},
                       {"alpha_grid", grid_json(lossy_prep.alpha_grid)},
                       {"gamma_c",
                        {{"enabled", gc.enabled},
                         {"k", gc.k},
                         {"alpha", gc.alpha},
                         {"grid", grid_json(gc.grid)},
                         {"window_lo", gc.window_lo},
                         {"window_hi", gc.window_hi}}}};
    j["robustness"] = {{"pair", robustness.pair},
                       {"gamma", robustness.gamma},
                       {"t_max", robustness.t_max},
                       {"phi", robustness.phi},
                       {"mes_m", robustness.mes_m}};
    j["output"] = {{"dir", output_dir}};
    return j;
}

}  // namespace kerrnet

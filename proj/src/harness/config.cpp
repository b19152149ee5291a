#include "smcm/harness/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace smcm::harness {

using nlohmann::json;

std::string_view to_string(AlgorithmType type) {
    switch (type) {
        case AlgorithmType::SmCmGsc: return "sm_cm_gsc";
        case AlgorithmType::SmCmDfp: return "sm_cm_dfp";
        case AlgorithmType::CmGsc: return "cm_gsc";
        case AlgorithmType::MvGsc: return "mv_gsc";
        case AlgorithmType::Mvdr: return "mvdr";
    }
    return "sm_cm_gsc";
}

AlgorithmType algorithm_type_from_string(std::string_view name) {
    for (auto t : {AlgorithmType::SmCmGsc, AlgorithmType::SmCmDfp, AlgorithmType::CmGsc, AlgorithmType::MvGsc,
                   AlgorithmType::Mvdr}) {
        if (to_string(t) == name) return t;
    }
    throw Error(ErrorKind::Config, "unknown algorithm type '" + std::string(name) + "'");
}

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
    throw Error(ErrorKind::Config, path + ": " + msg);
}

/// JSON object view that remembers its path for error messages.
class Node {
public:
    Node(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) fail(path_, "expected an object");
    }

    const std::string& path() const { return path_; }
    bool has(const char* key) const { return j_.contains(key); }
    std::string at(const char* key) const { return path_.empty() ? key : path_ + "." + key; }

    void allow_only(std::initializer_list<const char*> keys) const {
        for (auto it = j_.begin(); it != j_.end(); ++it) {
            bool known = false;
            for (const char* k : keys) known = known || it.key() == k;
            if (!known) fail(at(it.key().c_str()), "unknown field");
        }
    }

    Node child(const char* key) const {
        if (!has(key)) fail(at(key), "missing required object");
        return Node(j_.at(key), at(key));
    }

    const json& raw(const char* key) const { return j_.at(key); }

    double number(const char* key, double fallback) const {
        if (!has(key)) return fallback;
        return number(key);
    }
    double number(const char* key) const {
        if (!has(key)) fail(at(key), "missing required number");
        const json& v = j_.at(key);
        if (!v.is_number()) fail(at(key), "expected a number");
        return v.get<double>();
    }
    std::size_t count(const char* key, std::size_t fallback) const {
        if (!has(key)) return fallback;
        return count(key);
    }
    std::size_t count(const char* key) const {
        if (!has(key)) fail(at(key), "missing required integer");
        const json& v = j_.at(key);
        if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
            fail(at(key), "expected a non-negative integer");
        }
        return v.get<std::size_t>();
    }
    std::string text(const char* key, const std::string& fallback) const {
        if (!has(key)) return fallback;
        const json& v = j_.at(key);
        if (!v.is_string()) fail(at(key), "expected a string");
        return v.get<std::string>();
    }
    std::vector<double> numbers(const char* key) const {
        if (!has(key)) return {};
        const json& v = j_.at(key);
        if (!v.is_array()) fail(at(key), "expected an array of numbers");
        std::vector<double> out;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (!v[i].is_number()) fail(at(key) + "[" + std::to_string(i) + "]", "expected a number");
            out.push_back(v[i].get<double>());
        }
        return out;
    }

private:
    const json& j_;
    std::string path_;
};

template <class F>
auto with_path(const std::string& path, F&& f) {
    try {
        return f();
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::Config) throw;
        const std::string what = e.what();
        const std::string prefix = std::string(to_string(ErrorKind::Config)) + ": ";
        const std::string msg = what.rfind(prefix, 0) == 0 ? what.substr(prefix.size()) : what;
        if (msg.rfind(path, 0) == 0) throw;
        fail(path, msg);
    }
}

BoundScheme parse_bound(const Node& n) {
    n.allow_only({"kind", "gamma", "rho", "lambda", "psi"});
    BoundScheme b;
    b.kind = with_path(n.at("kind"), [&] { return bound_kind_from_string(n.text("kind", "fixed")); });
    b.gamma_fixed = n.number("gamma", b.gamma_fixed);
    b.rho = n.number("rho", b.rho);
    b.lambda = n.number("lambda", b.lambda);
    b.psi = n.number("psi", b.psi);
    with_path(n.path(), [&] { b.validate(); return 0; });
    return b;
}

AlgorithmConfig parse_algorithm(const Node& n) {
    n.allow_only({"name", "type", "bound", "step_size", "blocking", "v"});
    AlgorithmConfig a;
    a.name = n.text("name", "");
    if (a.name.empty()) fail(n.at("name"), "missing or empty algorithm name");
    // Without an explicit type the name itself must be an algorithm identifier.
    if (n.has("type")) {
        a.type = with_path(n.at("type"), [&] { return algorithm_type_from_string(n.text("type", "")); });
    } else {
        a.type = with_path(n.at("name"), [&] { return algorithm_type_from_string(a.name); });
    }
    if (n.has("bound")) a.bound = parse_bound(n.child("bound"));
    a.step_size = n.number("step_size", a.step_size);
    if (!(a.step_size > 0.0)) fail(n.at("step_size"), "must be > 0");
    a.blocking = with_path(n.at("blocking"), [&] { return blocking_kind_from_string(n.text("blocking", "css")); });
    a.v = n.number("v", a.v);
    if (!(a.v != 0.0)) fail(n.at("v"), "must be nonzero");
    return a;
}

ScenarioConfig parse_scenario(const Node& n) {
    n.allow_only({"snr_db", "sources", "random_source_count", "random_source_powers_db", "min_separation_deg",
                  "snapshots", "nonstationary", "snr_sweep_db"});
    ScenarioConfig s;
    s.snr_db = n.number("snr_db", s.snr_db);
    s.min_separation_deg = n.number("min_separation_deg", s.min_separation_deg);
    if (s.min_separation_deg < 0.0) fail(n.at("min_separation_deg"), "must be >= 0");
    s.snapshots = n.count("snapshots", s.snapshots);
    if (s.snapshots < 1) fail(n.at("snapshots"), "must be >= 1");
    s.snr_sweep_db = n.numbers("snr_sweep_db");

    const bool explicit_sources = n.has("sources");
    const bool random_sources = n.has("random_source_count");
    if (explicit_sources == random_sources) {
        fail(n.path(), "exactly one of 'sources' or 'random_source_count' is required");
    }
    if (explicit_sources) {
        const json& arr = n.raw("sources");
        if (!arr.is_array() || arr.empty()) fail(n.at("sources"), "expected a non-empty array");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            const Node src(arr[i], n.at("sources") + "[" + std::to_string(i) + "]");
            src.allow_only({"doa_deg", "power_db", "onset"});
            SourceEntry e;
            if (src.has("doa_deg")) {
                e.doa_deg = src.number("doa_deg");
                if (!(*e.doa_deg > 0.0 && *e.doa_deg < 180.0)) fail(src.at("doa_deg"), "must lie in (0, 180)");
            }
            e.power_db = src.number("power_db", 0.0);
            e.onset = src.count("onset", 0);
            if (i == 0 && e.onset != 0) fail(src.at("onset"), "the desired source must start at snapshot 0");
            s.sources.push_back(e);
        }
    } else {
        s.random_source_count = n.count("random_source_count");
        if (*s.random_source_count < 1) fail(n.at("random_source_count"), "must be >= 1");
        s.random_source_powers_db = n.numbers("random_source_powers_db");
        if (!s.random_source_powers_db.empty() && s.random_source_powers_db.size() != *s.random_source_count) {
            fail(n.at("random_source_powers_db"), "length must equal random_source_count");
        }
    }

    if (n.has("nonstationary")) {
        const json& arr = n.raw("nonstationary");
        if (!arr.is_array()) fail(n.at("nonstationary"), "expected an array");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            const Node g(arr[i], n.at("nonstationary") + "[" + std::to_string(i) + "]");
            g.allow_only({"onset", "count", "powers_db"});
            SourceGroup grp;
            grp.onset = g.count("onset");
            grp.count = g.count("count");
            if (grp.count < 1) fail(g.at("count"), "must be >= 1");
            grp.powers_db = g.numbers("powers_db");
            if (!grp.powers_db.empty() && grp.powers_db.size() != grp.count) {
                fail(g.at("powers_db"), "length must equal count");
            }
            s.nonstationary.push_back(grp);
        }
    }
    return s;
}

}  // namespace

ScenarioDescription ExperimentConfig::scenario_description() const {
    ScenarioDescription d;
    d.geometry = array;
    d.snr_db = scenario.snr_db;
    d.min_separation = deg_to_rad(scenario.min_separation_deg);
    if (scenario.random_source_count) {
        for (std::size_t k = 0; k < *scenario.random_source_count; ++k) {
            SourceRequest r;
            r.power_db = scenario.random_source_powers_db.empty() ? 0.0 : scenario.random_source_powers_db[k];
            d.sources.push_back(r);
        }
    } else {
        for (const auto& e : scenario.sources) {
            SourceRequest r;
            if (e.doa_deg) r.doa = deg_to_rad(*e.doa_deg);
            r.power_db = e.power_db;
            r.onset = e.onset;
            d.sources.push_back(r);
        }
    }
    for (const auto& g : scenario.nonstationary) {
        for (std::size_t k = 0; k < g.count; ++k) {
            SourceRequest r;
            r.power_db = g.powers_db.empty() ? 0.0 : g.powers_db[k];
            r.onset = g.onset;
            d.sources.push_back(r);
        }
    }
    return d;
}

std::size_t ExperimentConfig::source_count() const {
    std::size_t q = scenario.random_source_count ? *scenario.random_source_count : scenario.sources.size();
    for (const auto& g : scenario.nonstationary) q += g.count;
    return q;
}

ExperimentConfig parse_config(const json& doc) {
    const Node root(doc, "");
    root.allow_only({"array", "scenario", "run", "algorithms", "outputs", "analysis"});
    ExperimentConfig c;

    if (root.has("array")) {
        const Node a = root.child("array");
        a.allow_only({"elements", "spacing_ratio"});
        c.array.elements = a.count("elements", c.array.elements);
        c.array.spacing_ratio = a.number("spacing_ratio", c.array.spacing_ratio);
        with_path("array", [&] { c.array.validate(); return 0; });
    }

    c.scenario = parse_scenario(root.child("scenario"));
    if (c.source_count() > c.array.elements) {
        fail("scenario", "source count exceeds array.elements");
    }

    if (root.has("run")) {
        const Node r = root.child("run");
        r.allow_only({"runs", "master_seed", "threads"});
        c.run.runs = r.count("runs", c.run.runs);
        if (c.run.runs < 1) fail(r.at("runs"), "must be >= 1");
        if (r.has("master_seed")) {
            const json& s = r.raw("master_seed");
            if (!s.is_number_integer()) fail(r.at("master_seed"), "expected an integer");
            c.run.master_seed = s.get<std::uint64_t>();
        }
        c.run.threads = r.count("threads", c.run.threads);
    }

    if (!doc.contains("algorithms") || !doc.at("algorithms").is_array() || doc.at("algorithms").empty()) {
        fail("algorithms", "expected a non-empty array");
    }
    std::set<std::string> names;
    const json& algs = doc.at("algorithms");
    for (std::size_t i = 0; i < algs.size(); ++i) {
        const std::string path = "algorithms[" + std::to_string(i) + "]";
        AlgorithmConfig a = parse_algorithm(Node(algs[i], path));
        if (!names.insert(a.name).second) fail(path + ".name", "duplicate algorithm name '" + a.name + "'");
        c.algorithms.push_back(std::move(a));
    }

    if (root.has("outputs")) {
        const Node o = root.child("outputs");
        o.allow_only({"csv_path", "analysis_path"});
        c.outputs.csv_path = o.text("csv_path", "");
        c.outputs.analysis_path = o.text("analysis_path", "");
    }

    if (root.has("analysis")) {
        const Node a = root.child("analysis");
        a.allow_only({"form", "br_samples", "calibration_snapshots", "prediction_runs", "steady_fraction"});
        c.analysis.form = with_path(a.at("form"), [&] { return mse_form_from_string(a.text("form", "simplified")); });
        c.analysis.br_samples = a.count("br_samples", c.analysis.br_samples);
        c.analysis.calibration_snapshots = a.count("calibration_snapshots", c.analysis.calibration_snapshots);
        if (c.analysis.calibration_snapshots < 1) fail(a.at("calibration_snapshots"), "must be >= 1");
        c.analysis.prediction_runs = a.count("prediction_runs", c.analysis.prediction_runs);
        if (c.analysis.prediction_runs < 1) fail(a.at("prediction_runs"), "must be >= 1");
        c.analysis.steady_fraction = a.number("steady_fraction", c.analysis.steady_fraction);
        if (!(c.analysis.steady_fraction > 0.0 && c.analysis.steady_fraction <= 1.0)) {
            fail(a.at("steady_fraction"), "must lie in (0, 1]");
        }
    }
    return c;
}

ExperimentConfig parse_config(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::Config, std::string("malformed document: ") + e.what());
    }
    return parse_config(doc);
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Io, "cannot open config '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    const std::string text = ss.str();
    return parse_config(std::string_view(text));
}

json to_json(const ExperimentConfig& c) {
    json doc;
    doc["array"] = {{"elements", c.array.elements}, {"spacing_ratio", c.array.spacing_ratio}};

    json sc;
    sc["snr_db"] = c.scenario.snr_db;
    sc["min_separation_deg"] = c.scenario.min_separation_deg;
    sc["snapshots"] = c.scenario.snapshots;
    if (c.scenario.random_source_count) {
        sc["random_source_count"] = *c.scenario.random_source_count;
        if (!c.scenario.random_source_powers_db.empty()) sc["random_source_powers_db"] = c.scenario.random_source_powers_db;
    } else {
        json arr = json::array();
        for (const auto& e : c.scenario.sources) {
            json s = {{"power_db", e.power_db}, {"onset", e.onset}};
            if (e.doa_deg) s["doa_deg"] = *e.doa_deg;
            arr.push_back(s);
        }
        sc["sources"] = arr;
    }
    if (!c.scenario.nonstationary.empty()) {
        json arr = json::array();
        for (const auto& g : c.scenario.nonstationary) {
            json j = {{"onset", g.onset}, {"count", g.count}};
            if (!g.powers_db.empty()) j["powers_db"] = g.powers_db;
            arr.push_back(j);
        }
        sc["nonstationary"] = arr;
    }
    if (!c.scenario.snr_sweep_db.empty()) sc["snr_sweep_db"] = c.scenario.snr_sweep_db;
    doc["scenario"] = sc;

    doc["run"] = {{"runs", c.run.runs}, {"master_seed", c.run.master_seed}, {"threads", c.run.threads}};

    json algs = json::array();
    for (const auto& a : c.algorithms) {
        json j = {{"name", a.name},
                  {"type", std::string(to_string(a.type))},
                  {"step_size", a.step_size},
                  {"blocking", std::string(to_string(a.blocking))},
                  {"v", a.v}};
        j["bound"] = {{"kind", std::string(to_string(a.bound.kind))},
                      {"gamma", a.bound.gamma_fixed},
                      {"rho", a.bound.rho},
                      {"lambda", a.bound.lambda},
                      {"psi", a.bound.psi}};
        algs.push_back(j);
    }
    doc["algorithms"] = algs;
    doc["outputs"] = {{"csv_path", c.outputs.csv_path}, {"analysis_path", c.outputs.analysis_path}};
    doc["analysis"] = {{"form", std::string(to_string(c.analysis.form))},
                       {"br_samples", c.analysis.br_samples},
                       {"calibration_snapshots", c.analysis.calibration_snapshots},
                       {"prediction_runs", c.analysis.prediction_runs},
                       {"steady_fraction", c.analysis.steady_fraction}};
    return doc;
}

}  // namespace smcm::harness

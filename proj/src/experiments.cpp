#include "qbm/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string_view>

#include "qbm/calculus.hpp"
#include "qbm/errors.hpp"
#include "qbm/pretrain.hpp"
#include "qbm/trainer.hpp"

namespace qbm {

namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

void allow_keys(const json& j, std::initializer_list<std::string_view> keys, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
    for (const auto& [key, value] : j.items()) {
        if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
            throw ConfigError("unknown key '" + key + "' in " + where);
        }
    }
}

template <class T>
T get(const json& j, const char* key, const std::string& where) {
    if (!j.contains(key)) throw ConfigError("missing key '" + std::string(key) + "' in " + where);
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError("key '" + std::string(key) + "' in " + where + " has the wrong type");
    }
}

template <class T>
T get_or(const json& j, const char* key, T fallback, const std::string& where) {
    if (!j.contains(key) || j.at(key).is_null()) return fallback;
    return get<T>(j, key, where);
}

template <class T>
std::optional<T> get_opt(const json& j, const char* key, const std::string& where) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return get<T>(j, key, where);
}

std::uint64_t config_seed(const json& config) {
    if (!config.contains("seed")) throw ConfigError("config needs a 'seed' (or pass --seed)");
    const auto& s = config.at("seed");
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<std::int64_t>() >= 0)) {
        throw ConfigError("'seed' must be a non-negative integer");
    }
    return s.get<std::uint64_t>();
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path.string());
    out << text;
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

json geometry_to_json(const Geometry& g) {
    return json{{"rows", g.rows}, {"cols", g.cols}, {"periodic_rows", g.periodic_rows},
                {"periodic_cols", g.periodic_cols}};
}

std::optional<Geometry> geometry_from_config(const json& parent, const char* key, const std::string& where) {
    if (!parent.contains(key) || parent.at(key).is_null()) return std::nullopt;
    const json& g = parent.at(key);
    const std::string w = where + "." + key;
    allow_keys(g, {"rows", "cols", "periodic_rows", "periodic_cols"}, w);
    Geometry geo;
    geo.rows = get<int>(g, "rows", w);
    geo.cols = get<int>(g, "cols", w);
    geo.periodic_rows = get_or<bool>(g, "periodic_rows", false, w);
    geo.periodic_cols = get_or<bool>(g, "periodic_cols", true, w);
    return geo;
}

bool size_parametric(const json& target) {
    const auto kind = target.value("kind", std::string{});
    return kind == "xxz" || kind == "synthetic";
}

std::string target_note(const json& spec, std::uint64_t seed) {
    const auto kind = spec.value("kind", std::string{});
    if (kind == "synthetic") {
        const auto s = spec.contains("seed") ? spec.at("seed").get<std::uint64_t>() : seed;
        return "synthetic stand-in dataset (model " + spec.value("model", std::string("pairwise_ising")) +
               ", seed " + std::to_string(s) + ")";
    }
    if (kind == "dataset") return "dataset file " + spec.value("path", std::string{});
    return "XXZ Gibbs state";
}

Ansatz ansatz_from_config(const json& spec, int n, const std::string& where) {
    allow_keys(spec, {"kind", "terms", "geometry", "single_qubit_terms"}, where);
    if (spec.contains("terms")) {
        if (spec.contains("kind")) throw ConfigError(where + ": give either 'kind' or 'terms'");
        std::vector<PauliTerm> terms;
        for (const auto& s : get<std::vector<std::string>>(spec, "terms", where)) {
            PauliTerm t(s);
            if (t.num_qubits() != n) throw ConfigError(where + ": term " + s + " does not act on " + std::to_string(n) + " qubits");
            terms.push_back(t);
        }
        return make_ansatz(n, std::move(terms));
    }
    AnsatzOptions opts;
    opts.geometry = geometry_from_config(spec, "geometry", where);
    opts.single_qubit_terms = get_or<bool>(spec, "single_qubit_terms", true, where);
    return build_ansatz(ansatz_kind_from_string(get_or<std::string>(spec, "kind", "fully_connected", where)), n, opts);
}

NoiseModel noise_from_config(const json& spec) {
    const std::string where = "noise";
    allow_keys(spec, {"kind", "kappa", "xi", "variance_sum", "shots", "minibatch_data"}, where);
    const auto kind = noise_kind_from_string(get_or<std::string>(spec, "kind", "exact", where));
    NoiseModel noise;
    switch (kind) {
        case NoiseKind::exact:
            noise = NoiseModel::exact();
            break;
        case NoiseKind::gaussian:
            if (spec.contains("variance_sum")) {
                if (spec.contains("kappa") || spec.contains("xi")) {
                    throw ConfigError("noise: give either 'variance_sum' or 'kappa'/'xi'");
                }
                noise = NoiseModel::combined(get<double>(spec, "variance_sum", where));
            } else {
                noise = NoiseModel::gaussian(get_or<double>(spec, "kappa", 0.0, where),
                                             get_or<double>(spec, "xi", 0.0, where));
            }
            break;
        case NoiseKind::sampling:
            noise = NoiseModel::sampling(get<int>(spec, "shots", where), get_or<double>(spec, "xi", 0.0, where));
            break;
    }
    noise.minibatch_data = get_or<bool>(spec, "minibatch_data", false, where);
    noise.validate();
    return noise;
}

struct ScheduleChoice {
    ScheduleKind kind = ScheduleKind::constant;
    ScheduleParams params;
    std::string name;
};

ScheduleChoice schedule_from_config(const json& spec, std::size_t m, double epsilon, const NoiseModel& noise,
                                    int max_iters) {
    const std::string where = "schedule";
    allow_keys(spec, {"kind", "gamma", "a", "b", "horizon"}, where);
    ScheduleChoice c;
    c.name = get_or<std::string>(spec, "kind", "inverse_2m", where);
    if (c.name == "inverse_2m") {
        c.kind = ScheduleKind::constant;
        c.params.gamma = 1.0 / smoothness_constant(m);
    } else {
        c.kind = schedule_kind_from_string(c.name);
        c.params.gamma = get_opt<double>(spec, "gamma", where);
    }
    if (c.kind == ScheduleKind::thm1) {
        c.params.epsilon = epsilon;
        c.params.m = m;
        c.params.variance_sum = noise.variance_sum();
    }
    if (c.kind == ScheduleKind::thm2_step) {
        c.params.a = get<double>(spec, "a", where);
        c.params.b = get_or<double>(spec, "b", smoothness_constant(m), where);
        c.params.horizon = get_or<int>(spec, "horizon", max_iters, where);
    }
    lr_schedule(c.kind, c.params, 0);
    return c;
}

GlFitOptions gl_options_from_config(const json& spec, const std::string& where) {
    GlFitOptions o;
    o.learning_rate = get_opt<double>(spec, "learning_rate", where);
    o.stop_tol = get_or<double>(spec, "stop_tol", o.stop_tol, where);
    o.max_iters = get_or<int>(spec, "max_iters", o.max_iters, where);
    return o;
}

PretrainResult run_pretrain_method(const std::string& method, const Target& target, const GlFitOptions& gl,
                                   const std::optional<Geometry>& geometry_1d,
                                   const std::optional<Geometry>& geometry_2d) {
    if (method == "MF") return mf_fit(target);
    if (method == "GF") return gf_fit(target);
    if (method == "GL_1D" || method == "GL_2D") {
        const bool one_d = method == "GL_1D";
        AnsatzOptions opts;
        opts.geometry = one_d ? geometry_1d : geometry_2d;
        auto r = gl_fit(target, build_ansatz(one_d ? AnsatzKind::gl_1d : AnsatzKind::gl_2d, target.n, opts), gl);
        r.method = method;
        return r;
    }
    throw ConfigError("unknown pre-training method \"" + method + "\" (MF, GF, GL_1D, GL_2D)");
}

json apply_small(Command command, json cfg) {
    auto shrink_target = [&](int n) {
        if (cfg.contains("target") && size_parametric(cfg["target"])) cfg["target"]["n"] = n;
    };
    switch (command) {
        case Command::pretrain:
            shrink_target(4);
            break;
        case Command::train:
            shrink_target(4);
            cfg["max_iters"] = std::min(cfg.value("max_iters", 1000), 500);
            break;
        case Command::scan_hessian: {
            std::vector<int> ns;
            for (int n : cfg.value("n", std::vector<int>{2, 3, 4, 5})) {
                if (n <= 4) ns.push_back(n);
            }
            cfg["n"] = ns;
            cfg["instances"] = std::min(cfg.value("instances", 25), 5);
            break;
        }
        case Command::scan_scaling:
            if (cfg.value("sweep", std::string("n")) == "n") {
                std::vector<int> ns;
                for (int n : cfg.value("n", std::vector<int>{3, 4, 5, 6})) {
                    if (n <= 4) ns.push_back(n);
                }
                cfg["n"] = ns;
            } else {
                shrink_target(4);
            }
            break;
        case Command::bounds:
            break;
    }
    return cfg;
}

json resolve_paths(json cfg, const fs::path& base) {
    auto resolve = [&](json& node) {
        if (node.is_object() && node.contains("path") && node["path"].is_string()) {
            fs::path p = node["path"].get<std::string>();
            if (p.is_relative()) p = base / p;
            node["path"] = fs::absolute(p).lexically_normal().string();
        }
    };
    if (cfg.contains("target")) resolve(cfg["target"]);
    if (cfg.contains("init")) resolve(cfg["init"]);
    return cfg;
}

CommandResult begin(Command command, const json& config, const RunOptions& options, json& cfg, std::uint64_t& seed) {
    cfg = effective_config(command, config, options);
    seed = config_seed(cfg);
    fs::create_directories(options.out_dir);
    CommandResult result;
    json manifest;
    manifest["command"] = to_string(command);
    manifest["version"] = kVersionTag;
    manifest["seed"] = seed;
    manifest["small"] = options.small;
    manifest["config"] = cfg;
    const fs::path path = options.out_dir / "manifest.json";
    write_json(path, manifest);
    result.files.push_back(path);
    return result;
}

void finish(CommandResult& result, const RunOptions& options) {
    const fs::path path = options.out_dir / "summary.json";
    write_json(path, result.summary);
    result.files.push_back(path);
}

}  // namespace

std::string to_string(Command command) {
    switch (command) {
        case Command::pretrain: return "pretrain";
        case Command::train: return "train";
        case Command::scan_hessian: return "scan-hessian";
        case Command::scan_scaling: return "scan-scaling";
        case Command::bounds: return "bounds";
    }
    return "?";
}

Command command_from_string(const std::string& name) {
    for (auto c : {Command::pretrain, Command::train, Command::scan_hessian, Command::scan_scaling, Command::bounds}) {
        if (to_string(c) == name) return c;
    }
    throw ConfigError("unknown command \"" + name + "\"");
}

json load_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path.string());
    try {
        return json::parse(in, nullptr, true, true);
    } catch (const json::exception& e) {
        throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
    }
}

json unwrap_manifest(const json& document, Command command) {
    if (!document.is_object() || !document.contains("config") || !document.contains("command")) return document;
    const auto recorded = document.at("command").get<std::string>();
    if (recorded != to_string(command)) {
        throw ConfigError("manifest was written by '" + recorded + "', not '" + to_string(command) + "'");
    }
    return document.at("config");
}

json effective_config(Command command, const json& config, const RunOptions& options) {
    json cfg = unwrap_manifest(config, command);
    if (!cfg.is_object()) throw ConfigError("config must be a JSON object");
    if (options.seed) cfg["seed"] = *options.seed;
    config_seed(cfg);
    if (options.small) cfg = apply_small(command, std::move(cfg));
    return resolve_paths(std::move(cfg), options.config_dir);
}

Target target_from_config(const json& spec, std::uint64_t seed, const fs::path& base_dir, std::optional<int> n_override) {
    const std::string where = "target";
    if (!spec.is_object()) throw ConfigError("target must be a JSON object");
    const auto kind = get<std::string>(spec, "kind", where);
    if (kind == "xxz") {
        allow_keys(spec, {"kind", "n", "J", "Delta", "h_z"}, where);
        XxzParams p;
        p.J = get_or<double>(spec, "J", p.J, where);
        p.Delta = get_or<double>(spec, "Delta", p.Delta, where);
        p.h_z = get_or<double>(spec, "h_z", p.h_z, where);
        const int n = n_override.value_or(get<int>(spec, "n", where));
        if (n < 2) throw ConfigError("xxz target needs n >= 2");
        return xxz_target(n, p);
    }
    if (kind == "dataset") {
        allow_keys(spec, {"kind", "path", "features", "max_samples"}, where);
        fs::path path = get<std::string>(spec, "path", where);
        if (path.is_relative()) path = base_dir / path;
        Dataset ds = read_dataset(path);
        const auto features = get_opt<int>(spec, "features", where);
        const auto max_samples = get_opt<std::int64_t>(spec, "max_samples", where);
        if (features || max_samples) {
            std::vector<std::string> samples;
            for (const auto& s : ds.samples) {
                if (max_samples && static_cast<std::int64_t>(samples.size()) >= *max_samples) break;
                if (features && (*features < 1 || *features > ds.n)) throw ConfigError("'features' outside [1, n]");
                samples.push_back(features ? s.substr(0, static_cast<std::size_t>(*features)) : s);
            }
            ds = Dataset::from_samples(std::move(samples));
        }
        if (n_override && *n_override != ds.n) throw ConfigError("dataset targets have a fixed feature count");
        return encode_dataset(ds);
    }
    if (kind == "synthetic") {
        allow_keys(spec, {"kind", "n", "samples", "model", "seed", "p_one", "coupling", "field_lo", "field_hi"}, where);
        SynthOptions o;
        o.p_one = get_or<std::vector<double>>(spec, "p_one", {}, where);
        o.coupling = get_or<double>(spec, "coupling", o.coupling, where);
        o.field_lo = get_or<double>(spec, "field_lo", o.field_lo, where);
        o.field_hi = get_or<double>(spec, "field_hi", o.field_hi, where);
        const int n = n_override.value_or(get<int>(spec, "n", where));
        const auto M = get_or<std::int64_t>(spec, "samples", 10, where);
        const auto s = get_or<std::uint64_t>(spec, "seed", seed, where);
        const auto model = synth_model_from_string(get_or<std::string>(spec, "model", "pairwise_ising", where));
        return encode_dataset(synth_dataset(n, M, s, model, o));
    }
    throw ConfigError("unknown target kind \"" + kind + "\" (xxz, dataset, synthetic)");
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw ConfigError("slope needs at least two points");
    double mx = 0.0, my = 0.0;
    const double k = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0)) return std::nan("");
        mx += std::log(x[i]) / k;
        my += std::log(y[i]) / k;
    }
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = std::log(x[i]) - mx;
        sxy += dx * (std::log(y[i]) - my);
        sxx += dx * dx;
    }
    return sxx > 0.0 ? sxy / sxx : std::nan("");
}

CommandResult cmd_pretrain(const json& config, const RunOptions& options) {
    json cfg;
    std::uint64_t seed = 0;
    CommandResult result = begin(Command::pretrain, config, options, cfg, seed);
    allow_keys(cfg, {"seed", "target", "methods", "gl"}, "pretrain config");
    const auto t0 = Clock::now();
    const Target target = target_from_config(get<json>(cfg, "target", "config"), seed, options.config_dir);
    const auto methods =
        get_or<std::vector<std::string>>(cfg, "methods", {"MF", "GF", "GL_1D", "GL_2D"}, "pretrain config");
    const json gl_spec = cfg.value("gl", json::object());
    allow_keys(gl_spec, {"learning_rate", "stop_tol", "max_iters", "geometry_1d", "geometry_2d"}, "gl");
    const GlFitOptions gl = gl_options_from_config(gl_spec, "gl");
    const auto geo1 = geometry_from_config(gl_spec, "geometry_1d", "gl");
    const auto geo2 = geometry_from_config(gl_spec, "geometry_2d", "gl");
    if (!geo2 && std::find(methods.begin(), methods.end(), "GL_2D") != methods.end()) {
        result.summary["gl_2d_geometry"] = geometry_to_json(default_2d_geometry(target.n));
    }

    const double baseline = maximally_mixed_entropy(target);
    std::ostringstream csv;
    csv << "method,entropy,iterations\n";
    csv << "baseline," << format_number(baseline) << ",0\n";
    json rows = json::array();
    rows.push_back({{"method", "baseline"}, {"entropy", baseline}, {"iterations", 0}});
    for (const auto& method : methods) {
        const PretrainResult r = run_pretrain_method(method, target, gl, geo1, geo2);
        csv << method << ',' << format_number(r.achieved_entropy) << ',' << r.iterations << '\n';
        json row{{"method", method}, {"entropy", r.achieved_entropy}, {"iterations", r.iterations},
                 {"m", r.sub_ansatz.size()}, {"not_above_baseline", r.achieved_entropy <= baseline + 1e-9}};
        if (!r.warnings.empty()) row["warnings"] = r.warnings;
        rows.push_back(row);
        const fs::path path = options.out_dir / ("pretrain_" + method + ".json");
        write_json(path, pretrain_to_json(r));
        result.files.push_back(path);
    }
    const fs::path csv_path = options.out_dir / "pretrain_summary.csv";
    write_text(csv_path, csv.str());
    result.files.push_back(csv_path);
    result.summary["n"] = target.n;
    result.summary["target"] = target_note(cfg.at("target"), seed);
    result.summary["baseline_entropy"] = baseline;
    result.summary["methods"] = rows;
    result.summary["wall_time_s"] = seconds_since(t0);
    finish(result, options);
    return result;
}

CommandResult cmd_train(const json& config, const RunOptions& options) {
    json cfg;
    std::uint64_t seed = 0;
    CommandResult result = begin(Command::train, config, options, cfg, seed);
    allow_keys(cfg, {"seed", "target", "ansatz", "init", "noise", "schedule", "epsilon", "max_iters", "record_every"},
               "train config");
    const auto t0 = Clock::now();
    const Target target = target_from_config(get<json>(cfg, "target", "config"), seed, options.config_dir);
    const int n = target.n;
    const Ansatz base = ansatz_from_config(cfg.value("ansatz", json::object()), n, "ansatz");

    const json init = cfg.value("init", json{{"kind", "vanilla"}});
    allow_keys(init, {"kind", "path", "geometry", "learning_rate", "stop_tol", "max_iters"}, "init");
    const auto init_kind = get_or<std::string>(init, "kind", "vanilla", "init");
    Embedding start;
    std::optional<double> init_entropy;
    if (init_kind == "vanilla") {
        start.ansatz = base;
        start.theta0 = RVector::Zero(static_cast<Eigen::Index>(base.size()));
    } else {
        PretrainResult pre;
        if (init_kind == "file") {
            pre = pretrain_from_json(load_config(get<std::string>(init, "path", "init")));
            if (pre.sub_ansatz.n != n) throw ConfigError("pre-training file is for a different qubit count");
        } else {
            const auto geo = geometry_from_config(init, "geometry", "init");
            pre = run_pretrain_method(init_kind, target, gl_options_from_config(init, "init"), geo, geo);
            init_entropy = pre.achieved_entropy;
        }
        std::vector<PauliTerm> extension;
        for (const auto& t : base.terms) {
            if (!pre.sub_ansatz.index_of(t)) extension.push_back(t);
        }
        start = embed(pre, extension);
    }
    auto ansatz = std::make_shared<const Ansatz>(start.ansatz);

    TrainingConfig tc;
    tc.ansatz = ansatz;
    tc.theta0 = start.theta0;
    tc.target = target;
    tc.noise = noise_from_config(cfg.value("noise", json{{"kind", "exact"}}));
    tc.epsilon = get_or<double>(cfg, "epsilon", 0.1, "train config");
    tc.max_iters = get_or<int>(cfg, "max_iters", 1000, "train config");
    tc.record_every = get_or<int>(cfg, "record_every", 1, "train config");
    tc.seed = seed;
    const auto schedule = schedule_from_config(cfg.value("schedule", json{{"kind", "inverse_2m"}}), ansatz->size(),
                                               tc.epsilon, tc.noise, tc.max_iters);
    tc.schedule = schedule.kind;
    tc.schedule_params = schedule.params;

    const TrainingTrace trace = sgd_train(tc);

    std::ostringstream csv;
    write_trace_csv(csv, trace);
    const fs::path csv_path = options.out_dir / "trace.csv";
    write_text(csv_path, csv.str());
    result.files.push_back(csv_path);

    json model{{"n", n}, {"terms", json::array()},
               {"theta", std::vector<double>(trace.final_theta.data(), trace.final_theta.data() + trace.final_theta.size())}};
    for (const auto& t : ansatz->terms) model["terms"].push_back(t.letters());
    const fs::path model_path = options.out_dir / "model.json";
    write_json(model_path, model);
    result.files.push_back(model_path);

    std::vector<std::string> warnings = start.warnings;
    warnings.insert(warnings.end(), trace.warnings.begin(), trace.warnings.end());
    const auto& last = trace.rows.back();
    result.summary["converged"] = trace.converged;
    result.summary["iterations"] = trace.iterations;
    result.summary["best_t"] = trace.best_t;
    result.summary["best_max_error"] = trace.best_max_error;
    result.summary["final_max_error"] = last.max_abs_error;
    result.summary["final_S"] = std::isfinite(last.S) ? json(last.S) : json(nullptr);
    result.summary["m"] = ansatz->size();
    result.summary["init"] = init_kind;
    if (init_entropy) result.summary["init_entropy"] = *init_entropy;
    result.summary["schedule"] = schedule.name;
    result.summary["gamma_0"] = trace.rows.front().gamma;
    result.summary["target"] = target_note(cfg.at("target"), seed);
    result.summary["warnings"] = warnings;
    result.summary["wall_time_s"] = seconds_since(t0);
    finish(result, options);
    return result;
}

CommandResult cmd_scan_hessian(const json& config, const RunOptions& options) {
    json cfg;
    std::uint64_t seed = 0;
    CommandResult result = begin(Command::scan_hessian, config, options, cfg, seed);
    const std::string where = "scan-hessian config";
    allow_keys(cfg, {"seed", "kinds", "n", "mu", "instances", "single_qubit_terms", "periodic"}, where);
    const auto t0 = Clock::now();
    const auto kinds = get_or<std::vector<std::string>>(cfg, "kinds", {"gl_1d", "fully_connected"}, where);
    const auto ns = get_or<std::vector<int>>(cfg, "n", {2, 3, 4, 5}, where);
    const auto mus = get_or<std::vector<double>>(cfg, "mu", {0.5, 1.0}, where);
    const int instances = get_or<int>(cfg, "instances", 25, where);
    if (instances < 1) throw ConfigError("instances must be >= 1");
    ScanOptions so;
    so.single_qubit_terms = get_or<bool>(cfg, "single_qubit_terms", false, where);
    so.periodic = get_or<bool>(cfg, "periodic", false, where);
    for (int n : ns) check_qubit_count(n);

    std::vector<ScanRecord> records;
    for (const auto& kind : kinds) {
        const AnsatzKind k = ansatz_kind_from_string(kind);
        for (double mu : mus) {
            auto part = hessian_spectrum_scan(k, ns, mu, instances, seed, so);
            records.insert(records.end(), part.begin(), part.end());
        }
    }
    std::ostringstream csv;
    write_scan_csv(csv, records);
    const fs::path csv_path = options.out_dir / "hessian_scan.csv";
    write_text(csv_path, csv.str());
    result.files.push_back(csv_path);

    const auto summaries = summarize_scan(records);
    std::ostringstream sum_csv;
    sum_csv << "kind,n,mu,median_min_eig,q25_min_eig,q75_min_eig,max_max_eig\n";
    for (const auto& s : summaries) {
        sum_csv << s.kind << ',' << s.n << ',' << format_number(s.mu) << ',' << format_number(s.median_min_eig) << ','
                << format_number(s.q25_min_eig) << ',' << format_number(s.q75_min_eig) << ','
                << format_number(s.max_max_eig) << '\n';
    }
    const fs::path sum_path = options.out_dir / "hessian_summary.csv";
    write_text(sum_path, sum_csv.str());
    result.files.push_back(sum_path);

    bool psd = true, smooth = true;
    for (const auto& r : records) {
        psd = psd && r.min_eig >= -1e-9;
        smooth = smooth && r.max_eig <= smoothness_constant(r.m) + 1e-6;
    }
    json series = json::array();
    for (const auto& kind : kinds) {
        for (double mu : mus) {
            json medians = json::array();
            bool monotone = true;
            double prev = std::numeric_limits<double>::infinity();
            for (const auto& s : summaries) {
                if (s.kind != kind || s.mu != mu) continue;
                medians.push_back({{"n", s.n}, {"median_min_eig", s.median_min_eig}});
                monotone = monotone && s.median_min_eig <= prev;
                prev = s.median_min_eig;
            }
            series.push_back({{"kind", kind}, {"mu", mu}, {"medians", medians}, {"non_increasing", monotone}});
        }
    }
    result.summary["records"] = records.size();
    result.summary["all_psd"] = psd;
    result.summary["all_within_2m"] = smooth;
    result.summary["series"] = series;
    result.summary["wall_time_s"] = seconds_since(t0);
    finish(result, options);
    return result;
}

CommandResult cmd_scan_scaling(const json& config, const RunOptions& options) {
    json cfg;
    std::uint64_t seed = 0;
    CommandResult result = begin(Command::scan_scaling, config, options, cfg, seed);
    const std::string where = "scan-scaling config";
    allow_keys(cfg, {"seed", "target", "ansatz", "sweep", "n", "epsilon", "noise", "schedule", "max_iters"}, where);
    const auto t0 = Clock::now();
    const json target_spec = cfg.value("target", json{{"kind", "xxz"}, {"n", 6}});
    const auto sweep = get_or<std::string>(cfg, "sweep", "n", where);
    const json ansatz_spec = cfg.value("ansatz", json{{"kind", "fully_connected"}});
    const NoiseModel noise = noise_from_config(cfg.value("noise", json{{"kind", "gaussian"}, {"variance_sum", 0.01}}));
    const json schedule_spec = cfg.value("schedule", json{{"kind", "thm1"}});
    const int max_iters = get_or<int>(cfg, "max_iters", 200000, where);

    struct Point {
        int n;
        double eps;
    };
    std::vector<Point> points;
    if (sweep == "n") {
        if (!size_parametric(target_spec)) throw ConfigError("an n sweep needs an xxz or synthetic target");
        const double eps = get_or<double>(cfg, "epsilon", 0.1, where);
        for (int n : get_or<std::vector<int>>(cfg, "n", {3, 4, 5, 6}, where)) points.push_back({n, eps});
    } else if (sweep == "epsilon") {
        if (cfg.contains("n")) throw ConfigError("an epsilon sweep takes n from the target");
        const auto eps_list = get<std::vector<double>>(cfg, "epsilon", where);
        for (double e : eps_list) points.push_back({-1, e});
    } else {
        throw ConfigError("sweep must be 'n' or 'epsilon'");
    }
    if (points.size() < 2) throw ConfigError("a scaling scan needs at least two points");

    std::ostringstream csv;
    csv << "x,n,epsilon,m,gamma_0,iterations,converged\n";
    std::vector<double> xs, ys;
    json rows = json::array();
    bool all_converged = true;
    std::optional<Target> fixed;
    if (sweep == "epsilon") fixed = target_from_config(target_spec, seed, options.config_dir);
    for (const auto& p : points) {
        const Target target =
            fixed ? *fixed : target_from_config(target_spec, seed, options.config_dir, p.n);
        auto ansatz = std::make_shared<const Ansatz>(ansatz_from_config(ansatz_spec, target.n, "ansatz"));
        TrainingConfig tc;
        tc.ansatz = ansatz;
        tc.target = target;
        tc.noise = noise;
        tc.epsilon = p.eps;
        tc.max_iters = max_iters;
        tc.seed = seed;
        tc.record_every = std::max(1, max_iters);
        const auto schedule = schedule_from_config(schedule_spec, ansatz->size(), p.eps, noise, max_iters);
        tc.schedule = schedule.kind;
        tc.schedule_params = schedule.params;
        const TrainingTrace trace = sgd_train(tc);
        const double x = sweep == "n" ? static_cast<double>(target.n) : 1.0 / p.eps;
        const double gamma0 = lr_schedule(schedule.kind, schedule.params, 0);
        csv << format_number(x) << ',' << target.n << ',' << format_number(p.eps) << ',' << ansatz->size() << ','
            << format_number(gamma0) << ',' << trace.iterations << ',' << (trace.converged ? 1 : 0) << '\n';
        rows.push_back({{"x", x}, {"n", target.n}, {"epsilon", p.eps}, {"m", ansatz->size()},
                        {"iterations", trace.iterations}, {"converged", trace.converged}});
        all_converged = all_converged && trace.converged;
        xs.push_back(x);
        ys.push_back(static_cast<double>(trace.iterations));
    }
    const fs::path csv_path = options.out_dir / "scaling.csv";
    write_text(csv_path, csv.str());
    result.files.push_back(csv_path);

    const double slope = loglog_slope(xs, ys);
    result.summary["sweep"] = sweep;
    result.summary["points"] = rows;
    result.summary["loglog_slope"] = std::isfinite(slope) ? json(slope) : json(nullptr);
    result.summary["all_converged"] = all_converged;
    result.summary["wall_time_s"] = seconds_since(t0);
    finish(result, options);
    return result;
}

CommandResult cmd_bounds(const json& config, const RunOptions& options) {
    json cfg;
    std::uint64_t seed = 0;
    CommandResult result = begin(Command::bounds, config, options, cfg, seed);
    const std::string where = "bounds config";
    allow_keys(cfg, {"seed", "m", "ansatz", "target", "kappa", "xi", "variance_sum", "epsilon", "delta0", "alpha",
                     "lambda_success", "k_locality"},
               where);
    BoundsInput in;
    std::optional<Target> target;
    if (cfg.contains("target")) target = target_from_config(cfg.at("target"), seed, options.config_dir);
    if (cfg.contains("m")) {
        if (cfg.contains("ansatz")) throw ConfigError("give either 'm' or 'ansatz'");
        in.m = get<std::size_t>(cfg, "m", where);
    } else if (cfg.contains("ansatz")) {
        json spec = cfg.at("ansatz");
        int n = 0;
        if (spec.contains("n")) {
            n = get<int>(spec, "n", "ansatz");
            spec.erase("n");
        } else if (target) {
            n = target->n;
        } else {
            throw ConfigError("ansatz needs 'n' when no target is given");
        }
        in.m = ansatz_from_config(spec, n, "ansatz").size();
    } else {
        throw ConfigError("bounds config needs 'm' or 'ansatz'");
    }
    if (cfg.contains("variance_sum")) {
        if (cfg.contains("kappa") || cfg.contains("xi")) throw ConfigError("give either 'variance_sum' or 'kappa'/'xi'");
        const double v = get<double>(cfg, "variance_sum", where);
        if (v < 0.0) throw ConfigError("variance_sum must be non-negative");
        in.kappa = in.xi = std::sqrt(v / 2.0);
    } else {
        in.kappa = get_or<double>(cfg, "kappa", 0.0, where);
        in.xi = get_or<double>(cfg, "xi", 0.0, where);
    }
    in.epsilon = get_or<double>(cfg, "epsilon", 0.1, where);
    in.alpha = get_opt<double>(cfg, "alpha", where);
    in.lambda_success = get_or<double>(cfg, "lambda_success", in.lambda_success, where);
    in.k_locality = get_opt<int>(cfg, "k_locality", where);
    std::string delta0_source = "config";
    if (cfg.contains("delta0")) {
        in.delta0 = get<double>(cfg, "delta0", where);
    } else if (target) {
        in.delta0 = maximally_mixed_entropy(*target);
        delta0_source = "S(eta || I/2^n) upper bound";
    } else {
        throw ConfigError("bounds config needs 'delta0' or a 'target'");
    }
    const BoundsRecord b = theorem_bounds(in);
    json out;
    out["m"] = in.m;
    out["kappa"] = in.kappa;
    out["xi"] = in.xi;
    out["epsilon"] = in.epsilon;
    out["delta0"] = in.delta0;
    out["delta0_source"] = delta0_source;
    out["T_thm1"] = b.T_thm1;
    out["gamma_thm1"] = b.gamma_thm1;
    out["T_thm2"] = b.T_thm2 ? json(*b.T_thm2) : json(nullptr);
    out["N_pauli"] = std::isfinite(b.N_pauli) ? json(b.N_pauli) : json(nullptr);
    out["N_klocal"] = b.N_klocal && std::isfinite(*b.N_klocal) ? json(*b.N_klocal) : json(nullptr);
    out["sample_counts_note"] = "order of magnitude only, unit constants";
    out["precondition_met"] = b.precondition_met;
    out["warnings"] = b.warnings;
    const fs::path path = options.out_dir / "bounds.json";
    write_json(path, out);
    result.files.push_back(path);
    result.summary = out;
    finish(result, options);
    return result;
}

CommandResult run_command(Command command, const json& config, const RunOptions& options) {
    try {
        switch (command) {
            case Command::pretrain: return cmd_pretrain(config, options);
            case Command::train: return cmd_train(config, options);
            case Command::scan_hessian: return cmd_scan_hessian(config, options);
            case Command::scan_scaling: return cmd_scan_scaling(config, options);
            case Command::bounds: return cmd_bounds(config, options);
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    }
    throw ConfigError("unknown command");
}

}  // namespace qbm

#include "hawkes/io.hpp"

#include "hawkes/errors.hpp"

#include "json.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>
#include <string_view>

namespace hawkes {

using nlohmann::json;

namespace {

// ---- text helpers ----------------------------------------------------------

std::string format_double(double value) {
    char buffer[64];
    const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
    return std::string(buffer, result.ptr);
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) {
        s.remove_suffix(1);
    }
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
        s.remove_prefix(1);
    }
    return s;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(sep, start);
        if (pos == std::string_view::npos) {
            fields.push_back(trim(line.substr(start)));
            return fields;
        }
        fields.push_back(trim(line.substr(start, pos - start)));
        start = pos + 1;
    }
}

bool parse_double(std::string_view s, double& out) {
    if (s.empty()) return false;
    if (s.front() == '+') s.remove_prefix(1);
    const auto result = std::from_chars(s.data(), s.data() + s.size(), out);
    return result.ec == std::errc() && result.ptr == s.data() + s.size() && std::isfinite(out);
}

bool parse_int(std::string_view s, long long& out) {
    if (s.empty()) return false;
    if (s.front() == '+') s.remove_prefix(1);
    const auto result = std::from_chars(s.data(), s.data() + s.size(), out);
    return result.ec == std::errc() && result.ptr == s.data() + s.size();
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw DataError("cannot open '" + path + "' for writing");
    }
    return out;
}

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError("cannot open '" + path + "'");
    }
    return in;
}

[[noreturn]] void row_error(std::size_t line_no, const std::string& what) {
    std::ostringstream os;
    os << "line " << line_no << ": " << what;
    throw DataError(os.str());
}

// ---- JSON helpers -----------------------------------------------------------

json parse_json(const std::string& text, const char* what) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string(what) + ": invalid JSON: " + e.what());
    }
}

void reject_unknown(const json& object, std::initializer_list<std::string_view> allowed,
                    const std::string& where) {
    if (!object.is_object()) {
        throw ConfigError(where + " must be a JSON object");
    }
    for (const auto& item : object.items()) {
        if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end()) {
            throw ConfigError("unknown key '" + item.key() + "' in " + where);
        }
    }
}

const json& require(const json& object, const std::string& key, const std::string& where) {
    const auto it = object.find(key);
    if (it == object.end()) {
        throw ConfigError("missing key '" + key + "' in " + where);
    }
    return *it;
}

double as_number(const json& value, const std::string& where) {
    if (!value.is_number()) {
        throw ConfigError(where + " must be a number");
    }
    return value.get<double>();
}

int as_int(const json& value, const std::string& where) {
    if (!value.is_number_integer()) {
        throw ConfigError(where + " must be an integer");
    }
    return value.get<int>();
}

Eigen::VectorXd as_vector(const json& value, Eigen::Index size, const std::string& where) {
    if (value.is_number()) {
        return Eigen::VectorXd::Constant(size, value.get<double>());
    }
    if (!value.is_array() || static_cast<Eigen::Index>(value.size()) != size) {
        std::ostringstream os;
        os << where << " must be a number or an array of " << size << " numbers";
        throw ConfigError(os.str());
    }
    Eigen::VectorXd out(size);
    for (Eigen::Index i = 0; i < size; ++i) {
        out[i] = as_number(value[static_cast<std::size_t>(i)], where);
    }
    return out;
}

std::vector<Eigen::MatrixXd> as_alpha(const json& value, int k, int m, const std::string& where) {
    std::vector<Eigen::MatrixXd> out(static_cast<std::size_t>(m));
    if (value.is_number()) {
        for (auto& a : out) a = Eigen::MatrixXd::Constant(k, k, value.get<double>());
        return out;
    }
    std::ostringstream shape;
    shape << where << " must be a number or a nested [" << m << "][" << k << "][" << k << "] array";
    if (!value.is_array() || static_cast<int>(value.size()) != m) {
        throw ConfigError(shape.str());
    }
    for (int mm = 0; mm < m; ++mm) {
        const json& rows = value[static_cast<std::size_t>(mm)];
        if (!rows.is_array() || static_cast<int>(rows.size()) != k) throw ConfigError(shape.str());
        out[static_cast<std::size_t>(mm)].resize(k, k);
        for (int i = 0; i < k; ++i) {
            const json& row = rows[static_cast<std::size_t>(i)];
            if (!row.is_array() || static_cast<int>(row.size()) != k) throw ConfigError(shape.str());
            for (int j = 0; j < k; ++j) {
                out[static_cast<std::size_t>(mm)](i, j) = as_number(row[static_cast<std::size_t>(j)], where);
            }
        }
    }
    return out;
}

json vector_json(const Eigen::VectorXd& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
    return out;
}

json alpha_json(const std::vector<Eigen::MatrixXd>& alpha) {
    json out = json::array();
    for (const auto& a : alpha) {
        json rows = json::array();
        for (Eigen::Index i = 0; i < a.rows(); ++i) {
            json row = json::array();
            for (Eigen::Index j = 0; j < a.cols(); ++j) row.push_back(a(i, j));
            rows.push_back(std::move(row));
        }
        out.push_back(std::move(rows));
    }
    return out;
}

json kernels_json(const ModelSpec& spec) {
    json out = json::array();
    for (const auto& family : spec.kernels) {
        json entry = {{"family", family.name()}};
        if (family.kind == KernelKind::kPowerLaw) entry["cutoff"] = family.cutoff;
        out.push_back(std::move(entry));
    }
    return out;
}

std::vector<KernelFamily> parse_kernels(const json& value, const std::string& where) {
    if (!value.is_array() || value.empty()) {
        throw ConfigError(where + " must be a nonempty array");
    }
    std::vector<KernelFamily> out;
    for (const auto& entry : value) {
        reject_unknown(entry, {"family", "cutoff"}, where + " entry");
        const json& family = require(entry, "family", where + " entry");
        if (!family.is_string()) throw ConfigError(where + ": family must be a string");
        const auto name = family.get<std::string>();
        if (name == "exponential") {
            if (entry.contains("cutoff")) throw ConfigError(where + ": exponential kernels take no cutoff");
            out.push_back(KernelFamily::exponential());
        } else if (name == "power_law" || name == "power-law") {
            const double c = as_number(require(entry, "cutoff", where + " power-law entry"), where + ".cutoff");
            try {
                out.push_back(KernelFamily::power_law(c));
            } catch (const DomainError& e) {
                throw ConfigError(where + ": " + e.what());
            }
        } else {
            throw ConfigError(where + ": unknown kernel family '" + name + "'");
        }
    }
    return out;
}

ParamVector parse_params_section(const json& section, const ModelSpec& spec, const std::string& where) {
    reject_unknown(section, {"mu", "alpha", "beta"}, where);
    ParamVector p;
    p.mu = as_vector(require(section, "mu", where), spec.num_types, where + ".mu");
    p.alpha = as_alpha(require(section, "alpha", where), spec.num_types, spec.num_kernels(), where + ".alpha");
    p.beta = as_vector(require(section, "beta", where), spec.num_kernels(), where + ".beta");
    return p;
}

json params_json(const ParamVector& p) {
    return {{"mu", vector_json(p.mu)}, {"alpha", alpha_json(p.alpha)}, {"beta", vector_json(p.beta)}};
}

template <typename Fn>
auto config_guard(Fn&& fn) {
    try {
        return fn();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("invalid configuration value: ") + e.what());
    } catch (const DomainError& e) {
        throw ConfigError(std::string("invalid configuration: ") + e.what());
    }
}

}  // namespace

std::string read_text_file(const std::string& path) {
    std::ifstream in = open_input(path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

// ---- events ------------------------------------------------------------------

void write_events_csv(std::ostream& out, const EventSequence& events) {
    out << "time,type\n";
    for (std::size_t e = 0; e < events.size(); ++e) {
        out << format_double(events.times[e]) << ',' << events.types[e] << '\n';
    }
    if (!out) {
        throw DataError("failed writing event CSV");
    }
}

void write_events_csv(const std::string& path, const EventSequence& events) {
    std::ofstream out = open_output(path);
    write_events_csv(out, events);
}

EventSequence read_events_csv(std::istream& in, const EventReadOptions& options) {
    std::string line;
    if (!std::getline(in, line) || trim(line) != "time,type") {
        throw DataError("line 1: event CSV must start with the header 'time,type'");
    }
    EventSequence events;
    std::size_t line_no = 1;
    int max_type = -1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split(line, ',');
        double t = 0.0;
        long long type = 0;
        if (fields.size() != 2) row_error(line_no, "expected 2 fields 'time,type'");
        if (!parse_double(fields[0], t) || t < 0.0) row_error(line_no, "time must be a nonnegative number");
        if (!parse_int(fields[1], type) || type < 0 || type > std::numeric_limits<int>::max()) {
            row_error(line_no, "type must be a nonnegative integer");
        }
        if (!events.times.empty() && t < events.times.back()) row_error(line_no, "times are not sorted ascending");
        if (options.num_types && type >= *options.num_types) {
            row_error(line_no, "type " + std::to_string(type) + " outside [0, " + std::to_string(*options.num_types) + ")");
        }
        if (options.horizon && t > *options.horizon) {
            row_error(line_no, "time " + format_double(t) + " beyond the horizon " + format_double(*options.horizon));
        }
        events.times.push_back(t);
        events.types.push_back(static_cast<int>(type));
        max_type = std::max(max_type, static_cast<int>(type));
    }
    events.num_types = options.num_types.value_or(std::max(max_type + 1, 1));
    events.horizon = options.horizon.value_or(events.times.empty() ? 0.0 : events.times.back());
    events.validate();
    return events;
}

EventSequence read_events_csv(const std::string& path, const EventReadOptions& options) {
    std::ifstream in = open_input(path);
    return read_events_csv(in, options);
}

// ---- params ------------------------------------------------------------------

std::string params_to_json(const ParamsDocument& doc) {
    json out = params_json(doc.params);
    out["kernels"] = kernels_json(doc.spec);
    out["objective"] = doc.objective ? json(*doc.objective) : json(nullptr);
    json meta = {{"K", doc.spec.num_types}, {"M", doc.spec.num_kernels()}};
    if (doc.fit) {
        meta["algorithm"] = doc.fit->algorithm;
        meta["iterations"] = doc.fit->iterations;
        meta["aa_accepted"] = doc.fit->aa_accepted;
        meta["aa_rejected"] = doc.fit->aa_rejected;
        meta["restarts"] = doc.fit->restarts;
        meta["num_events"] = doc.fit->num_events;
        meta["horizon"] = doc.fit->horizon;
        meta["C"] = doc.fit->reg_c;
    }
    out["meta"] = std::move(meta);
    return out.dump(2) + "\n";
}

ParamsDocument params_from_json(const std::string& text) {
    const json in = parse_json(text, "params");
    return config_guard([&] {
        reject_unknown(in, {"mu", "alpha", "beta", "kernels", "objective", "meta"}, "params");
        ParamsDocument doc;
        doc.spec.kernels = parse_kernels(require(in, "kernels", "params"), "params.kernels");
        const json& mu = require(in, "mu", "params");
        if (!mu.is_array() || mu.empty()) throw ConfigError("params.mu must be a nonempty array");
        doc.spec.num_types = static_cast<int>(mu.size());
        doc.spec.validate();
        json section = {{"mu", in["mu"]}, {"alpha", require(in, "alpha", "params")}, {"beta", require(in, "beta", "params")}};
        doc.params = parse_params_section(section, doc.spec, "params");
        if (in.contains("objective") && !in["objective"].is_null()) {
            doc.objective = as_number(in["objective"], "params.objective");
        }
        if (in.contains("meta") && in["meta"].contains("algorithm")) {
            const json& meta = in["meta"];
            FitSummary fit;
            fit.algorithm = meta.value("algorithm", "");
            fit.iterations = meta.value("iterations", std::size_t{0});
            fit.aa_accepted = meta.value("aa_accepted", std::size_t{0});
            fit.aa_rejected = meta.value("aa_rejected", std::size_t{0});
            fit.restarts = meta.value("restarts", std::size_t{0});
            fit.num_events = meta.value("num_events", std::size_t{0});
            fit.horizon = meta.value("horizon", 0.0);
            fit.reg_c = meta.value("C", 0.0);
            doc.fit = fit;
        }
        return doc;
    });
}

void write_params_json(const std::string& path, const ParamsDocument& doc) {
    std::ofstream out = open_output(path);
    out << params_to_json(doc);
}

ParamsDocument read_params_json(const std::string& path) {
    return params_from_json(read_text_file(path));
}

// ---- config ------------------------------------------------------------------

RunConfig config_from_json(const std::string& text) {
    const json in = parse_json(text, "config");
    return config_guard([&] {
        reject_unknown(in, {"model", "domain", "init", "truth", "regularization", "optimizer", "horizon"}, "config");
        RunConfig cfg;

        const json& model = require(in, "model", "config");
        reject_unknown(model, {"K", "M", "kernels", "truncation_horizon"}, "model");
        cfg.spec.num_types = as_int(require(model, "K", "model"), "model.K");
        cfg.spec.kernels = parse_kernels(require(model, "kernels", "model"), "model.kernels");
        if (model.contains("M") && as_int(model["M"], "model.M") != cfg.spec.num_kernels()) {
            throw ConfigError("model.M does not match the number of kernels");
        }
        if (model.contains("truncation_horizon")) {
            cfg.truncation_horizon = as_number(model["truncation_horizon"], "model.truncation_horizon");
            if (!(cfg.truncation_horizon > 0.0)) throw ConfigError("model.truncation_horizon must be positive");
        }
        cfg.spec.validate();
        const int k = cfg.spec.num_types;
        const int m = cfg.spec.num_kernels();

        const json& domain = require(in, "domain", "config");
        reject_unknown(domain, {"mu", "alpha", "beta"}, "domain");
        const auto bounds = [&](const char* name) -> std::pair<json, json> {
            const json& entry = require(domain, name, "domain");
            reject_unknown(entry, {"lower", "upper"}, std::string("domain.") + name);
            return {require(entry, "lower", std::string("domain.") + name),
                    require(entry, "upper", std::string("domain.") + name)};
        };
        const auto [mu_lo, mu_hi] = bounds("mu");
        const auto [alpha_lo, alpha_hi] = bounds("alpha");
        const auto [beta_lo, beta_hi] = bounds("beta");
        cfg.domain.lower.mu = as_vector(mu_lo, k, "domain.mu.lower");
        cfg.domain.upper.mu = as_vector(mu_hi, k, "domain.mu.upper");
        cfg.domain.lower.alpha = as_alpha(alpha_lo, k, m, "domain.alpha.lower");
        cfg.domain.upper.alpha = as_alpha(alpha_hi, k, m, "domain.alpha.upper");
        cfg.domain.lower.beta = as_vector(beta_lo, m, "domain.beta.lower");
        cfg.domain.upper.beta = as_vector(beta_hi, m, "domain.beta.upper");
        cfg.domain.validate(cfg.spec);

        cfg.init = parse_params_section(require(in, "init", "config"), cfg.spec, "init");
        cfg.init.validate(cfg.spec);
        if (in.contains("truth")) {
            cfg.truth = parse_params_section(in["truth"], cfg.spec, "truth");
            cfg.truth->validate(cfg.spec);
        }

        if (in.contains("regularization")) {
            const json& reg = in["regularization"];
            reject_unknown(reg, {"C"}, "regularization");
            cfg.reg_c = as_number(require(reg, "C", "regularization"), "regularization.C");
            if (!(cfg.reg_c >= 0.0)) throw ConfigError("regularization.C must be nonnegative");
        }
        if (in.contains("horizon")) {
            cfg.horizon = as_number(in["horizon"], "horizon");
            if (!(*cfg.horizon >= 0.0)) throw ConfigError("horizon must be nonnegative");
        }

        if (in.contains("optimizer")) {
            const json& opt = in["optimizer"];
            reject_unknown(opt, {"algorithm", "epsilon", "gamma", "gamma1", "gamma2", "Lbar", "Lbar1", "Lbar2",
                                 "Lbar_safety", "tau", "tau1", "tau2", "omega_bar", "nu", "delta", "C1", "C2",
                                 "memory", "max_iters", "aa_enabled", "aa_pairing"},
                           "optimizer");
            HyperParams& hp = cfg.hp;
            const auto number = [&](const char* key, double& target) {
                if (opt.contains(key)) target = as_number(opt[key], std::string("optimizer.") + key);
            };
            if (opt.contains("algorithm")) {
                if (!opt["algorithm"].is_string()) throw ConfigError("optimizer.algorithm must be a string");
                cfg.algorithm = parse_algorithm(opt["algorithm"].get<std::string>());
            }
            number("epsilon", hp.epsilon);
            number("gamma", hp.gamma1);
            number("gamma", hp.gamma2);
            number("gamma1", hp.gamma1);
            number("gamma2", hp.gamma2);
            for (const char* key : {"Lbar", "Lbar1", "Lbar2"}) {
                if (opt.contains(key) && opt[key].is_string()) {
                    if (opt[key].get<std::string>() != "estimate") {
                        throw ConfigError(std::string("optimizer.") + key + " must be a number or \"estimate\"");
                    }
                    cfg.estimate_lbar = true;
                }
            }
            if (!cfg.estimate_lbar) {
                number("Lbar", hp.lbar1);
                number("Lbar", hp.lbar2);
                number("Lbar1", hp.lbar1);
                number("Lbar2", hp.lbar2);
            }
            number("Lbar_safety", cfg.lbar_safety);
            if (opt.contains("tau")) hp.tau1_override = hp.tau2_override = as_number(opt["tau"], "optimizer.tau");
            if (opt.contains("tau1")) hp.tau1_override = as_number(opt["tau1"], "optimizer.tau1");
            if (opt.contains("tau2")) hp.tau2_override = as_number(opt["tau2"], "optimizer.tau2");
            number("omega_bar", hp.omega_bar);
            number("nu", hp.nu);
            if (opt.contains("delta") && opt["delta"].is_string()) {
                if (opt["delta"].get<std::string>() != "auto") {
                    throw ConfigError("optimizer.delta must be a number or \"auto\"");
                }
                cfg.auto_delta = true;
            } else {
                number("delta", hp.delta);
            }
            number("C1", hp.c1);
            number("C2", hp.c2);
            if (opt.contains("memory")) hp.memory = as_int(opt["memory"], "optimizer.memory");
            if (opt.contains("max_iters")) hp.max_iters = as_int(opt["max_iters"], "optimizer.max_iters");
            if (opt.contains("aa_enabled")) hp.aa_enabled = opt["aa_enabled"].get<bool>();
            if (opt.contains("aa_pairing")) {
                if (!opt["aa_pairing"].is_string()) throw ConfigError("optimizer.aa_pairing must be a string");
                hp.aa_pairing = parse_aa_pairing(opt["aa_pairing"].get<std::string>());
            }
            if (!(cfg.lbar_safety > 0.0)) throw ConfigError("optimizer.Lbar_safety must be positive");
        }
        if (cfg.auto_delta && !cfg.estimate_lbar) {
            cfg.hp.delta = std::max(cfg.hp.delta1(), cfg.hp.delta2());
        }
        cfg.hp.validate();
        return cfg;
    });
}

RunConfig read_config(const std::string& path) {
    return config_from_json(read_text_file(path));
}

std::string config_to_json(const RunConfig& cfg) {
    json out;
    json model = {{"K", cfg.spec.num_types}, {"M", cfg.spec.num_kernels()}, {"kernels", kernels_json(cfg.spec)}};
    if (std::isfinite(cfg.truncation_horizon)) model["truncation_horizon"] = cfg.truncation_horizon;
    out["model"] = std::move(model);
    out["domain"] = {
        {"mu", {{"lower", vector_json(cfg.domain.lower.mu)}, {"upper", vector_json(cfg.domain.upper.mu)}}},
        {"alpha", {{"lower", alpha_json(cfg.domain.lower.alpha)}, {"upper", alpha_json(cfg.domain.upper.alpha)}}},
        {"beta", {{"lower", vector_json(cfg.domain.lower.beta)}, {"upper", vector_json(cfg.domain.upper.beta)}}},
    };
    out["init"] = params_json(cfg.init);
    if (cfg.truth) out["truth"] = params_json(*cfg.truth);
    out["regularization"] = {{"C", cfg.reg_c}};
    if (cfg.horizon) out["horizon"] = *cfg.horizon;
    const HyperParams& hp = cfg.hp;
    json opt = {
        {"algorithm", to_string(cfg.algorithm)},
        {"epsilon", hp.epsilon},
        {"gamma1", hp.gamma1},
        {"gamma2", hp.gamma2},
        {"omega_bar", hp.omega_bar},
        {"nu", hp.nu},
        {"C1", hp.c1},
        {"C2", hp.c2},
        {"memory", hp.memory},
        {"max_iters", hp.max_iters},
        {"aa_enabled", hp.aa_enabled},
        {"aa_pairing", to_string(hp.aa_pairing)},
    };
    if (cfg.estimate_lbar) {
        opt["Lbar"] = "estimate";
        opt["Lbar_safety"] = cfg.lbar_safety;
    } else {
        opt["Lbar1"] = hp.lbar1;
        opt["Lbar2"] = hp.lbar2;
    }
    if (cfg.auto_delta) {
        opt["delta"] = "auto";
    } else {
        opt["delta"] = hp.delta;
    }
    if (hp.tau1_override) opt["tau1"] = *hp.tau1_override;
    if (hp.tau2_override) opt["tau2"] = *hp.tau2_override;
    out["optimizer"] = std::move(opt);
    return out.dump(2) + "\n";
}

void resolve_hyperparams(RunConfig& cfg, const LikelihoodProblem& problem) {
    if (cfg.estimate_lbar) {
        const LipschitzBounds bounds = estimate_lipschitz(problem, cfg.init, cfg.lbar_safety);
        cfg.hp.lbar1 = bounds.block1;
        cfg.hp.lbar2 = bounds.block2;
        cfg.estimate_lbar = false;
    }
    if (cfg.auto_delta) {
        cfg.hp.delta = std::max(cfg.hp.delta1(), cfg.hp.delta2());
        cfg.auto_delta = false;
    }
    cfg.hp.validate();
}

// ---- trace ---------------------------------------------------------------------

void write_trace_csv(std::ostream& out, const std::vector<TraceRecord>& trace) {
    out << "iter,objective,residual,step_kind,lyapunov,seconds\n";
    for (const auto& r : trace) {
        out << r.iter << ',' << format_double(r.objective) << ',' << format_double(r.residual) << ','
            << to_string(r.step_kind) << ',' << format_double(r.lyapunov) << ','
            << format_double(r.seconds) << '\n';
    }
    if (!out) {
        throw DataError("failed writing trace CSV");
    }
}

void write_trace_csv(const std::string& path, const std::vector<TraceRecord>& trace) {
    std::ofstream out = open_output(path);
    write_trace_csv(out, trace);
}

std::vector<TraceRecord> read_trace_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || trim(line) != "iter,objective,residual,step_kind,lyapunov,seconds") {
        throw DataError("line 1: trace CSV has an unexpected header");
    }
    std::vector<TraceRecord> trace;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto f = split(line, ',');
        if (f.size() != 6) row_error(line_no, "expected 6 fields");
        TraceRecord r;
        long long iter = 0;
        if (!parse_int(f[0], iter) || iter < 0) row_error(line_no, "bad iteration index");
        r.iter = static_cast<std::size_t>(iter);
        // Objective and Lyapunov values may legitimately be non-finite only on failure; keep strict.
        if (!parse_double(f[1], r.objective) || !parse_double(f[2], r.residual) ||
            !parse_double(f[4], r.lyapunov) || !parse_double(f[5], r.seconds)) {
            row_error(line_no, "bad numeric field");
        }
        try {
            r.step_kind = parse_step_kind(f[3]);
        } catch (const DataError& e) {
            row_error(line_no, e.what());
        }
        trace.push_back(r);
    }
    return trace;
}

std::vector<TraceRecord> read_trace_csv(const std::string& path) {
    std::ifstream in = open_input(path);
    return read_trace_csv(in);
}

// ---- ingestion -----------------------------------------------------------------

namespace {

constexpr int kLobsterTypes = 6;

int lobster_type_index(const json& value) {
    if (value.is_number_integer()) {
        const int t = value.get<int>();
        if (t < 0 || t >= kLobsterTypes) throw ConfigError("LOBSTER mapping type must lie in [0, 6)");
        return t;
    }
    if (value.is_string()) {
        static const std::vector<std::string> names{"Lb", "La", "Mb", "Ma", "Cb", "Ca"};
        const auto name = value.get<std::string>();
        const auto it = std::find(names.begin(), names.end(), name);
        if (it == names.end()) throw ConfigError("unknown LOBSTER type name '" + name + "'");
        return static_cast<int>(it - names.begin());
    }
    throw ConfigError("LOBSTER mapping type must be an index or one of Lb, La, Mb, Ma, Cb, Ca");
}

double checked_fraction(const json& in) {
    if (!in.contains("max_bad_fraction")) return 0.01;
    const double f = as_number(in["max_bad_fraction"], "max_bad_fraction");
    if (!(f >= 0.0 && f <= 1.0)) throw ConfigError("max_bad_fraction must lie in [0, 1]");
    return f;
}

struct RawEvent {
    double time;
    int type;
};

EventSequence finish_ingest(std::vector<RawEvent>& raw, int num_types, double max_bad_fraction,
                            IngestSummary& s, IngestSummary* out_summary) {
    if (s.rows > 0 && static_cast<double>(s.bad) > max_bad_fraction * static_cast<double>(s.rows)) {
        std::ostringstream os;
        os << s.bad << " of " << s.rows << " rows could not be parsed (threshold "
           << max_bad_fraction * 100.0 << "%)";
        throw DataError(os.str());
    }
    std::stable_sort(raw.begin(), raw.end(), [](const RawEvent& a, const RawEvent& b) { return a.time < b.time; });
    EventSequence events;
    events.num_types = num_types;
    s.time_offset = raw.empty() ? 0.0 : raw.front().time;
    for (const auto& r : raw) {
        events.times.push_back(r.time - s.time_offset);
        events.types.push_back(r.type);
    }
    events.horizon = events.times.empty() ? 0.0 : events.times.back();
    s.emitted = events.size();
    events.validate();
    if (out_summary) *out_summary = s;
    return events;
}

}  // namespace

LobsterMapping LobsterMapping::standard() {
    LobsterMapping m;
    // Types: 0 L^b, 1 L^a, 2 M^b, 3 M^a, 4 C^b, 5 C^a.
    m.table[{1, 1}] = 0;
    m.table[{1, -1}] = 1;
    for (const int code : {4, 5}) {
        m.table[{code, 1}] = 2;
        m.table[{code, -1}] = 3;
    }
    for (const int code : {2, 3}) {
        m.table[{code, 1}] = 4;
        m.table[{code, -1}] = 5;
    }
    return m;
}

LobsterMapping lobster_mapping_from_json(const std::string& text) {
    const json in = parse_json(text, "LOBSTER mapping");
    return config_guard([&] {
        reject_unknown(in, {"rules", "max_bad_fraction"}, "LOBSTER mapping");
        LobsterMapping m;
        m.max_bad_fraction = checked_fraction(in);
        const json& rules = require(in, "rules", "LOBSTER mapping");
        if (!rules.is_array()) throw ConfigError("LOBSTER mapping rules must be an array");
        for (const auto& rule : rules) {
            reject_unknown(rule, {"codes", "direction", "type"}, "LOBSTER mapping rule");
            const int direction = as_int(require(rule, "direction", "rule"), "rule.direction");
            if (direction != 1 && direction != -1) throw ConfigError("rule.direction must be 1 or -1");
            const int type = lobster_type_index(require(rule, "type", "rule"));
            const json& codes = require(rule, "codes", "rule");
            const auto add = [&](const json& code) {
                const auto key = std::make_pair(as_int(code, "rule.codes"), direction);
                if (m.table.count(key) && m.table[key] != type) {
                    throw ConfigError("LOBSTER mapping assigns one (code, direction) pair to two types");
                }
                m.table[key] = type;
            };
            if (codes.is_array()) {
                for (const auto& c : codes) add(c);
            } else {
                add(codes);
            }
        }
        return m;
    });
}

LobsterMapping read_lobster_mapping(const std::string& path) {
    return lobster_mapping_from_json(read_text_file(path));
}

EventSequence ingest_lobster(std::istream& in, const LobsterMapping& mapping, IngestSummary* summary) {
    IngestSummary s;
    std::vector<RawEvent> raw;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        const auto f = split(line, ',');
        double time = 0.0;
        const bool time_ok = !f.empty() && parse_double(f[0], time);
        if (first && !time_ok) {  // header row
            first = false;
            continue;
        }
        first = false;
        ++s.rows;
        long long code = 0;
        long long order_id = 0;
        double size = 0.0;
        double price = 0.0;
        long long direction = 0;
        if (f.size() < 6 || !time_ok || time < 0.0 || !parse_int(f[1], code) || !parse_int(f[2], order_id) ||
            !parse_double(f[3], size) || !parse_double(f[4], price) || !parse_int(f[5], direction)) {
            ++s.bad;
            continue;
        }
        const auto it = mapping.table.find({static_cast<int>(code), static_cast<int>(direction)});
        if (it == mapping.table.end()) {
            ++s.unmapped;
            continue;
        }
        raw.push_back({time, it->second});
    }
    return finish_ingest(raw, kLobsterTypes, mapping.max_bad_fraction, s, summary);
}

GroupMapping group_mapping_from_json(const std::string& text) {
    const json in = parse_json(text, "group mapping");
    return config_guard([&] {
        reject_unknown(in, {"groups", "max_bad_fraction"}, "group mapping");
        GroupMapping m;
        m.max_bad_fraction = checked_fraction(in);
        const json& groups = require(in, "groups", "group mapping");
        if (!groups.is_object() || groups.empty()) throw ConfigError("group mapping 'groups' must be a nonempty object");
        for (const auto& item : groups.items()) {
            const int type = as_int(item.value(), "groups." + item.key());
            if (type < 0) throw ConfigError("group type indices must be nonnegative");
            m.groups[item.key()] = type;
        }
        return m;
    });
}

GroupMapping read_group_mapping(const std::string& path) {
    return group_mapping_from_json(read_text_file(path));
}

EventSequence ingest_posting_log(std::istream& in, const GroupMapping& mapping, IngestSummary* summary) {
    if (mapping.groups.empty()) {
        throw ConfigError("group mapping is empty");
    }
    int num_types = 0;
    for (const auto& [name, type] : mapping.groups) num_types = std::max(num_types, type + 1);
    IngestSummary s;
    std::vector<RawEvent> raw;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        const auto f = split(line, ',');
        double time = 0.0;
        const bool time_ok = !f.empty() && parse_double(f[0], time);
        if (first && !time_ok) {
            first = false;
            continue;
        }
        first = false;
        ++s.rows;
        if (f.size() != 2 || !time_ok || time < 0.0 || f[1].empty()) {
            ++s.bad;
            continue;
        }
        const auto it = mapping.groups.find(std::string(f[1]));
        if (it == mapping.groups.end()) {
            ++s.unmapped;
            continue;
        }
        raw.push_back({time, it->second});
    }
    return finish_ingest(raw, num_types, mapping.max_bad_fraction, s, summary);
}

}  // namespace hawkes

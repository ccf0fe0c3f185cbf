#include "foca/config.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

namespace foca {

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    size_t b = s.find_last_not_of(" \t\r\n");
    if (a == std::string::npos)
        return "";
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep))
        out.push_back(trim(item));
    return out;
}

double parse_double(const std::string& key, const std::string& v) {
    try {
        size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size())
            throw std::invalid_argument("trailing");
        return d;
    } catch (const std::exception&) {
        throw ConfigError("config field '" + key + "': expected a number, got '" + v + "'");
    }
}

int parse_int(const std::string& key, const std::string& v) {
    try {
        size_t pos = 0;
        const long d = std::stol(v, &pos);
        if (pos != v.size())
            throw std::invalid_argument("trailing");
        return static_cast<int>(d);
    } catch (const std::exception&) {
        throw ConfigError("config field '" + key + "': expected an integer, got '" + v + "'");
    }
}

uint64_t parse_u64(const std::string& key, const std::string& v) {
    try {
        size_t pos = 0;
        const unsigned long long d = std::stoull(v, &pos);
        if (pos != v.size())
            throw std::invalid_argument("trailing");
        return d;
    } catch (const std::exception&) {
        throw ConfigError("config field '" + key + "': expected an unsigned integer, got '" + v + "'");
    }
}

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

void ExperimentConfig::apply_override(const std::string& kv) {
    const size_t eq = kv.find('=');
    if (eq == std::string::npos)
        throw ConfigError("override '" + kv + "' is not of the form key=value");
    const std::string key = trim(kv.substr(0, eq));
    const std::string value = trim(kv.substr(eq + 1));

    using Setter = std::function<void(ExperimentConfig&, const std::string&, const std::string&)>;
    static const std::map<std::string, Setter> setters = {
        {"experiment", [](ExperimentConfig& c, const std::string&, const std::string& v) { c.experiment = v; }},
        {"source.kind", [](ExperimentConfig& c, const std::string&, const std::string& v) { c.source_kind = v; }},
        {"source.rho",
         [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.source_rho = parse_double(k, v); }},
        {"source.dim",
         [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.source_dim = parse_int(k, v); }},
        {"source.lambda_fast", [](ExperimentConfig& c, const std::string& k,
                                  const std::string& v) { c.source_lambda_fast = parse_double(k, v); }},
        {"source.lambda_slow", [](ExperimentConfig& c, const std::string& k,
                                  const std::string& v) { c.source_lambda_slow = parse_double(k, v); }},
        {"source.omega",
         [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.source_omega = parse_double(k, v); }},
        {"source.mu",
         [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.source_mu = parse_double(k, v); }},
        {"schedule.intervals",
         [](ExperimentConfig& c, const std::string& k, const std::string& v) {
             c.intervals.clear();
             for (const auto& item : split(v, ','))
                 c.intervals.push_back(parse_int(k, item));
         }},
        {"schedule.total_steps",
         [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.total_steps = parse_int(k, v); }},
        {"schedule.warmup",
         [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.warmup_steps = parse_int(k, v); }},
        {"predictors.kinds",
         [](ExperimentConfig& c, const std::string&, const std::string& v) {
             c.kinds.clear();
             for (const auto& item : split(v, ','))
                 c.kinds.push_back(predictor_kind_from_string(item));
         }},
        {"predictors.m",
         [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.taylor_order = parse_int(k, v); }},
        {"run.seeds",
         [](ExperimentConfig& c, const std::string& k, const std::string& v) {
             c.seeds.clear();
             for (const auto& item : split(v, ','))
                 c.seeds.push_back(parse_u64(k, item));
         }},
        {"run.h", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.h = parse_double(k, v); }},
        {"run.threads",
         [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.threads = parse_int(k, v); }},
        {"run.mmd_samples",
         [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.mmd_samples = parse_int(k, v); }},
        {"run.stiffness_window", [](ExperimentConfig& c, const std::string& k,
                                    const std::string& v) { c.stiffness_window = parse_int(k, v); }},
        {"denoiser.weights", [](ExperimentConfig& c, const std::string&, const std::string& v) { c.weights_path = v; }},
        {"denoiser.T",
         [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.T = parse_int(k, v); }},
        {"denoiser.beta_start",
         [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.beta_start = parse_double(k, v); }},
        {"denoiser.beta_end",
         [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.beta_end = parse_double(k, v); }},
        {"denoiser.wobble_amp",
         [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.wobble_amp = parse_double(k, v); }},
        {"denoiser.wobble_freq",
         [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.wobble_freq = parse_double(k, v); }},
        {"denoiser.wobble_decay",
         [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.wobble_decay = parse_double(k, v); }},
        {"train.dataset_size", [](ExperimentConfig& c, const std::string& k,
                                  const std::string& v) { c.train.dataset_size = parse_int(k, v); }},
        {"train.holdout_size", [](ExperimentConfig& c, const std::string& k,
                                  const std::string& v) { c.train.holdout_size = parse_int(k, v); }},
        {"train.batch_size",
         [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.train.batch_size = parse_int(k, v); }},
        {"train.max_epochs",
         [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.train.max_epochs = parse_int(k, v); }},
        {"train.learning_rate", [](ExperimentConfig& c, const std::string& k, const std::string& v) {
             c.train.learning_rate = parse_double(k, v);
         }},
        {"train.mse_threshold", [](ExperimentConfig& c, const std::string& k, const std::string& v) {
             c.train.mse_threshold = parse_double(k, v);
         }},
        {"train.seed",
         [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.train.seed = parse_u64(k, v); }},
        {"prop1.max_k",
         [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.prop1_max_k = parse_int(k, v); }},
        {"prop1.kind", [](ExperimentConfig& c, const std::string&, const std::string& v) { c.prop1_kind = v; }},
        {"dump.kind", [](ExperimentConfig& c, const std::string&, const std::string& v) { c.dump_kind = v; }},
        {"dump.interval",
         [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.dump_interval = parse_int(k, v); }},
    };

    const auto it = setters.find(key);
    if (it == setters.end())
        throw ConfigError("unknown config field '" + key + "'");
    it->second(*this, key, value);
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
    std::ifstream is(path);
    if (!is)
        throw ConfigError("cannot open config file " + path);
    ExperimentConfig cfg;
    std::string line, section;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';')
            continue;
        if (t.front() == '[' && t.back() == ']') {
            section = trim(t.substr(1, t.size() - 2));
            continue;
        }
        const size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        const std::string full = section.empty() ? key : section + "." + key;
        cfg.apply_override(full + "=" + value);
    }
    return cfg;
}

void ExperimentConfig::validate() const {
    if (experiment.empty())
        throw ConfigError("config field 'experiment': must not be empty");
    if (source_kind != "denoiser" && source_kind != "linear" && source_kind != "two_scale" &&
        source_kind != "rotation" && source_kind != "vdp")
        throw ConfigError("config field 'source.kind': unknown source '" + source_kind + "'");
    if (source_kind == "linear" && !(source_rho >= 0.0))
        throw ConfigError("config field 'source.rho': must be >= 0");
    if (source_dim < 1)
        throw ConfigError("config field 'source.dim': must be >= 1");
    if (intervals.empty())
        throw ConfigError("config field 'schedule.intervals': must name at least one interval");
    for (int n : intervals)
        if (n < 1)
            throw ConfigError("config field 'schedule.intervals': intervals must be >= 1");
    if (total_steps < 1)
        throw ConfigError("config field 'schedule.total_steps': must be >= 1");
    if (warmup_steps < 0)
        throw ConfigError("config field 'schedule.warmup': must be >= 0");
    if (kinds.empty())
        throw ConfigError("config field 'predictors.kinds': must name at least one kind");
    if (taylor_order < 1)
        throw ConfigError("config field 'predictors.m': must be >= 1");
    if (seeds.empty())
        throw ConfigError("config field 'run.seeds': must name at least one seed");
    if (h <= 0.0)
        throw ConfigError("config field 'run.h': must be positive");
    if (threads < 1)
        throw ConfigError("config field 'run.threads': must be >= 1");
    if (mmd_samples < 0)
        throw ConfigError("config field 'run.mmd_samples': must be >= 0");
    if (stiffness_window < 1)
        throw ConfigError("config field 'run.stiffness_window': must be >= 1");
    if (T < 1)
        throw ConfigError("config field 'denoiser.T': must be >= 1");
    if (prop1_max_k < 0)
        throw ConfigError("config field 'prop1.max_k': must be >= 0");
    predictor_kind_from_string(prop1_kind);
    predictor_kind_from_string(dump_kind);
    if (dump_interval < 1)
        throw ConfigError("config field 'dump.interval': must be >= 1");
}

std::string ExperimentConfig::normalized() const {
    std::map<std::string, std::string> kv;
    kv["experiment"] = experiment;
    kv["source.kind"] = source_kind;
    kv["source.rho"] = fmt_double(source_rho);
    kv["source.dim"] = std::to_string(source_dim);
    kv["source.lambda_fast"] = fmt_double(source_lambda_fast);
    kv["source.lambda_slow"] = fmt_double(source_lambda_slow);
    kv["source.omega"] = fmt_double(source_omega);
    kv["source.mu"] = fmt_double(source_mu);
    {
        std::string s;
        for (size_t i = 0; i < intervals.size(); ++i)
            s += (i ? "," : "") + std::to_string(intervals[i]);
        kv["schedule.intervals"] = s;
    }
    kv["schedule.total_steps"] = std::to_string(total_steps);
    kv["schedule.warmup"] = std::to_string(warmup_steps);
    {
        std::string s;
        for (size_t i = 0; i < kinds.size(); ++i)
            s += (i ? "," : "") + to_string(kinds[i]);
        kv["predictors.kinds"] = s;
    }
    kv["predictors.m"] = std::to_string(taylor_order);
    {
        std::string s;
        for (size_t i = 0; i < seeds.size(); ++i)
            s += (i ? "," : "") + std::to_string(seeds[i]);
        kv["run.seeds"] = s;
    }
    kv["run.h"] = fmt_double(h);
    kv["run.threads"] = std::to_string(threads);
    kv["run.mmd_samples"] = std::to_string(mmd_samples);
    kv["run.stiffness_window"] = std::to_string(stiffness_window);
    kv["denoiser.weights"] = weights_path;
    kv["denoiser.T"] = std::to_string(T);
    kv["denoiser.beta_start"] = fmt_double(beta_start);
    kv["denoiser.beta_end"] = fmt_double(beta_end);
    kv["denoiser.wobble_amp"] = fmt_double(wobble_amp);
    kv["denoiser.wobble_freq"] = fmt_double(wobble_freq);
    kv["denoiser.wobble_decay"] = fmt_double(wobble_decay);
    kv["train.dataset_size"] = std::to_string(train.dataset_size);
    kv["train.holdout_size"] = std::to_string(train.holdout_size);
    kv["train.batch_size"] = std::to_string(train.batch_size);
    kv["train.max_epochs"] = std::to_string(train.max_epochs);
    kv["train.learning_rate"] = fmt_double(train.learning_rate);
    kv["train.mse_threshold"] = fmt_double(train.mse_threshold);
    kv["train.seed"] = std::to_string(train.seed);
    kv["prop1.max_k"] = std::to_string(prop1_max_k);
    kv["prop1.kind"] = prop1_kind;
    kv["dump.kind"] = dump_kind;
    kv["dump.interval"] = std::to_string(dump_interval);

    std::string out;
    for (const auto& [k, v] : kv) {
        if (!out.empty())
            out += ';';
        out += k + "=" + v;
    }
    return out;
}

}  // namespace foca

#include "semigarch/config.hpp"

#include "semigarch/errors.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <cstdlib>
#include <sstream>

namespace semigarch {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(trim(cur));
    return out;
}

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fmt_list(const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ",";
        out += fmt_double(v[i]);
    }
    return out;
}

std::string fmt_list(const std::vector<long>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ",";
        out += std::to_string(v[i]);
    }
    return out;
}

class FieldParser {
  public:
    explicit FieldParser(std::vector<std::string>& errors) : errors_(errors) {}

    bool parse_double(const std::string& key, const std::string& value, double& out) {
        char* end = nullptr;
        const double v = std::strtod(value.c_str(), &end);
        if (end == value.c_str() || *end != '\0') {
            errors_.push_back(key + ": not a number: '" + value + "'");
            return false;
        }
        out = v;
        return true;
    }

    bool parse_long(const std::string& key, const std::string& value, long& out) {
        char* end = nullptr;
        const long v = std::strtol(value.c_str(), &end, 10);
        if (end == value.c_str() || *end != '\0') {
            errors_.push_back(key + ": not an integer: '" + value + "'");
            return false;
        }
        out = v;
        return true;
    }

    bool parse_u64(const std::string& key, const std::string& value, std::uint64_t& out) {
        char* end = nullptr;
        const unsigned long long v = std::strtoull(value.c_str(), &end, 10);
        if (end == value.c_str() || *end != '\0') {
            errors_.push_back(key + ": not an unsigned integer: '" + value + "'");
            return false;
        }
        out = v;
        return true;
    }

    bool parse_double_list(const std::string& key, const std::string& value,
                           std::vector<double>& out) {
        std::vector<double> parsed;
        for (const std::string& item : split(value, ',')) {
            double v;
            if (!parse_double(key, item, v)) return false;
            parsed.push_back(v);
        }
        out = std::move(parsed);
        return true;
    }

    bool parse_long_list(const std::string& key, const std::string& value,
                         std::vector<long>& out) {
        std::vector<long> parsed;
        for (const std::string& item : split(value, ',')) {
            long v;
            if (!parse_long(key, item, v)) return false;
            parsed.push_back(v);
        }
        out = std::move(parsed);
        return true;
    }

    bool parse_regime(const std::string& key, const std::string& value, Regime& out) {
        std::vector<double> vals;
        if (!parse_double_list(key, value, vals)) return false;
        if (vals.size() != 3) {
            errors_.push_back(key + ": expected three values intercept,obs,intensity");
            return false;
        }
        out = Regime{vals[0], vals[1], vals[2]};
        return true;
    }

  private:
    std::vector<std::string>& errors_;
};

RunConfig from_map(const std::map<std::string, std::string>& kv) {
    std::vector<std::string> errors;
    FieldParser fp(errors);
    RunConfig cfg;

    for (const auto& [key, value] : kv) {
        if (key == "model.p") {
            long v;
            if (fp.parse_long(key, value, v)) cfg.order.p = static_cast<int>(v);
        } else if (key == "model.q") {
            long v;
            if (fp.parse_long(key, value, v)) cfg.order.q = static_cast<int>(v);
        } else if (key == "model.mode") {
            if (value == "ingarch")
                cfg.mode = ProcessMode::Ingarch;
            else if (value == "garch")
                cfg.mode = ProcessMode::Garch;
            else
                errors.push_back("model.mode: expected ingarch or garch, got '" + value + "'");
        } else if (key == "model.form") {
            if (value == "linear")
                cfg.form = IntensityForm::Linear;
            else if (value == "threshold")
                cfg.form = IntensityForm::Threshold;
            else
                errors.push_back("model.form: expected linear or threshold, got '" + value + "'");
        } else if (key == "model.intercept") {
            fp.parse_double(key, value, cfg.intercept);
        } else if (key == "model.obs_coeffs") {
            fp.parse_double_list(key, value, cfg.obs_coeffs);
        } else if (key == "model.intensity_coeffs") {
            fp.parse_double_list(key, value, cfg.intensity_coeffs);
        } else if (key == "model.lower") {
            fp.parse_double(key, value, cfg.lower);
        } else if (key == "model.upper") {
            fp.parse_double(key, value, cfg.upper);
        } else if (key == "model.inside") {
            fp.parse_regime(key, value, cfg.inside);
        } else if (key == "model.outside") {
            fp.parse_regime(key, value, cfg.outside);
        } else if (key == "family.kind") {
            if (value == "poisson")
                cfg.family_kind = FamilyKind::Poisson;
            else if (value == "gaussian")
                cfg.family_kind = FamilyKind::GaussianZeroMean;
            else if (value == "zip")
                cfg.family_kind = FamilyKind::ZeroInflatedPoisson;
            else if (value == "compound")
                cfg.family_kind = FamilyKind::CompoundPoisson;
            else if (value == "gaussian_floor")
                cfg.family_kind = FamilyKind::GaussianWithFloor;
            else
                errors.push_back("family.kind: unknown family '" + value + "'");
        } else if (key == "family.pi") {
            fp.parse_double(key, value, cfg.family_pi);
        } else if (key == "family.omega") {
            fp.parse_double(key, value, cfg.family_omega);
        } else if (key == "family.jumps") {
            fp.parse_double_list(key, value, cfg.family_jumps);
        } else if (key == "experiment.kind") {
            if (value == "simulate")
                cfg.kind = ExperimentKind::Simulate;
            else if (value == "couple")
                cfg.kind = ExperimentKind::Couple;
            else if (value == "coalescence-lemma")
                cfg.kind = ExperimentKind::CoalescenceLemma;
            else if (value == "mixing-rate")
                cfg.kind = ExperimentKind::MixingRate;
            else if (value == "drift-check")
                cfg.kind = ExperimentKind::DriftCheck;
            else if (value == "reconstruct")
                cfg.kind = ExperimentKind::Reconstruct;
            else if (value == "counterexample")
                cfg.kind = ExperimentKind::Counterexample;
            else
                errors.push_back("experiment.kind: unknown experiment '" + value + "'");
        } else if (key == "experiment.seed") {
            fp.parse_u64(key, value, cfg.seed);
        } else if (key == "experiment.replicates") {
            fp.parse_long(key, value, cfg.replicates);
        } else if (key == "experiment.horizon") {
            fp.parse_long(key, value, cfg.horizon);
        } else if (key == "experiment.burn_in") {
            fp.parse_long(key, value, cfg.burn_in);
        } else if (key == "experiment.workers") {
            long v;
            if (fp.parse_long(key, value, v)) cfg.workers = static_cast<int>(v);
        } else if (key == "experiment.steps") {
            fp.parse_long(key, value, cfg.steps);
        } else if (key == "experiment.lambda0") {
            fp.parse_double(key, value, cfg.lambda0);
        } else if (key == "experiment.n_grid") {
            fp.parse_long_list(key, value, cfg.n_grid);
        } else if (key == "experiment.gap_grid") {
            fp.parse_double_list(key, value, cfg.gap_grid);
        } else if (key == "experiment.rho_target") {
            fp.parse_double(key, value, cfg.rho_target);
        } else if (key == "experiment.recover_offset") {
            fp.parse_double(key, value, cfg.recover_offset);
        } else if (key == "experiment.recover_scale") {
            fp.parse_double(key, value, cfg.recover_scale);
        } else if (key == "experiment.out") {
            cfg.out_prefix = value;
        } else if (key == "experiment.format") {
            if (value == "csv")
                cfg.format = OutputFormat::Csv;
            else if (value == "json")
                cfg.format = OutputFormat::Json;
            else
                errors.push_back("experiment.format: expected csv or json, got '" + value + "'");
        } else {
            errors.push_back("unknown key: " + key);
        }
    }

    // Structural validation; collect everything before reporting.
    if (cfg.order.p < 1) errors.push_back("model.p must be >= 1");
    if (cfg.order.q < 1) errors.push_back("model.q must be >= 1");
    if (cfg.replicates < 1) errors.push_back("experiment.replicates must be >= 1");
    if (cfg.horizon < 0) errors.push_back("experiment.horizon must be >= 0");
    if (cfg.workers < 1) errors.push_back("experiment.workers must be >= 1");
    if (cfg.steps < 1) errors.push_back("experiment.steps must be >= 1");
    if (!(cfg.lambda0 >= 0.0)) errors.push_back("experiment.lambda0 must be non-negative");
    if (!(cfg.rho_target > 0.0 && cfg.rho_target < 1.0))
        errors.push_back("experiment.rho_target must lie in (0,1)");
    const bool gaussian_family = cfg.family_kind == FamilyKind::GaussianZeroMean ||
                                 cfg.family_kind == FamilyKind::GaussianWithFloor;
    if (cfg.mode == ProcessMode::Garch && !gaussian_family)
        errors.push_back("model.mode=garch requires a gaussian family");
    if (cfg.mode == ProcessMode::Ingarch && gaussian_family)
        errors.push_back(
            "family.kind=gaussian* requires model.mode=garch (signed observations must "
            "enter the intensity map as squares)");
    if (cfg.family_kind == FamilyKind::GaussianWithFloor) {
        // the declared similarity constant 1/omega presumes the intensity
        // never drops below omega; with non-negative coefficients the
        // intercept is a lower bound for the whole path
        const double floor = cfg.form == IntensityForm::Linear
                                 ? cfg.intercept
                                 : std::min(cfg.inside.intercept, cfg.outside.intercept);
        if (floor < cfg.family_omega)
            errors.push_back(
                "family.omega exceeds the model intercept; the intensity can drop below "
                "the declared volatility floor");
    }
    if (errors.empty()) {
        try {
            cfg.build_spec();
        } catch (const std::exception& e) {
            errors.push_back(std::string("model: ") + e.what());
        }
        try {
            cfg.build_family();
        } catch (const std::exception& e) {
            errors.push_back(std::string("family: ") + e.what());
        }
        if (cfg.kind == ExperimentKind::Counterexample) {
            try {
                cfg.build_feedback();
            } catch (const std::exception& e) {
                errors.push_back(std::string("experiment: ") + e.what());
            }
        }
    }

    if (!errors.empty()) {
        std::ostringstream msg;
        msg << "invalid configuration (" << errors.size() << " problem"
            << (errors.size() == 1 ? "" : "s") << "):";
        for (const std::string& e : errors) msg << "\n  - " << e;
        throw ConfigError(msg.str());
    }
    return cfg;
}

} // namespace

std::string experiment_name(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::Simulate: return "simulate";
        case ExperimentKind::Couple: return "couple";
        case ExperimentKind::CoalescenceLemma: return "coalescence-lemma";
        case ExperimentKind::MixingRate: return "mixing-rate";
        case ExperimentKind::DriftCheck: return "drift-check";
        case ExperimentKind::Reconstruct: return "reconstruct";
        case ExperimentKind::Counterexample: return "counterexample";
    }
    return "unknown";
}

IntensitySpec RunConfig::build_spec() const {
    switch (form) {
        case IntensityForm::Linear:
            return IntensitySpec::linear(order, intercept, obs_coeffs, intensity_coeffs, mode);
        case IntensityForm::Threshold:
            return IntensitySpec::threshold(lower, upper, inside, outside, mode);
        case IntensityForm::Custom:
            throw ConfigError("custom intensity maps cannot be described in a config file");
    }
    throw ConfigError("unknown intensity form");
}

SeedFamily RunConfig::build_family() const {
    switch (family_kind) {
        case FamilyKind::Poisson: return SeedFamily::poisson();
        case FamilyKind::GaussianZeroMean: return SeedFamily::gaussian_zero_mean();
        case FamilyKind::ZeroInflatedPoisson: return SeedFamily::zero_inflated_poisson(family_pi);
        case FamilyKind::CompoundPoisson: return SeedFamily::compound_poisson(family_jumps);
        case FamilyKind::GaussianWithFloor: return SeedFamily::gaussian_with_floor(family_omega);
    }
    throw ConfigError("unknown family kind");
}

SaturatingFeedback RunConfig::build_feedback() const {
    return SaturatingFeedback(recover_offset, recover_scale);
}

std::map<std::string, std::string> RunConfig::to_key_values() const {
    std::map<std::string, std::string> kv;
    kv["model.p"] = std::to_string(order.p);
    kv["model.q"] = std::to_string(order.q);
    kv["model.mode"] = mode == ProcessMode::Garch ? "garch" : "ingarch";
    kv["model.form"] = form == IntensityForm::Threshold ? "threshold" : "linear";
    if (form == IntensityForm::Linear) {
        kv["model.intercept"] = fmt_double(intercept);
        kv["model.obs_coeffs"] = fmt_list(obs_coeffs);
        kv["model.intensity_coeffs"] = fmt_list(intensity_coeffs);
    } else {
        kv["model.lower"] = fmt_double(lower);
        kv["model.upper"] = fmt_double(upper);
        kv["model.inside"] = fmt_double(inside.intercept) + "," + fmt_double(inside.obs_coeff) +
                             "," + fmt_double(inside.intensity_coeff);
        kv["model.outside"] = fmt_double(outside.intercept) + "," + fmt_double(outside.obs_coeff) +
                              "," + fmt_double(outside.intensity_coeff);
    }
    switch (family_kind) {
        case FamilyKind::Poisson: kv["family.kind"] = "poisson"; break;
        case FamilyKind::GaussianZeroMean: kv["family.kind"] = "gaussian"; break;
        case FamilyKind::ZeroInflatedPoisson:
            kv["family.kind"] = "zip";
            kv["family.pi"] = fmt_double(family_pi);
            break;
        case FamilyKind::CompoundPoisson:
            kv["family.kind"] = "compound";
            kv["family.jumps"] = fmt_list(family_jumps);
            break;
        case FamilyKind::GaussianWithFloor:
            kv["family.kind"] = "gaussian_floor";
            kv["family.omega"] = fmt_double(family_omega);
            break;
    }
    kv["experiment.kind"] = experiment_name(kind);
    kv["experiment.seed"] = std::to_string(seed);
    kv["experiment.replicates"] = std::to_string(replicates);
    kv["experiment.horizon"] = std::to_string(horizon);
    kv["experiment.burn_in"] = std::to_string(burn_in);
    kv["experiment.steps"] = std::to_string(steps);
    kv["experiment.lambda0"] = fmt_double(lambda0);
    kv["experiment.n_grid"] = fmt_list(n_grid);
    kv["experiment.gap_grid"] = fmt_list(gap_grid);
    kv["experiment.rho_target"] = fmt_double(rho_target);
    kv["experiment.recover_offset"] = fmt_double(recover_offset);
    kv["experiment.recover_scale"] = fmt_double(recover_scale);
    // Execution details: listed for the echo, excluded from the hash.
    kv["experiment.workers"] = std::to_string(workers);
    kv["experiment.out"] = out_prefix;
    kv["experiment.format"] = format == OutputFormat::Json ? "json" : "csv";
    return kv;
}

std::uint64_t fnv1a64(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string RunConfig::config_hash() const {
    static const char* kExecutionKeys[] = {"experiment.workers", "experiment.out",
                                           "experiment.format"};
    std::string canon;
    for (const auto& [key, value] : to_key_values()) {
        bool skip = false;
        for (const char* ek : kExecutionKeys)
            if (key == ek) skip = true;
        if (skip) continue;
        canon += key;
        canon += '=';
        canon += value;
        canon += '\n';
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016" PRIx64, fnv1a64(canon));
    return buf;
}

RunConfig parse_config(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::vector<std::string> errors;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            errors.push_back("line " + std::to_string(lineno) + ": expected key=value");
            continue;
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (kv.count(key)) {
            errors.push_back("line " + std::to_string(lineno) + ": duplicate key " + key);
            continue;
        }
        kv[key] = value;
    }
    if (!errors.empty()) {
        std::ostringstream msg;
        msg << "invalid configuration (" << errors.size() << " problem"
            << (errors.size() == 1 ? "" : "s") << "):";
        for (const std::string& e : errors) msg << "\n  - " << e;
        throw ConfigError(msg.str());
    }
    return from_map(kv);
}

RunConfig apply_overrides(RunConfig base, const std::map<std::string, std::string>& overrides) {
    std::map<std::string, std::string> kv = base.to_key_values();
    for (const auto& [key, value] : overrides) kv[key] = value;
    return from_map(kv);
}

} // namespace semigarch

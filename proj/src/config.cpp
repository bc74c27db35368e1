#include "hawkes/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "hawkes/errors.hpp"

namespace hawkes {

namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& field, const std::string& why) {
    throw ConfigError("config field '" + field + "': " + why);
}

TransferFunction kernel_from_json(const json& t) {
    if (!t.is_object() || !t.contains("kind") || !t.at("kind").is_string()) {
        bad("transfer", "expected an object with a string 'kind'");
    }
    const std::string kind = t.at("kind").get<std::string>();
    try {
        if (kind == "zero") return TransferFunction::zero();
        if (kind == "exponential") {
            return TransferFunction::exponential(t.at("alpha").get<double>(),
                                                 t.at("beta").get<double>());
        }
        if (kind == "uniform_box") {
            return TransferFunction::uniform_box(t.at("c").get<double>(),
                                                 t.at("b").get<double>());
        }
        if (kind == "tabulated") {
            return TransferFunction::tabulated(t.at("grid").get<std::vector<double>>(),
                                               t.at("values").get<std::vector<double>>());
        }
    } catch (const json::exception& e) {
        bad("transfer", e.what());
    } catch (const std::invalid_argument& e) {
        bad("transfer", e.what());
    }
    bad("transfer.kind", "unknown kind '" + kind + "'");
}

json kernel_to_json(const TransferFunction& h) {
    switch (h.kind()) {
        case KernelKind::Zero:
            return {{"kind", "zero"}};
        case KernelKind::Exponential:
            return {{"kind", "exponential"}, {"alpha", h.param_alpha()}, {"beta", h.param_beta()}};
        case KernelKind::UniformBox:
            return {{"kind", "uniform_box"}, {"c", h.param_c()}, {"b", h.param_b()}};
        case KernelKind::Tabulated:
            return {{"kind", "tabulated"}, {"grid", h.grid()}, {"values", h.values()}};
    }
    return {{"kind", "zero"}};
}

template <class T>
T take(const json& j, const std::string& key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        bad(key, e.what());
    }
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config must be a JSON object");

    static const char* known[] = {"lambda", "transfer",     "A",    "horizon", "init_points",
                                  "seed",   "replications", "out",  "theta_star_tol"};
    for (const auto& item : j.items()) {
        bool ok = false;
        for (const char* k : known) ok = ok || item.key() == k;
        if (!ok) bad(item.key(), "unknown field");
    }

    ExperimentConfig cfg;
    cfg.lambda = take(j, "lambda", cfg.lambda);
    if (j.contains("transfer")) cfg.h = kernel_from_json(j.at("transfer"));
    cfg.A = take(j, "A", cfg.A);
    cfg.horizon = take(j, "horizon", cfg.horizon);
    cfg.init_points = take(j, "init_points", cfg.init_points);
    cfg.seed = take(j, "seed", cfg.seed);
    cfg.replications = take(j, "replications", cfg.replications);
    cfg.theta_star_tol = take(j, "theta_star_tol", cfg.theta_star_tol);
    cfg.out = take(j, "out", cfg.out);

    if (!(cfg.lambda >= 0.0)) bad("lambda", "must be >= 0");
    if (!(cfg.A >= 0.0)) bad("A", "must be >= 0");
    if (!(cfg.horizon > 0.0)) bad("horizon", "must be > 0");
    if (!(cfg.h.l1_norm() < 1.0)) {
        bad("transfer", "kernel is not sub-critical (l1 norm = " +
                            std::to_string(cfg.h.l1_norm()) + ")");
    }
    for (double p : cfg.init_points) {
        if (!(p <= 0.0)) bad("init_points", "entries must be <= 0");
    }
    std::sort(cfg.init_points.begin(), cfg.init_points.end());
    if (cfg.replications < 1) bad("replications", "must be >= 1");
    if (!(cfg.theta_star_tol > 0.0)) bad("theta_star_tol", "must be > 0");
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string serialize_config(const ExperimentConfig& cfg) {
    json j{{"lambda", cfg.lambda},
           {"transfer", kernel_to_json(cfg.h)},
           {"A", cfg.A},
           {"horizon", cfg.horizon},
           {"init_points", cfg.init_points},
           {"seed", cfg.seed},
           {"replications", cfg.replications},
           {"theta_star_tol", cfg.theta_star_tol},
           {"out", cfg.out}};
    return j.dump(2) + "\n";
}

}  // namespace hawkes

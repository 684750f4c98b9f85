#include "xylab/config.hpp"

#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>

#include <json.hpp>

namespace xylab {

namespace {

using nlohmann::json;

void require_keys(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const char* k : allowed)
            if (it.key() == k) {
                ok = true;
                break;
            }
        if (!ok) throw ConfigError("config: unknown key '" + path + it.key() + "'");
    }
}

const json& member(const json& obj, const std::string& path, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end()) throw ConfigError("config: missing key '" + path + key + "'");
    return *it;
}

double number_at(const json& obj, const std::string& path, const char* key) {
    const json& v = member(obj, path, key);
    if (!v.is_number()) throw ConfigError("config: '" + path + key + "' must be a number");
    return v.get<double>();
}

double number_or(const json& obj, const std::string& path, const char* key, double fallback) {
    if (obj.find(key) == obj.end()) return fallback;
    return number_at(obj, path, key);
}

long integer_at(const json& obj, const std::string& path, const char* key) {
    const json& v = member(obj, path, key);
    if (!v.is_number_integer()) throw ConfigError("config: '" + path + key + "' must be an integer");
    return v.get<long>();
}

long integer_or(const json& obj, const std::string& path, const char* key, long fallback) {
    if (obj.find(key) == obj.end()) return fallback;
    return integer_at(obj, path, key);
}

bool boolean_or(const json& obj, const std::string& path, const char* key, bool fallback) {
    if (obj.find(key) == obj.end()) return fallback;
    const json& v = *obj.find(key);
    if (!v.is_boolean()) throw ConfigError("config: '" + path + key + "' must be a boolean");
    return v.get<bool>();
}

std::vector<double> number_list(const json& v, const std::string& path) {
    if (!v.is_array() || v.empty()) throw ConfigError("config: '" + path + "' must be a nonempty array");
    std::vector<double> out;
    for (const auto& e : v) {
        if (!e.is_number()) throw ConfigError("config: '" + path + "' must contain numbers");
        out.push_back(e.get<double>());
    }
    return out;
}

Potential parse_potential(const json& p) {
    if (!p.is_object()) throw ConfigError("config: 'potential' must be an object");
    require_keys(p, "potential.", {"name", "eps", "arity", "terms"});
    const json& nv = member(p, "potential.", "name");
    if (!nv.is_string()) throw ConfigError("config: 'potential.name' must be a string");
    const std::string name = nv.get<std::string>();

    auto forbid = [&](const char* key) {
        if (p.find(key) != p.end())
            throw ConfigError("config: 'potential." + std::string(key) + "' is not valid for '" + name + "'");
    };

    if (name == "zero" || name == "cosine" || name == "xy_pair") {
        forbid("eps");
        forbid("arity");
        forbid("terms");
        if (name == "zero") return Potential::zero();
        if (name == "cosine") return Potential::cosine();
        return Potential::xy_pair();
    }
    if (name == "xy_pinned") {
        forbid("arity");
        forbid("terms");
        double eps = number_or(p, "potential.", "eps", 0.5);
        if (!(eps > 0.0)) throw ConfigError("config: 'potential.eps' must be positive");
        return Potential::xy_pinned(eps);
    }
    if (name == "fourier") {
        forbid("eps");
        long arity = integer_at(p, "potential.", "arity");
        if (arity < 1 || arity > 3) throw ConfigError("config: 'potential.arity' must be 1, 2 or 3");
        const json& tv = member(p, "potential.", "terms");
        if (!tv.is_array() || tv.empty())
            throw ConfigError("config: 'potential.terms' must be a nonempty array");
        std::vector<FourierTerm> terms;
        for (const auto& t : tv) {
            if (!t.is_object()) throw ConfigError("config: 'potential.terms' entries must be objects");
            require_keys(t, "potential.terms.", {"indices", "cos", "sin"});
            FourierTerm term;
            const json& iv = member(t, "potential.terms.", "indices");
            if (!iv.is_array() || static_cast<long>(iv.size()) != arity)
                throw ConfigError("config: 'potential.terms.indices' needs one integer per coordinate");
            for (const auto& e : iv) {
                if (!e.is_number_integer())
                    throw ConfigError("config: 'potential.terms.indices' must be integers");
                term.indices.push_back(e.get<int>());
            }
            term.cos_coeff = number_or(t, "potential.terms.", "cos", 0.0);
            term.sin_coeff = number_or(t, "potential.terms.", "sin", 0.0);
            terms.push_back(std::move(term));
        }
        return Potential::fourier(static_cast<int>(arity), std::move(terms));
    }
    throw ConfigError("config: unknown potential '" + name + "'");
}

Arc parse_arc(const json& a, const std::string& path) {
    if (!a.is_object()) throw ConfigError("config: '" + path + "' entries must be objects");
    require_keys(a, path + ".", {"lo", "hi", "center", "radius"});
    const bool endpoints = a.find("lo") != a.end() || a.find("hi") != a.end();
    const bool centered = a.find("center") != a.end() || a.find("radius") != a.end();
    if (endpoints == centered)
        throw ConfigError("config: '" + path + "' needs either lo/hi or center/radius");
    if (endpoints) return Arc(number_at(a, path + ".", "lo"), number_at(a, path + ".", "hi"));
    return Arc::centered(number_at(a, path + ".", "center"), number_at(a, path + ".", "radius"));
}

ArcSet parse_set(const json& s, size_t index) {
    const std::string path = "sets[" + std::to_string(index) + "].";
    if (!s.is_object()) throw ConfigError("config: 'sets' entries must be objects");
    require_keys(s, path, {"name", "open", "constraints"});
    ArcSet set;
    set.name = "set" + std::to_string(index);
    if (auto it = s.find("name"); it != s.end()) {
        if (!it->is_string()) throw ConfigError("config: '" + path + "name' must be a string");
        set.name = it->get<std::string>();
    }
    set.open = boolean_or(s, path, "open", false);
    const json& cv = member(s, path, "constraints");
    if (!cv.is_array()) throw ConfigError("config: '" + path + "constraints' must be an array");
    for (const auto& c : cv) {
        if (!c.is_object()) throw ConfigError("config: '" + path + "constraints' entries must be objects");
        require_keys(c, path + "constraints.", {"coordinate", "arcs"});
        ArcSet::CoordinateConstraint cc;
        cc.coordinate = static_cast<int>(integer_at(c, path + "constraints.", "coordinate"));
        if (cc.coordinate < 0)
            throw ConfigError("config: '" + path + "constraints.coordinate' must be nonnegative");
        const json& av = member(c, path + "constraints.", "arcs");
        if (!av.is_array() || av.empty())
            throw ConfigError("config: '" + path + "constraints.arcs' must be a nonempty array");
        for (const auto& a : av) cc.arcs.push_back(parse_arc(a, path + "constraints.arcs"));
        set.constraints.push_back(std::move(cc));
    }
    set.validate();
    return set;
}

BasePoint parse_probe(const json& p, size_t index) {
    const std::string path = "probes[" + std::to_string(index) + "].";
    if (!p.is_object()) throw ConfigError("config: 'probes' entries must be objects");
    require_keys(p, path, {"head", "tail"});
    std::vector<double> head, tail{0.0};
    if (auto it = p.find("head"); it != p.end()) head = number_list(*it, path + "head");
    if (auto it = p.find("tail"); it != p.end()) tail = number_list(*it, path + "tail");
    return BasePoint(std::move(head), std::move(tail));
}

json resolve(const ExperimentConfig& cfg, const json& potential_json, const json& sets_json,
             const json& probes_json, const json& sampler_json) {
    json r;
    r["potential"] = potential_json;
    r["grid"] = {{"n_nodes", cfg.n_nodes}};
    r["metric"] = {{"theta", cfg.metric.theta}};
    r["c_schedule"] = cfg.c_schedule;
    r["n_schedule"] = cfg.n_schedule;
    r["eigensolver"] = {{"tol", cfg.eig.tol}, {"max_iter", cfg.eig.max_iter}};
    r["maxplus"] = {{"tol", cfg.maxplus.tol},
                    {"max_sweeps", cfg.maxplus.max_sweeps},
                    {"tie_tol", cfg.maxplus.tie_tol},
                    {"cross_check", cfg.maxplus.cross_check}};
    r["sets"] = sets_json;
    r["probes"] = probes_json;
    r["ldp"] = {{"cap", cfg.ldp_cap}, {"rate_depth", cfg.ldp_rate_depth}};
    r["scan"] = {{"eps_list", cfg.scan_eps_list}};
    if (cfg.has_sampler) r["sampler"] = sampler_json;
    return r;
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: not valid JSON: ") + e.what());
    }
    if (!root.is_object()) throw ConfigError("config: top level must be an object");
    require_keys(root, "", {"potential", "grid", "metric", "c_schedule", "n_schedule", "eigensolver",
                            "maxplus", "sets", "probes", "ldp", "scan", "sampler"});

    ExperimentConfig cfg;
    json potential_json = {{"name", "cosine"}};
    if (auto it = root.find("potential"); it != root.end()) {
        cfg.potential = parse_potential(*it);
        potential_json = *it;
    }

    if (auto it = root.find("grid"); it != root.end()) {
        require_keys(*it, "grid.", {"n_nodes"});
        long n = integer_at(*it, "grid.", "n_nodes");
        if (n < 2 || n > 1 << 20) throw ConfigError("config: 'grid.n_nodes' out of range");
        cfg.n_nodes = static_cast<int>(n);
    }

    if (auto it = root.find("metric"); it != root.end()) {
        require_keys(*it, "metric.", {"theta"});
        double theta = number_at(*it, "metric.", "theta");
        if (!(theta > 0.0 && theta < 1.0)) throw ConfigError("config: 'metric.theta' must lie in (0,1)");
        cfg.metric = ShiftMetric(theta);
    }

    if (auto it = root.find("c_schedule"); it != root.end()) {
        cfg.c_schedule = number_list(*it, "c_schedule");
        for (size_t i = 0; i < cfg.c_schedule.size(); ++i) {
            if (!(cfg.c_schedule[i] > 0.0))
                throw ConfigError("config: 'c_schedule' entries must be positive");
            if (i > 0 && cfg.c_schedule[i] <= cfg.c_schedule[i - 1])
                throw ConfigError("config: 'c_schedule' must be strictly increasing");
        }
    }

    if (auto it = root.find("n_schedule"); it != root.end()) {
        if (!it->is_array() || it->empty())
            throw ConfigError("config: 'n_schedule' must be a nonempty array");
        cfg.n_schedule.clear();
        for (const auto& e : *it) {
            if (!e.is_number_integer() || e.get<long>() < 1)
                throw ConfigError("config: 'n_schedule' entries must be positive integers");
            cfg.n_schedule.push_back(e.get<int>());
        }
        for (size_t i = 1; i < cfg.n_schedule.size(); ++i)
            if (cfg.n_schedule[i] <= cfg.n_schedule[i - 1])
                throw ConfigError("config: 'n_schedule' must be strictly increasing");
    }

    if (auto it = root.find("eigensolver"); it != root.end()) {
        require_keys(*it, "eigensolver.", {"tol", "max_iter"});
        cfg.eig.tol = number_or(*it, "eigensolver.", "tol", cfg.eig.tol);
        cfg.eig.max_iter = static_cast<int>(integer_or(*it, "eigensolver.", "max_iter", cfg.eig.max_iter));
        if (!(cfg.eig.tol > 0.0) || cfg.eig.max_iter < 1)
            throw ConfigError("config: 'eigensolver' values out of range");
    }

    if (auto it = root.find("maxplus"); it != root.end()) {
        require_keys(*it, "maxplus.", {"tol", "max_sweeps", "tie_tol", "cross_check"});
        cfg.maxplus.tol = number_or(*it, "maxplus.", "tol", cfg.maxplus.tol);
        cfg.maxplus.max_sweeps =
            static_cast<int>(integer_or(*it, "maxplus.", "max_sweeps", cfg.maxplus.max_sweeps));
        cfg.maxplus.tie_tol = number_or(*it, "maxplus.", "tie_tol", cfg.maxplus.tie_tol);
        cfg.maxplus.cross_check = boolean_or(*it, "maxplus.", "cross_check", cfg.maxplus.cross_check);
        if (!(cfg.maxplus.tol > 0.0) || cfg.maxplus.max_sweeps < 1 || !(cfg.maxplus.tie_tol > 0.0))
            throw ConfigError("config: 'maxplus' values out of range");
    }

    json sets_json = json::array();
    if (auto it = root.find("sets"); it != root.end()) {
        if (!it->is_array()) throw ConfigError("config: 'sets' must be an array");
        for (size_t i = 0; i < it->size(); ++i) cfg.sets.push_back(parse_set((*it)[i], i));
        sets_json = *it;
    }

    json probes_json = json::array();
    if (auto it = root.find("probes"); it != root.end()) {
        if (!it->is_array()) throw ConfigError("config: 'probes' must be an array");
        for (size_t i = 0; i < it->size(); ++i) cfg.probes.push_back(parse_probe((*it)[i], i));
        probes_json = *it;
    }

    if (auto it = root.find("ldp"); it != root.end()) {
        require_keys(*it, "ldp.", {"cap", "rate_depth"});
        cfg.ldp_cap = number_or(*it, "ldp.", "cap", cfg.ldp_cap);
        cfg.ldp_rate_depth = static_cast<int>(integer_or(*it, "ldp.", "rate_depth", cfg.ldp_rate_depth));
        if (!(cfg.ldp_cap > 0.0)) throw ConfigError("config: 'ldp.cap' must be positive");
    }

    if (auto it = root.find("scan"); it != root.end()) {
        require_keys(*it, "scan.", {"eps_list"});
        if (it->find("eps_list") != it->end()) {
            cfg.scan_eps_list = number_list(*it->find("eps_list"), "scan.eps_list");
            for (double e : cfg.scan_eps_list)
                if (!(e > 0.0)) throw ConfigError("config: 'scan.eps_list' entries must be positive");
        }
    }

    json sampler_json;
    if (auto it = root.find("sampler"); it != root.end()) {
        require_keys(*it, "sampler.", {"length", "burn_in", "seed", "start", "c"});
        cfg.has_sampler = true;
        cfg.sampler.length = integer_at(*it, "sampler.", "length");
        cfg.sampler.burn_in = integer_or(*it, "sampler.", "burn_in", 0);
        const json& sv = member(*it, "sampler.", "seed");
        if (!sv.is_number_integer() || sv.get<long long>() < 0)
            throw ConfigError("config: 'sampler.seed' must be a nonnegative integer");
        cfg.sampler.seed = sv.get<std::uint64_t>();
        if (cfg.sampler.length <= 0 || cfg.sampler.burn_in < 0 ||
            cfg.sampler.burn_in >= cfg.sampler.length)
            throw ConfigError("config: sampler needs length > burn_in >= 0");
        if (auto st = it->find("start"); st != it->end()) {
            if (st->is_string() && st->get<std::string>() == "stationary") {
                cfg.sampler.start = ChainConfig::Start::Stationary;
            } else if (st->is_object()) {
                require_keys(*st, "sampler.start.", {"fixed"});
                cfg.sampler.start = ChainConfig::Start::FixedState;
                cfg.sampler.start_angle = number_at(*st, "sampler.start.", "fixed");
            } else {
                throw ConfigError("config: 'sampler.start' must be \"stationary\" or {\"fixed\": angle}");
            }
        }
        cfg.sampler_c = number_or(*it, "sampler.", "c", 0.0);
        if (cfg.sampler_c < 0.0) throw ConfigError("config: 'sampler.c' must be positive");
        sampler_json = *it;
    }

    cfg.resolved_json = resolve(cfg, potential_json, sets_json, probes_json, sampler_json).dump();
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

}  // namespace xylab

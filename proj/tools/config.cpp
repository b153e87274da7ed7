#include "config.hpp"

#include "json.hpp"

#include <algorithm>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <type_traits>

namespace lvbcli {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

namespace {

void only_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) throw ConfigError(where + " must be an object");
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        const bool ok = std::any_of(allowed.begin(), allowed.end(), [&](const char* k) { return it.key() == k; });
        if (!ok) throw ConfigError("unknown field '" + where + "." + it.key() + "'");
    }
}

const json& need(const json& obj, const std::string& where, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end()) throw ConfigError("missing field '" + where + "." + key + "'");
    return *it;
}

double number(const json& v, const std::string& name) {
    if (!v.is_number()) throw ConfigError("'" + name + "' must be a number");
    return v.get<double>();
}

template <class Int>
Int integer(const json& v, const std::string& name) {
    if (!v.is_number_integer() && !v.is_number_unsigned()) throw ConfigError("'" + name + "' must be an integer");
    if (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0 && !std::is_signed_v<Int>)
        throw ConfigError("'" + name + "' must be non-negative");
    return v.get<Int>();
}

std::string text(const json& v, const std::string& name) {
    if (!v.is_string()) throw ConfigError("'" + name + "' must be a string");
    return v.get<std::string>();
}

bool boolean(const json& v, const std::string& name) {
    if (!v.is_boolean()) throw ConfigError("'" + name + "' must be true or false");
    return v.get<bool>();
}

double opt_number(const json& obj, const std::string& where, const char* key, double fallback) {
    auto it = obj.find(key);
    return it == obj.end() ? fallback : number(*it, where + "." + key);
}

ModelSpec parse_model(const json& j) {
    ModelSpec m;
    m.type = text(need(j, "model", "type"), "model.type");
    if (m.type == "gbm") {
        only_keys(j, "model", {"type", "sigma", "rate", "dividend"});
        m.sigma = number(need(j, "model", "sigma"), "model.sigma");
    } else if (m.type == "cev") {
        only_keys(j, "model", {"type", "sigma0", "rho", "rate", "dividend"});
        m.sigma0 = number(need(j, "model", "sigma0"), "model.sigma0");
        m.rho = number(need(j, "model", "rho"), "model.rho");
    } else {
        throw ConfigError("model.type must be \"gbm\" or \"cev\"");
    }
    m.rate = opt_number(j, "model", "rate", 0.0);
    m.dividend = opt_number(j, "model", "dividend", 0.0);
    return m;
}

BarrierSpec parse_barrier(const json& j, const std::string& where) {
    BarrierSpec b;
    only_keys(j, where, {"type", "level", "growth"});
    b.type = j.contains("type") ? text(j["type"], where + ".type") : "constant";
    b.level = number(need(j, where, "level"), where + ".level");
    if (b.type == "exponential") {
        b.growth = number(need(j, where, "growth"), where + ".growth");
    } else if (b.type == "constant") {
        if (j.contains("growth")) throw ConfigError(where + ".growth is only allowed for exponential barriers");
    } else {
        throw ConfigError(where + ".type must be \"constant\" or \"exponential\"");
    }
    return b;
}

PayoffSpec parse_payoff(const json& j) {
    PayoffSpec p;
    p.type = text(need(j, "contract.payoff", "type"), "contract.payoff.type");
    if (p.type == "call" || p.type == "put") {
        only_keys(j, "contract.payoff", {"type", "strike"});
        p.strike = number(need(j, "contract.payoff", "strike"), "contract.payoff.strike");
    } else if (p.type == "double_no_touch") {
        only_keys(j, "contract.payoff", {"type"});
    } else if (p.type == "smooth_bump") {
        only_keys(j, "contract.payoff", {"type", "left", "right", "height"});
        p.left = number(need(j, "contract.payoff", "left"), "contract.payoff.left");
        p.right = number(need(j, "contract.payoff", "right"), "contract.payoff.right");
        p.height = opt_number(j, "contract.payoff", "height", 1.0);
    } else {
        throw ConfigError("contract.payoff.type must be call, put, double_no_touch or smooth_bump");
    }
    return p;
}

ContractSpec parse_contract(const json& j) {
    ContractSpec c;
    only_keys(j, "contract", {"lower", "upper", "payoff", "maturity"});
    if (j.contains("lower")) c.lower = parse_barrier(j["lower"], "contract.lower");
    if (j.contains("upper")) c.upper = parse_barrier(j["upper"], "contract.upper");
    c.payoff = parse_payoff(need(j, "contract", "payoff"));
    c.maturity = number(need(j, "contract", "maturity"), "contract.maturity");
    return c;
}

McSpec parse_mc(const json& j) {
    McSpec m;
    only_keys(j, "run.oracles.mc", {"paths", "steps", "seed", "bridge_correction"});
    if (j.contains("paths")) m.paths = integer<std::uint64_t>(j["paths"], "run.oracles.mc.paths");
    if (j.contains("steps")) m.steps = integer<int>(j["steps"], "run.oracles.mc.steps");
    if (j.contains("seed")) m.seed = integer<std::uint64_t>(j["seed"], "run.oracles.mc.seed");
    if (j.contains("bridge_correction"))
        m.bridge_correction = boolean(j["bridge_correction"], "run.oracles.mc.bridge_correction");
    return m;
}

RunSpec parse_run(const json& j) {
    RunSpec r;
    only_keys(j, "run", {"n", "spots", "method", "n_list", "smoothing", "oracles"});
    if (j.contains("n")) r.n = integer<int>(j["n"], "run.n");
    if (j.contains("spots")) {
        if (!j["spots"].is_array()) throw ConfigError("run.spots must be an array");
        for (const auto& s : j["spots"]) r.spots.push_back(number(s, "run.spots[]"));
    }
    if (j.contains("method")) r.method = text(j["method"], "run.method");
    if (r.method != "auto" && r.method != "volterra" && r.method != "laplace")
        throw ConfigError("run.method must be volterra, laplace or auto");
    if (j.contains("n_list")) {
        if (!j["n_list"].is_array()) throw ConfigError("run.n_list must be an array");
        for (const auto& s : j["n_list"]) r.n_list.push_back(integer<int>(s, "run.n_list[]"));
    }
    if (j.contains("smoothing")) r.smoothing = integer<int>(j["smoothing"], "run.smoothing");
    if (j.contains("oracles")) {
        const json& o = j["oracles"];
        only_keys(o, "run.oracles", {"mc", "closed_form"});
        if (o.contains("mc")) r.oracles.mc = parse_mc(o["mc"]);
        if (o.contains("closed_form")) r.oracles.closed_form = boolean(o["closed_form"], "run.oracles.closed_form");
    }
    return r;
}

ojson barrier_json(const BarrierSpec& b) {
    ojson o;
    o["type"] = b.type;
    o["level"] = b.level;
    if (b.type == "exponential") o["growth"] = b.growth;
    return o;
}

} // namespace

RunConfig parse_config(const std::string& text_in) {
    json j;
    try {
        j = json::parse(text_in);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("invalid JSON: ") + e.what());
    }
    only_keys(j, "config", {"schema_version", "model", "contract", "run"});
    RunConfig cfg;
    cfg.schema_version = integer<int>(need(j, "config", "schema_version"), "schema_version");
    if (cfg.schema_version != 1) throw ConfigError("unsupported schema_version " + std::to_string(cfg.schema_version));
    cfg.model = parse_model(need(j, "config", "model"));
    cfg.contract = parse_contract(need(j, "config", "contract"));
    if (j.contains("run")) cfg.run = parse_run(j["run"]);
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string serialize_config(const RunConfig& cfg) {
    ojson j;
    j["schema_version"] = cfg.schema_version;

    ojson m;
    m["type"] = cfg.model.type;
    if (cfg.model.type == "cev") {
        m["sigma0"] = cfg.model.sigma0;
        m["rho"] = cfg.model.rho;
    } else {
        m["sigma"] = cfg.model.sigma;
    }
    m["rate"] = cfg.model.rate;
    m["dividend"] = cfg.model.dividend;
    j["model"] = m;

    ojson c;
    if (cfg.contract.lower) c["lower"] = barrier_json(*cfg.contract.lower);
    if (cfg.contract.upper) c["upper"] = barrier_json(*cfg.contract.upper);
    ojson p;
    const PayoffSpec& ps = cfg.contract.payoff;
    p["type"] = ps.type;
    if (ps.type == "call" || ps.type == "put") p["strike"] = ps.strike;
    if (ps.type == "smooth_bump") {
        p["left"] = ps.left;
        p["right"] = ps.right;
        p["height"] = ps.height;
    }
    c["payoff"] = p;
    c["maturity"] = cfg.contract.maturity;
    j["contract"] = c;

    ojson r;
    r["n"] = cfg.run.n;
    r["spots"] = cfg.run.spots;
    r["method"] = cfg.run.method;
    if (!cfg.run.n_list.empty()) r["n_list"] = cfg.run.n_list;
    if (cfg.run.smoothing) r["smoothing"] = *cfg.run.smoothing;
    ojson o;
    if (cfg.run.oracles.mc) {
        const McSpec& mc = *cfg.run.oracles.mc;
        ojson mj;
        mj["paths"] = mc.paths;
        mj["steps"] = mc.steps;
        mj["seed"] = mc.seed;
        mj["bridge_correction"] = mc.bridge_correction;
        o["mc"] = mj;
    }
    o["closed_form"] = cfg.run.oracles.closed_form;
    r["oracles"] = o;
    j["run"] = r;

    return j.dump(2) + "\n";
}

} // namespace lvbcli

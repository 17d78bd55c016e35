#include "adsim/config.hpp"

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <set>

#include "adsim/scenarios.hpp"

namespace adsim {

using nlohmann::json;

namespace {

void check_known_keys(const json& obj, const std::set<std::string>& allowed,
                      const std::string& path) {
    for (const auto& [key, _] : obj.items()) {
        if (!allowed.count(key)) {
            throw ConfigError(path + "." + key + ": unknown key");
        }
    }
}

double num_at(const json& obj, const std::string& key, double fallback,
              const std::string& path) {
    if (!obj.contains(key)) {
        return fallback;
    }
    if (!obj[key].is_number()) {
        throw ConfigError(path + "." + key + ": expected a number");
    }
    return obj[key].get<double>();
}

bool bool_at(const json& obj, const std::string& key, bool fallback,
             const std::string& path) {
    if (!obj.contains(key)) {
        return fallback;
    }
    if (!obj[key].is_boolean()) {
        throw ConfigError(path + "." + key + ": expected a boolean");
    }
    return obj[key].get<bool>();
}

void require(bool ok, const std::string& path, const std::string& constraint) {
    if (!ok) {
        throw ConfigError(path + ": constraint violated (" + constraint + ")");
    }
}

// --- struct <-> json -------------------------------------------------------

json boost_to_json(const BoostParams& p) {
    return {{"l_b", p.l_b},   {"r_b", p.r_b}, {"c_dc", p.c_dc},
            {"g_dc", p.g_dc}, {"v_b", p.v_b}, {"v_min", p.v_min}};
}

BoostParams boost_from_json(const json& j, const BoostParams& base,
                            const std::string& path) {
    check_known_keys(j, {"l_b", "r_b", "c_dc", "g_dc", "v_b", "v_min"}, path);
    BoostParams p = base;
    p.l_b = num_at(j, "l_b", p.l_b, path);
    p.r_b = num_at(j, "r_b", p.r_b, path);
    p.c_dc = num_at(j, "c_dc", p.c_dc, path);
    p.g_dc = num_at(j, "g_dc", p.g_dc, path);
    p.v_b = num_at(j, "v_b", p.v_b, path);
    p.v_min = num_at(j, "v_min", p.v_min, path);
    require(p.l_b > 0.0, path + ".l_b", "l_b > 0");
    require(p.r_b > 0.0, path + ".r_b", "r_b > 0");
    require(p.c_dc > 0.0, path + ".c_dc", "c_dc > 0");
    require(p.g_dc >= 0.0, path + ".g_dc", "g_dc >= 0");
    require(p.v_b > 0.0, path + ".v_b", "v_b > 0");
    return p;
}

json boost_control_to_json(const BoostControlGains& g) {
    return {{"k_p", g.k_p},   {"k_i", g.k_i},             {"k_bp", g.k_bp},
            {"k_bi", g.k_bi}, {"v_dc_star", g.v_dc_star}, {"d_max", g.d_max}};
}

BoostControlGains boost_control_from_json(const json& j, const BoostControlGains& base,
                                          const std::string& path) {
    check_known_keys(j, {"k_p", "k_i", "k_bp", "k_bi", "v_dc_star", "d_max"}, path);
    BoostControlGains g = base;
    g.k_p = num_at(j, "k_p", g.k_p, path);
    g.k_i = num_at(j, "k_i", g.k_i, path);
    g.k_bp = num_at(j, "k_bp", g.k_bp, path);
    g.k_bi = num_at(j, "k_bi", g.k_bi, path);
    g.v_dc_star = num_at(j, "v_dc_star", g.v_dc_star, path);
    g.d_max = num_at(j, "d_max", g.d_max, path);
    require(g.k_p > 0.0 && g.k_i > 0.0 && g.k_bp > 0.0 && g.k_bi > 0.0, path,
            "all gains > 0");
    require(g.v_dc_star > 0.0, path + ".v_dc_star", "v_dc_star > 0");
    require(g.d_max > 0.0 && g.d_max <= 1.0, path + ".d_max", "0 < d_max <= 1");
    return g;
}

json filter_to_json(const AcFilterParams& f) {
    return {{"l", f.l}, {"r", f.r}, {"c", f.c}, {"g", f.g}};
}

AcFilterParams filter_from_json(const json& j, const AcFilterParams& base,
                                const std::string& path) {
    check_known_keys(j, {"l", "r", "c", "g", "load_resistance"}, path);
    AcFilterParams f = base;
    f.l = num_at(j, "l", f.l, path);
    f.r = num_at(j, "r", f.r, path);
    f.c = num_at(j, "c", f.c, path);
    f.g = num_at(j, "g", f.g, path);
    if (j.contains("load_resistance")) {
        const double r_load = num_at(j, "load_resistance", 0.0, path);
        require(r_load > 0.0, path + ".load_resistance", "load_resistance > 0");
        f.g = 1.0 / r_load;
    }
    require(f.l > 0.0, path + ".l", "l > 0");
    require(f.c > 0.0, path + ".c", "c > 0");
    require(f.r >= 0.0, path + ".r", "r >= 0");
    require(f.g >= 0.0, path + ".g", "g >= 0");
    return f;
}

json droop_to_json(const DroopGains& g) {
    return {{"alpha", g.alpha},
            {"gamma", g.gamma},
            {"omega_star", g.omega_star},
            {"p_star", g.p_star},
            {"theta_star_0", g.theta_star_0}};
}

DroopGains droop_from_json(const json& j, const DroopGains& base, const std::string& path) {
    check_known_keys(j, {"alpha", "gamma", "omega_star", "p_star", "theta_star_0"}, path);
    DroopGains g = base;
    g.alpha = num_at(j, "alpha", g.alpha, path);
    g.gamma = num_at(j, "gamma", g.gamma, path);
    g.omega_star = num_at(j, "omega_star", g.omega_star, path);
    g.p_star = num_at(j, "p_star", g.p_star, path);
    g.theta_star_0 = num_at(j, "theta_star_0", g.theta_star_0, path);
    require(g.alpha > 0.0, path + ".alpha", "alpha > 0");
    require(g.gamma > 0.0, path + ".gamma", "gamma > 0");
    require(g.omega_star > 0.0, path + ".omega_star", "omega_star > 0");
    return g;
}

json indirect_to_json(const IndirectGains& g) {
    return {{"k_vp", g.k_vp},
            {"k_vi", g.k_vi},
            {"k_ip", g.k_ip},
            {"k_ii", g.k_ii},
            {"v_star", g.v_star}};
}

IndirectGains indirect_from_json(const json& j, const IndirectGains& base,
                                 const std::string& path) {
    check_known_keys(j, {"k_vp", "k_vi", "k_ip", "k_ii", "v_star"}, path);
    IndirectGains g = base;
    g.k_vp = num_at(j, "k_vp", g.k_vp, path);
    g.k_vi = num_at(j, "k_vi", g.k_vi, path);
    g.k_ip = num_at(j, "k_ip", g.k_ip, path);
    g.k_ii = num_at(j, "k_ii", g.k_ii, path);
    g.v_star = num_at(j, "v_star", g.v_star, path);
    require(g.k_vp > 0.0 && g.k_vi > 0.0 && g.k_ip > 0.0 && g.k_ii > 0.0, path,
            "all gains > 0");
    require(g.v_star > 0.0, path + ".v_star", "v_star > 0");
    return g;
}

json converter_to_json(const ConverterConfig& c) {
    return {{"boost", boost_to_json(c.boost)},
            {"boost_control", boost_control_to_json(c.boost_control)},
            {"filter", filter_to_json(c.filter)},
            {"droop", droop_to_json(c.droop)},
            {"indirect", indirect_to_json(c.indirect)},
            {"mode", c.mode == ControlMode::Direct ? "direct" : "indirect"},
            {"modulation_amplitude", c.modulation_amplitude},
            {"stiff_dc", c.stiff_dc},
            {"modulation_on", c.modulation_on},
            {"breaker_closed", c.breaker_closed}};
}

ConverterConfig converter_from_json(const json& j, const ConverterConfig& base,
                                    const std::string& path) {
    check_known_keys(j,
                     {"boost", "boost_control", "filter", "droop", "indirect", "mode",
                      "modulation_amplitude", "stiff_dc", "modulation_on",
                      "breaker_closed"},
                     path);
    ConverterConfig c = base;
    if (j.contains("boost")) c.boost = boost_from_json(j["boost"], c.boost, path + ".boost");
    if (j.contains("boost_control"))
        c.boost_control = boost_control_from_json(j["boost_control"], c.boost_control,
                                                  path + ".boost_control");
    if (j.contains("filter"))
        c.filter = filter_from_json(j["filter"], c.filter, path + ".filter");
    if (j.contains("droop")) c.droop = droop_from_json(j["droop"], c.droop, path + ".droop");
    if (j.contains("indirect"))
        c.indirect = indirect_from_json(j["indirect"], c.indirect, path + ".indirect");
    if (j.contains("mode")) {
        const std::string m = j["mode"].get<std::string>();
        if (m == "direct") {
            c.mode = ControlMode::Direct;
        } else if (m == "indirect") {
            c.mode = ControlMode::Indirect;
        } else {
            throw ConfigError(path + ".mode: expected 'direct' or 'indirect'");
        }
    }
    c.modulation_amplitude = num_at(j, "modulation_amplitude", c.modulation_amplitude, path);
    require(c.modulation_amplitude > 0.0 && c.modulation_amplitude < 1.0,
            path + ".modulation_amplitude", "0 < modulation_amplitude < 1");
    c.stiff_dc = bool_at(j, "stiff_dc", c.stiff_dc, path);
    c.modulation_on = bool_at(j, "modulation_on", c.modulation_on, path);
    c.breaker_closed = bool_at(j, "breaker_closed", c.breaker_closed, path);
    return c;
}

json network_to_json(const NetworkTopology& t) {
    json lines = json::array();
    for (const Line& l : t.lines) {
        lines.push_back({{"from", l.from_converter},
                         {"to", l.to_node},
                         {"r_l", l.params.r_l},
                         {"l_l", l.params.l_l}});
    }
    json loads = json::array();
    for (const Load& l : t.loads) {
        loads.push_back({{"node", l.node}, {"resistance", l.resistance}});
    }
    return {{"n_converters", t.n_converters}, {"lines", lines}, {"loads", loads}};
}

NetworkTopology network_from_json(const json& j, const NetworkTopology& base,
                                  const std::string& path) {
    check_known_keys(j, {"n_converters", "lines", "loads"}, path);
    NetworkTopology t = base;
    if (j.contains("n_converters")) {
        t.n_converters = j["n_converters"].get<int>();
    }
    if (j.contains("lines")) {
        t.lines.clear();
        std::size_t i = 0;
        for (const json& lj : j["lines"]) {
            const std::string lp = path + ".lines[" + std::to_string(i++) + "]";
            check_known_keys(lj, {"from", "to", "r_l", "l_l"}, lp);
            Line l;
            l.from_converter = lj.value("from", 0);
            l.to_node = lj.value("to", 0);
            l.params.r_l = num_at(lj, "r_l", 0.02, lp);
            l.params.l_l = num_at(lj, "l_l", 7e-4, lp);
            require(l.params.l_l > 0.0, lp + ".l_l", "l_l > 0");
            require(l.params.r_l >= 0.0, lp + ".r_l", "r_l >= 0");
            t.lines.push_back(l);
        }
    }
    if (j.contains("loads")) {
        t.loads.clear();
        std::size_t i = 0;
        for (const json& lj : j["loads"]) {
            const std::string lp = path + ".loads[" + std::to_string(i++) + "]";
            check_known_keys(lj, {"node", "resistance"}, lp);
            Load l;
            l.node = lj.value("node", 0);
            l.resistance = num_at(lj, "resistance", 0.0, lp);
            require(l.resistance > 0.0, lp + ".resistance", "resistance > 0");
            t.loads.push_back(l);
        }
    }
    return t;
}

const char* action_name(EventAction a) {
    switch (a) {
        case EventAction::CloseBreaker: return "close_breaker";
        case EventAction::LoadStep: return "load_step";
        case EventAction::EnableModulation: return "enable_modulation";
        case EventAction::SetGains: return "set_gains";
    }
    return "?";
}

json events_to_json(const std::vector<Event>& events) {
    json out = json::array();
    for (const Event& e : events) {
        json ej = {{"time", e.time}, {"action", action_name(e.action)}};
        if (e.action == EventAction::LoadStep) {
            ej["node"] = e.target;
            ej["resistance"] = e.new_resistance;
        } else {
            ej["converter"] = e.target;
        }
        if (e.action == EventAction::SetGains) {
            ej["gains"] = droop_to_json(e.gains);
        }
        out.push_back(ej);
    }
    return out;
}

std::vector<Event> events_from_json(const json& j, const std::string& path) {
    std::vector<Event> out;
    std::size_t i = 0;
    for (const json& ej : j) {
        const std::string ep = path + "[" + std::to_string(i++) + "]";
        check_known_keys(ej, {"time", "action", "converter", "node", "resistance", "gains"},
                         ep);
        Event e;
        e.time = num_at(ej, "time", 0.0, ep);
        require(e.time >= 0.0, ep + ".time", "time >= 0");
        const std::string a = ej.value("action", "");
        if (a == "close_breaker") {
            e.action = EventAction::CloseBreaker;
        } else if (a == "load_step") {
            e.action = EventAction::LoadStep;
        } else if (a == "enable_modulation") {
            e.action = EventAction::EnableModulation;
        } else if (a == "set_gains") {
            e.action = EventAction::SetGains;
        } else {
            throw ConfigError(ep + ".action: unknown action '" + a + "'");
        }
        if (e.action == EventAction::LoadStep) {
            e.target = ej.value("node", 0);
            e.new_resistance = num_at(ej, "resistance", 0.0, ep);
            require(e.new_resistance > 0.0, ep + ".resistance", "resistance > 0");
        } else {
            e.target = ej.value("converter", 0);
        }
        if (e.action == EventAction::SetGains) {
            e.gains = droop_from_json(ej.value("gains", json::object()), default_droop(),
                                      ep + ".gains");
        }
        out.push_back(e);
    }
    return out;
}

}  // namespace

json spec_to_json(const ScenarioSpec& spec) {
    json converters = json::array();
    for (const ConverterConfig& c : spec.converters) {
        converters.push_back(converter_to_json(c));
    }
    json j = {{"scenario", spec.name},
              {"model", spec.model == NetworkModel::SingleConverter ? "single" : "reduced"},
              {"duration", spec.duration},
              {"plant_dt", spec.plant_dt},
              {"controller_ts", spec.controller_ts},
              {"power_filter_window", spec.power_filter_window},
              {"record_decimation", spec.record_decimation},
              {"record_channels", spec.record_channels},
              {"pll_seed", spec.pll_seed},
              {"pll", {{"kp", spec.pll.kp}, {"ki", spec.pll.ki}}},
              {"steady_state",
               {{"window", spec.steady.window}, {"tolerance", spec.steady.tolerance}}},
              {"clock",
               {{"epsilon", spec.clock.epsilon},
                {"master_clock", spec.clock.master_clock_enabled}}},
              {"converters", converters},
              {"events", events_to_json(spec.events)}};
    if (spec.model == NetworkModel::ReducedNetwork) {
        j["network"] = network_to_json(spec.topology);
    }
    return j;
}

ScenarioSpec spec_from_json(const json& doc) {
    if (!doc.is_object()) {
        throw ConfigError("$: config must be a JSON object");
    }
    check_known_keys(doc,
                     {"scenario", "model", "duration", "plant_dt", "controller_ts",
                      "power_filter_window", "record_decimation", "record_channels",
                      "pll_seed", "pll", "steady_state", "clock", "converters",
                      "converter_defaults", "network", "events"},
                     "$");
    ScenarioSpec spec;
    const std::string name = doc.value("scenario", "custom");
    if (name != "custom") {
        spec = builtin_by_name(name);
    } else {
        spec = builtin_blackstart();
        spec.name = "custom";
        spec.events.clear();
    }

    if (doc.contains("model")) {
        const std::string m = doc["model"].get<std::string>();
        if (m == "single") {
            spec.model = NetworkModel::SingleConverter;
        } else if (m == "reduced") {
            spec.model = NetworkModel::ReducedNetwork;
        } else {
            throw ConfigError("$.model: expected 'single' or 'reduced'");
        }
    }
    spec.duration = num_at(doc, "duration", spec.duration, "$");
    require(spec.duration >= 0.0, "$.duration", "duration >= 0");
    spec.plant_dt = num_at(doc, "plant_dt", spec.plant_dt, "$");
    require(spec.plant_dt > 0.0, "$.plant_dt", "plant_dt > 0");
    spec.controller_ts = num_at(doc, "controller_ts", spec.controller_ts, "$");
    require(spec.controller_ts > 0.0, "$.controller_ts", "controller_ts > 0");
    spec.power_filter_window =
        num_at(doc, "power_filter_window", spec.power_filter_window, "$");
    require(spec.power_filter_window >= 0.0, "$.power_filter_window", "window >= 0");
    if (doc.contains("record_decimation")) {
        spec.record_decimation = doc["record_decimation"].get<int>();
        require(spec.record_decimation >= 1, "$.record_decimation", "decimation >= 1");
    }
    if (doc.contains("record_channels")) {
        if (!doc["record_channels"].is_array()) {
            throw ConfigError("$.record_channels: expected an array of signal names");
        }
        spec.record_channels = doc["record_channels"].get<std::vector<std::string>>();
    }
    spec.pll_seed = bool_at(doc, "pll_seed", spec.pll_seed, "$");
    if (doc.contains("pll")) {
        check_known_keys(doc["pll"], {"kp", "ki"}, "$.pll");
        spec.pll.kp = num_at(doc["pll"], "kp", spec.pll.kp, "$.pll");
        spec.pll.ki = num_at(doc["pll"], "ki", spec.pll.ki, "$.pll");
    }
    if (doc.contains("steady_state")) {
        const json& ss = doc["steady_state"];
        check_known_keys(ss, {"window", "tolerance"}, "$.steady_state");
        spec.steady.window = num_at(ss, "window", spec.steady.window, "$.steady_state");
        spec.steady.tolerance =
            num_at(ss, "tolerance", spec.steady.tolerance, "$.steady_state");
        require(spec.steady.window > 0.0, "$.steady_state.window", "window > 0");
        require(spec.steady.tolerance > 0.0, "$.steady_state.tolerance", "tolerance > 0");
    }
    if (doc.contains("clock")) {
        const json& ck = doc["clock"];
        check_known_keys(ck, {"epsilon", "master_clock"}, "$.clock");
        if (ck.contains("epsilon")) {
            spec.clock.epsilon = ck["epsilon"].get<std::vector<double>>();
        }
        spec.clock.master_clock_enabled =
            bool_at(ck, "master_clock", spec.clock.master_clock_enabled, "$.clock");
    }
    if (doc.contains("converter_defaults")) {
        for (std::size_t k = 0; k < spec.converters.size(); ++k) {
            spec.converters[k] = converter_from_json(doc["converter_defaults"],
                                                     spec.converters[k],
                                                     "$.converter_defaults");
        }
    }
    if (doc.contains("converters")) {
        const json& cj = doc["converters"];
        if (!cj.is_array()) {
            throw ConfigError("$.converters: expected an array");
        }
        if (cj.size() > spec.converters.size()) {
            spec.converters.resize(cj.size(), default_converter());
        }
        for (std::size_t k = 0; k < cj.size(); ++k) {
            spec.converters[k] = converter_from_json(
                cj[k], spec.converters[k], "$.converters[" + std::to_string(k) + "]");
        }
    }
    if (doc.contains("network")) {
        spec.topology = network_from_json(doc["network"], spec.topology, "$.network");
    }
    if (doc.contains("events")) {
        spec.events = events_from_json(doc["events"], "$.events");
    }
    try {
        spec.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("$: ") + e.what());
    }
    return spec;
}

ScenarioSpec load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file: " + path);
    }
    json doc;
    try {
        in >> doc;
    } catch (const json::parse_error& e) {
        throw ConfigError("parse error in " + path + ": " + e.what());
    }
    return spec_from_json(doc);
}

std::string config_hash(const json& doc) {
    const std::string canonical = doc.dump();  // nlohmann objects are key-sorted
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : canonical) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

json config_schema() {
    const json number = {{"type", "number"}};
    const json boolean = {{"type", "boolean"}};
    const json string = {{"type", "string"}};
    const auto object = [](const json& props) {
        return json{{"type", "object"}, {"properties", props}};
    };
    const json droop = object({{"alpha", number},
                               {"gamma", number},
                               {"omega_star", number},
                               {"p_star", number},
                               {"theta_star_0", number}});
    const json converter = object(
        {{"boost", object({{"l_b", number},
                           {"r_b", number},
                           {"c_dc", number},
                           {"g_dc", number},
                           {"v_b", number},
                           {"v_min", number}})},
         {"boost_control", object({{"k_p", number},
                                   {"k_i", number},
                                   {"k_bp", number},
                                   {"k_bi", number},
                                   {"v_dc_star", number},
                                   {"d_max", number}})},
         {"filter", object({{"l", number},
                            {"r", number},
                            {"c", number},
                            {"g", number},
                            {"load_resistance", number}})},
         {"droop", droop},
         {"indirect", object({{"k_vp", number},
                              {"k_vi", number},
                              {"k_ip", number},
                              {"k_ii", number},
                              {"v_star", number}})},
         {"mode", string},
         {"modulation_amplitude", number},
         {"stiff_dc", boolean},
         {"modulation_on", boolean},
         {"breaker_closed", boolean}});
    return object(
        {{"scenario", string},
         {"model", string},
         {"duration", number},
         {"plant_dt", number},
         {"controller_ts", number},
         {"power_filter_window", number},
         {"record_decimation", number},
         {"record_channels", {{"type", "array"}, {"items", string}}},
         {"pll_seed", boolean},
         {"pll", object({{"kp", number}, {"ki", number}})},
         {"steady_state", object({{"window", number}, {"tolerance", number}})},
         {"clock", object({{"epsilon", {{"type", "array"}, {"items", number}}},
                           {"master_clock", boolean}})},
         {"converter_defaults", converter},
         {"converters", {{"type", "array"}, {"items", converter}}},
         {"network",
          object({{"n_converters", number},
                  {"lines",
                   {{"type", "array"},
                    {"items", object({{"from", number},
                                      {"to", number},
                                      {"r_l", number},
                                      {"l_l", number}})}}},
                  {"loads",
                   {{"type", "array"},
                    {"items", object({{"node", number}, {"resistance", number}})}}}})},
         {"events",
          {{"type", "array"},
           {"items", object({{"time", number},
                             {"action", string},
                             {"converter", number},
                             {"node", number},
                             {"resistance", number},
                             {"gains", droop}})}}}});
}

json trace_schema() {
    const json number = {{"type", "number"}};
    return {{"type", "object"},
            {"required", {"schema_version", "dt", "time", "channels"}},
            {"properties",
             {{"schema_version", number},
              {"dt", number},
              {"time", {{"type", "array"}, {"items", number}}},
              {"channels", {{"type", "object"}}},
              {"markers",
               {{"type", "array"},
                {"items",
                 {{"type", "object"},
                  {"properties",
                   {{"time", number}, {"label", {{"type", "string"}}}}}}}}}}}};
}

void validate_against_schema(const json& schema, const json& doc, const std::string& path) {
    const std::string type = schema.value("type", "");
    const auto fail = [&](const std::string& why) { throw ConfigError(path + ": " + why); };
    if (type == "object") {
        if (!doc.is_object()) fail("expected an object");
        if (schema.contains("required")) {
            for (const json& key : schema["required"]) {
                if (!doc.contains(key.get<std::string>())) {
                    fail("missing required key '" + key.get<std::string>() + "'");
                }
            }
        }
        if (schema.contains("properties")) {
            const json& props = schema["properties"];
            for (const auto& [key, value] : doc.items()) {
                if (props.contains(key)) {
                    validate_against_schema(props[key], value, path + "." + key);
                }
            }
        }
    } else if (type == "array") {
        if (!doc.is_array()) fail("expected an array");
        if (schema.contains("items")) {
            std::size_t i = 0;
            for (const json& item : doc) {
                validate_against_schema(schema["items"], item,
                                        path + "[" + std::to_string(i++) + "]");
            }
        }
    } else if (type == "number") {
        if (!doc.is_number()) fail("expected a number");
    } else if (type == "string") {
        if (!doc.is_string()) fail("expected a string");
    } else if (type == "boolean") {
        if (!doc.is_boolean()) fail("expected a boolean");
    }
}

json run_manifest(const std::string& scenario, const std::string& cfg_hash,
                  const std::string& started_iso, const std::string& finished_iso,
                  const std::vector<std::string>& outputs) {
    return {{"scenario", scenario},
            {"config_hash", cfg_hash},
            {"tool_version", ADSIM_VERSION},
            {"started", started_iso},
            {"finished", finished_iso},
            {"outputs", outputs}};
}

std::string iso8601_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace adsim

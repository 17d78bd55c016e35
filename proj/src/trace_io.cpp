#include "adsim/trace_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "adsim/config.hpp"

namespace adsim {

using nlohmann::json;

std::string format_g17(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

namespace {

std::string csv_quote(const std::string& field) {
    if (field.find_first_of(",\"\r\n") == std::string::npos) {
        return field;
    }
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') {
            out += "\"\"";
        } else {
            out += c;
        }
    }
    out += "\"";
    return out;
}

json markers_to_json(const TraceRecorder& trace) {
    json markers = json::array();
    for (const TraceRecorder::Marker& m : trace.markers) {
        markers.push_back({{"time", m.time}, {"label", m.label}});
    }
    return markers;
}

}  // namespace

void export_csv(const TraceRecorder& trace, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write CSV file: " + path);
    }
    out << "time";
    for (const std::string& name : trace.names) {
        out << "," << csv_quote(name);
    }
    out << "\r\n";
    for (std::size_t i = 0; i < trace.time.size(); ++i) {
        out << format_g17(trace.time[i]);
        for (const std::vector<double>& ch : trace.channels) {
            out << "," << format_g17(ch[i]);
        }
        out << "\r\n";
    }
    if (!out) {
        throw std::runtime_error("write failed: " + path);
    }

    json meta = {{"created", iso8601_now()},
                 {"sample_period", trace.dt},
                 {"samples", trace.time.size()},
                 {"channels", trace.names},
                 {"markers", markers_to_json(trace)}};
    std::ofstream side(path + ".meta.json");
    if (!side) {
        throw std::runtime_error("cannot write sidecar: " + path + ".meta.json");
    }
    side << meta.dump(2) << "\n";
}

void export_trace_json(const TraceRecorder& trace, const std::string& path) {
    json channels = json::object();
    for (std::size_t i = 0; i < trace.names.size(); ++i) {
        channels[trace.names[i]] = trace.channels[i];
    }
    const json doc = {{"schema_version", 1},
                      {"dt", trace.dt},
                      {"time", trace.time},
                      {"channels", channels},
                      {"markers", markers_to_json(trace)}};
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write trace file: " + path);
    }
    out << doc.dump() << "\n";
    if (!out) {
        throw std::runtime_error("write failed: " + path);
    }
}

TraceRecorder import_trace_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open trace file: " + path);
    }
    json doc;
    try {
        in >> doc;
    } catch (const json::parse_error& e) {
        throw std::runtime_error("parse error in " + path + ": " + e.what());
    }
    validate_against_schema(trace_schema(), doc);
    TraceRecorder trace;
    trace.dt = doc["dt"].get<double>();
    trace.time = doc["time"].get<std::vector<double>>();
    for (const auto& [name, values] : doc["channels"].items()) {
        trace.names.push_back(name);
        trace.channels.push_back(values.get<std::vector<double>>());
        if (trace.channels.back().size() != trace.time.size()) {
            throw std::runtime_error(path + ": channel '" + name + "' length mismatch");
        }
    }
    if (doc.contains("markers")) {
        for (const json& m : doc["markers"]) {
            trace.markers.push_back({m["time"].get<double>(), m["label"].get<std::string>()});
        }
    }
    return trace;
}

TraceRecorder import_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open CSV file: " + path);
    }
    TraceRecorder trace;
    std::string line;
    if (!std::getline(in, line)) {
        throw std::runtime_error(path + ": empty file");
    }
    while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) {
        line.pop_back();
    }
    std::stringstream header(line);
    std::string field;
    bool first = true;
    while (std::getline(header, field, ',')) {
        if (first) {
            if (field != "time") {
                throw std::runtime_error(path + ": first column must be 'time'");
            }
            first = false;
        } else {
            trace.names.push_back(field);
            trace.channels.emplace_back();
        }
    }
    while (std::getline(in, line)) {
        while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        std::stringstream row(line);
        std::size_t col = 0;
        while (std::getline(row, field, ',')) {
            const double v = std::stod(field);
            if (col == 0) {
                trace.time.push_back(v);
            } else if (col - 1 < trace.channels.size()) {
                trace.channels[col - 1].push_back(v);
            }
            ++col;
        }
    }
    if (trace.time.size() >= 2) {
        trace.dt = trace.time[1] - trace.time[0];
    }
    return trace;
}

json summary_to_json(const SummaryReport& s) {
    json converters = json::array();
    for (const ConverterSummary& c : s.converters) {
        json cj = {{"p_steady", c.p_steady},
                   {"q_steady", c.q_steady},
                   {"p_star", c.p_star},
                   {"gamma", c.gamma},
                   {"alpha", c.alpha},
                   {"delta_theta_steady", c.delta_theta_steady},
                   {"droop_residual", c.droop_residual},
                   {"freq_error_hz", c.freq_error_hz},
                   {"min_freq_hz", c.min_freq_hz},
                   {"max_freq_hz", c.max_freq_hz},
                   {"v_dc_final", c.v_dc_final},
                   {"i_b_final", c.i_b_final},
                   {"source_amplitude", c.source_amplitude}};
        if (c.settle_time) {
            cj["settle_time"] = *c.settle_time;
        }
        converters.push_back(cj);
    }
    json j = {{"scenario", s.scenario},
              {"completed", s.completed},
              {"duration", s.duration},
              {"converters", converters},
              {"angle_diff_12", s.angle_diff_12},
              {"theta_star_offset_12", s.theta_star_offset_12},
              {"node_voltage_amplitude", s.node_voltage_amplitude},
              {"load_power", s.load_power},
              {"security_ok", s.security_ok},
              {"running_cost_total", s.running_cost_total},
              {"cost_tail_peak_ratio", s.cost_tail_peak_ratio},
              {"saturations",
               {{"boost_duty", s.saturations.boost_duty},
                {"modulation", s.saturations.modulation},
                {"dc_link_clamp", s.saturations.dc_link_clamp}}}};
    if (!s.completed) {
        j["abort_reason"] = s.abort_reason;
    }
    if (s.oracle) {
        const TwoSourceSolution& o = *s.oracle;
        j["oracle"] = {{"p1", o.p1},
                       {"p2", o.p2},
                       {"q1", o.q1},
                       {"q2", o.q2},
                       {"p_load", o.p_load},
                       {"theta1", o.bus1.theta},
                       {"theta2", o.bus2.theta},
                       {"theta0", o.bus0.theta},
                       {"v0", o.bus0.v},
                       {"delta_p1", o.delta_p1},
                       {"delta_p2", o.delta_p2},
                       {"line_loss1", o.line_loss1},
                       {"line_loss2", o.line_loss2},
                       {"security_ok", o.security_ok},
                       {"iterations", o.iterations},
                       {"p1_small", o.p1_small},
                       {"p2_small", o.p2_small}};
    }
    return j;
}

}  // namespace adsim

#pragma once

#include <json.hpp>

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "entdyn/esd.hpp"

namespace entdyn::io {

inline constexpr std::string_view tool_version = "0.1.0";

inline constexpr std::string_view trajectory_csv_header =
    "t,C,C1tilde,C2tilde,rho11,rho22,rho33,rho44,re_rho14,im_rho14,re_rho23,im_rho23,trace,"
    "min_eig";

/// 12 significant decimal digits; reproducible across platforms at the
/// tested tolerances.
inline std::string fmt12(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", x);
    return buf;
}

inline std::string fmt6(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", x);
    return buf;
}

inline std::string trajectory_csv(const ConcurrenceTrajectory& traj) {
    std::string out{trajectory_csv_header};
    out += '\n';
    for (const auto& s : traj.samples) {
        out += fmt12(s.t) + ',' + fmt12(s.c) + ',' + fmt12(s.c1_tilde) + ',' +
               fmt12(s.c2_tilde) + ',' + fmt12(s.rho11) + ',' + fmt12(s.rho22) + ',' +
               fmt12(s.rho33) + ',' + fmt12(s.rho44) + ',' + fmt12(s.rho14.real()) + ',' +
               fmt12(s.rho14.imag()) + ',' + fmt12(s.rho23.real()) + ',' +
               fmt12(s.rho23.imag()) + ',' + fmt12(s.trace) + ',' + fmt12(s.min_eig) + '\n';
    }
    return out;
}

inline std::string initial_kind_name(InitialState::Kind kind) {
    switch (kind) {
    case InitialState::Kind::noon: return "noon";
    case InitialState::Kind::epr: return "epr";
    case InitialState::Kind::general: return "general";
    }
    return "?";
}

/// Resolved configuration echo, keyed by the CLI flag names.
inline nlohmann::json config_to_json(const SimulationConfig& config) {
    nlohmann::json j;
    j["initial"] = initial_kind_name(config.initial.kind);
    if (config.initial.kind == InitialState::Kind::general) {
        nlohmann::json amps = nlohmann::json::array();
        for (const auto& a : config.initial.amps) {
            amps.push_back(a.real());
            amps.push_back(a.imag());
        }
        j["amps"] = amps;
    } else {
        j["alpha"] = config.initial.alpha;
    }
    j["r"] = config.reservoir.r_a;
    j["theta"] = config.reservoir.theta_a;
    j["kappa"] = config.reservoir.kappa_a;
    j["r-b"] = config.reservoir.r_b;
    j["theta-b"] = config.reservoir.theta_b;
    j["kappa-b"] = config.reservoir.kappa_b;
    j["cutoff"] = config.n_max;
    j["tmax"] = config.t_max;
    j["dt"] = config.dt;
    j["epsilon"] = config.esd_epsilon;
    return j;
}

inline nlohmann::json esd_report_json(const EsdReport& report, const SimulationConfig& config) {
    nlohmann::json j;
    j["death_times"] = report.death_times;
    j["revival_times"] = report.revival_times;
    j["terminal_state"] = to_string(report.terminal_state);
    j["epsilon"] = report.epsilon;
    j["t_max"] = report.t_max;
    j["config"] = config_to_json(config);
    return j;
}

namespace detail {

inline nlohmann::json elements_json(const XStateElements& el) {
    nlohmann::json j;
    j["t"] = el.t;
    if (el.populations_valid) {
        j["rho11"] = el.rho11;
        j["rho22"] = el.rho22;
        j["rho33"] = el.rho33;
        j["rho44"] = el.rho44;
    }
    j["rho14"] = {el.rho14.real(), el.rho14.imag()};
    j["rho32"] = {el.rho32.real(), el.rho32.imag()};
    return j;
}

} // namespace detail

inline nlohmann::json consistency_report_json(const ConsistencyReport& rep) {
    nlohmann::json j;
    j["alpha"] = rep.alpha;
    j["r"] = rep.reservoir.r_a;
    j["theta"] = rep.reservoir.theta_a;
    j["kappa"] = rep.reservoir.kappa_a;
    j["cutoffs"] = rep.cutoffs;
    j["times"] = rep.times;
    nlohmann::json verbatim = nlohmann::json::array();
    for (const auto& el : rep.verbatim) verbatim.push_back(detail::elements_json(el));
    j["verbatim"] = verbatim;
    nlohmann::json numerical;
    nlohmann::json deviations;
    for (std::size_t c = 0; c < rep.cutoffs.size(); ++c) {
        nlohmann::json column = nlohmann::json::array();
        for (const auto& el : rep.numerical[c]) column.push_back(detail::elements_json(el));
        const std::string key = std::to_string(rep.cutoffs[c]);
        numerical[key] = column;
        const auto& d = rep.max_abs_deviation[c];
        deviations[key] = {{"rho11", d.rho11}, {"rho22", d.rho22}, {"rho33", d.rho33},
                           {"rho44", d.rho44}, {"rho14", d.rho14}, {"rho32", d.rho32}};
    }
    j["numerical"] = numerical;
    j["max_abs_deviation"] = deviations;
    nlohmann::json violations = nlohmann::json::array();
    for (const auto& v : rep.t0_violations)
        violations.push_back({{"element", v.element},
                              {"printed", v.printed},
                              {"expected", v.expected},
                              {"deviation", v.deviation}});
    j["t0_violations"] = violations;
    return j;
}

inline std::string join_times(const std::vector<double>& times) {
    std::string out;
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (i) out += ';';
        out += fmt12(times[i]);
    }
    return out;
}

inline std::string sweep_csv(const std::vector<SweepRow>& rows,
                             const std::vector<std::string>& trajectory_files) {
    std::string out = "value,first_death_time,death_times,revival_times,terminal_state,"
                      "trajectory_file,error\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& row = rows[i];
        out += fmt12(row.value) + ',';
        if (row.error.empty()) {
            out += (row.report.death_times.empty() ? std::string{}
                                                   : fmt12(row.report.death_times.front()));
            out += ',' + join_times(row.report.death_times) + ',' +
                   join_times(row.report.revival_times) + ',' +
                   to_string(row.report.terminal_state) + ',' + trajectory_files[i] + ',';
        } else {
            std::string msg = row.error;
            for (char& ch : msg)
                if (ch == ',' || ch == '\n') ch = ';';
            out += ",,,,," + msg;
        }
        out += '\n';
    }
    return out;
}

// ---------------------------------------------------------------------------
// SVG line chart

struct SvgCurve {
    std::string label;
    std::vector<std::pair<double, double>> points;
};

/// Self-contained single-panel line chart: fixed 800x600 viewport, linear
/// axes, one polyline per curve, legend at the top right.
inline std::string line_chart_svg(const std::vector<SvgCurve>& curves, std::string_view x_label,
                                  std::string_view y_label, double x_min, double x_max,
                                  double y_min, double y_max) {
    constexpr double width = 800.0, height = 600.0;
    constexpr double left = 80.0, right = 630.0, top = 40.0, bottom = 540.0;
    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#8c564b", "#e377c2", "#7f7f7f"};
    if (!(x_max > x_min)) x_max = x_min + 1.0;
    if (!(y_max > y_min)) y_max = y_min + 1.0;
    auto px = [&](double x) { return left + (x - x_min) / (x_max - x_min) * (right - left); };
    auto py = [&](double y) { return bottom - (y - y_min) / (y_max - y_min) * (bottom - top); };

    std::ostringstream svg;
    svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n"
        << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
    // axes
    svg << "<line x1=\"" << left << "\" y1=\"" << bottom << "\" x2=\"" << right << "\" y2=\""
        << bottom << "\" stroke=\"black\" stroke-width=\"1.5\"/>\n"
        << "<line x1=\"" << left << "\" y1=\"" << bottom << "\" x2=\"" << left << "\" y2=\""
        << top << "\" stroke=\"black\" stroke-width=\"1.5\"/>\n";
    // ticks
    constexpr int n_ticks = 5;
    for (int i = 0; i <= n_ticks; ++i) {
        const double xv = x_min + (x_max - x_min) * i / n_ticks;
        const double yv = y_min + (y_max - y_min) * i / n_ticks;
        svg << "<line x1=\"" << px(xv) << "\" y1=\"" << bottom << "\" x2=\"" << px(xv)
            << "\" y2=\"" << bottom + 6 << "\" stroke=\"black\"/>\n"
            << "<text x=\"" << px(xv) << "\" y=\"" << bottom + 22
            << "\" font-size=\"13\" text-anchor=\"middle\">" << fmt6(xv) << "</text>\n"
            << "<line x1=\"" << left - 6 << "\" y1=\"" << py(yv) << "\" x2=\"" << left
            << "\" y2=\"" << py(yv) << "\" stroke=\"black\"/>\n"
            << "<text x=\"" << left - 10 << "\" y=\"" << py(yv) + 4
            << "\" font-size=\"13\" text-anchor=\"end\">" << fmt6(yv) << "</text>\n";
    }
    // axis labels
    svg << "<text x=\"" << 0.5 * (left + right) << "\" y=\"" << bottom + 45
        << "\" font-size=\"16\" text-anchor=\"middle\">" << x_label << "</text>\n"
        << "<text x=\"22\" y=\"" << 0.5 * (top + bottom)
        << "\" font-size=\"16\" text-anchor=\"middle\" transform=\"rotate(-90 22 "
        << 0.5 * (top + bottom) << ")\">" << y_label << "</text>\n";
    // curves
    for (std::size_t c = 0; c < curves.size(); ++c) {
        svg << "<polyline fill=\"none\" stroke=\"" << palette[c % 8]
            << "\" stroke-width=\"1.8\" points=\"";
        for (const auto& [x, y] : curves[c].points) svg << fmt6(px(x)) << ',' << fmt6(py(y)) << ' ';
        svg << "\"/>\n";
    }
    // legend
    for (std::size_t c = 0; c < curves.size(); ++c) {
        const double ly = top + 10 + 22.0 * static_cast<double>(c);
        svg << "<line x1=\"" << right + 15 << "\" y1=\"" << ly << "\" x2=\"" << right + 45
            << "\" y2=\"" << ly << "\" stroke=\"" << palette[c % 8]
            << "\" stroke-width=\"2\"/>\n"
            << "<text x=\"" << right + 52 << "\" y=\"" << ly + 4 << "\" font-size=\"14\">"
            << curves[c].label << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

// ---------------------------------------------------------------------------
// Run manifest

inline std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : data) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::string fnv1a64_hex(std::string_view data) {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fnv1a64(data)));
    return buf;
}

struct RunManifest {
    std::string command;
    nlohmann::json config;
    double duration_seconds = 0.0;
    std::vector<std::pair<std::string, std::string>> outputs; // (path, content hash)
    std::vector<std::string> notes;
};

inline nlohmann::json manifest_json(const RunManifest& m) {
    nlohmann::json j;
    j["tool"] = "entdyn";
    j["version"] = std::string(tool_version);
    j["command"] = m.command;
    j["config"] = m.config;
    j["duration_seconds"] = m.duration_seconds;
    nlohmann::json outputs = nlohmann::json::array();
    for (const auto& [path, hash] : m.outputs)
        outputs.push_back({{"path", path}, {"fnv1a64", hash}});
    j["outputs"] = outputs;
    j["notes"] = m.notes;
    return j;
}

// ---------------------------------------------------------------------------
// Files and configuration ingestion

inline void write_text(const std::filesystem::path& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw simulation_error("cannot open for writing: " + path.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw simulation_error("write failed: " + path.string());
}

inline std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw validation_error("cannot open file: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Keys a config file may carry: exactly the CLI flag names.
inline const std::vector<std::string>& allowed_config_keys() {
    static const std::vector<std::string> keys = {
        "initial", "alpha", "amps",  "r",    "theta", "kappa",   "r-b",
        "theta-b", "kappa-b", "cutoff", "tmax", "dt",    "epsilon", "out"};
    return keys;
}

/// Flat JSON object with flag names as keys; unknown keys are rejected
/// outright to catch typos.
inline nlohmann::json load_config_file(const std::filesystem::path& path) {
    const std::string text = read_text(path);
    if (text.find_first_not_of(" \t\r\n") == std::string::npos)
        return nlohmann::json::object(); // empty file: all defaults
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw validation_error("config file " + path.string() + ": " + e.what());
    }
    if (j.is_null()) return nlohmann::json::object();
    if (!j.is_object())
        throw validation_error("config file " + path.string() + ": expected a flat JSON object");
    const auto& allowed = allowed_config_keys();
    for (const auto& [key, value] : j.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            throw validation_error("config file " + path.string() + ": unknown key \"" + key +
                                   "\"");
        const bool wants_string = (key == "initial" || key == "amps" || key == "out");
        if (wants_string && !value.is_string())
            throw validation_error("config file " + path.string() + ": key \"" + key +
                                   "\" must be a string");
        if (!wants_string && !value.is_number())
            throw validation_error("config file " + path.string() + ": key \"" + key +
                                   "\" must be a number");
    }
    return j;
}

} // namespace entdyn::io

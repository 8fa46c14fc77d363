#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <sstream>

#include "entdyn/io.hpp"

using namespace entdyn;
namespace fs = std::filesystem;

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, sep)) out.push_back(field);
    return out;
}

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("entdyn_io_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

} // namespace

TEST_CASE("floats are printed with 12 significant digits", "[io]") {
    REQUIRE(io::fmt12(0.1) == "0.1");
    REQUIRE(io::fmt12(1.0 / 3.0) == "0.333333333333");
    REQUIRE(io::fmt12(1e-6) == "1e-06");
    REQUIRE(io::fmt12(0.0) == "0");
    REQUIRE(io::fmt12(std::numeric_limits<double>::quiet_NaN()) == "nan");
}

TEST_CASE("fnv1a64 known-answer vectors", "[io]") {
    REQUIRE(io::fnv1a64_hex("") == "cbf29ce484222325");
    REQUIRE(io::fnv1a64_hex("a") == "af63dc4c8601ec8c");
    REQUIRE(io::fnv1a64_hex("hello") == "a430d84680aabd0b");
}

TEST_CASE("trajectory CSV schema and X-formula round trip", "[io]") {
    SimulationConfig config;
    config.reservoir = ReservoirParams::identical(1.0, 0.2);
    config.initial = InitialState::noon(0.70710678118654752);
    config.t_max = 1.0;
    config.dt = 0.01;
    const ConcurrenceTrajectory traj = concurrence_trajectory(config);
    const std::string csv = io::trajectory_csv(traj);

    std::stringstream ss(csv);
    std::string line;
    REQUIRE(std::getline(ss, line));
    REQUIRE(line == std::string(io::trajectory_csv_header));

    std::size_t rows = 0;
    while (std::getline(ss, line)) {
        const auto f = split(line, ',');
        REQUIRE(f.size() == 14);
        const double c = std::stod(f[1]);
        const double rho11 = std::stod(f[4]), rho22 = std::stod(f[5]);
        const double rho33 = std::stod(f[6]), rho44 = std::stod(f[7]);
        const complexd rho14(std::stod(f[8]), std::stod(f[9]));
        const complexd rho23(std::stod(f[10]), std::stod(f[11]));
        // recompute C from the rho columns via the X-state formula
        const double c1 = 2.0 * (std::abs(rho23) - std::sqrt(rho11 * rho44));
        const double c2 = 2.0 * (std::abs(rho14) - std::sqrt(rho22 * rho33));
        REQUIRE(std::abs(c - std::max({0.0, c1, c2})) < 1e-9);
        ++rows;
    }
    REQUIRE(rows == traj.samples.size());
}

TEST_CASE("sweep CSV escapes row errors", "[io]") {
    std::vector<SweepRow> rows(2);
    rows[0].value = 0.1;
    rows[0].report.death_times = {1.25, 4.0};
    rows[0].report.revival_times = {2.5};
    rows[0].report.terminal_state = TerminalState::dead;
    rows[1].value = 0.2;
    rows[1].error = "boom, with commas\nand a newline";
    const std::string csv = io::sweep_csv(rows, {"row1.csv", ""});
    std::stringstream ss(csv);
    std::string header, line1, line2;
    std::getline(ss, header);
    std::getline(ss, line1);
    std::getline(ss, line2);
    REQUIRE(header ==
            "value,first_death_time,death_times,revival_times,terminal_state,trajectory_file,"
            "error");
    REQUIRE(line1 == "0.1,1.25,1.25;4,2.5,dead,row1.csv,");
    REQUIRE(line2 == "0.2,,,,,boom; with commas;and a newline");
}

TEST_CASE("SVG chart carries curves, labels and a legend", "[io]") {
    std::vector<io::SvgCurve> curves(2);
    curves[0].label = "a";
    curves[0].points = {{0.0, 1.0}, {1.0, 0.5}, {2.0, 0.2}};
    curves[1].label = "b";
    curves[1].points = {{0.0, 0.8}, {1.0, 0.4}, {2.0, 0.1}};
    const std::string svg =
        io::line_chart_svg(curves, "\xce\xbat", "C(t)", 0.0, 2.0, 0.0, 1.0);
    REQUIRE(svg.find("<svg") != std::string::npos);
    std::size_t polylines = 0, pos = 0;
    while ((pos = svg.find("<polyline", pos)) != std::string::npos) {
        ++polylines;
        pos += 1;
    }
    REQUIRE(polylines == 2);
    REQUIRE(svg.find("\xce\xbat") != std::string::npos);
    REQUIRE(svg.find("C(t)") != std::string::npos);
    REQUIRE(svg.find(">a</text>") != std::string::npos);
    REQUIRE(svg.find(">b</text>") != std::string::npos);
}

TEST_CASE("config echo uses the flag names", "[io]") {
    SimulationConfig config;
    config.initial = InitialState::epr(0.6);
    config.reservoir = ReservoirParams::identical(2.0, 0.3, 0.1);
    const nlohmann::json j = io::config_to_json(config);
    REQUIRE(j.at("initial") == "epr");
    REQUIRE(j.at("alpha") == 0.6);
    REQUIRE(j.at("r") == 0.3);
    REQUIRE(j.at("kappa-b") == 2.0);
    REQUIRE(j.at("cutoff") == 1);
    REQUIRE(j.contains("epsilon"));
}

TEST_CASE("esd report serialization", "[io]") {
    EsdReport rep;
    rep.death_times = {1.5};
    rep.terminal_state = TerminalState::dead;
    rep.epsilon = 1e-6;
    rep.t_max = 10.0;
    SimulationConfig config;
    config.initial = InitialState::noon(0.5);
    const nlohmann::json j = io::esd_report_json(rep, config);
    REQUIRE(j.at("death_times").size() == 1);
    REQUIRE(j.at("revival_times").empty());
    REQUIRE(j.at("terminal_state") == "dead");
    REQUIRE(j.at("config").at("initial") == "noon");
}

TEST_CASE("manifest lists every output with its hash", "[io]") {
    io::RunManifest m;
    m.command = "simulate";
    m.config = {{"r", 0.2}};
    m.outputs.emplace_back("trajectory.csv", io::fnv1a64_hex("data"));
    m.notes.push_back("note");
    const nlohmann::json j = io::manifest_json(m);
    REQUIRE(j.at("tool") == "entdyn");
    REQUIRE(j.at("version") == std::string(io::tool_version));
    REQUIRE(j.at("outputs").at(0).at("path") == "trajectory.csv");
    REQUIRE(j.at("outputs").at(0).at("fnv1a64") == io::fnv1a64_hex("data"));
}

TEST_CASE("config files: strict keys, types, empty-file default", "[io]") {
    const fs::path dir = fresh_dir("config");

    io::write_text(dir / "good.json", R"({"r": 0.2, "initial": "epr", "cutoff": 2})");
    const nlohmann::json good = io::load_config_file(dir / "good.json");
    REQUIRE(good.at("r") == 0.2);
    REQUIRE(good.at("initial") == "epr");

    io::write_text(dir / "typo.json", R"({"rr": 0.2})");
    REQUIRE_THROWS_AS(io::load_config_file(dir / "typo.json"), validation_error);

    io::write_text(dir / "badtype.json", R"({"r": "0.2"})");
    REQUIRE_THROWS_AS(io::load_config_file(dir / "badtype.json"), validation_error);

    io::write_text(dir / "notobject.json", "[1,2]");
    REQUIRE_THROWS_AS(io::load_config_file(dir / "notobject.json"), validation_error);

    io::write_text(dir / "empty.json", "");
    const nlohmann::json empty = io::load_config_file(dir / "empty.json");
    REQUIRE(empty.is_object());
    REQUIRE(empty.empty());

    REQUIRE_THROWS_AS(io::load_config_file(dir / "missing.json"), validation_error);
}

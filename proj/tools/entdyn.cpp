// Command-line front end: simulate | figure | esd-time | sweep | validate.
// Exit status: 0 success, 1 runtime/simulation failure, 2 usage/validation
// failure.

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "entdyn/io.hpp"

namespace fs = std::filesystem;
using namespace entdyn;

namespace {

constexpr double default_alpha = 0.70710678118654752; // 1/sqrt(2)

struct FlagValues {
    std::string initial = "noon";
    double alpha = default_alpha;
    std::string amps;
    double r = 0.0;
    double theta = 0.0;
    double kappa = 1.0;
    double r_b = 0.0;
    double theta_b = 0.0;
    double kappa_b = 1.0;
    int cutoff = 1;
    double tmax = 10.0;
    double dt = 1e-3;
    double epsilon = 1e-6;
    std::string out = ".";
    std::string config_path;
};

struct SharedOptions {
    FlagValues vals;
    std::map<std::string, CLI::Option*> opts;

    bool given(const std::string& key) const {
        auto it = opts.find(key);
        return it != opts.end() && it->second->count() > 0;
    }
};

void add_shared_options(CLI::App* cmd, SharedOptions& shared) {
    auto& v = shared.vals;
    auto& o = shared.opts;
    o["initial"] = cmd->add_option("--initial", v.initial, "Initial state: noon|epr|general")
                       ->check(CLI::IsMember({"noon", "epr", "general"}));
    o["alpha"] = cmd->add_option("--alpha", v.alpha, "Amplitude alpha in [0,1] (noon/epr)");
    o["amps"] = cmd->add_option("--amps", v.amps,
                                "General state: 8 comma-separated reals, re/im interleaved");
    o["r"] = cmd->add_option("--r", v.r, "Squeeze parameter (both cavities)");
    o["theta"] = cmd->add_option("--theta", v.theta, "Squeezing phase (both cavities)");
    o["kappa"] = cmd->add_option("--kappa", v.kappa, "Cavity decay rate (both cavities)");
    o["r-b"] = cmd->add_option("--r-b", v.r_b, "Cavity B squeeze parameter override");
    o["theta-b"] = cmd->add_option("--theta-b", v.theta_b, "Cavity B phase override");
    o["kappa-b"] = cmd->add_option("--kappa-b", v.kappa_b, "Cavity B decay rate override");
    o["cutoff"] = cmd->add_option("--cutoff", v.cutoff, "Fock cutoff n_max per mode (>= 1)");
    o["tmax"] = cmd->add_option("--tmax", v.tmax, "Horizon in units of 1/kappa");
    o["dt"] = cmd->add_option("--dt", v.dt, "Sample/integration step");
    o["epsilon"] = cmd->add_option("--epsilon", v.epsilon, "Concurrence zero threshold");
    o["out"] = cmd->add_option("--out", v.out, "Output directory");
    o["config"] = cmd->add_option("--config", v.config_path,
                                  "JSON config file; command-line flags take precedence");
}

std::vector<double> parse_double_list(const std::string& text, const std::string& what) {
    std::vector<double> values;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t comma = text.find(',', pos);
        const std::string token =
            text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        try {
            std::size_t used = 0;
            values.push_back(std::stod(token, &used));
            if (used != token.size()) throw std::invalid_argument(token);
        } catch (const std::exception&) {
            throw validation_error(what + ": cannot parse \"" + token + "\" as a number");
        }
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return values;
}

std::array<complexd, 4> parse_amps(const std::string& text) {
    const std::vector<double> re_im = parse_double_list(text, "--amps");
    if (re_im.size() != 8)
        throw validation_error("--amps: expected 8 comma-separated reals (re/im interleaved), "
                               "got " + std::to_string(re_im.size()));
    std::array<complexd, 4> amps;
    for (int i = 0; i < 4; ++i) amps[i] = complexd(re_im[2 * i], re_im[2 * i + 1]);
    return amps;
}

// Precedence: built-in defaults < config file < command-line flags.
void apply_config_file(SharedOptions& shared) {
    if (shared.vals.config_path.empty()) return;
    const nlohmann::json file = io::load_config_file(shared.vals.config_path);
    auto& v = shared.vals;
    auto num = [&](const std::string& key, double& slot) {
        if (file.contains(key) && !shared.given(key)) slot = file.at(key).get<double>();
    };
    auto str = [&](const std::string& key, std::string& slot) {
        if (file.contains(key) && !shared.given(key)) slot = file.at(key).get<std::string>();
    };
    str("initial", v.initial);
    num("alpha", v.alpha);
    str("amps", v.amps);
    num("r", v.r);
    num("theta", v.theta);
    num("kappa", v.kappa);
    num("r-b", v.r_b);
    num("theta-b", v.theta_b);
    num("kappa-b", v.kappa_b);
    if (file.contains("cutoff") && !shared.given("cutoff"))
        v.cutoff = file.at("cutoff").get<int>();
    num("tmax", v.tmax);
    num("dt", v.dt);
    num("epsilon", v.epsilon);
    str("out", v.out);
}

SimulationConfig resolve_config(SharedOptions& shared) {
    apply_config_file(shared);
    const auto& v = shared.vals;
    SimulationConfig config;
    config.reservoir.kappa_a = v.kappa;
    config.reservoir.r_a = v.r;
    config.reservoir.theta_a = v.theta;
    const bool has_amps = shared.given("amps") || !v.amps.empty();
    config.reservoir.kappa_b = shared.given("kappa-b") ? v.kappa_b : v.kappa;
    config.reservoir.r_b = shared.given("r-b") ? v.r_b : v.r;
    config.reservoir.theta_b = shared.given("theta-b") ? v.theta_b : v.theta;
    if (v.initial == "noon")
        config.initial = InitialState::noon(v.alpha);
    else if (v.initial == "epr")
        config.initial = InitialState::epr(v.alpha);
    else if (v.initial == "general") {
        if (!has_amps) throw validation_error("--initial general requires --amps");
        config.initial = InitialState::general(parse_amps(v.amps));
    } else
        throw validation_error("unknown initial state \"" + v.initial + "\"");
    config.n_max = v.cutoff;
    config.t_max = v.tmax;
    config.dt = v.dt;
    config.esd_epsilon = v.epsilon;
    config.validate();
    return config;
}

fs::path prepare_out_dir(const SharedOptions& shared) {
    fs::path dir(shared.vals.out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec && !fs::is_directory(dir))
        throw validation_error("cannot create output directory " + dir.string());
    return dir;
}

class ManifestWriter {
public:
    ManifestWriter(std::string command, nlohmann::json config_echo, fs::path out_dir)
        : start_(std::chrono::steady_clock::now()), out_dir_(std::move(out_dir)) {
        manifest_.command = std::move(command);
        manifest_.config = std::move(config_echo);
    }

    void emit(const std::string& filename, std::string_view content) {
        io::write_text(out_dir_ / filename, content);
        manifest_.outputs.emplace_back(filename, io::fnv1a64_hex(content));
        std::cout << "wrote " << (out_dir_ / filename).string() << "\n";
    }

    void note(std::string text) { manifest_.notes.push_back(std::move(text)); }

    void finish() {
        manifest_.duration_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        io::write_text(out_dir_ / "manifest.json", io::manifest_json(manifest_).dump(2) + "\n");
        std::cout << "wrote " << (out_dir_ / "manifest.json").string() << "\n";
    }

private:
    std::chrono::steady_clock::time_point start_;
    fs::path out_dir_;
    io::RunManifest manifest_;
};

// Thin the polyline for the SVG; the CSV keeps full resolution.
std::vector<std::pair<double, double>> svg_points(const ConcurrenceTrajectory& traj) {
    const std::size_t stride = std::max<std::size_t>(1, traj.samples.size() / 1200);
    std::vector<std::pair<double, double>> pts;
    pts.reserve(traj.samples.size() / stride + 2);
    for (std::size_t i = 0; i < traj.samples.size(); i += stride)
        pts.emplace_back(traj.samples[i].t, traj.samples[i].c);
    if ((traj.samples.size() - 1) % stride != 0)
        pts.emplace_back(traj.samples.back().t, traj.samples.back().c);
    return pts;
}

std::string value_tag(double v) {
    std::string tag = io::fmt6(v);
    for (char& ch : tag)
        if (ch == '.') ch = 'p';
    return tag;
}

void cmd_simulate(SharedOptions& shared) {
    const SimulationConfig config = resolve_config(shared);
    ManifestWriter manifest("simulate", io::config_to_json(config), prepare_out_dir(shared));
    const ConcurrenceTrajectory traj = concurrence_trajectory(config);
    manifest.emit("trajectory.csv", io::trajectory_csv(traj));
    manifest.finish();
}

void cmd_esd_time(SharedOptions& shared) {
    const SimulationConfig config = resolve_config(shared);
    ManifestWriter manifest("esd-time", io::config_to_json(config), prepare_out_dir(shared));
    const ConcurrenceTrajectory traj = concurrence_trajectory(config);
    const EsdReport report = detect_esd(traj, config.esd_epsilon);
    const std::string json = io::esd_report_json(report, config).dump(2) + "\n";
    manifest.emit("esd_report.json", json);
    manifest.finish();
    std::cout << json;
}

void cmd_figure(SharedOptions& shared, const std::string& id) {
    const bool fig2 = (id == "2a" || id == "2b");
    const bool noon = (id == "2a" || id == "3a");
    shared.vals.initial = noon ? "noon" : "epr";
    if (fig2 && !shared.given("r")) shared.vals.r = 0.2;
    if (!fig2 && !shared.given("alpha")) shared.vals.alpha = default_alpha;

    const std::vector<double> alpha_set{0.3, 0.5, default_alpha, 0.9};
    const std::vector<double> r_set{0.1, 0.2, 0.4, 0.8};
    const std::vector<double>& values = fig2 ? alpha_set : r_set;
    const std::string param = fig2 ? "alpha" : "r";

    SimulationConfig config = resolve_config(shared);
    ManifestWriter manifest("figure " + id, io::config_to_json(config),
                            prepare_out_dir(shared));
    if (fig2)
        manifest.note("alpha set {0.3, 0.5, 0.70710678, 0.9} is this tool's preset");

    std::vector<io::SvgCurve> curves;
    for (double value : values) {
        SimulationConfig run = config;
        if (fig2)
            run.initial.alpha = value;
        else
            run.reservoir.r_a = run.reservoir.r_b = value;
        const ConcurrenceTrajectory traj = concurrence_trajectory(run);
        manifest.emit("figure" + id + "_" + param + "_" + value_tag(value) + ".csv",
                      io::trajectory_csv(traj));
        curves.push_back({(fig2 ? "\xce\xb1 = " : "r = ") + std::string(io::fmt6(value)),
                          svg_points(traj)});
    }
    manifest.emit("figure" + id + ".svg",
                  io::line_chart_svg(curves, "\xce\xbat", "C(t)", 0.0, config.t_max, 0.0, 1.0));
    manifest.finish();
}

void cmd_sweep(SharedOptions& shared, const std::string& axis_name,
               const std::string& values_text) {
    SweepAxis axis;
    if (axis_name == "alpha")
        axis = SweepAxis::alpha;
    else if (axis_name == "r")
        axis = SweepAxis::r;
    else if (axis_name == "theta")
        axis = SweepAxis::theta;
    else
        throw validation_error("--axis must be alpha, r or theta");
    const std::vector<double> values = parse_double_list(values_text, "--values");
    if (values.empty()) throw validation_error("--values must not be empty");

    const SimulationConfig base = resolve_config(shared);
    ManifestWriter manifest("sweep " + axis_name, io::config_to_json(base),
                            prepare_out_dir(shared));
    const std::vector<SweepRow> rows = sweep(base, axis, values);
    std::vector<std::string> trajectory_files(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (!rows[i].error.empty()) continue;
        trajectory_files[i] = "sweep_" + axis_name + "_" + std::to_string(i + 1) + ".csv";
        manifest.emit(trajectory_files[i], io::trajectory_csv(rows[i].trajectory));
    }
    manifest.emit("sweep.csv", io::sweep_csv(rows, trajectory_files));
    manifest.finish();
}

void cmd_validate(SharedOptions& shared) {
    const SimulationConfig config = resolve_config(shared);
    if (!config.reservoir.is_identical())
        throw validation_error("validate: requires identical cavities (no -b overrides)");
    if (config.initial.kind != InitialState::Kind::noon)
        throw validation_error("validate: the closed forms cover the noon initial state");
    ManifestWriter manifest("validate", io::config_to_json(config), prepare_out_dir(shared));
    constexpr int n_points = 41;
    std::vector<double> grid(n_points);
    for (int i = 0; i < n_points; ++i) grid[i] = config.t_max * i / (n_points - 1);
    const ConsistencyReport report =
        consistency_report(config.initial.alpha, config.reservoir, grid);
    manifest.emit("validate.json", io::consistency_report_json(report).dump(2) + "\n");
    manifest.finish();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Dissipative entanglement dynamics of two cavity modes in squeezed vacuum "
                 "reservoirs"};
    app.set_version_flag("--version", std::string(io::tool_version));
    app.require_subcommand(1);

    SharedOptions sim_opts, fig_opts, esd_opts, sweep_opts, val_opts;
    std::string figure_id, sweep_axis, sweep_values;

    CLI::App* simulate = app.add_subcommand("simulate", "Concurrence trajectory to CSV");
    add_shared_options(simulate, sim_opts);
    simulate->callback([&] { cmd_simulate(sim_opts); });

    CLI::App* figure = app.add_subcommand("figure", "Reproduce a concurrence figure");
    figure->add_option("--id", figure_id, "Figure id: 2a|2b|3a|3b")
        ->required()
        ->check(CLI::IsMember({"2a", "2b", "3a", "3b"}));
    add_shared_options(figure, fig_opts);
    figure->callback([&] { cmd_figure(fig_opts, figure_id); });

    CLI::App* esd_time = app.add_subcommand("esd-time", "Detect death/revival times");
    add_shared_options(esd_time, esd_opts);
    esd_time->callback([&] { cmd_esd_time(esd_opts); });

    CLI::App* sweep_cmd = app.add_subcommand("sweep", "Independent runs over one parameter");
    sweep_cmd->add_option("--axis", sweep_axis, "Swept parameter: alpha|r|theta")->required();
    sweep_cmd->add_option("--values", sweep_values, "Comma-separated parameter values")
        ->required();
    add_shared_options(sweep_cmd, sweep_opts);
    sweep_cmd->callback([&] { cmd_sweep(sweep_opts, sweep_axis, sweep_values); });

    CLI::App* validate = app.add_subcommand("validate", "Audit the closed-form solution "
                                                        "against the numerical engine");
    add_shared_options(validate, val_opts);
    validate->callback([&] { cmd_validate(val_opts); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const validation_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const simulation_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

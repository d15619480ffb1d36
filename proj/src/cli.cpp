#include "stator/cli.hpp"

#include "stator/analysis.hpp"
#include "stator/config.hpp"
#include "stator/error.hpp"
#include "stator/holography.hpp"
#include "stator/io.hpp"
#include "stator/reference_data.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>

namespace stator {

namespace {

// force_per_volt is calibrated at this voltage so that amplitudes stay linear
// in the configured peak_to_peak_voltage.
constexpr double calibration_voltage = 100.0;

using Outputs = std::vector<std::pair<std::string, std::string>>;

struct Solved {
    EffectivePlate plate;
    double stiffness_scale = 1.0;
    ModalBasis basis;
};

Solved solve(const RunConfig& cfg) {
    Solved s;
    s.plate = homogenize(cfg.geometry, cfg.material);
    const auto& sv = cfg.solver;
    s.basis = solve_modes(s.plate, sv.n_max, sv.modes_per_n, sv.discretization, sv.n_min);
    if (cfg.calibration.enabled) {
        const CalibratedPlate cal = calibrate(s.plate, s.basis, cfg.calibration.target);
        s.plate = cal.plate;
        s.stiffness_scale = cal.stiffness_scale;
        s.basis = solve_modes(s.plate, sv.n_max, sv.modes_per_n, sv.discretization, sv.n_min);
    }
    return s;
}

struct Driven {
    ModalBasis basis; // retained and damped
    DriveConfig drive;
    double natural_frequency = 0.0; // lowest mode of the electrode harmonic
    double zeta = 0.0;
    double dt = 0.0;
    double duration = 0.0;
    std::vector<ProbePoint> probes;
};

Driven setup_drive(const RunConfig& cfg, const ModalBasis& full) {
    Driven d;
    d.drive = cfg.drive;
    const int nd = cfg.drive.electrode_harmonic;
    d.natural_frequency = full.frequency_of(nd);
    if (d.drive.drive_frequency == 0.0) d.drive.drive_frequency = d.natural_frequency;
    const double f = d.drive.drive_frequency;

    d.basis = full.retain_below(std::max(cfg.dynamics.retain_factor * f, d.natural_frequency));
    d.zeta = cfg.material.modal_damping_ratio;
    if (cfg.dynamics.settling_time > 0.0) {
        d.zeta = damping_for_settling(cfg.dynamics.settling_time, d.natural_frequency);
        if (!(d.zeta < 1.0)) throw ConfigError("dynamics.settling_time: implies an overdamped mode");
        d.basis = with_damping(d.basis, d.zeta, nd);
    }

    if (cfg.dynamics.edge_amplitude > 0.0 && d.drive.force_per_volt > 0.0) {
        DriveConfig ref = d.drive;
        ref.peak_to_peak_voltage = calibration_voltage;
        ref = calibrate_force_per_volt(d.basis, ref, cfg.geometry.outer_radius, 0.0,
                                       cfg.dynamics.edge_amplitude);
        d.drive.force_per_volt = ref.force_per_volt;
    }

    d.dt = cfg.dynamics.dt > 0.0 ? cfg.dynamics.dt
                                 : std::min(1.0 / (40.0 * f), 1.0 / (20.0 * d.basis.max_frequency()));
    d.duration = cfg.dynamics.duration > 0.0
                     ? cfg.dynamics.duration
                     : (cfg.dynamics.settling_time > 0.0 ? 6.0 * cfg.dynamics.settling_time : 20e-3);

    d.probes = cfg.dynamics.probes;
    if (d.probes.empty()) {
        const auto& g = cfg.geometry;
        d.probes = {{"inner", g.tooth_band_inner_radius, 0.0},
                    {"middle", g.tooth_band_centroid_radius(), 0.0},
                    {"edge", g.outer_radius, 0.0}};
    }
    return d;
}

// Start of the last whole drive period that still has a full period after it.
double reference_time(const ModalTrajectory& traj) {
    const double f = traj.drive_frequency;
    const double k = std::floor(traj.end() * f * (1.0 - 1e-12)) - 1.0;
    if (k < 0.0) throw DomainError("trajectory shorter than two drive periods");
    return k / f;
}

std::string phase_tag(double deg) { return format_number(deg); }

std::string key_values(const std::vector<std::pair<std::string, std::string>>& rows) {
    std::string out;
    for (const auto& [k, v] : rows) out += k + " " + v + "\n";
    return out;
}

Outputs cmd_modes(const RunConfig& cfg) {
    const Solved s = solve(cfg);
    return {{"modes.csv", modes_csv(s.basis)}, {"mode_profiles.txt", mode_profiles_text(s.basis)}};
}

Outputs cmd_respond(const RunConfig& cfg) {
    const Solved s = solve(cfg);
    const Driven d = setup_drive(cfg, s.basis);
    const ModalTrajectory traj = respond(d.basis, d.drive, d.duration, d.dt);
    const auto series = probe(d.basis, traj, d.probes);

    std::vector<std::pair<std::string, std::string>> rows{
        {"drive_frequency_Hz", format_number(d.drive.drive_frequency)},
        {"electrode_harmonic", std::to_string(d.drive.electrode_harmonic)},
        {"natural_frequency_Hz", format_number(d.natural_frequency)},
        {"damping_ratio", format_number(d.zeta)},
        {"peak_to_peak_voltage_V", format_number(d.drive.peak_to_peak_voltage)},
        {"force_per_volt_N_per_V", format_number(d.drive.force_per_volt)},
        {"dt_s", format_number(d.dt)},
        {"duration_s", format_number(d.duration)},
        {"retained_modes", std::to_string(d.basis.modes.size())},
        {"settling_band", format_number(settling_band)},
    };
    for (const auto& p : series) {
        const std::string id = "probe." + p.point.id;
        rows.emplace_back(id + ".r_m", format_number(p.point.r));
        rows.emplace_back(id + ".theta_rad", format_number(p.point.theta));
        rows.emplace_back(id + ".steady_amplitude_m", format_number(p.steady_amplitude));
        rows.emplace_back(id + ".settling_time_s",
                          p.settling_time ? format_number(*p.settling_time) : std::string("unsettled"));
    }
    return {{"probes.csv", probes_csv(traj.times, series)}, {"settling.txt", key_values(rows)}};
}

std::shared_ptr<const Grid> image_grid(const RunConfig& cfg) {
    const auto& g = cfg.geometry;
    return Grid::cartesian(g.inner_radius, g.outer_radius, cfg.holography.image_pixels,
                           1.05 * g.outer_radius);
}

// |field| rescaled so its peak equals `peak`.
ScalarField scaled_amplitude(const ScalarField& f, double peak) {
    double m = 0.0;
    for (std::size_t p = 0; p < f.values.size(); ++p)
        if (f.grid->valid[p]) m = std::max(m, std::abs(f.values[p]));
    if (!(m > 0.0)) throw NumericalError("pattern vanishes on the image grid");
    ScalarField out = f;
    for (auto& v : out.values) v = std::abs(v) * peak / m;
    return out;
}

Outputs cmd_fringes(const RunConfig& cfg, std::ostream& err) {
    const Solved s = solve(cfg);
    const Driven d = setup_drive(cfg, s.basis);
    const auto grid = image_grid(cfg);
    Outputs out;
    const auto note_clipping = [&](const FringeImage& img, const std::string& name) {
        if (img.clipped_pixels > 0)
            err << "warning: " << name << ": " << img.clipped_pixels
                << " pixels exceeded optics.max_amplitude and were clipped\n";
    };

    for (int n : cfg.holography.mode_images) {
        const Mode* m = s.basis.find(n, Orientation::cosine, 0);
        if (!m) throw DomainError("no mode with n=" + std::to_string(n) + " in the basis");
        ScalarField shape{grid, std::vector<double>(grid->size(), std::numeric_limits<double>::quiet_NaN())};
        for (std::size_t p = 0; p < grid->size(); ++p)
            if (grid->valid[p]) shape.values[p] = mode_shape_eval(*m, grid->r[p], grid->theta[p]);
        const FringeImage img = time_averaged(scaled_amplitude(shape, cfg.holography.render_amplitude), cfg.optics);
        const std::string name = "fringe_mode_n" + std::to_string(n) + ".pgm";
        note_clipping(img, name);
        out.emplace_back(name, encode_pgm(to_pgm(img)));
    }

    const auto phasors = steady_phasors(d.basis, d.drive);
    const FringeImage drive_img = time_averaged(steady_amplitude_field(d.basis, phasors, grid), cfg.optics);
    note_clipping(drive_img, "fringe_drive.pgm");
    out.emplace_back("fringe_drive.pgm", encode_pgm(to_pgm(drive_img)));

    if (!cfg.holography.strobe_pairs.empty()) {
        const ModalTrajectory traj = respond(d.basis, d.drive, d.duration, d.dt);
        const double t_ref = reference_time(traj);
        std::uint64_t stream = 0;
        for (const auto& [a, b] : cfg.holography.strobe_pairs) {
            const ScalarField fa = strobe_snapshot(d.basis, traj, t_ref, a, grid, cfg.optics);
            const ScalarField fb = strobe_snapshot(d.basis, traj, t_ref, b, grid, cfg.optics);
            const PhaseMap map = stroboscopic(fa, fb, cfg.optics, a, b, cfg.seed + stream++);
            const std::string stem = "strobe_" + phase_tag(a) + "_" + phase_tag(b);
            out.emplace_back(stem + ".pgm", encode_pgm(to_pgm(map)));
            out.emplace_back(stem + ".f32", encode_field_dump({grid, map.phase}, "wrapped_phase_rad"));
        }
    }

    if (cfg.mixed.enabled) {
        const auto& mx = cfg.mixed;
        const ModalBasis damped = with_damping(s.basis, mx.damping_ratio, mx.n);
        const ExternalMode ext = ExternalMode::lateral_proxy(mx.n, mx.external_frequency, mx.damping_ratio,
                                                             cfg.geometry.fixture_radius, cfg.geometry.outer_radius);
        DriveConfig drive = d.drive;
        drive.drive_frequency = mx.drive_frequency;
        const MixedResponse r = mixed_response(damped, {mx.n, Orientation::cosine, mx.mode_resonance, 1.0}, ext,
                                               drive, grid);
        const FringeImage img = time_averaged(scaled_amplitude(r.pattern, cfg.holography.render_amplitude), cfg.optics);
        out.emplace_back("fringe_mixed.pgm", encode_pgm(to_pgm(img)));
        out.emplace_back("mixed.txt",
                         key_values({{"drive_frequency_Hz", format_number(mx.drive_frequency)},
                                     {"mode_resonance_Hz", format_number(mx.mode_resonance)},
                                     {"external_frequency_Hz", format_number(mx.external_frequency)},
                                     {"mode_weight", format_number(r.mode_weight)},
                                     {"external_weight", format_number(r.external_weight)},
                                     {"correlation_with_mode", format_number(correlation(r.pattern, r.mode_pattern))},
                                     {"correlation_with_external",
                                      format_number(correlation(r.pattern, r.external_pattern))}}));
    }
    return out;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

double parse_cell(const std::string& text, const std::string& where) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != text.size() || !std::isfinite(v))
        throw ConfigError(where + ": '" + text + "' is not a finite number");
    return v;
}

// strobe_phase_deg,theta_rad,value_m rows, grouped by strobe phase in order of appearance.
std::vector<std::pair<double, CircleSample>> read_circle_csv(const std::string& path, double radius) {
    std::istringstream in(read_file(path));
    std::string line;
    if (!std::getline(in, line)) throw ConfigError(path + ": empty input");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "strobe_phase_deg,theta_rad,value_m")
        throw ConfigError(path + ": expected header strobe_phase_deg,theta_rad,value_m");

    std::vector<double> order;
    std::map<double, std::vector<std::pair<double, double>>> groups;
    int row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto cells = split_csv_line(line);
        const std::string where = path + ":" + std::to_string(row);
        if (cells.size() != 3) throw ConfigError(where + ": expected 3 columns");
        const double phase = parse_cell(cells[0], where);
        double theta = std::fmod(parse_cell(cells[1], where), 2.0 * std::numbers::pi);
        if (theta < 0.0) theta += 2.0 * std::numbers::pi;
        if (!groups.count(phase)) order.push_back(phase);
        groups[phase].emplace_back(theta, parse_cell(cells[2], where));
    }
    std::vector<std::pair<double, CircleSample>> out;
    for (double phase : order) {
        auto& pts = groups[phase];
        std::stable_sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        CircleSample s;
        s.radius = radius;
        s.source = SampleSource::hologram;
        for (const auto& [t, v] : pts) {
            if (!s.theta.empty() && t == s.theta.back())
                throw ConfigError(path + ": duplicate theta at strobe phase " + format_number(phase));
            s.theta.push_back(t);
            s.values.push_back(v);
        }
        out.emplace_back(phase, std::move(s));
    }
    return out;
}

std::vector<std::pair<double, CircleSample>> simulate_circles(const RunConfig& cfg, double radius) {
    const Solved s = solve(cfg);
    const Driven d = setup_drive(cfg, s.basis);
    const ModalTrajectory traj = respond(d.basis, d.drive, d.duration, d.dt);
    const double t_ref = reference_time(traj);
    const auto& g = cfg.geometry;
    const auto grid = Grid::polar(g.inner_radius, g.outer_radius, radius, radius, 1, cfg.analysis.samples);
    // Each exposure is paired with a reference exposure of the plate at rest.
    const ScalarField rest{grid, std::vector<double>(grid->size(), 0.0)};

    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> noise(0.0, 1.0);
    std::vector<std::pair<double, CircleSample>> out;
    std::uint64_t stream = 0;
    for (double phase : cfg.analysis.strobe_phases) {
        const ScalarField snap = strobe_snapshot(d.basis, traj, t_ref, phase, grid, cfg.optics);
        const PhaseMap map = stroboscopic(rest, snap, cfg.optics, 0.0, phase, cfg.seed + stream++);
        CircleSample c = sample_circle(unwrap_to_displacement(map, cfg.optics), radius, SampleSource::hologram);
        if (cfg.analysis.displacement_noise > 0.0)
            for (auto& v : c.values) v += cfg.analysis.displacement_noise * noise(rng);
        out.emplace_back(phase, std::move(c));
    }
    return out;
}

Outputs cmd_fit(const RunConfig& cfg, const std::optional<std::string>& input) {
    const double radius = cfg.analysis.circle_radius > 0.0 ? cfg.analysis.circle_radius : cfg.geometry.outer_radius;
    const auto circles = input ? read_circle_csv(*input, radius) : simulate_circles(cfg, radius);
    if (circles.empty()) throw ConfigError("fit: no circle samples");

    const int n = detect_mode_number(circles.front().second);
    std::vector<StrobeFit> fits;
    std::string csv = "strobe_phase_deg,n,A_m,phi_rad,delta_m,residual_m\n";
    for (const auto& [phase, sample] : circles) {
        const FitResult f = fit_eq1(sample, n);
        fits.push_back({phase, f});
        csv += format_number(phase) + "," + std::to_string(f.n) + "," + format_number(f.amplitude) + ","
               + format_number(f.phase) + "," + format_number(f.offset) + "," + format_number(f.rms_residual) + "\n";
    }

    std::vector<std::pair<std::string, std::string>> rows{
        {"source", input ? "input:" + *input : std::string("simulated-hologram")},
        {"circle_radius_m", format_number(circles.front().second.radius)},
        {"mode_number", std::to_string(n)},
        {"strobe_phases", std::to_string(fits.size())},
    };
    if (fits.size() >= 3) {
        const WaveClassification c = track_strobe_phase(fits);
        rows.emplace_back("classification", to_string(c.kind));
        rows.emplace_back("rotation_rate_deg_per_strobe_deg", format_number(c.rotation_rate));
        rows.emplace_back("traveling_rate_deg_per_strobe_deg", format_number(1.0 / n));
        rows.emplace_back("amplitude_cv", format_number(c.amplitude_cv));
        rows.emplace_back("standing_wave_ratio", format_number(c.standing_wave_ratio));
        rows.emplace_back("max_phase_deviation_deg", format_number(c.max_phase_deviation_deg));
    } else {
        rows.emplace_back("classification", "unclassified (fewer than 3 strobe phases)");
    }
    rows.emplace_back("asymmetry_index", fits.size() >= 2 ? format_number(asymmetry_index(fits)) : "n/a");
    return {{"fit.csv", csv}, {"fit_summary.txt", key_values(rows)}};
}

Outputs cmd_report(const RunConfig& cfg) {
    const Solved s = solve(cfg);
    std::array<std::optional<double>, reference_mode_count> model{};
    for (int k = 0; k < reference_mode_count; ++k)
        if (const Mode* m = s.basis.find(k + 1, Orientation::cosine, 0)) model[k] = m->frequency / 1000.0;
    std::string text = "model: Md<k> is the lowest mode with k nodal diameters\n";
    text += "calibration: " + std::string(cfg.calibration.enabled ? "enabled" : "disabled")
            + ", stiffness_scale " + format_number(s.stiffness_scale) + "\n";
    text += comparison_report(model);
    return {{"report.txt", text}};
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Traveling-wave stator modal, dynamic and holography toolkit", "stator"};
    app.require_subcommand(0, 1);
    bool print_defaults = false;
    app.add_flag("--print-default-config", print_defaults, "Print the built-in configuration as JSON");

    std::string config_path;
    std::vector<std::string> overrides;
    std::string out_dir;
    std::string input_path;
    const auto common = [&](CLI::App* sub) {
        sub->add_option("-c,--config", config_path, "JSON configuration file");
        sub->add_option("-s,--set", overrides, "Override a config key, e.g. drive.peak_to_peak_voltage=200");
        sub->add_option("-o,--out", out_dir, "Output directory (overrides config and environment)");
    };
    CLI::App* modes = app.add_subcommand("modes", "Eigenfrequency table and radial mode profiles");
    CLI::App* respond_cmd = app.add_subcommand("respond", "Transient probe response and settling report");
    CLI::App* fringes = app.add_subcommand("fringes", "Time-averaged and stroboscopic fringe images");
    CLI::App* fit = app.add_subcommand("fit", "Circle fits of f = A sin(n theta + phi) + delta per strobe phase");
    CLI::App* report = app.add_subcommand("report", "Model frequencies against the embedded reference table");
    for (auto* sub : {modes, respond_cmd, fringes, fit, report}) common(sub);
    fit->add_option("-i,--input", input_path, "CSV of strobe_phase_deg,theta_rad,value_m samples");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return exit_config;
    }

    if (print_defaults) {
        out << default_config_text();
        return exit_ok;
    }
    if (app.get_subcommands().empty()) {
        err << "error: a subcommand is required (modes, respond, fringes, fit, report)\n";
        return exit_config;
    }
    CLI::App* sub = app.get_subcommands().front();

    RunConfig cfg;
    std::filesystem::path dir;
    try {
        cfg = config_path.empty() ? default_config(overrides)
                                  : parse_config(read_file(config_path), overrides, true);
        dir = cfg.output_dir;
        if (const char* env = std::getenv(output_dir_env); env && *env) dir = env;
        if (!out_dir.empty()) dir = out_dir;
        if (!input_path.empty() && !std::filesystem::is_regular_file(input_path))
            throw ConfigError("--input: no such file " + input_path);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return exit_config;
    } catch (const Error& e) {
        err << "config error: " << e.what() << "\n";
        return exit_config;
    }

    Outputs files;
    try {
        if (sub == modes) files = cmd_modes(cfg);
        else if (sub == respond_cmd) files = cmd_respond(cfg);
        else if (sub == fringes) files = cmd_fringes(cfg, err);
        else if (sub == fit) files = cmd_fit(cfg, input_path.empty() ? std::nullopt : std::optional(input_path));
        else files = cmd_report(cfg);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return exit_config;
    } catch (const StabilityError& e) {
        err << "config error: " << e.what() << " (reduce dynamics.dt)\n";
        return exit_config;
    } catch (const Error& e) {
        err << "numerical error: " << e.what() << "\n";
        return exit_numerical;
    }

    try {
        for (const auto& [name, bytes] : files) {
            write_file_atomic(dir / name, bytes);
            out << (dir / name).string() << "\n";
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return exit_failure;
    }
    return exit_ok;
}

} // namespace stator

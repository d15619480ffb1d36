// Acceptance run: one PASS/FAIL line per criterion, tolerances fixed below.
#include "oracles/radial_fd.hpp"

#include "stator/analysis.hpp"
#include "stator/cli.hpp"
#include "stator/config.hpp"
#include "stator/dynamics.hpp"
#include "stator/geometry.hpp"
#include "stator/holography.hpp"
#include "stator/io.hpp"
#include "stator/modal.hpp"
#include "stator/reference_data.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

using namespace stator;
namespace fs = std::filesystem;

namespace {

constexpr double pi = std::numbers::pi;

namespace tol {
constexpr double oracle_rel = 0.01;
constexpr double oracle_seconds = 10.0;
constexpr double pair_rel = 1e-9;
constexpr double orthogonality = 1e-8;
constexpr double anchor_rel = 1e-4;
constexpr double settling_target = 3.4e-3;
constexpr double settling_rel = 0.10;
constexpr double settling_seconds = 5.0;
constexpr double ratio_rel = 0.30;
constexpr double envelope_ratio = 1.01;
constexpr double crest_deg = 0.5;
constexpr double roundtrip_rel = 1e-3;
constexpr double dark_fringe = 101.8e-9;
constexpr double dark_fringe_abs = 0.5e-9;
constexpr double strobe_deg = 0.1;
constexpr double fit_rel = 1e-12;
constexpr double weight_factor = 4.0;
constexpr double mixed_correlation = 0.95;
} // namespace tol

int failures = 0;

void report(int id, const char* title, bool pass, const std::string& detail) {
    std::printf("[%s] %2d %s: %s\n", pass ? "PASS" : "FAIL", id, title, detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
}

void info(const std::string& text) { std::printf("[INFO]    %s\n", text.c_str()); }

std::string fmt(const char* f, auto... v) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, v...);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

struct Calibrated {
    EffectivePlate plate;
    ModalBasis basis;
};

const Calibrated& calibrated_model() {
    static const Calibrated model = [] {
        const RunConfig cfg = default_config();
        const auto& sv = cfg.solver;
        const auto plate = homogenize(cfg.geometry, cfg.material);
        const auto raw = solve_modes(plate, sv.n_max, sv.modes_per_n, sv.discretization);
        const auto cal = calibrate(plate, raw, cfg.calibration.target);
        return Calibrated{cal.plate, solve_modes(cal.plate, sv.n_max, sv.modes_per_n, sv.discretization)};
    }();
    return model;
}

const ModalBasis& calibrated() { return calibrated_model().basis; }

struct CliRun {
    int code = 0;
    std::string err;
};

CliRun cli(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, err.str()};
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "stator_acceptance" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::map<std::string, std::string> key_values(const fs::path& path) {
    std::map<std::string, std::string> kv;
    std::istringstream in(read_file(path));
    std::string line;
    while (std::getline(in, line)) {
        const auto sp = line.find(' ');
        if (sp != std::string::npos) kv[line.substr(0, sp)] = line.substr(sp + 1);
    }
    return kv;
}

void eigen_oracle() {
    const auto t0 = std::chrono::steady_clock::now();
    const double h = 4.02e-3, nu = 0.36;
    const auto plate = EffectivePlate::uniform(3e-3, 5e-3, 15e-3, plate_bending_stiffness(3.2e9, nu, h), 1270.0 * h, nu);
    const auto basis = solve_modes(plate, 4, 1);
    double worst = 0.0;
    for (int n = 0; n <= 4; ++n) {
        const auto& seg = plate.segments.front();
        const auto fd = oracle::radial_fd_frequencies(plate.fixture_radius, plate.outer_radius, seg.bending_stiffness,
                                                      seg.areal_mass, nu, n, 400, 1);
        worst = std::max(worst, rel(basis.frequency_of(n), fd.at(0)));
    }
    const double secs = seconds_since(t0);
    report(1, "eigen-solver vs finite-difference oracle (n=0..4)",
           worst < tol::oracle_rel && secs < tol::oracle_seconds,
           fmt("max rel dev %.2e (tol %.0e), %.2f s (limit %.0f s)", worst, tol::oracle_rel, secs, tol::oracle_seconds));
}

void degeneracy() {
    const RunConfig cfg = default_config();
    const auto& plate = calibrated_model().plate;
    const auto& basis = calibrated();
    double pair = 0.0, ortho = 0.0;
    for (int n = 0; n <= cfg.solver.n_max; ++n) {
        const auto sys = assemble(plate, n, basis.discretization);
        std::vector<Eigen::VectorXd> v;
        for (int k = 0; k < cfg.solver.modes_per_n; ++k) {
            const Mode* c = basis.find(n, Orientation::cosine, k);
            if (n > 0) {
                const Mode* s = basis.find(n, Orientation::sine, k);
                pair = std::max(pair, rel(s->frequency, c->frequency));
            }
            v.push_back(dof_vector(*c, sys));
        }
        for (std::size_t i = 0; i < v.size(); ++i)
            for (std::size_t j = 0; j < v.size(); ++j)
                ortho = std::max(ortho, std::abs(v[i].dot(sys.mass * v[j]) - (i == j ? 1.0 : 0.0)));
    }
    // Different harmonics are orthogonal through the angular integral.
    const auto grid = Grid::polar(3e-3, 15e-3, 10e-3, 10e-3, 1, 720);
    double angular = 0.0;
    for (std::size_t a = 0; a < basis.modes.size(); ++a)
        for (std::size_t b = a + 1; b < basis.modes.size(); ++b) {
            const auto& ma = basis.modes[a];
            const auto& mb = basis.modes[b];
            if (ma.n == mb.n && ma.orientation == mb.orientation) continue;
            double dot = 0.0, na = 0.0, nb = 0.0;
            for (std::size_t p = 0; p < grid->size(); ++p) {
                const double wa = mode_shape_eval(ma, grid->r[p], grid->theta[p]);
                const double wb = mode_shape_eval(mb, grid->r[p], grid->theta[p]);
                dot += wa * wb;
                na += wa * wa;
                nb += wb * wb;
            }
            if (na > 0.0 && nb > 0.0) angular = std::max(angular, std::abs(dot) / std::sqrt(na * nb));
        }
    ortho = std::max(ortho, angular);
    report(2, "degenerate pairs and M-orthogonality", pair < tol::pair_rel && ortho < tol::orthogonality,
           fmt("pair rel dev %.1e (tol %.0e), max orthogonality residual %.1e (tol %.0e)", pair, tol::pair_rel, ortho,
               tol::orthogonality));
}

void calibration_anchor() {
    const auto& basis = calibrated();
    std::array<std::optional<double>, reference_mode_count> model{};
    bool ascending = true;
    double prev = 0.0;
    for (int k = 0; k < reference_mode_count; ++k) {
        const Mode* m = basis.find(k + 1, Orientation::cosine, 0);
        if (!m) {
            ascending = false;
            continue;
        }
        model[k] = m->frequency / 1000.0;
        ascending = ascending && m->frequency > prev;
        prev = m->frequency;
    }
    const double f1 = basis.frequency_of(1);
    const double dev = rel(f1, 3680.0);
    std::string devs;
    const auto& sim = reference_row("Simulation");
    for (int k = 0; k < reference_mode_count; ++k)
        devs += fmt(" Md%d %+.1f%%", k + 1, *deviation_percent(model[k], sim.khz[k]));
    report(3, "calibration anchor and ascending Md1..Md7", dev < tol::anchor_rel && ascending,
           fmt("f(n=1) %.4f Hz, rel dev %.1e (tol %.0e), ascending %s", f1, dev, tol::anchor_rel,
               ascending ? "yes" : "no"));
    info("deviation from the reference simulation row (reported, not enforced):" + devs);
}

void settling_and_ordering() {
    const auto dir = scratch("respond");
    const auto t0 = std::chrono::steady_clock::now();
    const CliRun r = cli({"respond", "--out", dir.string()});
    const double secs = seconds_since(t0);
    if (r.code != exit_ok) {
        report(4, "settling time", false, "respond failed: " + r.err);
        report(5, "radial amplitude ordering", false, "respond failed");
        return;
    }
    const auto kv = key_values(dir / "settling.txt");
    double worst = 0.0;
    std::string times;
    for (const char* id : {"inner", "middle", "edge"}) {
        const auto& v = kv.at(std::string("probe.") + id + ".settling_time_s");
        const double t = v == "unsettled" ? INFINITY : std::stod(v);
        worst = std::max(worst, rel(t, tol::settling_target));
        times += fmt(" %s %.3f ms", id, t * 1e3);
    }
    report(4, "95% envelope settling time", worst <= tol::settling_rel && secs < tol::settling_seconds,
           fmt("zeta %s;%s; max rel dev %.3f (tol %.2f); %.2f s (limit %.0f s)", kv.at("damping_ratio").c_str(),
               times.c_str(), worst, tol::settling_rel, secs, tol::settling_seconds));

    // Literal 4/(zeta omega) damping, for comparison only.
    {
        const double f = calibrated().frequency_of(4);
        const double zeta = 4.0 / (2 * pi * f * tol::settling_target);
        const auto basis = with_damping(calibrated().retain_below(2 * f), zeta, 4);
        DriveConfig d;
        d.drive_frequency = f;
        const auto traj = respond(basis, d, 20e-3, 1.0 / (40.0 * f));
        const auto s = probe(basis, traj, {{"edge", 15e-3, 0.0}});
        info(fmt("with zeta = 4/(omega*3.4 ms) = %.5f the 5%% band settles at %.3f ms", zeta,
                 s[0].settling_time.value_or(NAN) * 1e3));
    }

    const double inner = std::stod(kv.at("probe.inner.steady_amplitude_m"));
    const double middle = std::stod(kv.at("probe.middle.steady_amplitude_m"));
    const double edge = std::stod(kv.at("probe.edge.steady_amplitude_m"));
    const bool ordered = inner < middle && middle < edge;
    const double ri = inner / edge, rm = middle / edge;
    const bool ratios = std::abs(ri / 0.3 - 1.0) <= tol::ratio_rel && std::abs(rm / 0.6 - 1.0) <= tol::ratio_rel;
    report(5, "radial amplitude ordering inner < middle < edge", ordered && ratios,
           fmt("%.1f : %.1f : %.1f nm, ratios %.3f / %.3f vs 0.3 / 0.6 (tol %.0f%%)", inner * 1e9, middle * 1e9,
               edge * 1e9, ri, rm, tol::ratio_rel * 100));
}

struct Driven {
    ModalBasis basis;
    DriveConfig drive;
    ModalTrajectory traj;
    double t_ref = 0.0;
};

Driven drive_harmonic(int n) {
    Driven d;
    const double f = calibrated().frequency_of(n);
    d.basis = with_damping(calibrated().retain_below(2 * f), damping_for_settling(tol::settling_target, f), n);
    d.drive.electrode_harmonic = n;
    d.drive.drive_frequency = f;
    d.drive = calibrate_force_per_volt(d.basis, d.drive, 15e-3, 0.0, 100e-9);
    d.traj = respond(d.basis, d.drive, 20e-3, 1.0 / (40.0 * f));
    d.t_ref = (std::floor(d.traj.end() * f) - 2.0) / f;
    return d;
}

void traveling_identity() {
    const Driven d = drive_harmonic(4);
    const auto q = steady_phasors(d.basis, d.drive);
    const auto grid = Grid::polar(3e-3, 15e-3, 10e-3, 15e-3, 6, 720);
    const auto amp = steady_amplitude_field(d.basis, q, grid);
    double worst = 1.0;
    for (int row = 0; row < grid->height; ++row) {
        double lo = INFINITY, hi = 0.0;
        for (int j = 0; j < grid->width; ++j) {
            lo = std::min(lo, amp.values[row * grid->width + j]);
            hi = std::max(hi, amp.values[row * grid->width + j]);
        }
        worst = std::max(worst, hi / lo);
    }
    const double f = d.drive.drive_frequency;
    const auto ring = Grid::polar(3e-3, 15e-3, 15e-3, 15e-3, 1, 720);
    double crest = 0.0;
    for (double frac : {0.05, 0.1, 0.2}) {
        const double dt = frac / f;
        const auto c0 = sample_circle(field_at(d.basis, d.traj, d.t_ref, ring), 15e-3);
        const auto c1 = sample_circle(field_at(d.basis, d.traj, d.t_ref + dt, ring), 15e-3);
        const double shift = crest_shift_deg(fit_eq1(c0, 4), fit_eq1(c1, 4));
        crest = std::max(crest, std::abs(shift - 360.0 * f * dt / 4.0));
    }
    report(6, "traveling-wave envelope and crest rotation", worst < tol::envelope_ratio && crest < tol::crest_deg,
           fmt("envelope max/min %.6f (tol %.2f), crest error %.2e deg (tol %.1f)", worst, tol::envelope_ratio, crest,
               tol::crest_deg));
}

void holography_roundtrip() {
    const auto dir = scratch("fit");
    const CliRun fit = cli({"fit", "--out", dir.string()});
    const CliRun resp = cli({"respond", "--out", dir.string()});
    double worst = INFINITY;
    if (fit.code == exit_ok && resp.code == exit_ok) {
        const double expected = std::stod(key_values(dir / "settling.txt").at("probe.edge.steady_amplitude_m"));
        std::istringstream in(read_file(dir / "fit.csv"));
        std::string line;
        std::getline(in, line);
        worst = 0.0;
        while (std::getline(in, line)) {
            std::vector<std::string> cells;
            std::istringstream ls(line);
            std::string c;
            while (std::getline(ls, c, ',')) cells.push_back(c);
            worst = std::max(worst, rel(std::stod(cells.at(2)), expected));
        }
    }

    // First minimum of the time-averaged intensity along an amplitude ramp.
    const OpticalConfig optics;
    const int count = 40001;
    const auto grid = Grid::polar(0.0, 1.0, 0.5, 0.5, 1, count);
    ScalarField ramp{grid, {}};
    for (int j = 0; j < count; ++j) ramp.values.push_back(j * 0.005e-9);
    const auto img = time_averaged(ramp, optics);
    int dark = 0;
    while (dark + 1 < count && img.intensity[dark + 1] <= img.intensity[dark]) ++dark;
    const double a_dark = ramp.values[dark];
    const bool pass = worst < tol::roundtrip_rel && std::abs(a_dark - tol::dark_fringe) < tol::dark_fringe_abs;
    report(7, "holography round trip and first dark fringe", pass,
           fmt("amplitude rel dev %.2e (tol %.0e), dark fringe %.2f nm (target %.1f +- %.1f nm)", worst,
               tol::roundtrip_rel, a_dark * 1e9, tol::dark_fringe * 1e9, tol::dark_fringe_abs * 1e9));
}

double strobe_shift(int n, double offset_deg) {
    const Driven d = drive_harmonic(n);
    const OpticalConfig optics;
    const auto grid = Grid::polar(3e-3, 15e-3, 15e-3, 15e-3, 1, 720);
    const ScalarField rest{grid, std::vector<double>(grid->size(), 0.0)};
    const auto circle = [&](double phase) {
        const auto snap = strobe_snapshot(d.basis, d.traj, d.t_ref, phase, grid, optics);
        const auto map = stroboscopic(rest, snap, optics, 0.0, phase, 0);
        return fit_eq1(sample_circle(unwrap_to_displacement(map, optics), 15e-3), n);
    };
    return crest_shift_deg(circle(0.0), circle(offset_deg));
}

void strobe_arithmetic() {
    const double s4 = strobe_shift(4, 60.0);
    const double s5 = strobe_shift(5, 15.0);
    const bool pass = std::abs(s4 - 15.0) < tol::strobe_deg && std::abs(s5 - 3.0) < tol::strobe_deg;
    report(8, "strobe offset to crest shift", pass,
           fmt("n=4 60 deg -> %.4f deg (15.0), n=5 15 deg -> %.4f deg (3.0), tol %.1f deg", s4, s5, tol::strobe_deg));
}

void fit_exactness() {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double roundtrip = 0.0, equivariance = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 1 + trial % 8;
        const double A = 1e-7 * (1.1 + u(rng)), phi = pi * u(rng), delta = 1e-8 * u(rng);
        const auto f = [&](double t) { return A * std::sin(n * t + phi) + delta; };
        const auto fit = fit_eq1(sample_circle(15e-3, 360, f), n);
        roundtrip = std::max({roundtrip, rel(fit.amplitude, A), std::abs(std::remainder(fit.phase - phi, 2 * pi)),
                              std::abs(fit.offset - delta) / A});

        const double dt = u(rng);
        const auto rot = fit_eq1(sample_circle(15e-3, 360, [&](double t) { return f(t + dt); }), n);
        const double c = 3.0 + u(rng);
        auto scaled = sample_circle(15e-3, 360, f);
        for (auto& v : scaled.values) v *= c;
        const auto sc = fit_eq1(scaled, n);
        equivariance = std::max({equivariance, std::abs(std::remainder(rot.phase - fit.phase - n * dt, 2 * pi)),
                                 rel(rot.amplitude, fit.amplitude), rel(sc.amplitude, c * fit.amplitude),
                                 std::abs(sc.phase - fit.phase), std::abs(sc.offset - c * fit.offset) / (c * A)});
    }
    report(9, "circle fit exactness and equivariance", roundtrip < tol::fit_rel && equivariance < tol::fit_rel,
           fmt("round-trip max rel err %.1e, equivariance max err %.1e (tol %.0e)", roundtrip, equivariance,
               tol::fit_rel));
}

void mixed_mode() {
    const RunConfig cfg = default_config();
    const auto& mx = cfg.mixed;
    const auto basis = with_damping(calibrated(), mx.damping_ratio, mx.n);
    const auto ext = ExternalMode::lateral_proxy(mx.n, mx.external_frequency, mx.damping_ratio,
                                                 cfg.geometry.fixture_radius, cfg.geometry.outer_radius);
    DriveConfig d = cfg.drive;
    d.electrode_harmonic = mx.n;
    d.drive_frequency = mx.drive_frequency;
    const auto grid = Grid::cartesian(cfg.geometry.inner_radius, cfg.geometry.outer_radius, 128,
                                      1.05 * cfg.geometry.outer_radius);
    const auto r = mixed_response(basis, {mx.n, Orientation::cosine, mx.mode_resonance, 1.0}, ext, d, grid);
    const double ratio = r.mode_weight / r.external_weight;
    const double cm = correlation(r.pattern, r.mode_pattern);
    const double ce = correlation(r.pattern, r.external_pattern);
    const bool pass = ratio < tol::weight_factor && ratio > 1.0 / tol::weight_factor
                      && std::abs(cm) < tol::mixed_correlation && std::abs(ce) < tol::mixed_correlation;
    report(10, "mixed-mode demonstration", pass,
           fmt("weight ratio %.3f (within x%.0f), correlation with mode %.3f / external %.3f (< %.2f)", ratio,
               tol::weight_factor, cm, ce, tol::mixed_correlation));
}

void determinism() {
    const std::vector<std::string> common{"--set", "seed=11", "--set", "optics.phase_noise_sigma=0.05",
                                          "--set", "analysis.displacement_noise=2e-9", "--set", "mixed.enabled=true"};
    int compared = 0;
    bool identical = true;
    for (const char* sub : {"modes", "respond", "fringes", "fit", "report"}) {
        const auto a = scratch(std::string("det_a_") + sub), b = scratch(std::string("det_b_") + sub);
        auto args = common;
        args.insert(args.begin(), sub);
        auto aa = args, bb = args;
        aa.insert(aa.end(), {"--out", a.string()});
        bb.insert(bb.end(), {"--out", b.string()});
        if (cli(aa).code != exit_ok || cli(bb).code != exit_ok) {
            identical = false;
            continue;
        }
        for (const auto& entry : fs::directory_iterator(a)) {
            const auto other = b / entry.path().filename();
            identical = identical && fs::exists(other) && read_file(entry.path()) == read_file(other);
            ++compared;
        }
    }
    report(11, "determinism with a fixed seed", identical && compared > 0,
           fmt("%d output files compared byte for byte across repeated runs", compared));
}

} // namespace

int main() {
    unsetenv(output_dir_env);
    const std::vector<std::function<void()>> criteria{eigen_oracle,        degeneracy,        calibration_anchor,
                                                      settling_and_ordering, traveling_identity, holography_roundtrip,
                                                      strobe_arithmetic,   fit_exactness,     mixed_mode,
                                                      determinism};
    for (const auto& c : criteria) {
        try {
            c();
        } catch (const std::exception& e) {
            std::printf("[FAIL] criterion aborted: %s\n", e.what());
            ++failures;
        }
    }
    std::printf("%d criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}

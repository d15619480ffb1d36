#include "stator/config.hpp"

#include "stator/error.hpp"

#include <json.hpp>

#include <set>
#include <sstream>

namespace stator {

using nlohmann::json;

namespace {

std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
}

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw ConfigError(path + ": " + what);
}

void check_keys(const json& obj, const std::string& path, const std::set<std::string>& allowed) {
    if (!obj.is_object()) fail(path, "expected an object");
    for (const auto& [key, value] : obj.items())
        if (!allowed.count(key)) fail(join(path, key), "unknown field");
}

template <class T>
void read(const json& obj, const std::string& path, const char* key, T& dst, bool required = false) {
    const std::string where = join(path, key);
    const auto it = obj.find(key);
    if (it == obj.end()) {
        if (required) fail(where, "missing required field");
        return;
    }
    if constexpr (std::is_same_v<T, bool>) {
        if (!it->is_boolean()) fail(where, "expected a boolean");
    } else if constexpr (std::is_integral_v<T>) {
        if (!it->is_number_integer()) fail(where, "expected an integer");
    } else if constexpr (std::is_floating_point_v<T>) {
        if (!it->is_number()) fail(where, "expected a number");
    } else if constexpr (std::is_same_v<T, std::string>) {
        if (!it->is_string()) fail(where, "expected a string");
    }
    try {
        dst = it->get<T>();
    } catch (const json::exception& e) {
        fail(where, e.what());
    }
}

const json& section(const json& root, const char* name, bool required) {
    static const json empty = json::object();
    const auto it = root.find(name);
    if (it == root.end()) {
        if (required) fail(name, "missing required section");
        return empty;
    }
    if (!it->is_object()) fail(name, "expected an object");
    return *it;
}

template <class F>
void validated(const std::string& path, F&& check) {
    try {
        check();
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        fail(path, e.what());
    }
}

void apply_override(json& root, const std::string& item) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("override '" + item + "': expected key=value");
    const std::string key = item.substr(0, eq);
    const std::string raw = item.substr(eq + 1);
    json value;
    try {
        value = json::parse(raw);
    } catch (const json::exception&) {
        value = raw;
    }
    json* node = &root;
    std::istringstream parts(key);
    std::string part;
    std::vector<std::string> names;
    while (std::getline(parts, part, '.')) names.push_back(part);
    for (std::size_t i = 0; i + 1 < names.size(); ++i) {
        json& next = (*node)[names[i]];
        if (next.is_null()) next = json::object();
        if (!next.is_object()) throw ConfigError("override '" + item + "': " + names[i] + " is not a section");
        node = &next;
    }
    (*node)[names.back()] = value;
}

RunConfig from_json(const json& root, bool require_geometry) {
    check_keys(root, "", {"geometry", "material", "solver", "calibration", "drive", "dynamics", "optics",
                          "holography", "analysis", "mixed", "output_dir", "seed"});
    RunConfig c;

    {
        const json& s = section(root, "geometry", require_geometry);
        const std::string p = "geometry";
        check_keys(s, p, {"inner_radius", "outer_radius", "base_thickness", "total_height", "notch_count",
                          "notch_width", "notch_depth", "tooth_band_inner_radius", "fixture_radius"});
        auto& g = c.geometry;
        read(s, p, "inner_radius", g.inner_radius, require_geometry);
        read(s, p, "outer_radius", g.outer_radius, require_geometry);
        read(s, p, "fixture_radius", g.fixture_radius, require_geometry);
        read(s, p, "tooth_band_inner_radius", g.tooth_band_inner_radius, require_geometry);
        read(s, p, "base_thickness", g.base_thickness, require_geometry);
        read(s, p, "total_height", g.total_height);
        read(s, p, "notch_count", g.notch_count);
        read(s, p, "notch_width", g.notch_width);
        read(s, p, "notch_depth", g.notch_depth);
        validated(p, [&] { g.validate(); });
    }
    {
        const json& s = section(root, "material", false);
        const std::string p = "material";
        check_keys(s, p, {"youngs_modulus", "poisson_ratio", "density", "modal_damping_ratio"});
        auto& m = c.material;
        read(s, p, "youngs_modulus", m.youngs_modulus);
        read(s, p, "poisson_ratio", m.poisson_ratio);
        read(s, p, "density", m.density);
        read(s, p, "modal_damping_ratio", m.modal_damping_ratio);
        validated(p, [&] { m.validate(); });
    }
    {
        const json& s = section(root, "solver", false);
        const std::string p = "solver";
        check_keys(s, p, {"radial_nodes", "quadrature_order", "n_min", "n_max", "modes_per_n"});
        auto& v = c.solver;
        read(s, p, "radial_nodes", v.discretization.radial_nodes);
        read(s, p, "quadrature_order", v.discretization.quadrature_order);
        read(s, p, "n_min", v.n_min);
        read(s, p, "n_max", v.n_max);
        read(s, p, "modes_per_n", v.modes_per_n);
        if (v.discretization.radial_nodes < 8) fail("solver.radial_nodes", "must be >= 8");
        if (v.discretization.quadrature_order < 3 || v.discretization.quadrature_order > 16)
            fail("solver.quadrature_order", "must lie in [3, 16]");
        if (v.n_min < 0) fail("solver.n_min", "must be >= 0");
        if (v.n_max < v.n_min) fail("solver.n_max", "must be >= n_min");
        if (v.modes_per_n < 1) fail("solver.modes_per_n", "must be >= 1");
    }
    {
        const json& s = section(root, "calibration", false);
        const std::string p = "calibration";
        check_keys(s, p, {"enabled", "n", "frequency"});
        read(s, p, "enabled", c.calibration.enabled);
        read(s, p, "n", c.calibration.target.n);
        read(s, p, "frequency", c.calibration.target.frequency);
        if (!(c.calibration.target.frequency > 0.0)) fail("calibration.frequency", "must be > 0");
        if (c.calibration.target.n < c.solver.n_min || c.calibration.target.n > c.solver.n_max)
            fail("calibration.n", "must lie within solver.n_min..n_max");
    }
    {
        const json& s = section(root, "drive", false);
        const std::string p = "drive";
        check_keys(s, p, {"frequency", "peak_to_peak_voltage", "force_per_volt", "electrode_harmonic",
                          "phase_layout", "electrode_inner_radius", "electrode_outer_radius"});
        auto& d = c.drive;
        read(s, p, "frequency", d.drive_frequency);
        read(s, p, "peak_to_peak_voltage", d.peak_to_peak_voltage);
        read(s, p, "force_per_volt", d.force_per_volt);
        read(s, p, "electrode_harmonic", d.electrode_harmonic);
        read(s, p, "electrode_inner_radius", d.electrode_inner_radius);
        read(s, p, "electrode_outer_radius", d.electrode_outer_radius);
        std::string layout = "two_phase_quadrature";
        read(s, p, "phase_layout", layout);
        if (layout == "two_phase_quadrature") d.phase_layout = PhaseLayout::two_phase_quadrature;
        else if (layout == "single_phase") d.phase_layout = PhaseLayout::single_phase;
        else fail("drive.phase_layout", "expected two_phase_quadrature or single_phase");
        if (d.drive_frequency < 0.0) fail("drive.frequency", "must be >= 0 (0 selects the resonance)");
        if (d.electrode_harmonic > c.solver.n_max || d.electrode_harmonic < c.solver.n_min)
            fail("drive.electrode_harmonic", "must lie within solver.n_min..n_max");
        validated(p, [&] {
            DriveConfig probe = d;
            if (probe.drive_frequency == 0.0) probe.drive_frequency = 1.0;
            probe.validate();
        });
    }
    {
        const json& s = section(root, "dynamics", false);
        const std::string p = "dynamics";
        check_keys(s, p, {"duration", "dt", "settling_time", "retain_factor", "edge_amplitude", "probes"});
        auto& d = c.dynamics;
        read(s, p, "duration", d.duration);
        read(s, p, "dt", d.dt);
        read(s, p, "settling_time", d.settling_time);
        read(s, p, "retain_factor", d.retain_factor);
        read(s, p, "edge_amplitude", d.edge_amplitude);
        if (d.duration < 0.0) fail("dynamics.duration", "must be >= 0");
        if (d.dt < 0.0) fail("dynamics.dt", "must be >= 0");
        if (d.settling_time < 0.0) fail("dynamics.settling_time", "must be >= 0");
        if (!(d.retain_factor >= 1.0)) fail("dynamics.retain_factor", "must be >= 1");
        if (d.edge_amplitude < 0.0) fail("dynamics.edge_amplitude", "must be >= 0");
        if (const auto it = s.find("probes"); it != s.end()) {
            if (!it->is_array()) fail("dynamics.probes", "expected an array");
            for (std::size_t i = 0; i < it->size(); ++i) {
                const std::string pp = "dynamics.probes[" + std::to_string(i) + "]";
                const json& e = (*it)[i];
                check_keys(e, pp, {"id", "r", "theta"});
                ProbePoint pt;
                read(e, pp, "id", pt.id, true);
                read(e, pp, "r", pt.r, true);
                read(e, pp, "theta", pt.theta);
                if (!(pt.r >= c.geometry.inner_radius && pt.r <= c.geometry.outer_radius))
                    fail(pp + ".r", "outside the annulus");
                d.probes.push_back(pt);
            }
        }
    }
    {
        const json& s = section(root, "optics", false);
        const std::string p = "optics";
        check_keys(s, p, {"wavelength", "sensitivity_factor", "strobe_duty", "finite_duty_blur", "max_amplitude",
                          "phase_noise_sigma"});
        auto& o = c.optics;
        read(s, p, "wavelength", o.wavelength);
        read(s, p, "sensitivity_factor", o.sensitivity_factor);
        read(s, p, "strobe_duty", o.strobe_duty);
        read(s, p, "finite_duty_blur", o.finite_duty_blur);
        read(s, p, "max_amplitude", o.max_amplitude);
        read(s, p, "phase_noise_sigma", o.phase_noise_sigma);
        validated(p, [&] { o.validate(); });
    }
    {
        const json& s = section(root, "holography", false);
        const std::string p = "holography";
        check_keys(s, p, {"image_pixels", "mode_images", "render_amplitude", "strobe_pairs"});
        auto& h = c.holography;
        read(s, p, "image_pixels", h.image_pixels);
        read(s, p, "mode_images", h.mode_images);
        read(s, p, "render_amplitude", h.render_amplitude);
        if (const auto it = s.find("strobe_pairs"); it != s.end()) {
            h.strobe_pairs.clear();
            if (!it->is_array()) fail("holography.strobe_pairs", "expected an array of [a, b] pairs");
            for (const auto& e : *it) {
                if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
                    fail("holography.strobe_pairs", "expected an array of [a, b] pairs");
                h.strobe_pairs.emplace_back(e[0].get<double>(), e[1].get<double>());
            }
        }
        if (h.image_pixels < 16 || h.image_pixels > 4096) fail("holography.image_pixels", "must lie in [16, 4096]");
        for (int n : h.mode_images)
            if (n < c.solver.n_min || n > c.solver.n_max) fail("holography.mode_images", "mode outside solver range");
        if (!(h.render_amplitude > 0.0)) fail("holography.render_amplitude", "must be > 0");
    }
    {
        const json& s = section(root, "analysis", false);
        const std::string p = "analysis";
        check_keys(s, p, {"circle_radius", "samples", "strobe_phases", "displacement_noise"});
        auto& a = c.analysis;
        read(s, p, "circle_radius", a.circle_radius);
        read(s, p, "samples", a.samples);
        read(s, p, "strobe_phases", a.strobe_phases);
        read(s, p, "displacement_noise", a.displacement_noise);
        if (a.circle_radius != 0.0
            && !(a.circle_radius >= c.geometry.fixture_radius && a.circle_radius <= c.geometry.outer_radius))
            fail("analysis.circle_radius", "must lie in [fixture_radius, outer_radius]");
        if (a.samples < 16) fail("analysis.samples", "must be >= 16");
        if (a.strobe_phases.size() < 3) fail("analysis.strobe_phases", "need at least 3 strobe phases");
        if (a.displacement_noise < 0.0) fail("analysis.displacement_noise", "must be >= 0");
    }
    {
        const json& s = section(root, "mixed", false);
        const std::string p = "mixed";
        check_keys(s, p, {"enabled", "n", "mode_resonance", "external_frequency", "drive_frequency", "damping_ratio"});
        auto& m = c.mixed;
        read(s, p, "enabled", m.enabled);
        read(s, p, "n", m.n);
        read(s, p, "mode_resonance", m.mode_resonance);
        read(s, p, "external_frequency", m.external_frequency);
        read(s, p, "drive_frequency", m.drive_frequency);
        read(s, p, "damping_ratio", m.damping_ratio);
        if (m.n < std::max(1, c.solver.n_min) || m.n > c.solver.n_max) fail("mixed.n", "must lie within the solver range");
        if (!(m.mode_resonance >= 0.0)) fail("mixed.mode_resonance", "must be >= 0");
        if (!(m.external_frequency > 0.0)) fail("mixed.external_frequency", "must be > 0");
        if (!(m.drive_frequency > 0.0)) fail("mixed.drive_frequency", "must be > 0");
        if (!(m.damping_ratio > 0.0 && m.damping_ratio < 1.0)) fail("mixed.damping_ratio", "must lie in (0, 1)");
    }
    read(root, "", "output_dir", c.output_dir);
    read(root, "", "seed", c.seed);
    return c;
}

json to_json(const RunConfig& c) {
    json j;
    const auto& g = c.geometry;
    j["geometry"] = {{"inner_radius", g.inner_radius},
                     {"outer_radius", g.outer_radius},
                     {"fixture_radius", g.fixture_radius},
                     {"tooth_band_inner_radius", g.tooth_band_inner_radius},
                     {"base_thickness", g.base_thickness},
                     {"total_height", g.total_height},
                     {"notch_count", g.notch_count},
                     {"notch_width", g.notch_width},
                     {"notch_depth", g.notch_depth}};
    const auto& m = c.material;
    j["material"] = {{"youngs_modulus", m.youngs_modulus},
                     {"poisson_ratio", m.poisson_ratio},
                     {"density", m.density},
                     {"modal_damping_ratio", m.modal_damping_ratio}};
    j["solver"] = {{"radial_nodes", c.solver.discretization.radial_nodes},
                   {"quadrature_order", c.solver.discretization.quadrature_order},
                   {"n_min", c.solver.n_min},
                   {"n_max", c.solver.n_max},
                   {"modes_per_n", c.solver.modes_per_n}};
    j["calibration"] = {{"enabled", c.calibration.enabled},
                        {"n", c.calibration.target.n},
                        {"frequency", c.calibration.target.frequency}};
    const auto& d = c.drive;
    j["drive"] = {{"frequency", d.drive_frequency},
                  {"peak_to_peak_voltage", d.peak_to_peak_voltage},
                  {"force_per_volt", d.force_per_volt},
                  {"electrode_harmonic", d.electrode_harmonic},
                  {"phase_layout", d.phase_layout == PhaseLayout::single_phase ? "single_phase" : "two_phase_quadrature"},
                  {"electrode_inner_radius", d.electrode_inner_radius},
                  {"electrode_outer_radius", d.electrode_outer_radius}};
    json probes = json::array();
    for (const auto& p : c.dynamics.probes) probes.push_back({{"id", p.id}, {"r", p.r}, {"theta", p.theta}});
    j["dynamics"] = {{"duration", c.dynamics.duration},
                     {"dt", c.dynamics.dt},
                     {"settling_time", c.dynamics.settling_time},
                     {"retain_factor", c.dynamics.retain_factor},
                     {"edge_amplitude", c.dynamics.edge_amplitude},
                     {"probes", probes}};
    const auto& o = c.optics;
    j["optics"] = {{"wavelength", o.wavelength},
                   {"sensitivity_factor", o.sensitivity_factor},
                   {"strobe_duty", o.strobe_duty},
                   {"finite_duty_blur", o.finite_duty_blur},
                   {"max_amplitude", o.max_amplitude},
                   {"phase_noise_sigma", o.phase_noise_sigma}};
    json pairs = json::array();
    for (const auto& [a, b] : c.holography.strobe_pairs) pairs.push_back({a, b});
    j["holography"] = {{"image_pixels", c.holography.image_pixels},
                       {"mode_images", c.holography.mode_images},
                       {"render_amplitude", c.holography.render_amplitude},
                       {"strobe_pairs", pairs}};
    j["analysis"] = {{"circle_radius", c.analysis.circle_radius},
                     {"samples", c.analysis.samples},
                     {"strobe_phases", c.analysis.strobe_phases},
                     {"displacement_noise", c.analysis.displacement_noise}};
    j["mixed"] = {{"enabled", c.mixed.enabled},
                  {"n", c.mixed.n},
                  {"mode_resonance", c.mixed.mode_resonance},
                  {"external_frequency", c.mixed.external_frequency},
                  {"drive_frequency", c.mixed.drive_frequency},
                  {"damping_ratio", c.mixed.damping_ratio}};
    j["output_dir"] = c.output_dir;
    j["seed"] = c.seed;
    return j;
}

} // namespace

RunConfig parse_config(const std::string& text, const std::vector<std::string>& overrides,
                       bool require_geometry) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    for (const auto& o : overrides) apply_override(root, o);
    return from_json(root, require_geometry);
}

RunConfig default_config(const std::vector<std::string>& overrides) {
    return parse_config("{}", overrides, false);
}

std::string default_config_text() { return to_json(RunConfig{}).dump(2) + "\n"; }

} // namespace stator

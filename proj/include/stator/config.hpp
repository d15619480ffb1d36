#pragma once

#include "stator/dynamics.hpp"
#include "stator/geometry.hpp"
#include "stator/holography.hpp"
#include "stator/modal.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace stator {

struct SolverConfig {
    Discretization discretization;
    int n_min = 0;
    int n_max = 8;
    int modes_per_n = 2;
};

struct CalibrationConfig {
    bool enabled = true;
    CalibrationTarget target;
};

struct DynamicsConfig {
    double duration = 0.0;        // s; 0 selects 6 * settling_time (or 20 ms)
    double dt = 0.0;              // s; 0 selects 1 / (40 * drive frequency)
    double settling_time = 3.4e-3; // s; > 0 sets the driven harmonic's damping from it
    double retain_factor = 2.0;   // keep modes up to retain_factor * drive frequency
    double edge_amplitude = 100e-9; // m at 100 Vpp; > 0 calibrates force_per_volt at the outer edge
    std::vector<ProbePoint> probes; // empty selects inner/middle/edge of the tooth band
};

struct HolographyConfig {
    int image_pixels = 256;
    std::vector<int> mode_images{1, 2, 3, 4, 5, 6};
    double render_amplitude = 250e-9; // peak amplitude of the per-mode images
    std::vector<std::pair<double, double>> strobe_pairs{{0.0, 60.0}};
};

struct AnalysisConfig {
    double circle_radius = 0.0; // 0 selects the outer (tooth edge) radius
    int samples = 360;
    std::vector<double> strobe_phases{0.0, 60.0, 120.0, 180.0, 240.0, 300.0};
    double displacement_noise = 0.0; // m, Gaussian, added to circle samples
};

struct MixedConfig {
    bool enabled = false;
    int n = 6;
    double mode_resonance = 41154.0;
    double external_frequency = 42757.0;
    double drive_frequency = 42124.0;
    double damping_ratio = 0.02;
};

struct RunConfig {
    StatorGeometry geometry;
    Material material;
    SolverConfig solver;
    CalibrationConfig calibration;
    DriveConfig drive; // drive_frequency 0 selects the electrode harmonic's resonance
    DynamicsConfig dynamics;
    OpticalConfig optics;
    HolographyConfig holography;
    AnalysisConfig analysis;
    MixedConfig mixed;
    std::string output_dir = "out";
    std::uint64_t seed = 0;
};

/// Parses and fully validates a JSON config. Keys not in the schema and
/// invalid values raise ConfigError naming the dotted field path. `overrides`
/// are "dotted.path=value" strings applied before validation; values parse as
/// JSON when possible, otherwise as strings.
RunConfig parse_config(const std::string& text, const std::vector<std::string>& overrides = {},
                       bool require_geometry = true);

/// Built-in defaults (no file): every field takes its documented default.
RunConfig default_config(const std::vector<std::string>& overrides = {});

/// Defaults rendered as a complete JSON document.
std::string default_config_text();

} // namespace stator

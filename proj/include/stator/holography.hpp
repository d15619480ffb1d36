#pragma once

#include "stator/dynamics.hpp"
#include "stator/grid.hpp"

#include <cstdint>
#include <memory>
#include <vector>

namespace stator {

struct OpticalConfig {
    double wavelength = 532e-9;      // m
    double sensitivity_factor = 0.0; // rad/m; 0 selects 4*pi/wavelength (normal incidence)
    double strobe_duty = 0.05;       // fraction of a drive period
    bool finite_duty_blur = false;   // average strobe snapshots over the duty window
    double max_amplitude = 5.0e-6;   // m; larger vibration amplitudes are clipped
    double phase_noise_sigma = 0.0;  // rad; additive Gaussian noise on phase maps

    double sensitivity() const;
    void validate() const;
};

/// Normalized intensity in [0, 1] per grid point; invalid points hold NaN.
struct FringeImage {
    std::shared_ptr<const Grid> grid;
    std::vector<double> intensity;
    std::size_t clipped_pixels = 0;
};

/// Wrapped phase in (-pi, pi] per grid point; invalid points hold NaN.
struct PhaseMap {
    std::shared_ptr<const Grid> grid;
    std::vector<double> phase;
    double strobe_phase_a = 0.0; // degrees of the drive cycle
    double strobe_phase_b = 0.0;
};

/// Wraps into (-pi, pi].
double wrap_phase(double phase);

/// Time-averaged fringes: I = J0(K |a|)^2, with K the sensitivity factor.
FringeImage time_averaged(const ScalarField& amplitude, const OpticalConfig& optics);

/// Double-exposure phase map: wrap(K * (field_b - field_a)).
PhaseMap stroboscopic(const ScalarField& field_a, const ScalarField& field_b,
                      const OpticalConfig& optics, double strobe_phase_a = 0.0,
                      double strobe_phase_b = 0.0, std::uint64_t seed = 0);

/// Unwraps each closed circle of the grid (polar rows, or one-pixel rings on
/// cartesian grids) and converts to displacement difference in meters. Each
/// circle is anchored at its first sample. Throws UnwrapError when a circle
/// winds by a nonzero multiple of 2*pi.
ScalarField unwrap_to_displacement(const PhaseMap& map, const OpticalConfig& optics);

/// Displacement at drive-cycle phase `strobe_phase_deg` after `reference_time`
/// (which should be a whole number of drive periods). With finite_duty_blur the
/// snapshot is averaged over the strobe duty window.
ScalarField strobe_snapshot(const ModalBasis& basis, const ModalTrajectory& traj,
                            double reference_time, double strobe_phase_deg,
                            const std::shared_ptr<const Grid>& grid, const OpticalConfig& optics,
                            const std::vector<ExternalMode>& externals = {});

} // namespace stator

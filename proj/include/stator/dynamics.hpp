#pragma once

#include "stator/grid.hpp"
#include "stator/modal.hpp"

#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace stator {

enum class PhaseLayout { two_phase_quadrature, single_phase };

/// Electrode drive. Phase A forces cos(n_d theta) with cos(wt), phase B forces
/// sin(n_d theta) with sin(wt); single-phase drives only phase A.
struct DriveConfig {
    double drive_frequency = 0.0;       // Hz
    double peak_to_peak_voltage = 100.0; // V
    double force_per_volt = 1.0e-3;     // N/V, modal forcing gain
    int electrode_harmonic = 4;
    PhaseLayout phase_layout = PhaseLayout::two_phase_quadrature;
    // Radial extent of the electrode pressure; 0 selects fixture/outer radius.
    double electrode_inner_radius = 0.0;
    double electrode_outer_radius = 0.0;

    void validate() const;
};

/// q'' + 2 zeta w q' + w^2 q = Re(force * exp(i W t)) for one mass-normalized
/// mode, advanced with its exact discrete solution.
struct DampedOscillator {
    double omega = 0.0;
    double zeta = 0.0;
    double drive_omega = 0.0;
    std::complex<double> force{0.0, 0.0};

    struct State {
        double q = 0.0;
        double v = 0.0;
    };

    /// Steady-state complex amplitude Q, q_ss(t) = Re(Q exp(i W t)).
    std::complex<double> steady() const;
    State steady_state_at(double t) const;
    /// Exact state at t + dt given the state at t.
    State advance(State s, double t, double dt) const;
};

struct ModalTrajectory {
    std::vector<double> times;
    double dt = 0.0;
    double drive_frequency = 0.0;
    std::uint64_t basis_provenance = 0;
    std::vector<DampedOscillator> oscillators;  // one per basis mode
    std::vector<std::vector<double>> q;         // [mode][sample], meters
    std::vector<std::vector<double>> v;         // [mode][sample]
    std::vector<std::complex<double>> steady_phasor;
    std::vector<double> steady_state_amplitude; // |steady_phasor|

    double start() const { return times.front(); }
    double end() const { return times.back(); }
    /// Modal displacement of mode k at any t in the span, exact.
    double q_at(std::size_t k, double t) const;
};

/// Out-of-plane mode not produced by the plate solver (e.g. the in-plane
/// partner near the sixth harmonic), described by a prescribed shape.
struct ExternalMode {
    std::string label;
    double frequency = 0.0;      // Hz
    double damping_ratio = 0.02;
    double static_gain = 0.0;    // m at zero frequency under the configured drive
    std::function<double(double r, double theta)> shape;

    void validate() const;
    std::complex<double> steady(double drive_frequency) const;

    /// Non-physical stand-in for a lateral mode with `lobes` lobes: a radial
    /// ramp times sin(lobes * theta), i.e. rotated half a lobe against the
    /// cosine flexural mode. For pattern comparison only.
    static ExternalMode lateral_proxy(int lobes, double frequency, double damping_ratio,
                                      double fixture_radius, double outer_radius,
                                      double static_gain = 1.0);
};

/// Modal force phasors from the electrode pattern, one per basis mode.
std::vector<std::complex<double>> modal_forces(const ModalBasis& basis, const DriveConfig& drive);

/// Steady-state phasors Q_k for every basis mode.
std::vector<std::complex<double>> steady_phasors(const ModalBasis& basis, const DriveConfig& drive);

/// Integrates every mode from rest over [0, duration] with step dt.
/// Requires dt <= 1 / (20 * max basis frequency) and duration >= 5 dt.
ModalTrajectory respond(const ModalBasis& basis, const DriveConfig& drive, double duration,
                        double dt);

/// Instantaneous out-of-plane displacement, with external modes at steady state.
ScalarField field_at(const ModalBasis& basis, const ModalTrajectory& traj, double t,
                     const std::shared_ptr<const Grid>& grid,
                     const std::vector<ExternalMode>& externals = {});

/// Steady-state vibration amplitude |sum_k Q_k Phi_k| per point.
ScalarField steady_amplitude_field(const ModalBasis& basis,
                                   const std::vector<std::complex<double>>& phasors,
                                   const std::shared_ptr<const Grid>& grid,
                                   const std::vector<ExternalMode>& externals = {},
                                   double drive_frequency = 0.0);

/// Steady amplitude at one point.
double steady_amplitude_at(const ModalBasis& basis,
                           const std::vector<std::complex<double>>& phasors, double r,
                           double theta);

struct ProbePoint {
    std::string id;
    double r = 0.0;
    double theta = 0.0;
};

struct ProbeSeries {
    ProbePoint point;
    std::vector<double> displacement; // aligned with trajectory times
    double steady_amplitude = 0.0;
    std::optional<double> settling_time;
};

/// Band for settling detection: the envelope must stay within this fraction
/// of the steady amplitude.
inline constexpr double settling_band = 0.05;

std::vector<ProbeSeries> probe(const ModalBasis& basis, const ModalTrajectory& traj,
                               const std::vector<ProbePoint>& points);

/// First time after which the trailing one-period envelope of `series` stays
/// within `band` of `steady_amplitude`.
std::optional<double> settling_time(const std::vector<double>& series,
                                    const std::vector<double>& times, double steady_amplitude,
                                    double period, double band = settling_band);

/// Damping ratio whose transient exp(-zeta w t) falls to `band` at t_settle:
/// zeta = ln(1/band) / (2 pi f t_settle).
double damping_for_settling(double settling_time, double frequency, double band = settling_band);

/// Copy of `drive` with force_per_volt scaled so the steady amplitude at
/// (r, theta) equals target_amplitude.
DriveConfig calibrate_force_per_volt(const ModalBasis& basis, const DriveConfig& drive, double r,
                                     double theta, double target_amplitude);

/// |H| = w0^2 / sqrt((w0^2 - w^2)^2 + (2 zeta w0 w)^2).
double dynamic_amplification(double natural_frequency, double damping_ratio,
                             double drive_frequency);

struct MixedModeRequest {
    int n = 6;
    Orientation orientation = Orientation::cosine;
    double resonance = 0.0; // Hz; 0 keeps the basis frequency
    double static_gain = 1.0;
};

struct MixedResponse {
    ScalarField pattern;          // weighted superposition
    ScalarField mode_pattern;     // RMS-normalized flexural mode shape
    ScalarField external_pattern; // RMS-normalized external shape
    double mode_weight = 0.0;
    double external_weight = 0.0;
};

/// Superposes a basis mode and an external mode, each weighted by
/// static_gain * dynamic_amplification at the drive frequency.
MixedResponse mixed_response(const ModalBasis& basis, const MixedModeRequest& request,
                             const ExternalMode& external, const DriveConfig& drive,
                             const std::shared_ptr<const Grid>& grid);

} // namespace stator

#pragma once

#include "stator/grid.hpp"

#include <array>
#include <functional>
#include <string>
#include <vector>

namespace stator {

enum class SampleSource { simulation, hologram };

std::string to_string(SampleSource s);

/// Values along one circle; theta strictly increasing in [0, 2*pi).
struct CircleSample {
    double radius = 0.0;
    std::vector<double> theta;
    std::vector<double> values;
    SampleSource source = SampleSource::simulation;

    void validate() const;
};

/// `count` uniform samples of f(theta) at the given radius.
CircleSample sample_circle(double radius, int count, const std::function<double(double)>& f,
                           SampleSource source = SampleSource::simulation);

/// Extracts the circle of a field closest to `radius`: the matching row of a
/// polar grid, or the one-pixel ring of a cartesian grid. Throws DomainError
/// when no circle lies within half a row (pixel) of the radius.
CircleSample sample_circle(const ScalarField& field, double radius,
                           SampleSource source = SampleSource::simulation);

/// Harmonic with the largest circular Fourier magnitude after removing the
/// mean, over 1..n_max (0 selects samples/8). Ties go to the lower harmonic.
int detect_mode_number(const CircleSample& sample, int n_max = 0);

/// f(theta) = A sin(n theta + phi) + delta.
struct FitResult {
    double amplitude = 0.0; // A >= 0
    int n = 0;
    double phase = 0.0;     // phi in (-pi, pi]
    double offset = 0.0;    // delta
    double rms_residual = 0.0;
    std::array<double, 4> covariance_diag{}; // variances of (A, n, phi, delta); n is fixed
};

/// Closed-form least squares on {sin n theta, cos n theta, 1}.
FitResult fit_eq1(const CircleSample& sample, int n);

enum class WaveKind { traveling, standing, mixed };

std::string to_string(WaveKind k);

struct StrobeFit {
    double strobe_phase_deg = 0.0;
    FitResult fit;
};

struct WaveClassification {
    WaveKind kind = WaveKind::mixed;
    double rotation_rate = 0.0;       // spatial deg of crest travel per strobe deg
    double amplitude_cv = 0.0;        // std/mean of A over strobe phases
    double standing_wave_ratio = 1.0; // max A / min A
    double max_phase_deviation_deg = 0.0; // spread of phi modulo 180 deg
};

/// Thresholds separating traveling from standing patterns.
struct ClassificationThresholds {
    double amplitude_cv = 0.05;
    double slope_tolerance = 0.10;   // relative to 1/n
    double phase_tolerance_deg = 5.0;
};

/// Crest rotation between two fits of the same n, in spatial degrees, wrapped
/// to (-180/n, 180/n]. Positive when the pattern advances toward +theta.
double crest_shift_deg(const FitResult& from, const FitResult& to);

WaveClassification track_strobe_phase(const std::vector<StrobeFit>& fits,
                                      const ClassificationThresholds& thresholds = {});

/// max over strobe phases of rms_residual / A.
double asymmetry_index(const std::vector<StrobeFit>& fits);

} // namespace stator

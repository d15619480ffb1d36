#pragma once

#include <vector>

namespace stator {

/// Annular stator plate with a notched tooth band on its outer rim.
/// All lengths in meters.
struct StatorGeometry {
    double inner_radius = 3.0e-3;
    double outer_radius = 15.0e-3;
    double base_thickness = 4.02e-3;   // web thickness inside the tooth band
    double total_height = 5.02e-3;
    int notch_count = 22;              // 0 describes the flat (un-notched) stator
    double notch_width = 1.59e-3;
    double notch_depth = 1.0e-3;
    double tooth_band_inner_radius = 10.0e-3;
    double fixture_radius = 5.0e-3;    // plate is clamped for r <= fixture_radius

    /// Mid-line radius of the tooth band; notch fill is evaluated here.
    double tooth_band_centroid_radius() const {
        return 0.5 * (tooth_band_inner_radius + outer_radius);
    }

    /// Throws GeometryError naming the violated invariant.
    void validate() const;
};

/// Isotropic linear-elastic material with a default modal damping ratio.
/// Defaults are vendor-typical Ultem 1000 values.
struct Material {
    double youngs_modulus = 3.2e9;
    double poisson_ratio = 0.36;
    double density = 1270.0;
    double modal_damping_ratio = 0.02;

    void validate() const;
};

struct PlateSegment {
    double r_begin = 0.0;
    double r_end = 0.0;
    double bending_stiffness = 0.0; // N*m
    double areal_mass = 0.0;        // kg/m^2
};

/// Radially piecewise-constant Kirchhoff plate equivalent of the stator.
struct EffectivePlate {
    double inner_radius = 0.0;
    double fixture_radius = 0.0;
    double outer_radius = 0.0;
    double poisson_ratio = 0.0;
    double fill_factor = 1.0;
    double modal_damping_ratio = 0.02;
    std::vector<PlateSegment> segments; // contiguous, ascending, covering [inner, outer]

    double bending_stiffness(double r) const;
    double areal_mass(double r) const;

    /// Segment boundaries strictly inside (fixture_radius, outer_radius).
    std::vector<double> interior_breakpoints() const;

    /// Copy with D multiplied by `factor` everywhere.
    EffectivePlate with_scaled_stiffness(double factor) const;

    void validate() const;

    static EffectivePlate uniform(double inner_radius, double fixture_radius, double outer_radius,
                                  double bending_stiffness, double areal_mass,
                                  double poisson_ratio, double damping_ratio = 0.02);

private:
    const PlateSegment& segment_at(double r) const;
};

/// Bending stiffness E h^3 / (12 (1 - nu^2)) of a solid plate.
double plate_bending_stiffness(double youngs_modulus, double poisson_ratio, double thickness);

/// Fraction of the tooth-band circumference left standing after notching.
double notch_fill_factor(const StatorGeometry& geom);

/// Smears the notched tooth layer into an equivalent plate. In the tooth band
/// the cross-section is a solid layer of (total_height - notch_depth) under a
/// tooth layer of notch_depth whose modulus and density are scaled by the
/// fill factor; D is taken about the composite neutral axis.
EffectivePlate homogenize(const StatorGeometry& geom, const Material& mat);

} // namespace stator

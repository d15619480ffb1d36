#include "stator/geometry.hpp"

#include "stator/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace stator {

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw GeometryError("invalid geometry: " + what);
}

} // namespace

void StatorGeometry::validate() const {
    require(inner_radius > 0.0, "inner_radius must be > 0");
    require(inner_radius < fixture_radius, "inner_radius must be < fixture_radius");
    require(fixture_radius < tooth_band_inner_radius,
            "fixture_radius must be < tooth_band_inner_radius");
    require(tooth_band_inner_radius < outer_radius,
            "tooth_band_inner_radius must be < outer_radius");
    require(total_height > 0.0, "total_height must be > 0");
    require(base_thickness > 0.0 && base_thickness <= total_height,
            "base_thickness must lie in (0, total_height]");
    require(notch_count >= 0, "notch_count must be >= 0");
    if (notch_count > 0) {
        require(notch_depth > 0.0 && notch_depth < total_height,
                "notch_depth must lie in (0, total_height)");
        require(notch_width > 0.0, "notch_width must be > 0");
        require(notch_count * notch_width
                    < 2.0 * std::numbers::pi * tooth_band_inner_radius,
                "notches do not fit on the tooth band circumference");
    }
}

void Material::validate() const {
    if (!(youngs_modulus > 0.0)) throw DomainError("youngs_modulus must be > 0");
    if (!(density > 0.0)) throw DomainError("density must be > 0");
    if (!(poisson_ratio >= 0.0 && poisson_ratio < 0.5))
        throw DomainError("poisson_ratio must lie in [0, 0.5)");
    if (!(modal_damping_ratio > 0.0 && modal_damping_ratio < 1.0))
        throw DomainError("modal_damping_ratio must lie in (0, 1)");
}

const PlateSegment& EffectivePlate::segment_at(double r) const {
    for (const auto& s : segments)
        if (r < s.r_end) return s;
    return segments.back();
}

double EffectivePlate::bending_stiffness(double r) const {
    return segment_at(r).bending_stiffness;
}

double EffectivePlate::areal_mass(double r) const { return segment_at(r).areal_mass; }

std::vector<double> EffectivePlate::interior_breakpoints() const {
    std::vector<double> out;
    for (const auto& s : segments)
        if (s.r_end > fixture_radius && s.r_end < outer_radius) out.push_back(s.r_end);
    return out;
}

EffectivePlate EffectivePlate::with_scaled_stiffness(double factor) const {
    EffectivePlate p = *this;
    for (auto& s : p.segments) s.bending_stiffness *= factor;
    return p;
}

void EffectivePlate::validate() const {
    if (!(inner_radius > 0.0 && inner_radius < fixture_radius && fixture_radius < outer_radius))
        throw GeometryError("effective plate radii must satisfy 0 < inner < fixture < outer");
    if (segments.empty()) throw GeometryError("effective plate has no segments");
    double r = inner_radius;
    for (const auto& s : segments) {
        if (std::abs(s.r_begin - r) > 1e-15 * outer_radius || !(s.r_end > s.r_begin))
            throw GeometryError("effective plate segments must be contiguous and ascending");
        if (!(s.bending_stiffness > 0.0) || !(s.areal_mass > 0.0))
            throw GeometryError("effective plate D and mu must be positive");
        r = s.r_end;
    }
    if (std::abs(r - outer_radius) > 1e-15 * outer_radius)
        throw GeometryError("effective plate segments must end at outer_radius");
}

EffectivePlate EffectivePlate::uniform(double inner_radius, double fixture_radius,
                                       double outer_radius, double bending_stiffness,
                                       double areal_mass, double poisson_ratio,
                                       double damping_ratio) {
    EffectivePlate p;
    p.inner_radius = inner_radius;
    p.fixture_radius = fixture_radius;
    p.outer_radius = outer_radius;
    p.poisson_ratio = poisson_ratio;
    p.fill_factor = 1.0;
    p.modal_damping_ratio = damping_ratio;
    p.segments.push_back({inner_radius, outer_radius, bending_stiffness, areal_mass});
    p.validate();
    return p;
}

double plate_bending_stiffness(double youngs_modulus, double poisson_ratio, double thickness) {
    return youngs_modulus * thickness * thickness * thickness
           / (12.0 * (1.0 - poisson_ratio * poisson_ratio));
}

double notch_fill_factor(const StatorGeometry& geom) {
    if (geom.notch_count == 0) return 1.0;
    const double circumference = 2.0 * std::numbers::pi * geom.tooth_band_centroid_radius();
    return 1.0 - geom.notch_count * geom.notch_width / circumference;
}

EffectivePlate homogenize(const StatorGeometry& geom, const Material& mat) {
    geom.validate();
    mat.validate();

    const double fill = notch_fill_factor(geom);
    if (!(fill > 0.0)) throw GeometryError("invalid geometry: notches overlap (fill factor <= 0)");

    const double E = mat.youngs_modulus;
    const double nu = mat.poisson_ratio;
    const double H = geom.total_height;

    double band_D = 0.0;
    double band_mu = 0.0;
    if (fill == 1.0) {
        band_D = plate_bending_stiffness(E, nu, H);
        band_mu = mat.density * H;
    } else {
        // Two layers measured from the bottom face: solid [0, hs], teeth [hs, H].
        const double hs = H - geom.notch_depth;
        const double ht = geom.notch_depth;
        const double Es = E;
        const double Et = fill * E;
        const double zs = 0.5 * hs;
        const double zt = hs + 0.5 * ht;
        const double z_bar = (Es * hs * zs + Et * ht * zt) / (Es * hs + Et * ht);
        const double Is = hs * hs * hs / 12.0 + hs * (zs - z_bar) * (zs - z_bar);
        const double It = ht * ht * ht / 12.0 + ht * (zt - z_bar) * (zt - z_bar);
        band_D = (Es * Is + Et * It) / (1.0 - nu * nu);
        band_mu = mat.density * (hs + fill * ht);
    }

    EffectivePlate p;
    p.inner_radius = geom.inner_radius;
    p.fixture_radius = geom.fixture_radius;
    p.outer_radius = geom.outer_radius;
    p.poisson_ratio = nu;
    p.fill_factor = fill;
    p.modal_damping_ratio = mat.modal_damping_ratio;
    p.segments.push_back({geom.inner_radius, geom.tooth_band_inner_radius,
                          plate_bending_stiffness(E, nu, geom.base_thickness),
                          mat.density * geom.base_thickness});
    p.segments.push_back({geom.tooth_band_inner_radius, geom.outer_radius, band_D, band_mu});
    p.validate();
    return p;
}

} // namespace stator

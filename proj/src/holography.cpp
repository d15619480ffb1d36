#include "stator/holography.hpp"

#include "stator/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

namespace stator {

namespace {

constexpr double pi = std::numbers::pi;
constexpr double nan = std::numeric_limits<double>::quiet_NaN();

} // namespace

double OpticalConfig::sensitivity() const {
    return sensitivity_factor > 0.0 ? sensitivity_factor : 4.0 * pi / wavelength;
}

void OpticalConfig::validate() const {
    if (!(wavelength > 0.0)) throw DomainError("wavelength must be > 0");
    if (!(sensitivity_factor >= 0.0)) throw DomainError("sensitivity_factor must be > 0 (or 0 for 4*pi/lambda)");
    if (!(strobe_duty > 0.0 && strobe_duty <= 0.2)) throw DomainError("strobe_duty must lie in (0, 0.2]");
    if (!(max_amplitude > 0.0)) throw DomainError("max_amplitude must be > 0");
    if (!(phase_noise_sigma >= 0.0)) throw DomainError("phase_noise_sigma must be >= 0");
}

double wrap_phase(double phase) {
    double w = std::remainder(phase, 2.0 * pi);
    if (w <= -pi) w += 2.0 * pi;
    return w;
}

FringeImage time_averaged(const ScalarField& amplitude, const OpticalConfig& optics) {
    optics.validate();
    const Grid& g = *amplitude.grid;
    const double k = optics.sensitivity();
    FringeImage img;
    img.grid = amplitude.grid;
    img.intensity.assign(g.size(), nan);
    for (std::size_t p = 0; p < g.size(); ++p) {
        if (!g.valid[p]) continue;
        double a = std::abs(amplitude.values[p]);
        if (!std::isfinite(a)) throw DomainError("time_averaged: non-finite amplitude on a valid pixel");
        if (a > optics.max_amplitude) {
            a = optics.max_amplitude;
            ++img.clipped_pixels;
        }
        const double j0 = std::cyl_bessel_j(0.0, k * a);
        img.intensity[p] = j0 * j0;
    }
    return img;
}

PhaseMap stroboscopic(const ScalarField& field_a, const ScalarField& field_b,
                      const OpticalConfig& optics, double strobe_phase_a, double strobe_phase_b,
                      std::uint64_t seed) {
    optics.validate();
    if (!field_a.grid || !field_b.grid || !field_a.grid->same_layout(*field_b.grid))
        throw DomainError("stroboscopic: exposures are on different grids");
    const Grid& g = *field_a.grid;
    const double k = optics.sensitivity();
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, optics.phase_noise_sigma > 0.0 ? optics.phase_noise_sigma : 1.0);

    PhaseMap map;
    map.grid = field_a.grid;
    map.strobe_phase_a = strobe_phase_a;
    map.strobe_phase_b = strobe_phase_b;
    map.phase.assign(g.size(), nan);
    for (std::size_t p = 0; p < g.size(); ++p) {
        if (!g.valid[p]) continue;
        double phi = k * (field_b.values[p] - field_a.values[p]);
        if (optics.phase_noise_sigma > 0.0) phi += noise(rng);
        map.phase[p] = wrap_phase(phi);
    }
    return map;
}

ScalarField unwrap_to_displacement(const PhaseMap& map, const OpticalConfig& optics) {
    optics.validate();
    const Grid& g = *map.grid;
    const double k = optics.sensitivity();

    // Circle membership: polar rows, or one-pixel-wide rings.
    std::map<long, std::vector<std::size_t>> rings;
    const double pixel = g.kind == GridKind::cartesian ? 2.0 * g.half_extent / g.width : 0.0;
    for (std::size_t p = 0; p < g.size(); ++p) {
        if (!g.valid[p]) continue;
        const long ring = g.kind == GridKind::polar ? static_cast<long>(p / g.width)
                                                    : std::lround(g.r[p] / pixel);
        rings[ring].push_back(p);
    }

    ScalarField out{map.grid, std::vector<double>(g.size(), nan)};
    for (auto& [ring, members] : rings) {
        std::stable_sort(members.begin(), members.end(),
                         [&g](std::size_t a, std::size_t b) { return g.theta[a] < g.theta[b]; });
        double unwrapped = map.phase[members.front()];
        out.values[members.front()] = unwrapped / k;
        double winding = 0.0;
        for (std::size_t j = 1; j < members.size(); ++j) {
            const double step = wrap_phase(map.phase[members[j]] - map.phase[members[j - 1]]);
            winding += step;
            unwrapped += step;
            out.values[members[j]] = unwrapped / k;
        }
        winding += wrap_phase(map.phase[members.front()] - map.phase[members.back()]);
        if (std::abs(winding) > pi) {
            const double radius = g.kind == GridKind::polar ? g.r[members.front()] : ring * pixel;
            std::ostringstream os;
            os << "phase unwrap failed: circle at radius " << radius << " m winds by "
               << winding / (2.0 * pi) << " turns";
            throw UnwrapError(os.str(), radius);
        }
    }
    return out;
}

ScalarField strobe_snapshot(const ModalBasis& basis, const ModalTrajectory& traj,
                            double reference_time, double strobe_phase_deg,
                            const std::shared_ptr<const Grid>& grid, const OpticalConfig& optics,
                            const std::vector<ExternalMode>& externals) {
    optics.validate();
    const double period = 1.0 / traj.drive_frequency;
    const double t = reference_time + strobe_phase_deg / 360.0 * period;
    if (!optics.finite_duty_blur) return field_at(basis, traj, t, grid, externals);

    // Midpoint rule over the exposure window centred on t.
    constexpr int sub = 8;
    const double window = optics.strobe_duty * period;
    ScalarField acc{grid, std::vector<double>(grid->size(), 0.0)};
    for (int s = 0; s < sub; ++s) {
        const double ts = t - 0.5 * window + (s + 0.5) * window / sub;
        const ScalarField f = field_at(basis, traj, ts, grid, externals);
        for (std::size_t p = 0; p < acc.values.size(); ++p) acc.values[p] += f.values[p] / sub;
    }
    return acc;
}

} // namespace stator

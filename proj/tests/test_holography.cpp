#include "support.hpp"

#include "stator/analysis.hpp"
#include "stator/dynamics.hpp"
#include "stator/error.hpp"
#include "stator/holography.hpp"

#include <doctest.h>

#include <cmath>

using namespace stator;
using support::pi;

namespace {

constexpr double j0_first_zero = 2.404825557695773;

ScalarField make_field(const std::shared_ptr<const Grid>& g, const std::function<double(double, double)>& f) {
    ScalarField out{g, std::vector<double>(g->size(), std::nan(""))};
    for (std::size_t p = 0; p < g->size(); ++p)
        if (g->valid[p]) out.values[p] = f(g->r[p], g->theta[p]);
    return out;
}

} // namespace

TEST_SUITE("holography") {

TEST_CASE("zero amplitude is full brightness") {
    const auto g = Grid::cartesian(3e-3, 15e-3, 64, 16e-3);
    const auto img = time_averaged(make_field(g, [](double, double) { return 0.0; }), OpticalConfig{});
    for (std::size_t p = 0; p < g->size(); ++p) {
        if (g->valid[p]) CHECK(img.intensity[p] == 1.0);
        else CHECK(std::isnan(img.intensity[p]));
    }
}

TEST_CASE("first dark fringe sits at 101.8 nm for 532 nm light") {
    const OpticalConfig optics;
    const double dark = j0_first_zero * 532e-9 / (4.0 * pi);
    CHECK(std::abs(dark - 101.8e-9) < 0.5e-9);
    const auto g = Grid::polar(3e-3, 15e-3, 12e-3, 12e-3, 1, 2001);
    // Amplitude ramps 90..110 nm along the circle; darkest sample must sit at the J0 zero.
    const auto img = time_averaged(make_field(g, [](double, double t) { return 90e-9 + 20e-9 * t / (2 * pi); }), optics);
    std::size_t best = 0;
    for (std::size_t p = 0; p < g->size(); ++p)
        if (img.intensity[p] < img.intensity[best]) best = p;
    const double at = 90e-9 + 20e-9 * g->theta[best] / (2 * pi);
    CHECK(std::abs(at - dark) < 0.02e-9);
    CHECK(img.intensity[best] < 1e-6);
}

TEST_CASE("intensity ignores the sign of the amplitude") {
    const auto g = Grid::polar(3e-3, 15e-3, 6e-3, 15e-3, 5, 90);
    const auto f = [](double r, double t) { return 300e-9 * r / 15e-3 * std::cos(3 * t); };
    const auto a = time_averaged(make_field(g, f), OpticalConfig{});
    const auto b = time_averaged(make_field(g, [&](double r, double t) { return -f(r, t); }), OpticalConfig{});
    CHECK(a.intensity == b.intensity);
}

TEST_CASE("pure n=4 mode shows 8 bright nodal crossings along a circle") {
    const auto& basis = support::calibrated_basis();
    const Mode& m = *basis.find(4, Orientation::cosine);
    const int samples = 1440;
    const auto g = Grid::polar(3e-3, 15e-3, 14e-3, 14e-3, 1, samples);
    const double scale = 250e-9 / std::abs(m.profile.value(14e-3));
    const auto img = time_averaged(make_field(g, [&](double r, double t) { return scale * mode_shape_eval(m, r, t); }),
                                   OpticalConfig{});
    int bright = 0;
    for (int j = 0; j < samples; ++j) {
        const double prev = img.intensity[(j + samples - 1) % samples];
        const double next = img.intensity[(j + 1) % samples];
        if (img.intensity[j] > 0.9 && img.intensity[j] >= prev && img.intensity[j] > next) ++bright;
    }
    CHECK(bright == 8);
}

TEST_CASE("amplitudes above the configured maximum are clipped and counted") {
    OpticalConfig optics;
    optics.max_amplitude = 100e-9;
    const auto g = Grid::polar(3e-3, 15e-3, 10e-3, 10e-3, 1, 10);
    const auto img = time_averaged(make_field(g, [](double, double t) { return t < pi ? 50e-9 : 500e-9; }), optics);
    CHECK(img.clipped_pixels == 5);
    const double j = std::cyl_bessel_j(0.0, optics.sensitivity() * 100e-9);
    CHECK(img.intensity[9] == doctest::Approx(j * j));
}

TEST_CASE("stroboscopic identities") {
    const auto g = Grid::cartesian(3e-3, 15e-3, 48, 16e-3);
    const OpticalConfig optics;
    const auto fa = make_field(g, [](double r, double t) { return 80e-9 * r / 15e-3 * std::sin(4 * t); });

    const auto same = stroboscopic(fa, fa, optics);
    for (std::size_t p = 0; p < g->size(); ++p)
        if (g->valid[p]) CHECK(same.phase[p] == 0.0);

    auto quarter = fa;
    for (auto& v : quarter.values) v += 532e-9 / 4.0;
    const auto pi_map = stroboscopic(fa, quarter, optics);
    for (std::size_t p = 0; p < g->size(); ++p)
        if (g->valid[p]) CHECK(std::abs(std::abs(pi_map.phase[p]) - pi) < 1e-9);

    const auto fb = make_field(g, [](double r, double t) { return 140e-9 * r / 15e-3 * std::cos(4 * t + 0.2); });
    const auto ab = stroboscopic(fa, fb, optics);
    const auto ba = stroboscopic(fb, fa, optics);
    for (std::size_t p = 0; p < g->size(); ++p)
        if (g->valid[p]) CHECK(std::abs(wrap_phase(ab.phase[p] + ba.phase[p])) < 1e-12);
}

TEST_CASE("exposures on different grids are rejected") {
    const auto a = Grid::cartesian(3e-3, 15e-3, 32, 16e-3);
    const auto b = Grid::cartesian(3e-3, 15e-3, 33, 16e-3);
    const auto fa = make_field(a, [](double, double) { return 0.0; });
    const auto fb = make_field(b, [](double, double) { return 0.0; });
    CHECK_THROWS_AS(stroboscopic(fa, fb, OpticalConfig{}), DomainError);
}

TEST_CASE("wrap_phase range") {
    CHECK(wrap_phase(pi) == pi);
    CHECK(wrap_phase(-pi) == pi);
    CHECK(wrap_phase(3 * pi) == doctest::Approx(pi));
    CHECK(wrap_phase(0.5) == 0.5);
    CHECK(wrap_phase(2 * pi + 0.5) == doctest::Approx(0.5));
}

TEST_CASE("circular unwrap round trips") {
    const OpticalConfig optics;
    const double k = optics.sensitivity();
    const auto g = Grid::polar(3e-3, 15e-3, 8e-3, 15e-3, 8, 720);
    const auto zero = make_field(g, [](double, double) { return 0.0; });
    for (const double peak_phase : {2.0, 7.0}) {
        const auto truth = make_field(g, [&](double, double t) { return peak_phase / k * std::sin(4 * t); });
        const auto map = stroboscopic(zero, truth, optics);
        const auto back = unwrap_to_displacement(map, optics);
        double worst = 0.0;
        for (std::size_t p = 0; p < g->size(); ++p) worst = std::max(worst, std::abs(back.values[p] - truth.values[p]));
        CAPTURE(peak_phase);
        CHECK(worst < 1e-12);
    }
    const auto flat = unwrap_to_displacement(stroboscopic(zero, zero, optics), optics);
    for (double v : flat.values) CHECK(v == 0.0);
}

TEST_CASE("a phase vortex fails the closure check with its radius") {
    OpticalConfig optics;
    const auto g = Grid::polar(3e-3, 15e-3, 9e-3, 12e-3, 2, 64);
    PhaseMap map;
    map.grid = g;
    map.phase.resize(g->size());
    for (std::size_t p = 0; p < g->size(); ++p) map.phase[p] = wrap_phase(g->theta[p]);
    try {
        unwrap_to_displacement(map, optics);
        FAIL("expected UnwrapError");
    } catch (const UnwrapError& e) {
        CHECK(e.radius() == doctest::Approx(9e-3));
        CHECK(std::string(e.what()).find("0.009") != std::string::npos);
    }
}

TEST_CASE("dynamics to unwrapped displacement on an image grid") {
    // Peak phase difference below 3 pi; a 1-D anchored unwrap is exact up to a
    // per-ring multiple of lambda/2, which is removed before comparing.
    const auto& full = support::calibrated_basis();
    const double f = full.frequency_of(4);
    const auto basis = full.retain_below(2 * f);
    DriveConfig d;
    d.drive_frequency = f;
    d = calibrate_force_per_volt(basis, d, 15e-3, 0.0, 180e-9);
    const auto traj = respond(basis, d, 8e-3, 1.0 / (40 * f));
    const double t_ref = std::floor(6e-3 * f) / f;
    const OpticalConfig optics;
    const auto g = Grid::cartesian(3e-3, 15e-3, 128, 15.5e-3);
    const auto fa = strobe_snapshot(basis, traj, t_ref, 0.0, g, optics);
    const auto fb = strobe_snapshot(basis, traj, t_ref, 150.0, g, optics);
    const auto back = unwrap_to_displacement(stroboscopic(fa, fb, optics), optics);

    const double half = optics.wavelength / 2.0;
    double sq = 0.0, peak = 0.0;
    int count = 0;
    for (std::size_t p = 0; p < g->size(); ++p) {
        if (!g->valid[p]) continue;
        const double diff = fb.values[p] - fa.values[p];
        peak = std::max(peak, std::abs(diff) * optics.sensitivity());
        const double e = back.values[p] - diff;
        const double residual = e - half * std::round(e / half);
        sq += residual * residual;
        ++count;
    }
    CHECK(peak < 3 * pi);
    CHECK(peak > pi); // wrapping is engaged
    CHECK(std::sqrt(sq / count) < 1e-9);
}

TEST_CASE("strobe offset of 60 degrees rotates an n=4 traveling pattern by 15 degrees") {
    const auto& full = support::calibrated_basis();
    const double f = full.frequency_of(4);
    const auto basis = full.retain_below(2 * f);
    DriveConfig d;
    d.drive_frequency = f;
    d = calibrate_force_per_volt(basis, d, 15e-3, 0.0, 100e-9);
    const auto traj = respond(basis, d, 10e-3, 1.0 / (40 * f));
    const double t_ref = std::floor(8e-3 * f) / f;
    const OpticalConfig optics;
    const int samples = 3600;
    const auto g = Grid::polar(3e-3, 15e-3, 15e-3, 15e-3, 1, samples);
    const auto rest = make_field(g, [](double, double) { return 0.0; });
    const auto p0 = stroboscopic(rest, strobe_snapshot(basis, traj, t_ref, 0.0, g, optics), optics);
    const auto p60 = stroboscopic(rest, strobe_snapshot(basis, traj, t_ref, 60.0, g, optics), optics);
    int best = 0;
    double best_c = -1e300;
    for (int shift = 0; shift < samples / 4; ++shift) {
        double c = 0.0;
        for (int j = 0; j < samples; ++j) c += p60.phase[j] * p0.phase[(j - shift + samples) % samples];
        if (c > best_c) {
            best_c = c;
            best = shift;
        }
    }
    CHECK(std::abs(best * 360.0 / samples - 15.0) <= 0.5);
}

TEST_CASE("finite strobe duty averages the snapshot") {
    const auto& full = support::calibrated_basis();
    const double f = full.frequency_of(4);
    const auto basis = full.retain_below(2 * f);
    DriveConfig d;
    d.drive_frequency = f;
    const auto traj = respond(basis, d, 12e-3, 1.0 / (40 * f));
    const double t_ref = std::floor(10e-3 * f) / f;
    const auto g = Grid::polar(3e-3, 15e-3, 15e-3, 15e-3, 1, 360);
    OpticalConfig sharp;
    OpticalConfig blurred;
    blurred.finite_duty_blur = true;
    blurred.strobe_duty = 0.1;
    const auto a = fit_eq1(sample_circle(strobe_snapshot(basis, traj, t_ref, 30.0, g, sharp), 15e-3), 4);
    const auto b = fit_eq1(sample_circle(strobe_snapshot(basis, traj, t_ref, 30.0, g, blurred), 15e-3), 4);
    const double sinc = std::sin(pi * 0.1) / (pi * 0.1);
    CHECK(b.amplitude / a.amplitude == doctest::Approx(sinc).epsilon(1e-3));
    CHECK(std::abs(wrap_phase(b.phase - a.phase)) < 1e-6);
}

TEST_CASE("phase noise is reproducible from the seed") {
    OpticalConfig optics;
    optics.phase_noise_sigma = 0.1;
    const auto g = Grid::polar(3e-3, 15e-3, 10e-3, 15e-3, 4, 64);
    const auto z = make_field(g, [](double, double) { return 0.0; });
    const auto a = stroboscopic(z, z, optics, 0, 0, 7);
    const auto b = stroboscopic(z, z, optics, 0, 0, 7);
    const auto c = stroboscopic(z, z, optics, 0, 0, 8);
    CHECK(a.phase == b.phase);
    CHECK(a.phase != c.phase);
}

TEST_CASE("optics validation") {
    OpticalConfig o;
    o.strobe_duty = 0.3;
    CHECK_THROWS_AS(o.validate(), DomainError);
    o = OpticalConfig{};
    o.wavelength = 0.0;
    CHECK_THROWS_AS(o.validate(), DomainError);
    o = OpticalConfig{};
    o.sensitivity_factor = 1e7;
    CHECK(o.sensitivity() == 1e7);
}

}

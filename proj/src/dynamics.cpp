#include "stator/dynamics.hpp"

#include "stator/error.hpp"
#include "stator/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace stator {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;
constexpr double nan = std::numeric_limits<double>::quiet_NaN();

// Integral of W(r) r dr over [a, b] on the Hermite interpolant.
double radial_moment(const RadialProfile& profile, double a, double b) {
    static const GaussRule rule = gauss_legendre(4);
    double total = 0.0;
    for (std::size_t e = 0; e + 1 < profile.r.size(); ++e) {
        const double lo = std::max(a, profile.r[e]);
        const double hi = std::min(b, profile.r[e + 1]);
        if (!(hi > lo)) continue;
        for (std::size_t q = 0; q < rule.points.size(); ++q) {
            const double r = lo + rule.points[q] * (hi - lo);
            total += rule.weights[q] * (hi - lo) * profile.value(r) * r;
        }
    }
    return total;
}

// (1/pi) * integral over the circle of trig(n_d theta) * angular(theta);
// the uniform rule is exact for the trigonometric degrees involved.
std::pair<double, double> angular_projection(const Mode& mode, int harmonic) {
    const int points = 4 * (mode.n + harmonic + 2);
    double c = 0.0;
    double s = 0.0;
    for (int j = 0; j < points; ++j) {
        const double theta = two_pi * j / points;
        const double a = mode.angular(theta);
        c += std::cos(harmonic * theta) * a;
        s += std::sin(harmonic * theta) * a;
    }
    return {2.0 * c / points, 2.0 * s / points};
}

void check_point(const ModalBasis& basis, double r) {
    const Mode& m = basis.modes.front();
    if (!(r >= m.inner_radius && r <= m.outer_radius)) {
        std::ostringstream os;
        os << "point radius " << r << " outside annulus [" << m.inner_radius << ", "
           << m.outer_radius << "]";
        throw DomainError(os.str());
    }
}

std::complex<double> oscillator_response(double omega0, double zeta, double drive_omega) {
    return 1.0 / std::complex<double>(omega0 * omega0 - drive_omega * drive_omega,
                                      2.0 * zeta * omega0 * drive_omega);
}

} // namespace

void DriveConfig::validate() const {
    if (!(drive_frequency > 0.0)) throw DomainError("drive_frequency must be > 0");
    if (!(peak_to_peak_voltage > 0.0)) throw DomainError("peak_to_peak_voltage must be > 0");
    if (!(force_per_volt >= 0.0)) throw DomainError("force_per_volt must be >= 0");
    if (electrode_harmonic < 1) throw DomainError("electrode_harmonic must be >= 1");
    if (electrode_outer_radius != 0.0 && !(electrode_outer_radius > electrode_inner_radius))
        throw DomainError("electrode_outer_radius must exceed electrode_inner_radius");
}

std::complex<double> DampedOscillator::steady() const {
    return force * oscillator_response(omega, zeta, drive_omega);
}

DampedOscillator::State DampedOscillator::steady_state_at(double t) const {
    const std::complex<double> rot = steady() * std::polar(1.0, drive_omega * t);
    return {rot.real(), -drive_omega * rot.imag()};
}

DampedOscillator::State DampedOscillator::advance(State s, double t, double dt) const {
    const State p0 = steady_state_at(t);
    const double x0 = s.q - p0.q;
    const double v0 = s.v - p0.v;
    const double sigma = zeta * omega;
    const double wd = omega * std::sqrt(1.0 - zeta * zeta);
    const double decay = std::exp(-sigma * dt);
    const double c = std::cos(wd * dt);
    const double sn = std::sin(wd * dt);
    const State p1 = steady_state_at(t + dt);
    return {p1.q + decay * (x0 * c + (v0 + sigma * x0) / wd * sn),
            p1.v + decay * (v0 * c - (omega * omega * x0 + sigma * v0) / wd * sn)};
}

double ModalTrajectory::q_at(std::size_t k, double t) const {
    const double slack = 1e-9 * dt;
    if (!(t >= start() - slack && t <= end() + slack)) {
        std::ostringstream os;
        os << "time " << t << " outside trajectory span [" << start() << ", " << end() << "]";
        throw DomainError(os.str());
    }
    std::size_t i = static_cast<std::size_t>(std::max(0.0, std::floor((t - start()) / dt)));
    i = std::min(i, times.size() - 1);
    const double tau = t - times[i];
    if (tau == 0.0) return q[k][i];
    return oscillators[k].advance({q[k][i], v[k][i]}, times[i], tau).q;
}

void ExternalMode::validate() const {
    if (!(frequency > 0.0)) throw DomainError("external mode frequency must be > 0");
    if (!(damping_ratio > 0.0 && damping_ratio < 1.0))
        throw DomainError("external mode damping ratio must lie in (0, 1)");
    if (!shape) throw DomainError("external mode has no shape function");
}

std::complex<double> ExternalMode::steady(double drive_frequency) const {
    const double w0 = two_pi * frequency;
    return static_gain * w0 * w0 * oscillator_response(w0, damping_ratio, two_pi * drive_frequency);
}

ExternalMode ExternalMode::lateral_proxy(int lobes, double frequency, double damping_ratio,
                                         double fixture_radius, double outer_radius,
                                         double static_gain) {
    ExternalMode m;
    m.label = "lateral-proxy";
    m.frequency = frequency;
    m.damping_ratio = damping_ratio;
    m.static_gain = static_gain;
    m.shape = [=](double r, double theta) {
        const double ramp = std::max(0.0, (r - fixture_radius) / (outer_radius - fixture_radius));
        return ramp * std::sin(lobes * theta);
    };
    m.validate();
    return m;
}

std::vector<std::complex<double>> modal_forces(const ModalBasis& basis, const DriveConfig& drive) {
    drive.validate();
    if (basis.modes.empty()) throw DomainError("modal basis is empty");
    const Mode& first = basis.modes.front();
    const double re0 =
        drive.electrode_inner_radius > 0.0 ? drive.electrode_inner_radius : first.profile.r.front();
    const double re1 =
        drive.electrode_outer_radius > 0.0 ? drive.electrode_outer_radius : first.outer_radius;
    const double total_force = drive.force_per_volt * 0.5 * drive.peak_to_peak_voltage;
    const double scale = total_force / (re1 * re1 - re0 * re0);

    std::vector<std::complex<double>> out;
    out.reserve(basis.modes.size());
    for (const auto& mode : basis.modes) {
        auto [pc, ps] = angular_projection(mode, drive.electrode_harmonic);
        if (drive.phase_layout == PhaseLayout::single_phase) ps = 0.0;
        const double moment = radial_moment(mode.profile, re0, re1);
        out.emplace_back(scale * moment * pc, -scale * moment * ps);
    }
    return out;
}

std::vector<std::complex<double>> steady_phasors(const ModalBasis& basis, const DriveConfig& drive) {
    const auto forces = modal_forces(basis, drive);
    const double w = two_pi * drive.drive_frequency;
    std::vector<std::complex<double>> out;
    out.reserve(forces.size());
    for (std::size_t k = 0; k < forces.size(); ++k) {
        const Mode& m = basis.modes[k];
        out.push_back(forces[k] * oscillator_response(m.omega(), m.damping_ratio, w));
    }
    return out;
}

ModalTrajectory respond(const ModalBasis& basis, const DriveConfig& drive, double duration,
                        double dt) {
    if (basis.modes.empty()) throw DomainError("respond: modal basis is empty");
    drive.validate();
    if (!(dt > 0.0)) throw DomainError("respond: dt must be > 0");
    const double dt_max = 1.0 / (20.0 * basis.max_frequency());
    if (dt > dt_max * (1.0 + 1e-12)) {
        std::ostringstream os;
        os << "respond: dt=" << dt << " s exceeds the bound 1/(20*f_max)=" << dt_max
           << " s for f_max=" << basis.max_frequency() << " Hz";
        throw StabilityError(os.str());
    }
    if (!(duration >= 5.0 * dt)) throw DomainError("respond: duration must be >= 5*dt");

    const std::size_t steps = static_cast<std::size_t>(std::floor(duration / dt + 1e-9));
    const auto forces = modal_forces(basis, drive);
    const double w = two_pi * drive.drive_frequency;

    ModalTrajectory traj;
    traj.dt = dt;
    traj.drive_frequency = drive.drive_frequency;
    traj.basis_provenance = basis.provenance;
    traj.times.resize(steps + 1);
    for (std::size_t i = 0; i <= steps; ++i) traj.times[i] = static_cast<double>(i) * dt;

    const std::size_t modes = basis.modes.size();
    traj.oscillators.resize(modes);
    traj.q.assign(modes, std::vector<double>(steps + 1, 0.0));
    traj.v.assign(modes, std::vector<double>(steps + 1, 0.0));
    for (std::size_t k = 0; k < modes; ++k) {
        const Mode& m = basis.modes[k];
        DampedOscillator& osc = traj.oscillators[k];
        osc.omega = m.omega();
        osc.zeta = m.damping_ratio;
        osc.drive_omega = w;
        osc.force = forces[k];
        traj.steady_phasor.push_back(osc.steady());
        traj.steady_state_amplitude.push_back(std::abs(osc.steady()));
        if (osc.force == std::complex<double>(0.0, 0.0)) continue;

        DampedOscillator::State s;
        for (std::size_t i = 0; i < steps; ++i) {
            s = osc.advance(s, traj.times[i], dt);
            traj.q[k][i + 1] = s.q;
            traj.v[k][i + 1] = s.v;
        }
    }
    return traj;
}

namespace {

void check_pairing(const ModalBasis& basis, const ModalTrajectory& traj) {
    if (traj.q.size() != basis.modes.size() || traj.basis_provenance != basis.provenance)
        throw DomainError("trajectory was not computed from this modal basis");
}

} // namespace

ScalarField field_at(const ModalBasis& basis, const ModalTrajectory& traj, double t,
                     const std::shared_ptr<const Grid>& grid,
                     const std::vector<ExternalMode>& externals) {
    check_pairing(basis, traj);
    std::vector<double> qs(basis.modes.size());
    for (std::size_t k = 0; k < qs.size(); ++k) qs[k] = traj.q_at(k, t);

    std::vector<double> ext_amp;
    for (const auto& e : externals)
        ext_amp.push_back(
            (e.steady(traj.drive_frequency) * std::polar(1.0, two_pi * traj.drive_frequency * t))
                .real());

    ScalarField out{grid, std::vector<double>(grid->size(), nan)};
    for (std::size_t p = 0; p < grid->size(); ++p) {
        if (!grid->valid[p]) continue;
        double sum = 0.0;
        for (std::size_t k = 0; k < qs.size(); ++k)
            if (qs[k] != 0.0) sum += qs[k] * mode_shape_eval(basis.modes[k], grid->r[p], grid->theta[p]);
        for (std::size_t e = 0; e < externals.size(); ++e)
            sum += ext_amp[e] * externals[e].shape(grid->r[p], grid->theta[p]);
        out.values[p] = sum;
    }
    return out;
}

ScalarField steady_amplitude_field(const ModalBasis& basis,
                                   const std::vector<std::complex<double>>& phasors,
                                   const std::shared_ptr<const Grid>& grid,
                                   const std::vector<ExternalMode>& externals,
                                   double drive_frequency) {
    if (phasors.size() != basis.modes.size())
        throw DomainError("phasor count does not match the modal basis");
    std::vector<std::complex<double>> ext;
    for (const auto& e : externals) ext.push_back(e.steady(drive_frequency));

    ScalarField out{grid, std::vector<double>(grid->size(), nan)};
    for (std::size_t p = 0; p < grid->size(); ++p) {
        if (!grid->valid[p]) continue;
        std::complex<double> sum{0.0, 0.0};
        for (std::size_t k = 0; k < phasors.size(); ++k)
            if (phasors[k] != std::complex<double>(0.0, 0.0))
                sum += phasors[k] * mode_shape_eval(basis.modes[k], grid->r[p], grid->theta[p]);
        for (std::size_t e = 0; e < ext.size(); ++e)
            sum += ext[e] * externals[e].shape(grid->r[p], grid->theta[p]);
        out.values[p] = std::abs(sum);
    }
    return out;
}

double steady_amplitude_at(const ModalBasis& basis,
                           const std::vector<std::complex<double>>& phasors, double r,
                           double theta) {
    if (basis.modes.empty()) throw DomainError("modal basis is empty");
    check_point(basis, r);
    std::complex<double> sum{0.0, 0.0};
    for (std::size_t k = 0; k < phasors.size(); ++k)
        sum += phasors[k] * mode_shape_eval(basis.modes[k], r, theta);
    return std::abs(sum);
}

std::optional<double> settling_time(const std::vector<double>& series,
                                    const std::vector<double>& times, double steady_amplitude,
                                    double period, double band) {
    if (series.size() != times.size() || series.size() < 2) return std::nullopt;
    if (!(steady_amplitude > 0.0)) return std::nullopt;
    const double dt = times[1] - times[0];
    const std::size_t window =
        std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(period / dt)));

    std::vector<double> envelope(series.size());
    for (std::size_t i = 0; i < series.size(); ++i) {
        double m = 0.0;
        const std::size_t lo = i + 1 >= window ? i + 1 - window : 0;
        for (std::size_t j = lo; j <= i; ++j) m = std::max(m, std::abs(series[j]));
        envelope[i] = m;
    }
    const auto outside = [&](std::size_t i) {
        return std::abs(envelope[i] - steady_amplitude) > band * steady_amplitude;
    };
    if (outside(series.size() - 1)) return std::nullopt;
    std::size_t i = series.size() - 1;
    while (i > 0 && !outside(i - 1)) --i;
    return times[i];
}

std::vector<ProbeSeries> probe(const ModalBasis& basis, const ModalTrajectory& traj,
                               const std::vector<ProbePoint>& points) {
    check_pairing(basis, traj);
    for (const auto& p : points) check_point(basis, p.r);

    const double period = 1.0 / traj.drive_frequency;
    std::vector<ProbeSeries> out;
    for (const auto& p : points) {
        ProbeSeries s;
        s.point = p;
        s.displacement.assign(traj.times.size(), 0.0);
        for (std::size_t k = 0; k < basis.modes.size(); ++k) {
            if (traj.oscillators[k].force == std::complex<double>(0.0, 0.0)) continue;
            const double shape = mode_shape_eval(basis.modes[k], p.r, p.theta);
            for (std::size_t i = 0; i < traj.times.size(); ++i)
                s.displacement[i] += traj.q[k][i] * shape;
        }
        s.steady_amplitude = steady_amplitude_at(basis, traj.steady_phasor, p.r, p.theta);
        s.settling_time = settling_time(s.displacement, traj.times, s.steady_amplitude, period);
        out.push_back(std::move(s));
    }
    return out;
}

double damping_for_settling(double settling, double frequency, double band) {
    if (!(settling > 0.0) || !(frequency > 0.0)) throw DomainError("settling time and frequency must be > 0");
    if (!(band > 0.0 && band < 1.0)) throw DomainError("settling band must lie in (0, 1)");
    return std::log(1.0 / band) / (two_pi * frequency * settling);
}

DriveConfig calibrate_force_per_volt(const ModalBasis& basis, const DriveConfig& drive, double r,
                                     double theta, double target_amplitude) {
    const double amp = steady_amplitude_at(basis, steady_phasors(basis, drive), r, theta);
    if (!(amp > 0.0)) throw DomainError("calibrate_force_per_volt: drive produces no motion at the point");
    DriveConfig out = drive;
    out.force_per_volt *= target_amplitude / amp;
    return out;
}

double dynamic_amplification(double natural_frequency, double damping_ratio,
                             double drive_frequency) {
    const double w0 = two_pi * natural_frequency;
    return w0 * w0 * std::abs(oscillator_response(w0, damping_ratio, two_pi * drive_frequency));
}

MixedResponse mixed_response(const ModalBasis& basis, const MixedModeRequest& request,
                             const ExternalMode& external, const DriveConfig& drive,
                             const std::shared_ptr<const Grid>& grid) {
    drive.validate();
    external.validate();
    const Mode* mode = basis.find(request.n, request.orientation, 0);
    if (!mode) {
        std::ostringstream os;
        os << "mixed_response: mode n=" << request.n << " absent from basis";
        throw DomainError(os.str());
    }
    const double f_mode = request.resonance > 0.0 ? request.resonance : mode->frequency;

    MixedResponse out;
    out.mode_weight =
        request.static_gain * dynamic_amplification(f_mode, mode->damping_ratio, drive.drive_frequency);
    out.external_weight = external.static_gain
                          * dynamic_amplification(external.frequency, external.damping_ratio,
                                                  drive.drive_frequency);

    out.mode_pattern = {grid, std::vector<double>(grid->size(), nan)};
    out.external_pattern = {grid, std::vector<double>(grid->size(), nan)};
    for (std::size_t p = 0; p < grid->size(); ++p) {
        if (!grid->valid[p]) continue;
        out.mode_pattern.values[p] = mode_shape_eval(*mode, grid->r[p], grid->theta[p]);
        out.external_pattern.values[p] = external.shape(grid->r[p], grid->theta[p]);
    }
    const double rm = rms(out.mode_pattern);
    const double re = rms(out.external_pattern);
    if (!(rm > 0.0) || !(re > 0.0)) throw DomainError("mixed_response: a pattern vanishes on the grid");
    out.pattern = {grid, std::vector<double>(grid->size(), nan)};
    for (std::size_t p = 0; p < grid->size(); ++p) {
        if (!grid->valid[p]) continue;
        out.mode_pattern.values[p] /= rm;
        out.external_pattern.values[p] /= re;
        out.pattern.values[p] = out.mode_weight * out.mode_pattern.values[p]
                                + out.external_weight * out.external_pattern.values[p];
    }
    return out;
}

} // namespace stator

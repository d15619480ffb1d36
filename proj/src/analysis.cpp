#include "stator/analysis.hpp"

#include "stator/error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

namespace stator {

namespace {

constexpr double pi = std::numbers::pi;
constexpr double two_pi = 2.0 * pi;
constexpr double deg = 180.0 / pi;

double normalize_angle(double a) {
    double w = std::remainder(a, two_pi);
    if (w <= -pi) w += two_pi;
    return w;
}

} // namespace

std::string to_string(SampleSource s) { return s == SampleSource::simulation ? "simulation" : "hologram"; }

std::string to_string(WaveKind k) {
    switch (k) {
    case WaveKind::traveling: return "traveling";
    case WaveKind::standing: return "standing";
    default: return "mixed";
    }
}

void CircleSample::validate() const {
    if (theta.size() != values.size()) throw SamplingError("circle sample: theta/value size mismatch");
    if (theta.empty()) throw SamplingError("circle sample is empty");
    for (std::size_t i = 0; i < theta.size(); ++i) {
        if (!(theta[i] >= 0.0 && theta[i] < two_pi)) throw SamplingError("circle sample: theta outside [0, 2pi)");
        if (i > 0 && !(theta[i] > theta[i - 1])) throw SamplingError("circle sample: theta not strictly increasing");
        if (!std::isfinite(values[i])) throw SamplingError("circle sample: non-finite value");
    }
}

CircleSample sample_circle(double radius, int count, const std::function<double(double)>& f,
                           SampleSource source) {
    if (count < 1) throw SamplingError("sample_circle: count must be >= 1");
    CircleSample s;
    s.radius = radius;
    s.source = source;
    for (int j = 0; j < count; ++j) {
        const double theta = two_pi * j / count;
        s.theta.push_back(theta);
        s.values.push_back(f(theta));
    }
    return s;
}

CircleSample sample_circle(const ScalarField& field, double radius, SampleSource source) {
    const Grid& g = *field.grid;
    CircleSample s;
    s.source = source;
    std::vector<std::pair<double, double>> pts;
    if (g.kind == GridKind::polar) {
        int best = 0;
        for (int row = 1; row < g.height; ++row)
            if (std::abs(g.row_radius(row) - radius) < std::abs(g.row_radius(best) - radius)) best = row;
        const double spacing = g.height > 1 ? (g.r_max - g.r_min) / (g.height - 1) : 0.0;
        const double miss = std::abs(g.row_radius(best) - radius);
        if (miss > 0.5 * spacing + 1e-12 * std::abs(radius)) {
            std::ostringstream os;
            os << "sample_circle: no grid row near radius " << radius;
            throw DomainError(os.str());
        }
        s.radius = g.row_radius(best);
        for (int j = 0; j < g.width; ++j) {
            const std::size_t p = static_cast<std::size_t>(best) * g.width + j;
            if (g.valid[p]) pts.emplace_back(g.theta[p], field.values[p]);
        }
    } else {
        const double pixel = 2.0 * g.half_extent / g.width;
        s.radius = radius;
        for (std::size_t p = 0; p < g.size(); ++p)
            if (g.valid[p] && std::abs(g.r[p] - radius) <= 0.5 * pixel)
                pts.emplace_back(g.theta[p], field.values[p]);
        std::stable_sort(pts.begin(), pts.end(),
                         [](const auto& a, const auto& b) { return a.first < b.first; });
    }
    // Merge points sharing an angle.
    for (std::size_t i = 0; i < pts.size();) {
        std::size_t j = i;
        double sum = 0.0;
        while (j < pts.size() && pts[j].first == pts[i].first) sum += pts[j++].second;
        s.theta.push_back(pts[i].first);
        s.values.push_back(sum / static_cast<double>(j - i));
        i = j;
    }
    if (s.theta.empty()) {
        std::ostringstream os;
        os << "sample_circle: no valid points at radius " << radius;
        throw DomainError(os.str());
    }
    return s;
}

int detect_mode_number(const CircleSample& sample, int n_max) {
    sample.validate();
    const std::size_t count = sample.values.size();
    if (n_max <= 0) n_max = static_cast<int>(count / 8);
    if (n_max < 1 || count < 8 * static_cast<std::size_t>(n_max)) {
        std::ostringstream os;
        os << "detect_mode_number: " << count << " samples cannot resolve harmonic " << std::max(n_max, 1)
           << " (need 8 per harmonic)";
        throw SamplingError(os.str());
    }
    const double mean = std::accumulate(sample.values.begin(), sample.values.end(), 0.0) / count;
    double raw_sq = 0.0;
    for (double v : sample.values) raw_sq += v * v;
    const double raw_rms = std::sqrt(raw_sq / count);

    int best = 0;
    double best_mag = 0.0;
    for (int n = 1; n <= n_max; ++n) {
        std::complex<double> c{0.0, 0.0};
        for (std::size_t j = 0; j < count; ++j)
            c += (sample.values[j] - mean) * std::polar(1.0, -n * sample.theta[j]);
        const double mag = 2.0 * std::abs(c) / count;
        if (mag > best_mag * (1.0 + 1e-9)) {
            best = n;
            best_mag = mag;
        }
    }
    if (best == 0 || !(best_mag > 1e-9 * raw_rms))
        throw NoModeError("detect_mode_number: no harmonic above the noise floor");
    return best;
}

FitResult fit_eq1(const CircleSample& sample, int n) {
    sample.validate();
    if (n < 1) throw DomainError("fit_eq1: mode number must be >= 1");
    const std::size_t count = sample.values.size();
    if (count < 4 || count < static_cast<std::size_t>(2 * n + 2)) {
        std::ostringstream os;
        os << "fit_eq1: " << count << " samples under-sample harmonic " << n << " (need max(4, 2n+2))";
        throw SamplingError(os.str());
    }

    Eigen::MatrixXd X(count, 3);
    Eigen::VectorXd y(count);
    for (std::size_t j = 0; j < count; ++j) {
        X(j, 0) = std::sin(n * sample.theta[j]);
        X(j, 1) = std::cos(n * sample.theta[j]);
        X(j, 2) = 1.0;
        y[j] = sample.values[j];
    }
    const Eigen::Matrix3d normal = X.transpose() * X;
    Eigen::Vector3d coef;
    const Eigen::LDLT<Eigen::Matrix3d> ldlt(normal);
    if (ldlt.info() == Eigen::Success && ldlt.rcond() > 1e-10) {
        coef = ldlt.solve(X.transpose() * y);
    } else {
        const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
        if (qr.rank() < 3) throw SamplingError("fit_eq1: sample angles do not determine the fit");
        coef = qr.solve(y);
    }

    const double a = coef[0];
    const double b = coef[1];
    FitResult fit;
    fit.n = n;
    fit.offset = coef[2];
    fit.amplitude = std::hypot(a, b);

    const Eigen::VectorXd resid = y - X * coef;
    const double rss = resid.squaredNorm();
    fit.rms_residual = std::sqrt(rss / count);

    const double scale = y.cwiseAbs().maxCoeff();
    if (fit.amplitude <= 1e-12 * scale) {
        fit.amplitude = 0.0;
        fit.phase = 0.0;
    } else {
        fit.phase = normalize_angle(std::atan2(b, a));
    }

    const double sigma2 = count > 3 ? rss / (count - 3) : 0.0;
    const Eigen::Matrix3d cov = sigma2 * normal.inverse();
    const double A = fit.amplitude;
    if (A > 0.0) {
        fit.covariance_diag[0] = (a * a * cov(0, 0) + b * b * cov(1, 1) + 2.0 * a * b * cov(0, 1)) / (A * A);
        fit.covariance_diag[2] =
            (b * b * cov(0, 0) + a * a * cov(1, 1) - 2.0 * a * b * cov(0, 1)) / (A * A * A * A);
    } else {
        fit.covariance_diag[0] = 0.5 * (cov(0, 0) + cov(1, 1));
        fit.covariance_diag[2] = std::numeric_limits<double>::infinity();
    }
    fit.covariance_diag[1] = 0.0;
    fit.covariance_diag[3] = cov(2, 2);
    return fit;
}

double crest_shift_deg(const FitResult& from, const FitResult& to) {
    if (from.n != to.n) throw DomainError("crest_shift_deg: fits have different mode numbers");
    // Crest of sin(n theta + phi) sits at theta = (pi/2 - phi) / n, so a
    // decrease in phi moves it toward +theta.
    const double shift = -normalize_angle(to.phase - from.phase) / from.n;
    return shift * deg;
}

WaveClassification track_strobe_phase(const std::vector<StrobeFit>& fits_in,
                                      const ClassificationThresholds& th) {
    if (fits_in.size() < 3) throw DomainError("track_strobe_phase: need at least 3 strobe phases");
    const int n = fits_in.front().fit.n;
    for (const auto& f : fits_in)
        if (f.fit.n != n) throw DomainError("track_strobe_phase: fits have mixed mode numbers");

    std::vector<StrobeFit> fits = fits_in;
    std::stable_sort(fits.begin(), fits.end(),
                     [](const auto& a, const auto& b) { return a.strobe_phase_deg < b.strobe_phase_deg; });
    const std::size_t m = fits.size();

    WaveClassification out;
    double mean = 0.0, max_a = 0.0, min_a = std::numeric_limits<double>::infinity();
    for (const auto& f : fits) {
        mean += f.fit.amplitude;
        max_a = std::max(max_a, f.fit.amplitude);
        min_a = std::min(min_a, f.fit.amplitude);
    }
    mean /= m;
    double var = 0.0;
    for (const auto& f : fits) var += (f.fit.amplitude - mean) * (f.fit.amplitude - mean);
    out.amplitude_cv = mean > 0.0 ? std::sqrt(var / m) / mean : 0.0;
    out.standing_wave_ratio = min_a > 0.0 ? max_a / min_a : std::numeric_limits<double>::infinity();

    const auto slope_of = [&](const std::vector<double>& x, const std::vector<double>& y) {
        const double mx = std::accumulate(x.begin(), x.end(), 0.0) / x.size();
        const double my = std::accumulate(y.begin(), y.end(), 0.0) / y.size();
        double sxy = 0.0, sxx = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            sxy += (x[i] - mx) * (y[i] - my);
            sxx += (x[i] - mx) * (x[i] - mx);
        }
        return sxx > 0.0 ? sxy / sxx : 0.0;
    };

    // Traveling: crest position continued through successive shifts.
    std::vector<double> strobe, crest;
    double pos = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        if (i > 0) pos += crest_shift_deg(fits[i - 1].fit, fits[i].fit);
        strobe.push_back(fits[i].strobe_phase_deg);
        crest.push_back(pos);
    }
    const double travel_slope = slope_of(strobe, crest);
    const double ideal = 1.0 / n;
    const bool traveling = out.amplitude_cv < th.amplitude_cv
                           && std::abs(std::abs(travel_slope) - ideal) <= th.slope_tolerance * ideal;

    // Standing: phi fixed modulo pi among fits with appreciable amplitude.
    std::vector<double> st_strobe, st_phase;
    double ref = 0.0;
    bool have_ref = false;
    double spread = 0.0;
    for (const auto& f : fits) {
        if (f.fit.amplitude < 0.05 * max_a) continue;
        if (!have_ref) {
            ref = f.fit.phase;
            have_ref = true;
        }
        double d = std::remainder(f.fit.phase - ref, pi);
        spread = std::max(spread, std::abs(d) * deg);
        st_strobe.push_back(f.strobe_phase_deg);
        st_phase.push_back(-d / n * deg);
    }
    out.max_phase_deviation_deg = spread;
    const bool standing = have_ref && spread <= th.phase_tolerance_deg;

    if (traveling) {
        out.kind = WaveKind::traveling;
        out.rotation_rate = travel_slope;
    } else if (standing) {
        out.kind = WaveKind::standing;
        out.rotation_rate = st_strobe.size() >= 2 ? slope_of(st_strobe, st_phase) : 0.0;
    } else {
        out.kind = WaveKind::mixed;
        out.rotation_rate = travel_slope;
    }
    return out;
}

double asymmetry_index(const std::vector<StrobeFit>& fits) {
    if (fits.size() < 2) throw DomainError("asymmetry_index: need at least 2 strobe phases");
    double index = 0.0;
    for (const auto& f : fits) {
        if (!(f.fit.amplitude > 0.0))
            throw DomainError("asymmetry_index: undefined for a fit with zero amplitude");
        index = std::max(index, f.fit.rms_residual / f.fit.amplitude);
    }
    return index;
}

} // namespace stator

#include "stator/grid.hpp"

#include "stator/error.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace stator {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

bool on_annulus(double r, double inner, double outer) { return r >= inner && r <= outer; }

} // namespace

bool Grid::same_layout(const Grid& other) const {
    return kind == other.kind && width == other.width && height == other.height
           && r == other.r && theta == other.theta && valid == other.valid;
}

double Grid::row_radius(int row) const {
    if (kind != GridKind::polar) throw DomainError("row_radius: grid is not polar");
    return r[static_cast<std::size_t>(row) * width];
}

std::shared_ptr<const Grid> Grid::polar(double inner_radius, double outer_radius, double r_min,
                                        double r_max, int n_radii, int n_theta) {
    if (n_radii < 1 || n_theta < 1) throw DomainError("polar grid needs >= 1 radius and angle");
    if (!(r_max >= r_min)) throw DomainError("polar grid needs r_max >= r_min");
    auto g = std::make_shared<Grid>();
    g->kind = GridKind::polar;
    g->width = n_theta;
    g->height = n_radii;
    g->inner_radius = inner_radius;
    g->outer_radius = outer_radius;
    g->r_min = r_min;
    g->r_max = r_max;
    const std::size_t n = static_cast<std::size_t>(n_radii) * n_theta;
    g->r.resize(n);
    g->theta.resize(n);
    g->valid.resize(n);
    for (int i = 0; i < n_radii; ++i) {
        const double radius =
            n_radii == 1 ? r_min
                         : (i == n_radii - 1 ? r_max : r_min + (r_max - r_min) * i / (n_radii - 1));
        for (int j = 0; j < n_theta; ++j) {
            const std::size_t k = static_cast<std::size_t>(i) * n_theta + j;
            g->r[k] = radius;
            g->theta[k] = two_pi * j / n_theta;
            g->valid[k] = on_annulus(radius, inner_radius, outer_radius) ? 1 : 0;
        }
    }
    return g;
}

std::shared_ptr<const Grid> Grid::cartesian(double inner_radius, double outer_radius, int pixels,
                                            double half_extent) {
    if (pixels < 1) throw DomainError("cartesian grid needs >= 1 pixel");
    if (!(half_extent > 0.0)) throw DomainError("cartesian grid needs half_extent > 0");
    auto g = std::make_shared<Grid>();
    g->kind = GridKind::cartesian;
    g->width = pixels;
    g->height = pixels;
    g->inner_radius = inner_radius;
    g->outer_radius = outer_radius;
    g->half_extent = half_extent;
    const std::size_t n = static_cast<std::size_t>(pixels) * pixels;
    g->r.resize(n);
    g->theta.resize(n);
    g->valid.resize(n);
    const double step = 2.0 * half_extent / pixels;
    for (int i = 0; i < pixels; ++i) {
        const double y = half_extent - (i + 0.5) * step;
        for (int j = 0; j < pixels; ++j) {
            const double x = -half_extent + (j + 0.5) * step;
            const std::size_t k = static_cast<std::size_t>(i) * pixels + j;
            g->r[k] = std::hypot(x, y);
            double t = std::atan2(y, x);
            if (t < 0.0) t += two_pi;
            g->theta[k] = t;
            g->valid[k] = on_annulus(g->r[k], inner_radius, outer_radius) ? 1 : 0;
        }
    }
    return g;
}

double correlation(const ScalarField& a, const ScalarField& b) {
    if (!a.grid || !b.grid || !a.grid->same_layout(*b.grid))
        throw DomainError("correlation: fields are on different grids");
    double sa = 0.0, sb = 0.0;
    std::size_t count = 0;
    for (std::size_t k = 0; k < a.values.size(); ++k) {
        if (!a.grid->valid[k]) continue;
        sa += a.values[k];
        sb += b.values[k];
        ++count;
    }
    if (count < 2) throw DomainError("correlation: fewer than two valid points");
    const double ma = sa / count;
    const double mb = sb / count;
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t k = 0; k < a.values.size(); ++k) {
        if (!a.grid->valid[k]) continue;
        const double da = a.values[k] - ma;
        const double db = b.values[k] - mb;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    if (saa == 0.0 || sbb == 0.0) return std::numeric_limits<double>::quiet_NaN();
    return sab / std::sqrt(saa * sbb);
}

double rms(const ScalarField& f) {
    double s = 0.0;
    std::size_t count = 0;
    for (std::size_t k = 0; k < f.values.size(); ++k) {
        if (!f.grid->valid[k]) continue;
        s += f.values[k] * f.values[k];
        ++count;
    }
    return count ? std::sqrt(s / count) : 0.0;
}

} // namespace stator

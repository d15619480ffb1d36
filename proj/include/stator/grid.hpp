#pragma once

#include <cstddef>
#include <memory>
#include <vector>

namespace stator {

enum class GridKind { polar, cartesian };

/// Sampling points over the stator face. Polar grids store one circle per row
/// (rows = radii, columns = uniform theta); cartesian grids are square images
/// centred on the stator axis with row 0 at the top. Points off the annulus
/// are marked invalid.
struct Grid {
    GridKind kind = GridKind::polar;
    int width = 0;
    int height = 0;
    double inner_radius = 0.0;
    double outer_radius = 0.0;
    double r_min = 0.0;       // polar only
    double r_max = 0.0;       // polar only
    double half_extent = 0.0; // cartesian only
    std::vector<double> r;
    std::vector<double> theta; // in [0, 2*pi)
    std::vector<unsigned char> valid;

    std::size_t size() const { return r.size(); }
    bool same_layout(const Grid& other) const;
    /// Radius of row `row` (polar grids).
    double row_radius(int row) const;

    static std::shared_ptr<const Grid> polar(double inner_radius, double outer_radius,
                                             double r_min, double r_max, int n_radii,
                                             int n_theta);
    static std::shared_ptr<const Grid> cartesian(double inner_radius, double outer_radius,
                                                 int pixels, double half_extent);
};

/// One scalar per grid point; invalid points hold NaN.
struct ScalarField {
    std::shared_ptr<const Grid> grid;
    std::vector<double> values;
};

/// Pearson correlation over points valid in both fields.
double correlation(const ScalarField& a, const ScalarField& b);

/// Root mean square over valid points.
double rms(const ScalarField& f);

} // namespace stator

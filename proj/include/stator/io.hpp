#pragma once

#include "stator/dynamics.hpp"
#include "stator/grid.hpp"
#include "stator/holography.hpp"
#include "stator/modal.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace stator {

/// Shortest round-trip decimal form, '.' separator, independent of locale.
std::string format_number(double v);

/// Writes via a temporary sibling file and a rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

/// 8-bit grey image.
struct Pgm {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels; // row-major
};

/// P5 bytes: "P5\n<w> <h>\n255\n" followed by raw pixels.
std::string encode_pgm(const Pgm& image);
Pgm decode_pgm(const std::string& bytes);

/// round(intensity * 255) on valid pixels; invalid pixels are written as 0.
Pgm to_pgm(const FringeImage& image);
/// Phase (-pi, pi] mapped linearly onto 0..255 via round((phi + pi) / (2 pi) * 255).
Pgm to_pgm(const PhaseMap& map);

/// Float32 little-endian dump preceded by a text header describing the grid;
/// invalid points are NaN.
std::string encode_field_dump(const ScalarField& field, const std::string& quantity);

struct FieldDump {
    std::string quantity;
    std::string kind;
    int width = 0;
    int height = 0;
    double extent_a = 0.0; // polar: r_min, cartesian: half extent
    double extent_b = 0.0; // polar: r_max, cartesian: 0
    std::vector<float> values;
};
FieldDump decode_field_dump(const std::string& bytes);

/// "n,radial_order,frequency_Hz,multiplicity" rows in basis order; a
/// degenerate cosine/sine pair is listed once with multiplicity 2.
std::string modes_csv(const ModalBasis& basis);
/// Plain-text dump of every radial profile (r, W, dW/dr per node).
std::string mode_profiles_text(const ModalBasis& basis);

/// "time_s,point_id,displacement_m" rows, grouped by time.
std::string probes_csv(const std::vector<double>& times, const std::vector<ProbeSeries>& series);

std::string read_file(const std::filesystem::path& path);

} // namespace stator

#include "stator/io.hpp"

#include "stator/error.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>
#include <sstream>

namespace stator {

std::string format_number(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot open " + tmp.string() + " for writing");
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        if (!out) throw Error("failed writing " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string encode_pgm(const Pgm& image) {
    std::string out = "P5\n" + std::to_string(image.width) + " " + std::to_string(image.height) + "\n255\n";
    out.append(reinterpret_cast<const char*>(image.pixels.data()), image.pixels.size());
    return out;
}

Pgm decode_pgm(const std::string& bytes) {
    std::istringstream in(bytes);
    std::string magic;
    Pgm img;
    int maxval = 0;
    in >> magic >> img.width >> img.height >> maxval;
    if (magic != "P5" || maxval != 255 || img.width <= 0 || img.height <= 0)
        throw Error("not an 8-bit P5 image");
    in.get();
    const std::size_t n = static_cast<std::size_t>(img.width) * img.height;
    img.pixels.resize(n);
    in.read(reinterpret_cast<char*>(img.pixels.data()), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in.gcount()) != n) throw Error("truncated P5 image");
    return img;
}

namespace {

std::uint8_t quantize(double unit) {
    const double v = std::round(unit * 255.0);
    return static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0));
}

} // namespace

Pgm to_pgm(const FringeImage& image) {
    const Grid& g = *image.grid;
    Pgm out{g.width, g.height, std::vector<std::uint8_t>(g.size(), 0)};
    for (std::size_t p = 0; p < g.size(); ++p)
        if (g.valid[p]) out.pixels[p] = quantize(image.intensity[p]);
    return out;
}

Pgm to_pgm(const PhaseMap& map) {
    const Grid& g = *map.grid;
    constexpr double pi = std::numbers::pi;
    Pgm out{g.width, g.height, std::vector<std::uint8_t>(g.size(), 0)};
    for (std::size_t p = 0; p < g.size(); ++p)
        if (g.valid[p]) out.pixels[p] = quantize((map.phase[p] + pi) / (2.0 * pi));
    return out;
}

std::string encode_field_dump(const ScalarField& field, const std::string& quantity) {
    static_assert(std::endian::native == std::endian::little, "dump writer assumes little-endian");
    const Grid& g = *field.grid;
    std::ostringstream head;
    head << "STATOR-FIELD 1\n";
    head << "quantity " << quantity << "\n";
    if (g.kind == GridKind::polar) {
        head << "kind polar\n";
        head << "width " << g.width << "\n" << "height " << g.height << "\n";
        head << "extent " << format_number(g.r_min) << " " << format_number(g.r_max) << "\n";
    } else {
        head << "kind cartesian\n";
        head << "width " << g.width << "\n" << "height " << g.height << "\n";
        head << "extent " << format_number(g.half_extent) << " 0\n";
    }
    head << "annulus " << format_number(g.inner_radius) << " " << format_number(g.outer_radius) << "\n";
    head << "dtype float32-le\n";
    head << "end\n";
    std::string out = head.str();
    for (double v : field.values) {
        const float f = static_cast<float>(v);
        char b[4];
        std::memcpy(b, &f, 4);
        out.append(b, 4);
    }
    return out;
}

FieldDump decode_field_dump(const std::string& bytes) {
    FieldDump d;
    std::size_t pos = 0;
    bool ended = false;
    bool first = true;
    while (pos < bytes.size()) {
        const std::size_t nl = bytes.find('\n', pos);
        if (nl == std::string::npos) break;
        std::istringstream line(bytes.substr(pos, nl - pos));
        pos = nl + 1;
        std::string key;
        line >> key;
        if (first) {
            if (key != "STATOR-FIELD") throw Error("not a field dump");
            first = false;
            continue;
        }
        if (key == "end") {
            ended = true;
            break;
        }
        if (key == "quantity") line >> d.quantity;
        else if (key == "kind") line >> d.kind;
        else if (key == "width") line >> d.width;
        else if (key == "height") line >> d.height;
        else if (key == "extent") line >> d.extent_a >> d.extent_b;
    }
    if (!ended) throw Error("field dump header not terminated");
    const std::size_t n = static_cast<std::size_t>(d.width) * d.height;
    if (bytes.size() - pos != 4 * n) throw Error("field dump payload size mismatch");
    d.values.resize(n);
    std::memcpy(d.values.data(), bytes.data() + pos, 4 * n);
    return d;
}

std::string modes_csv(const ModalBasis& basis) {
    std::string out = "n,radial_order,frequency_Hz,multiplicity\n";
    for (const auto& m : basis.modes) {
        int multiplicity = 1;
        if (m.n > 0) {
            const Mode* cos = basis.find(m.n, Orientation::cosine, m.radial_order);
            const Mode* sin = basis.find(m.n, Orientation::sine, m.radial_order);
            if (cos && sin && cos->frequency == sin->frequency) {
                if (m.orientation == Orientation::sine) continue; // listed with its partner
                multiplicity = 2;
            }
        }
        out += std::to_string(m.n) + "," + std::to_string(m.radial_order) + "," + format_number(m.frequency)
               + "," + std::to_string(multiplicity) + "\n";
    }
    return out;
}

std::string mode_profiles_text(const ModalBasis& basis) {
    std::ostringstream out;
    out << "# radial profiles, mass-normalized; columns: r_m W dWdr\n";
    out << "discretization radial_nodes=" << basis.discretization.radial_nodes
        << " quadrature_order=" << basis.discretization.quadrature_order << "\n";
    out << "provenance " << std::hex << basis.provenance << std::dec << "\n";
    for (const auto& m : basis.modes) {
        if (m.orientation == Orientation::sine) continue; // shares the cosine profile
        out << "mode n=" << m.n << " radial_order=" << m.radial_order
            << " frequency_Hz=" << format_number(m.frequency) << " nodes=" << m.profile.r.size() << "\n";
        for (std::size_t i = 0; i < m.profile.r.size(); ++i)
            out << format_number(m.profile.r[i]) << " " << format_number(m.profile.w[i]) << " "
                << format_number(m.profile.dw[i]) << "\n";
    }
    return out.str();
}

std::string probes_csv(const std::vector<double>& times, const std::vector<ProbeSeries>& series) {
    std::string out = "time_s,point_id,displacement_m\n";
    for (std::size_t i = 0; i < times.size(); ++i)
        for (const auto& s : series)
            out += format_number(times[i]) + "," + s.point.id + "," + format_number(s.displacement[i]) + "\n";
    return out;
}

} // namespace stator

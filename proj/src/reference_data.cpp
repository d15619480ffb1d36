#include "stator/reference_data.hpp"

#include "stator/error.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace stator {

const std::vector<ReferenceRow>& reference_frequencies() {
    static const std::vector<ReferenceRow> rows = {
        {"NPM1", {3.68, 6.77, 14.74, 23.57, 33.03, std::nullopt, std::nullopt}},
        {"NPM2", {3.97, 6.98, 14.50, 23.08, 31.86, 42.63, std::nullopt}},
        {"Simulation", {3.68, 6.10, 13.69, 22.36, 31.27, 41.15, 48.87}},
    };
    return rows;
}

const ReferenceRow& reference_row(const std::string& name) {
    for (const auto& r : reference_frequencies())
        if (r.name == name) return r;
    throw DomainError("unknown reference row " + name);
}

std::optional<double> deviation_percent(std::optional<double> model_khz,
                                        std::optional<double> reference_khz) {
    if (!model_khz || !reference_khz) return std::nullopt;
    return (*model_khz - *reference_khz) / *reference_khz * 100.0;
}

GapSummary reference_simulation_gap() {
    const ReferenceRow& sim = reference_row("Simulation");
    GapSummary g;
    for (const char* name : {"NPM1", "NPM2"}) {
        const ReferenceRow& row = reference_row(name);
        for (int k = 0; k < reference_mode_count; ++k) {
            const auto d = deviation_percent(sim.khz[k], row.khz[k]);
            if (d && std::abs(*d) > g.percent) {
                g.percent = std::abs(*d);
                g.mode = k + 1;
                g.row = name;
            }
        }
    }
    return g;
}

namespace {

std::string cell(std::optional<double> v, const char* fmt) {
    if (!v) return "-";
    char buf[32];
    std::snprintf(buf, sizeof buf, fmt, *v);
    return buf;
}

} // namespace

std::string comparison_report(const std::array<std::optional<double>, reference_mode_count>& model_khz) {
    std::ostringstream out;
    out << "reference dataset: " << reference_dataset_version << " (kHz)\n";
    out << "mode,model_kHz";
    for (const auto& row : reference_frequencies()) out << "," << row.name << "_kHz," << row.name << "_dev_pct";
    out << "\n";
    for (int k = 0; k < reference_mode_count; ++k) {
        out << "Md" << (k + 1) << "," << cell(model_khz[k], "%.2f");
        for (const auto& row : reference_frequencies())
            out << "," << cell(row.khz[k], "%.2f") << "," << cell(deviation_percent(model_khz[k], row.khz[k]), "%+.2f");
        out << "\n";
    }
    const GapSummary gap = reference_simulation_gap();
    char buf[128];
    std::snprintf(buf, sizeof buf, "reference simulation vs measurement: max gap %.3f%% (Md%d, %s)\n",
                  gap.percent, gap.mode, gap.row.c_str());
    out << buf;

    int flagged = 0;
    for (int k = 0; k < reference_mode_count; ++k)
        for (const auto& row : reference_frequencies()) {
            const auto d = deviation_percent(model_khz[k], row.khz[k]);
            if (d && std::abs(*d) > gap.percent) ++flagged;
        }
    out << "model deviations exceeding that gap: " << flagged << "\n";
    return out.str();
}

} // namespace stator

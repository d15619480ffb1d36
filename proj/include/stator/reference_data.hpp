#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace stator {

inline constexpr int reference_mode_count = 7;
inline constexpr const char* reference_dataset_version = "notched-plastic-stator/1";

/// Excitation frequencies of the notched plastic stator, in kHz, for modes
/// Md1..Md7. Missing measurements are empty.
struct ReferenceRow {
    std::string name;
    std::array<std::optional<double>, reference_mode_count> khz;
};

/// Rows NPM1, NPM2 (measured on two stators) and Simulation (3-D FEM).
const std::vector<ReferenceRow>& reference_frequencies();

const ReferenceRow& reference_row(const std::string& name);

/// (model - reference) / reference * 100, or empty when either is missing.
std::optional<double> deviation_percent(std::optional<double> model_khz,
                                        std::optional<double> reference_khz);

struct GapSummary {
    double percent = 0.0;
    int mode = 0; // 1-based
    std::string row;
};

/// Largest |Simulation - measured| / measured over the measured rows.
GapSummary reference_simulation_gap();

/// Plain-text comparison of model frequencies (kHz, index 0 = Md1) against
/// every reference row. Deviations are reported, never enforced.
std::string comparison_report(const std::array<std::optional<double>, reference_mode_count>& model_khz);

} // namespace stator

#pragma once

#include "stator/geometry.hpp"
#include "stator/modal.hpp"

#include <numbers>

namespace support {

inline constexpr double pi = std::numbers::pi;

// Default notched stator, calibrated so f(n=1) = 3680 Hz; solved once.
inline const stator::ModalBasis& calibrated_basis() {
    static const stator::ModalBasis basis = [] {
        const auto plate = stator::homogenize(stator::StatorGeometry{}, stator::Material{});
        const auto raw = stator::solve_modes(plate, 8, 2);
        const auto cal = stator::calibrate(plate, raw, {});
        return stator::solve_modes(cal.plate, 8, 2);
    }();
    return basis;
}

inline stator::EffectivePlate uniform_plate() {
    const double h = 4.02e-3;
    return stator::EffectivePlate::uniform(3e-3, 5e-3, 15e-3, stator::plate_bending_stiffness(3.2e9, 0.36, h),
                                           1270.0 * h, 0.36);
}

inline double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

} // namespace support

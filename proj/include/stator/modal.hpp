#pragma once

#include "stator/geometry.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace stator {

enum class Orientation { cosine, sine };

std::string to_string(Orientation o);

struct Discretization {
    int radial_nodes = 64;     // nodes on [fixture_radius, outer_radius]
    int quadrature_order = 6;  // Gauss points per element
};

/// Mass-normalized radial shape W(r) stored as Hermite nodal data (value and
/// slope). Evaluation between nodes is the cubic Hermite interpolant, i.e. the
/// finite-element solution itself.
struct RadialProfile {
    std::vector<double> r;
    std::vector<double> w;
    std::vector<double> dw;

    /// W(r); zero on the clamped region below the first node.
    double value(double radius) const;
    double slope(double radius) const;
};

struct Mode {
    int n = 0;
    Orientation orientation = Orientation::cosine;
    int radial_order = 0; // 0 = lowest radial family for this n
    double frequency = 0.0;
    double damping_ratio = 0.02;
    RadialProfile profile;
    double inner_radius = 0.0;
    double outer_radius = 0.0;
    // Weight of the (n+1) harmonic mixed into the circumferential shape; used
    // to emulate manufacturing asymmetry. Zero for an ideal axisymmetric plate.
    double harmonic_admixture = 0.0;

    double omega() const;
    /// Circumferential factor, normalized so its mean square over a circle is
    /// that of cos(n*theta).
    double angular(double theta) const;
};

/// Shape value W(r) * angular(theta). Throws DomainError outside the annulus.
double mode_shape_eval(const Mode& mode, double r, double theta);

struct ModalBasis {
    std::vector<Mode> modes; // ascending frequency, cosine before sine on ties
    Discretization discretization;
    std::uint64_t provenance = 0; // hash of the effective plate and discretization

    const Mode* find(int n, Orientation o, int radial_order = 0) const;
    /// Frequency of (n, radial_order); throws DomainError if absent.
    double frequency_of(int n, int radial_order = 0) const;
    double max_frequency() const;
    /// Subset of modes with frequency <= limit_hz.
    ModalBasis retain_below(double limit_hz) const;
};

/// Stiffness and mass matrices of the radial reduction for one harmonic.
/// DOFs per free node are (W, R*dW/dr) with R = outer radius; the node at
/// the fixture radius is clamped and eliminated.
struct AssembledSystem {
    int n = 0;
    Eigen::MatrixXd stiffness;
    Eigen::MatrixXd mass;
    std::vector<double> nodes; // includes the clamped node at index 0
    double slope_scale = 1.0;  // R
};

std::vector<double> radial_mesh(const EffectivePlate& plate, int node_count);

AssembledSystem assemble(const EffectivePlate& plate, int n, const Discretization& disc);

/// Harmonics n_min..n_max, lowest `modes_per_n` radial families each; n >= 1
/// entries come as cosine/sine pairs sharing one radial solve.
ModalBasis solve_modes(const EffectivePlate& plate, int n_max, int modes_per_n,
                       const Discretization& disc = {}, int n_min = 0);

/// Nodal DOF vector of a mode in the layout of `sys`.
Eigen::VectorXd dof_vector(const Mode& mode, const AssembledSystem& sys);

struct CalibrationTarget {
    int n = 1;
    double frequency = 3680.0; // Hz
};

struct CalibratedPlate {
    EffectivePlate plate;
    double stiffness_scale = 1.0;
};

/// Uniform D rescaling so the lowest radial mode of target.n hits the target
/// frequency: scale = (f_target / f_current)^2.
CalibratedPlate calibrate(const EffectivePlate& plate, const ModalBasis& basis,
                          const CalibrationTarget& target);

/// Same basis with every damping ratio replaced (or only harmonic `n`).
ModalBasis with_damping(ModalBasis basis, double damping_ratio, std::optional<int> n = {});

/// Emulates a manufacturing defect on harmonic n: splits the cosine/sine pair
/// by +-detuning/2 (relative) and mixes an (n+1) harmonic into both shapes.
ModalBasis perturb_asymmetry(const ModalBasis& basis, int n, double detuning,
                             double harmonic_admixture);

} // namespace stator

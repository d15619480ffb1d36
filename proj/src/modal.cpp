#include "stator/modal.hpp"

#include "stator/error.hpp"
#include "stator/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <numbers>
#include <sstream>

namespace stator {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

struct Hermite {
    std::array<double, 4> n{};
    std::array<double, 4> dn{};
    std::array<double, 4> d2n{};
};

// Cubic Hermite shape functions on an element of length h at local xi in
// [0, 1], with derivatives taken with respect to r.
Hermite hermite(double xi, double h) {
    const double x2 = xi * xi;
    const double x3 = x2 * xi;
    Hermite s;
    s.n = {1.0 - 3.0 * x2 + 2.0 * x3, h * (xi - 2.0 * x2 + x3), 3.0 * x2 - 2.0 * x3,
           h * (x3 - x2)};
    s.dn = {(-6.0 * xi + 6.0 * x2) / h, 1.0 - 4.0 * xi + 3.0 * x2, (6.0 * xi - 6.0 * x2) / h,
            3.0 * x2 - 2.0 * xi};
    s.d2n = {(-6.0 + 12.0 * xi) / (h * h), (-4.0 + 6.0 * xi) / h, (6.0 - 12.0 * xi) / (h * h),
             (6.0 * xi - 2.0) / h};
    return s;
}

std::uint64_t fnv1a(std::uint64_t h, const void* data, std::size_t size) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < size; ++i) {
        h ^= p[i];
        h *= 1099511628211ULL;
    }
    return h;
}

std::uint64_t provenance_hash(const EffectivePlate& plate, const Discretization& disc) {
    std::uint64_t h = 1469598103934665603ULL;
    auto mix = [&h](double v) { h = fnv1a(h, &v, sizeof v); };
    mix(plate.inner_radius);
    mix(plate.fixture_radius);
    mix(plate.outer_radius);
    mix(plate.poisson_ratio);
    for (const auto& s : plate.segments) {
        mix(s.r_begin);
        mix(s.r_end);
        mix(s.bending_stiffness);
        mix(s.areal_mass);
    }
    h = fnv1a(h, &disc.radial_nodes, sizeof disc.radial_nodes);
    h = fnv1a(h, &disc.quadrature_order, sizeof disc.quadrature_order);
    return h;
}

bool mode_less(const Mode& a, const Mode& b) {
    if (a.frequency != b.frequency) return a.frequency < b.frequency;
    if (a.n != b.n) return a.n < b.n;
    if (a.radial_order != b.radial_order) return a.radial_order < b.radial_order;
    return a.orientation == Orientation::cosine && b.orientation == Orientation::sine;
}

} // namespace

std::string to_string(Orientation o) { return o == Orientation::cosine ? "cos" : "sin"; }

double RadialProfile::value(double radius) const {
    if (r.empty() || radius <= r.front()) return 0.0;
    if (radius >= r.back()) return w.back();
    const auto it = std::upper_bound(r.begin(), r.end(), radius);
    const std::size_t e = static_cast<std::size_t>(it - r.begin()) - 1;
    const double h = r[e + 1] - r[e];
    const Hermite s = hermite((radius - r[e]) / h, h);
    return s.n[0] * w[e] + s.n[1] * dw[e] + s.n[2] * w[e + 1] + s.n[3] * dw[e + 1];
}

double RadialProfile::slope(double radius) const {
    if (r.empty() || radius <= r.front()) return 0.0;
    if (radius >= r.back()) return dw.back();
    const auto it = std::upper_bound(r.begin(), r.end(), radius);
    const std::size_t e = static_cast<std::size_t>(it - r.begin()) - 1;
    const double h = r[e + 1] - r[e];
    const Hermite s = hermite((radius - r[e]) / h, h);
    return s.dn[0] * w[e] + s.dn[1] * dw[e] + s.dn[2] * w[e + 1] + s.dn[3] * dw[e + 1];
}

double Mode::omega() const { return two_pi * frequency; }

double Mode::angular(double theta) const {
    const bool cosine = orientation == Orientation::cosine;
    const double base = cosine ? std::cos(n * theta) : std::sin(n * theta);
    if (harmonic_admixture == 0.0) return base;
    const double extra = cosine ? std::cos((n + 1) * theta) : std::sin((n + 1) * theta);
    return (base + harmonic_admixture * extra)
           / std::sqrt(1.0 + harmonic_admixture * harmonic_admixture);
}

double mode_shape_eval(const Mode& mode, double r, double theta) {
    if (!(r >= mode.inner_radius && r <= mode.outer_radius)) {
        std::ostringstream os;
        os << "mode_shape_eval: radius " << r << " outside annulus [" << mode.inner_radius
           << ", " << mode.outer_radius << "]";
        throw DomainError(os.str());
    }
    return mode.profile.value(r) * mode.angular(theta);
}

const Mode* ModalBasis::find(int n, Orientation o, int radial_order) const {
    for (const auto& m : modes)
        if (m.n == n && m.orientation == o && m.radial_order == radial_order) return &m;
    return nullptr;
}

double ModalBasis::frequency_of(int n, int radial_order) const {
    const Mode* m = find(n, Orientation::cosine, radial_order);
    if (!m) {
        std::ostringstream os;
        os << "mode n=" << n << " radial_order=" << radial_order << " absent from basis";
        throw DomainError(os.str());
    }
    return m->frequency;
}

double ModalBasis::max_frequency() const {
    double f = 0.0;
    for (const auto& m : modes) f = std::max(f, m.frequency);
    return f;
}

ModalBasis ModalBasis::retain_below(double limit_hz) const {
    ModalBasis out = *this;
    out.modes.clear();
    for (const auto& m : modes)
        if (m.frequency <= limit_hz) out.modes.push_back(m);
    return out;
}

std::vector<double> radial_mesh(const EffectivePlate& plate, int node_count) {
    if (node_count < 8) throw DiscretizationError("radial node count must be >= 8");
    std::vector<double> cuts{plate.fixture_radius};
    for (double b : plate.interior_breakpoints()) cuts.push_back(b);
    cuts.push_back(plate.outer_radius);

    const int segments = static_cast<int>(cuts.size()) - 1;
    const int elements = node_count - 1;
    if (elements < segments)
        throw DiscretizationError("radial node count too small for the plate segments");

    // Elements per segment proportional to segment length, at least one each.
    const double span = plate.outer_radius - plate.fixture_radius;
    std::vector<int> per(segments);
    int assigned = 0;
    for (int s = 0; s < segments; ++s) {
        per[s] = std::max(1, static_cast<int>(std::lround(elements * (cuts[s + 1] - cuts[s]) / span)));
        assigned += per[s];
    }
    // Absorb rounding into the longest segments.
    while (assigned != elements) {
        int pick = 0;
        for (int s = 1; s < segments; ++s)
            if ((cuts[s + 1] - cuts[s]) / per[s] > (cuts[pick + 1] - cuts[pick]) / per[pick]) pick = s;
        if (assigned > elements) {
            int shrink = -1;
            for (int s = 0; s < segments; ++s)
                if (per[s] > 1 && (shrink < 0 || per[s] > per[shrink])) shrink = s;
            --per[shrink];
            --assigned;
        } else {
            ++per[pick];
            ++assigned;
        }
    }

    std::vector<double> nodes{cuts.front()};
    for (int s = 0; s < segments; ++s) {
        for (int k = 1; k <= per[s]; ++k) {
            nodes.push_back(k == per[s] ? cuts[s + 1]
                                        : cuts[s] + (cuts[s + 1] - cuts[s]) * k / per[s]);
        }
    }
    return nodes;
}

AssembledSystem assemble(const EffectivePlate& plate, int n, const Discretization& disc) {
    if (n < 0) throw DomainError("assemble: harmonic n must be >= 0");
    plate.validate();

    AssembledSystem sys;
    sys.n = n;
    sys.nodes = radial_mesh(plate, disc.radial_nodes);
    sys.slope_scale = plate.outer_radius;

    const int node_count = static_cast<int>(sys.nodes.size());
    const int dofs = 2 * (node_count - 1);
    sys.stiffness = Eigen::MatrixXd::Zero(dofs, dofs);
    sys.mass = Eigen::MatrixXd::Zero(dofs, dofs);

    const double nu = plate.poisson_ratio;
    const double n2 = static_cast<double>(n) * n;
    const double angular = n == 0 ? two_pi : std::numbers::pi;
    const double R = sys.slope_scale;
    const GaussRule rule = gauss_legendre(disc.quadrature_order);

    for (int e = 0; e + 1 < node_count; ++e) {
        const double r0 = sys.nodes[e];
        const double h = sys.nodes[e + 1] - r0;
        const double mid = r0 + 0.5 * h;
        const double D = plate.bending_stiffness(mid);
        const double mu = plate.areal_mass(mid);

        Eigen::Matrix4d ke = Eigen::Matrix4d::Zero();
        Eigen::Matrix4d me = Eigen::Matrix4d::Zero();
        for (std::size_t q = 0; q < rule.points.size(); ++q) {
            const double r = r0 + rule.points[q] * h;
            const double wq = rule.weights[q] * h * r * angular;
            const Hermite s = hermite(rule.points[q], h);
            Eigen::Vector4d N, k_rr, k_tt, k_rt;
            for (int a = 0; a < 4; ++a) {
                // slope DOFs carry R*dW/dr
                const double scale = (a % 2 == 1) ? 1.0 / R : 1.0;
                N[a] = s.n[a] * scale;
                k_rr[a] = s.d2n[a] * scale;
                k_tt[a] = (s.dn[a] / r - n2 * s.n[a] / (r * r)) * scale;
                k_rt[a] = n * (s.dn[a] / r - s.n[a] / (r * r)) * scale;
            }
            ke += wq * D
                  * (k_rr * k_rr.transpose() + k_tt * k_tt.transpose()
                     + nu * (k_rr * k_tt.transpose() + k_tt * k_rr.transpose())
                     + 2.0 * (1.0 - nu) * k_rt * k_rt.transpose());
            me += wq * mu * N * N.transpose();
        }

        // Local DOFs 0,1 belong to node e, 2,3 to node e+1; node 0 is clamped.
        for (int a = 0; a < 4; ++a) {
            const int ga = 2 * (e + a / 2) + a % 2 - 2;
            if (ga < 0) continue;
            for (int b = 0; b < 4; ++b) {
                const int gb = 2 * (e + b / 2) + b % 2 - 2;
                if (gb < 0) continue;
                sys.stiffness(ga, gb) += ke(a, b);
                sys.mass(ga, gb) += me(a, b);
            }
        }
    }
    // Exact symmetry.
    sys.stiffness = 0.5 * (sys.stiffness + sys.stiffness.transpose()).eval();
    sys.mass = 0.5 * (sys.mass + sys.mass.transpose()).eval();

    Eigen::LLT<Eigen::MatrixXd> llt(sys.mass);
    if (llt.info() != Eigen::Success) {
        std::ostringstream os;
        os << "singular mass matrix for n=" << n << " at " << disc.radial_nodes << " nodes";
        throw DiscretizationError(os.str());
    }
    return sys;
}

Eigen::VectorXd dof_vector(const Mode& mode, const AssembledSystem& sys) {
    const int node_count = static_cast<int>(sys.nodes.size());
    Eigen::VectorXd v(2 * (node_count - 1));
    for (int i = 1; i < node_count; ++i) {
        v[2 * (i - 1)] = mode.profile.value(sys.nodes[i]);
        v[2 * (i - 1) + 1] = mode.profile.slope(sys.nodes[i]) * sys.slope_scale;
    }
    return v;
}

ModalBasis solve_modes(const EffectivePlate& plate, int n_max, int modes_per_n,
                       const Discretization& disc, int n_min) {
    if (n_min < 0 || n_max < n_min) throw DomainError("solve_modes: need 0 <= n_min <= n_max");
    if (modes_per_n < 1) throw DomainError("solve_modes: modes_per_n must be >= 1");

    ModalBasis basis;
    basis.discretization = disc;
    basis.provenance = provenance_hash(plate, disc);

    for (int n = n_min; n <= n_max; ++n) {
        const AssembledSystem sys = assemble(plate, n, disc);
        const int dofs = static_cast<int>(sys.mass.rows());
        if (modes_per_n > dofs) throw DiscretizationError("modes_per_n exceeds DOF count");

        Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(
            sys.stiffness, sys.mass, Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
        if (es.info() != Eigen::Success) {
            std::ostringstream os;
            os << "eigensolver did not converge for n=" << n << " at " << disc.radial_nodes
               << " nodes";
            throw NumericalError(os.str());
        }

        // The dense solve loses digits at the low end of the spectrum, and the
        // residual of a double vector is floored near eps * lambda_max / lambda.
        // Polish with shifted inverse iteration in extended precision.
        using MatrixL = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
        using VectorL = Eigen::Matrix<long double, Eigen::Dynamic, 1>;
        const MatrixL kl = sys.stiffness.cast<long double>();
        const MatrixL ml = sys.mass.cast<long double>();

        for (int k = 0; k < modes_per_n; ++k) {
            long double lambda = es.eigenvalues()[k];
            VectorL vl = es.eigenvectors().col(k).cast<long double>();
            {
                const long double shift = lambda * (1.0L - 1e-7L);
                const Eigen::PartialPivLU<MatrixL> lu(kl - shift * ml);
                for (int iter = 0; iter < 3; ++iter) {
                    vl = lu.solve(ml * vl);
                    vl /= std::sqrt(vl.dot(ml * vl));
                }
                lambda = vl.dot(kl * vl);
            }
            const VectorL kv = kl * vl;
            const double residual = static_cast<double>((kv - lambda * (ml * vl)).norm() / kv.norm());
            Eigen::VectorXd v = vl.cast<double>();
            if (!(lambda > 0.0) || !(residual < 1e-8)) {
                std::ostringstream os;
                os << "eigenpair " << k << " for n=" << n << " at " << disc.radial_nodes
                   << " nodes failed the residual check (" << residual << ")";
                throw NumericalError(os.str());
            }
            // Sign convention: positive deflection at the outer edge.
            if (v[dofs - 2] < 0.0) v = -v;

            Mode mode;
            mode.n = n;
            mode.radial_order = k;
            mode.frequency = static_cast<double>(std::sqrt(lambda)) / two_pi;
            mode.damping_ratio = plate.modal_damping_ratio;
            mode.inner_radius = plate.inner_radius;
            mode.outer_radius = plate.outer_radius;
            mode.profile.r = sys.nodes;
            mode.profile.w.assign(sys.nodes.size(), 0.0);
            mode.profile.dw.assign(sys.nodes.size(), 0.0);
            for (std::size_t i = 1; i < sys.nodes.size(); ++i) {
                mode.profile.w[i] = v[2 * (i - 1)];
                mode.profile.dw[i] = v[2 * (i - 1) + 1] / sys.slope_scale;
            }
            basis.modes.push_back(mode);
            if (n >= 1) {
                mode.orientation = Orientation::sine;
                basis.modes.push_back(std::move(mode));
            }
        }
    }
    std::stable_sort(basis.modes.begin(), basis.modes.end(), mode_less);
    return basis;
}

CalibratedPlate calibrate(const EffectivePlate& plate, const ModalBasis& basis,
                          const CalibrationTarget& target) {
    if (!(target.frequency > 0.0)) throw DomainError("calibrate: target frequency must be > 0");
    const double current = basis.frequency_of(target.n);
    const double ratio = target.frequency / current;
    CalibratedPlate out;
    out.stiffness_scale = ratio * ratio;
    out.plate = plate.with_scaled_stiffness(out.stiffness_scale);
    return out;
}

ModalBasis with_damping(ModalBasis basis, double damping_ratio, std::optional<int> n) {
    if (!(damping_ratio > 0.0 && damping_ratio < 1.0))
        throw DomainError("damping ratio must lie in (0, 1)");
    for (auto& m : basis.modes)
        if (!n || m.n == *n) m.damping_ratio = damping_ratio;
    return basis;
}

ModalBasis perturb_asymmetry(const ModalBasis& basis, int n, double detuning,
                             double harmonic_admixture) {
    if (n < 1) throw DomainError("perturb_asymmetry: n must be >= 1");
    if (!(std::abs(detuning) < 1.0)) throw DomainError("perturb_asymmetry: |detuning| must be < 1");
    ModalBasis out = basis;
    for (auto& m : out.modes) {
        if (m.n != n) continue;
        m.frequency *= m.orientation == Orientation::cosine ? 1.0 - 0.5 * detuning
                                                            : 1.0 + 0.5 * detuning;
        m.harmonic_admixture = harmonic_admixture;
    }
    std::stable_sort(out.modes.begin(), out.modes.end(), mode_less);
    return out;
}

} // namespace stator

#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

namespace tkv {

using cplx = std::complex<double>;

// Boundary conditions at both ends of the beam:
//   FullyDirichlet    u = 0 and y = 0
//   DirichletNeumann  u = 0 and y_x = 0  (shear angle free, zero-mean drift mode)
enum class BoundaryConditions { FullyDirichlet, DirichletNeumann };

// Physical constants of the coupled beam model. All must be positive.
struct BeamParameters {
    double rho1 = 1.0;  // axial mass density
    double rho2 = 1.0;  // rotational inertia density
    double k1 = 1.0;    // shear stiffness
    double k2 = 1.0;    // bending stiffness
    double length = 1.0;

    // Throws std::invalid_argument if any entry is non-positive or non-finite.
    void validate() const;

    // Largest characteristic wave speed, used for time-step limits.
    double max_wave_speed() const;

    // Equal-wave-speed configurations decay at best polynomially and the
    // speed mismatch enters through this difference.
    double impedance_mismatch() const { return rho2 / k2 - rho1 / k1; }
};

// Spatially varying damping coefficient D(x) acting on the angular velocity.
// Admissible profiles are piecewise-constant tables, smooth callables, or the
// identically-zero baseline. The pair (support_lo, support_hi) marks the open
// interval on which the profile claims a positive floor.
struct DampingProfile {
    enum class Kind { Zero, PiecewiseConstant, Smooth };

    struct Piece {
        double x_lo = 0.0;  // half-open cell (x_lo, x_hi]
        double x_hi = 0.0;
        double value = 0.0;
    };

    Kind kind = Kind::Zero;
    double support_lo = 0.0;  // alpha
    double support_hi = 0.0;  // beta
    double floor = 0.0;       // claimed lower bound on (alpha, beta)
    std::vector<Piece> pieces;              // PiecewiseConstant only
    std::function<double(double)> smooth;   // Smooth only

    double operator()(double x) const;

    static DampingProfile zero();
    // D = value on (x_lo, x_hi], zero elsewhere.
    static DampingProfile piecewise_constant(double value, double x_lo, double x_hi);
    // D = value on all of [0, L].
    static DampingProfile global_constant(double value, double L);
    static DampingProfile from_callable(std::function<double(double)> f,
                                        double support_lo, double support_hi,
                                        double floor);
};

// Outcome of checking a damping profile against the standing assumptions:
// non-negativity on [0, L], a strictly positive floor on the designated
// support interval, and in-range support edges. `violations` lists every
// failed clause; `passes` is true iff the list is empty.
struct ValidationReport {
    bool passes = false;
    bool zero_kind = false;           // conservative baseline, fails by design
    bool discontinuity_flag = false;  // jump strictly inside (alpha, beta)
    double min_on_support = 0.0;
    double min_global = 0.0;
    std::vector<std::string> violations;
};

// Complex-valued state sampled on the uniform node grid x_i = i*h, h = L/n.
// Components: axial displacement u, axial velocity v, shear angle y, angular
// velocity z. Each vector has n_cells + 1 entries (both end nodes included,
// whether or not a boundary condition pins them).
struct GridState {
    std::size_t n_cells = 0;
    double length = 1.0;
    BoundaryConditions bc = BoundaryConditions::FullyDirichlet;
    std::vector<cplx> u, v, y, z;

    static GridState zeros(std::size_t n_cells, double length, BoundaryConditions bc);
    std::size_t n_nodes() const { return n_cells + 1; }
    double dx() const { return length / static_cast<double>(n_cells); }
    bool shape_ok() const;
};

}  // namespace tkv

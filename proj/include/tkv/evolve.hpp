#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "tkv/banded.hpp"
#include "tkv/generator.hpp"
#include "tkv/types.hpp"

namespace tkv {

// Energy history of a simulation, sampled every `stride` steps (t = 0 and the
// final time are always included).
struct EnergyTrace {
    std::vector<double> times;
    std::vector<double> energies;
    double graph_norm0 = 0.0;     // graph norm of the initial state
    double max_mean_drift = 0.0;  // max |trapezoid mean of y or z| over samples
};

struct DecayFit {
    double p = 0.0;          // E ~ C * t^{-p} on the window
    double C = 0.0;
    double r2 = 0.0;         // linear fit quality in log-log coordinates
    double curvature = 0.0;  // quadratic coefficient in log-log (0 = power law)
    bool power_law = false;  // |curvature| below threshold
    std::size_t n_used = 0;
    bool truncated_zero_energy = false;  // fit restricted to E > 0 prefix
};

// One implicit-midpoint step: solves (I - dt/2 A) U+ = (I + dt/2 A) U with a
// banded LU kept across steps; refactorizes only when dt changes. Conserves
// the discrete energy exactly for D == 0 and dissipates it otherwise.
class MidpointStepper {
  public:
    MidpointStepper(const DiscreteGenerator& gen, double dt);
    void set_dt(double dt);  // refactorizes
    double dt() const { return dt_; }
    void step(std::vector<cplx>& x);  // in place, packed coordinates

  private:
    const DiscreteGenerator& gen_;
    double dt_ = 0.0;
    BandedMatrix forward_;        // I + dt/2 A
    std::unique_ptr<BandedLU> backward_;  // factorization of I - dt/2 A
    std::vector<cplx> rhs_;
};

// Accuracy-motivated default step for the implicit scheme.
double default_dt(const BeamParameters& params, std::size_t n_cells);

// Single convenience step on a grid state.
GridState step_midpoint(const DiscreteGenerator& gen, const GridState& state, double dt);

// Integrates up to t_final (last partial step shortened to land exactly).
// When the damping profile passes the hypothesis check, the energy samples
// are asserted nonincreasing within 1e-12 * E(0) per step; a violation throws
// (numerical failure). Initial-state admissibility violations also throw.
EnergyTrace simulate(const DiscreteGenerator& gen, const GridState& u0, double dt,
                     double t_final, std::size_t stride = 1);

// Least-squares power-law fit of the trace on the window [t_lo, t_hi].
// Requires >= 10 positive-energy samples in the window.
DecayFit fit_decay_exponent(const EnergyTrace& trace, double t_lo, double t_hi);

// Band-limited random initial data: v = sum a_n sin(n pi x / L) e^{i phi_n},
// z = sum a_n trig(n pi x / L) e^{i psi_n} with a_n = n^{amplitude_power},
// trig = cos for DirichletNeumann (zero trapezoid mean, exactly) and sin for
// FullyDirichlet; u = y = 0. Deterministic in the seed.
GridState make_modal_state(const BeamParameters& params, BoundaryConditions bc,
                           std::size_t n_cells, std::size_t n_max,
                           double amplitude_power, std::uint64_t seed);

}  // namespace tkv

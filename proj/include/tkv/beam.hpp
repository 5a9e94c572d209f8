#pragma once

#include <cstddef>
#include <vector>

#include "tkv/types.hpp"

namespace tkv {

class DiscreteGenerator;

// Checks whether the beam parameters are admissible. Throws on violation.
bool equal_wave_speeds(const BeamParameters& params, double rel_tol = 1e-12);

// Samples the damping profile against the standing assumptions:
//   (a) alpha in [0, L), beta in (alpha, L];
//   (b) D(x) >= 0 on all of [0, L];
//   (c) D(x) >= floor > 0 strictly inside (alpha, beta).
// Discontinuities strictly inside (alpha, beta) are accepted but flagged.
// The Zero kind always fails clause (c) and is flagged as the conservative
// baseline. Throws std::invalid_argument for n_samples < 16 or an empty
// support interval on a non-Zero profile.
ValidationReport validate_hypothesis(const DampingProfile& profile,
                                     const BeamParameters& params,
                                     std::size_t n_samples = 1024);

// Returns the list of violated state invariants (empty = admissible):
// u vanishes at both ends; y vanishes at both ends for FullyDirichlet;
// trapezoidal means of y and z vanish (relative to the max amplitude) for
// DirichletNeumann. The Neumann condition on y is enforced structurally by
// the generator's boundary closure, so it is not a data constraint here.
std::vector<std::string> state_violations(const GridState& state,
                                          double tol = 1e-10);

// Discrete energy (1/2)(rho1 ||v||^2 + rho2 ||z||^2 + k1 ||u_x + y||^2
// + k2 ||y_x||^2). Velocity terms use the trapezoid rule on nodes; strain
// terms use midpoint fluxes on cells, matching the generator's inner product
// exactly. Throws for n_cells < 4 (under-resolved).
double energy(const GridState& state, const BeamParameters& params);

// -integral of D |z_x|^2, with z_x as cell-midpoint differences and D sampled
// at cell midpoints. Always <= 0.
double dissipation_rate(const GridState& state, const DampingProfile& profile);

// sqrt(||U||^2 + ||A_h U||^2) in the discrete energy norm.
double graph_norm(const GridState& state, const DiscreteGenerator& gen);

}  // namespace tkv

#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include "tkv/banded.hpp"
#include "tkv/types.hpp"

namespace tkv {

// Finite-difference realization of the first-order beam generator
//   A (u, v, y, z) = (v, (k1/rho1)(u_x + y)_x, z,
//                     (1/rho2)((k2 y_x + D z_x)_x - k1 (u_x + y)))
// on a uniform grid, together with the discrete energy inner product.
//
// Discretization: midpoint fluxes on cells,
//   F_k = (u_{k+1} - u_k)/h + (y_k + y_{k+1})/2
//   G_k = k2 (y_{k+1} - y_k)/h + D_{k+1/2} (z_{k+1} - z_k)/h
// with interior rows as flux differences and, for DirichletNeumann, boundary
// z-rows closed by the natural half-cell flux balance (equivalent to a
// ghost-node reflection enforcing y_x = z_x = 0 at second order). This makes
// the discrete dissipation identity exact:
//   Re <A U, U> = -sum_k h D_{k+1/2} |(z_{k+1}-z_k)/h|^2.
//
// Unknowns are packed per node in component order (u, v, y, z), skipping
// components pinned by the boundary conditions; the packed operator is
// banded with bandwidth <= 7.
class DiscreteGenerator {
  public:
    // Throws for n_cells < 8 or a profile failing the hypothesis check —
    // unless allow_zero_profile permits the conservative D == 0 baseline.
    DiscreteGenerator(BeamParameters params, DampingProfile profile,
                      BoundaryConditions bc, std::size_t n_cells,
                      bool allow_zero_profile = false);

    std::size_t n_cells() const { return n_; }
    std::size_t dim() const { return dim_; }
    BoundaryConditions bc() const { return bc_; }
    const BeamParameters& params() const { return params_; }
    const DampingProfile& profile() const { return profile_; }
    const ValidationReport& profile_report() const { return report_; }
    double dx() const { return h_; }
    // D sampled at the n_cells cell midpoints.
    const std::vector<double>& midpoint_damping() const { return damping_mid_; }

    // --- GridState interface -------------------------------------------
    GridState apply(const GridState& state) const;
    // Energy inner product <a, b> (linear in a, conjugate in b);
    // <U, U> = 2 * energy(U).
    cplx inner(const GridState& a, const GridState& b) const;
    void pack(const GridState& state, cplx* out) const;
    GridState unpack(const cplx* x) const;

    // --- packed (solver) interface --------------------------------------
    void apply_packed(const cplx* x, cplx* out) const;  // out = A x
    void gram_packed(const cplx* x, cplx* out) const;   // out = G x
    cplx inner_packed(const cplx* x, const cplx* y) const;  // y^H G x
    double norm_packed(const cplx* x) const;
    // Project onto the zero-trapezoid-mean subspace of y and z (the quotient
    // built into the DirichletNeumann energy space). No-op for FullyDirichlet.
    void project_zero_mean(cplx* x) const;

    const BandedMatrix& action_matrix() const { return action_; }
    const BandedMatrix& gram_matrix() const { return gram_; }
    const BandedLU& gram_factorization() const;

    // sigma*I + scale*A as a banded matrix (time stepping and resolvent).
    BandedMatrix shifted_action(cplx sigma, cplx scale) const;

    // Packed index of each component at a node, or npos when pinned.
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);
    std::size_t index_u(std::size_t node) const { return iu_[node]; }
    std::size_t index_v(std::size_t node) const { return iv_[node]; }
    std::size_t index_y(std::size_t node) const { return iy_[node]; }
    std::size_t index_z(std::size_t node) const { return iz_[node]; }

  private:
    void build_index_maps();
    void assemble_action();
    void assemble_gram();

    BeamParameters params_;
    DampingProfile profile_;
    ValidationReport report_;
    BoundaryConditions bc_;
    std::size_t n_ = 0;
    double h_ = 0.0;
    std::size_t dim_ = 0;
    std::vector<double> damping_mid_;
    std::vector<double> node_weight_;  // trapezoid weights * h
    std::vector<std::size_t> iu_, iv_, iy_, iz_;
    BandedMatrix action_, gram_;
    mutable std::unique_ptr<BandedLU> gram_lu_;
};

}  // namespace tkv

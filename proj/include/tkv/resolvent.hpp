#pragma once

#include <cstdint>
#include <vector>

#include "tkv/generator.hpp"
#include "tkv/types.hpp"

namespace tkv::resolvent {

// Closed-form quasimode pair for the globally damped beam (DirichletNeumann):
// F = (0, sin(n pi x / L), 0, 0) and U with u = A_n sin, v = i lam_n A_n sin,
// y = B_n cos, z = i lam_n B_n cos, where lam_n = (n pi / L) sqrt(k1/rho1),
//   A_n = -(i n pi d0 / (k1 L)) sqrt(rho1/k1)
//         + (k2/k1)(rho2/k2 - rho1/k1) - rho1 L^2 / (k1 pi^2 n^2),
//   B_n = rho1 L / (k1 n pi).
// These make (i lam_n I - A) U = F exactly: C1 = 1, C2 = 0.
struct BlowupPair {
    long n = 0;
    double lambda_n = 0.0;
    cplx A_n, B_n;
    cplx C1, C2;       // closed-form coefficients, evaluated from the formulas
    GridState U, F;    // grid samples (DirichletNeumann layout)
    double norm_U = 0.0, norm_F = 0.0;  // discrete energy norms
};

// Throws when n_cells < 8 n (mode unresolved).
BlowupPair build_blowup_pair(long n, const BeamParameters& params, double d0,
                             std::size_t n_cells);

// log-log regression slope of ||U_n|| / ||F_n|| against lambda_n over n_list.
// Under-resolved entries are skipped (reported via skipped count).
struct BlowupScan {
    std::vector<double> lambda;
    std::vector<double> ratio;  // ||U||/||F||
    double slope = 0.0;
    std::size_t skipped = 0;
};
BlowupScan blowup_exponent(const std::vector<long>& n_list,
                           const BeamParameters& params, double d0,
                           std::size_t n_cells);

struct ResolventSample {
    double omega = 0.0;
    double norm = 0.0;  // largest singular value of (i omega I - A)^{-1}
    int iterations = 0;
    bool converged = false;
};

// Gram-weighted operator norm of the discrete resolvent at i*omega via power
// iteration on the inverse pair (two banded solves + two Gram applications
// per sweep). A singular shift is perturbed by 1e-8. DirichletNeumann
// iterates stay in the zero-mean subspace.
ResolventSample resolvent_norm_discrete(const DiscreteGenerator& gen, double omega,
                                        double tol = 1e-6, int max_iter = 500,
                                        std::uint64_t seed = 42);

struct ScanResult {
    std::vector<ResolventSample> samples;
    double slope = 0.0;      // log-log regression of norm vs omega
    double intercept = 0.0;
    bool diverging = true;   // false when every norm stays below 10
};

ScanResult resolvent_growth_scan(const DiscreteGenerator& gen,
                                 const std::vector<double>& omegas,
                                 double tol = 1e-6, int threads = 1,
                                 std::uint64_t seed = 42);

}  // namespace tkv::resolvent

#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <functional>
#include <vector>

#include "tkv/generator.hpp"
#include "tkv/types.hpp"

// Characteristic-determinant spectral machinery for the equal-wave-speed beam
// with damping supported on the right half (0 on (0, 1/2], k2 on (1/2, 1]).
// Eigenvalues are roots of a 4x4 transcendental determinant in the strip
// S = { -strip_width <= Re(lambda) <= 0 }.

namespace tkv::spectra {

struct SpectralConfig {
    double c = 1.0;            // coupling constant sqrt(k1/k2)
    double strip_width = 0.5;  // alpha_0 of the strip S
    double case_tol = 1e-9;    // classification tolerance at 2*pi multiples
};

// Coupling-constant trichotomy: 1 generic, 2 when c = 2(2k+1)pi, 3 when
// c = 4k pi (within case_tol). A c in the gray zone (case_tol, 100*case_tol]
// of a multiple of 2 pi throws unless case_override in {1,2,3} is given.
int case_label(const SpectralConfig& cfg, int case_override = 0);

// Unit-parameter beam and piecewise damping realizing this configuration:
// rho1 = k1 = 1, rho2 = k2 = 1/c^2, D = k2 on (1/2, 1], length 1.
struct ReferenceConfiguration {
    BeamParameters params;
    DampingProfile profile;
};
ReferenceConfiguration reference_configuration(const SpectralConfig& cfg);

struct Wavenumbers {
    cplx r1, r2, s1, s2;
};

// The four wavenumbers, sign-normalized to Re >= 0 (square roots taken with
// positive real part; purely imaginary lambda is nudged by -1e-12 to resolve
// the negative-real-radicand ambiguity). Throws for lambda == 0.
Wavenumbers wavenumbers(cplx lambda, const SpectralConfig& cfg);

// 4x4 characteristic matrix with the printed hyperbolic entries, evaluated at
// wavenumbers(lambda). Entries with cosh/sinh(s2/2) overflow once
// |lambda| ~ 1e6; callers needing large |lambda| must use char_det_scaled.
// Throws std::overflow_error when an entry is non-finite.
std::array<std::array<cplx, 4>, 4> char_matrix(cplx lambda, const SpectralConfig& cfg);

// Determinant of char_matrix by pivoted elimination (moderate |lambda| only).
cplx char_det_raw(cplx lambda, const SpectralConfig& cfg);

// The Gaussian-eliminated determinant: six g-weighted triple products of
// cosh/sinh(r1/2, r2/2, s1/2) plus the same block with flipped signs on the
// first three terms times e^{-s2}. Hyperbolic arguments are reduced modulo
// 2 pi i with a compensated subtraction and the coefficients are built from
// cancellation-free differences, so the evaluation stays accurate to machine
// precision throughout the strip for |Im lambda| up to ~1e5. The wavenumber
// branch follows the asymptotic continuation (r_j, s_1 ~ lambda), which flips
// the overall sign relative to the positive-real-part branch but leaves the
// zero set unchanged. Throws std::domain_error for |Re lambda| > 200.
cplx char_det_scaled(cplx lambda, const SpectralConfig& cfg);

// Leading term f0 = sinh(3 lambda/2) + sinh(lambda/2) cos(c/2), and its
// factored form 2 sinh(lambda/2)(cosh lambda + cos^2(c/4)).
cplx f0_series(cplx lambda, const SpectralConfig& cfg);
cplx f0_factored(cplx lambda, const SpectralConfig& cfg);

// Asymptotic determinant F = f0 + f1/sqrt(lambda) + f2/(8 lambda) + ... +
// f5/(128 lambda^{5/2}); agrees with char_det_scaled up to O(lambda^{-3}).
// The last coefficients follow the series derivation: the trailing factors of
// f4 and f5 are cosh(lambda/2) (the printed cos(c/2) there does not produce
// the stated remainder order).
cplx asymptotic_F(cplx lambda, const SpectralConfig& cfg);

struct EigenvaluePrediction {
    int branch = 1;           // 1 or 2
    long n = 0;               // nonzero mode index (sign = half-plane)
    int case_label = 1;       // 1 | 2 | 3
    cplx lambda;              // predicted eigenvalue
    cplx mu;                  // unperturbed center (f0 root)
    cplx epsilon;             // lambda - mu, the printed correction
    double correction_order = -1.0;  // exponent of the first neglected term
    bool in_regime = true;           // |n| >= n_min
};

inline constexpr long kAsymptoticNMin = 5;

// Printed closed-form predictions, dispatched on the case of c.
EigenvaluePrediction predict_branch(int branch, long n, const SpectralConfig& cfg,
                                    int case_override = 0);

struct Box {
    cplx center;
    double half_re = 0.0;
    double half_im = 0.0;
};

// Winding number of f around 0 along the box boundary (adaptive phase
// tracking, max jump pi/2 per segment). Retries with a slightly shrunken box
// when the contour approaches a zero; throws after 5 failed retries.
int count_zeros(const Box& box, const SpectralConfig& cfg);
int count_zeros(const Box& box, const std::function<cplx(cplx)>& f);

struct RootRecord {
    int branch = 0;
    long n = 0;
    cplx lambda;            // converged root
    cplx prediction;        // seed from predict_branch
    double residual = 0.0;  // |det| at the root
    int newton_iters = 0;
    Box box;                // isolation rectangle
    int multiplicity = 0;   // argument-principle count in box (1 = simple)
    bool box_verified = false;
    bool converged = false;
    bool in_regime = true;
};

double root_tolerance(cplx lambda);  // 1e-9 * (1 + |lambda|)

// Newton refinement (central-difference derivative, step 1e-6 (1+|lambda|))
// seeded at the branch prediction for each n in [n_lo, n_hi]; a root is
// accepted when |det| <= root_tolerance and the enclosing box of half-width
// |n|^{-1/4} winds exactly once. Failed Newton runs fall back to a coarse
// box scan; records that still fail are returned with converged = false.
std::vector<RootRecord> find_roots(long n_lo, long n_hi, int branch,
                                   const SpectralConfig& cfg, int threads = 1,
                                   bool verify_boxes = true,
                                   int case_override = 0);

struct ProbeResult {
    cplx shift;
    cplx eigenvalue;
    int iterations = 0;
    bool converged = false;
    double residual = 0.0;  // ||A v - eigenvalue v|| in the energy norm
};

// Shifted inverse iteration on the discrete generator, one result per shift.
// DirichletNeumann iterates are projected onto the zero-mean subspace.
std::vector<ProbeResult> discrete_spectrum_probe(const DiscreteGenerator& gen,
                                                 const std::vector<cplx>& shifts,
                                                 double tol = 1e-12,
                                                 int max_iter = 200,
                                                 std::uint64_t seed = 42);

}  // namespace tkv::spectra

#include "tkv/spectra.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <memory>
#include <stdexcept>
#include <thread>

#include "tkv/banded.hpp"
#include "tkv/rng.hpp"

namespace tkv::spectra {

namespace {

constexpr double kPi = 3.141592653589793;
// double-double split of 2*pi for compensated argument reduction
constexpr double kTwoPiHi = 6.283185307179586;
constexpr double kTwoPiLo = 2.4492935982947064e-16;

// lambda = 2 pi i m + mu with |Im mu| <= pi, computed without cancellation.
struct Reduced {
    long long m;
    cplx mu;
};

Reduced reduce_mu(cplx lambda) {
    const double im = lambda.imag();
    const double md = std::nearbyint(im / kTwoPiHi);
    const long long m = static_cast<long long>(md);
    double res = std::fma(-md, kTwoPiHi, im);
    res = std::fma(-md, kTwoPiLo, res);
    return {m, cplx{lambda.real(), res}};
}

cplx sqrt_pp(cplx z) { return std::sqrt(z); }  // principal, Re >= 0

// Asymptotic-branch pieces: r_j = lambda + q_j, s1 = lambda + o3, s2
// principal. Cancellation-free, valid for lambda away from 0.
struct StableParts {
    cplx q1, q2, o3, s2, Q, p;
};

StableParts stable_parts(cplx lam, double c) {
    const cplx ic{0.0, c};
    StableParts sp;
    sp.q1 = ic / (1.0 + sqrt_pp(1.0 + ic / lam));
    sp.q2 = -ic / (1.0 + sqrt_pp(1.0 - ic / lam));
    const cplx lam3 = lam * lam * lam;
    sp.Q = sqrt_pp(1.0 - 4.0 * c * c / lam3 - 4.0 * c * c / (lam3 * lam));
    const cplx t = -2.0 * c * c / (lam3 * (1.0 + sp.Q));
    const cplx delta = t / (1.0 + sqrt_pp(1.0 + t));
    sp.o3 = lam * delta;
    sp.p = 2.0 * c * c / (lam * (1.0 + sp.Q));  // lambda^2 - s1^2
    sp.s2 = sqrt_pp(lam * lam / (lam + 1.0) + sp.p);
    return sp;
}

cplx flip_to_right_half(cplx w) {
    return (w.real() < 0.0) ? -w : w;
}

}  // namespace

int case_label(const SpectralConfig& cfg, int case_override) {
    if (case_override != 0) {
        if (case_override < 1 || case_override > 3)
            throw std::invalid_argument("case_label: override must be 1, 2 or 3");
        return case_override;
    }
    if (!(cfg.c > 0.0)) throw std::invalid_argument("case_label: c must be positive");
    const double m = std::nearbyint(cfg.c / kTwoPiHi);
    if (m < 1.0) return 1;
    const double dist = std::abs(std::fma(-m, kTwoPiHi, cfg.c) - m * kTwoPiLo);
    if (dist <= cfg.case_tol)
        return (static_cast<long long>(m) % 2 != 0) ? 2 : 3;
    if (dist <= 100.0 * cfg.case_tol)
        throw std::invalid_argument(
            "case_label: c is ambiguously close to a multiple of 2*pi; pass an "
            "explicit case override");
    return 1;
}

ReferenceConfiguration reference_configuration(const SpectralConfig& cfg) {
    if (!(cfg.c > 0.0))
        throw std::invalid_argument("reference_configuration: c must be positive");
    ReferenceConfiguration rc;
    rc.params.rho1 = 1.0;
    rc.params.k1 = 1.0;
    rc.params.k2 = 1.0 / (cfg.c * cfg.c);
    rc.params.rho2 = rc.params.k2;  // equal wave speeds
    rc.params.length = 1.0;
    rc.profile = DampingProfile::piecewise_constant(rc.params.k2, 0.5, 1.0);
    return rc;
}

Wavenumbers wavenumbers(cplx lambda, const SpectralConfig& cfg) {
    if (lambda == cplx{0.0, 0.0})
        throw std::invalid_argument("wavenumbers: lambda must be nonzero");
    if (lambda.real() == 0.0) lambda -= 1e-12;  // negative-real radicand rule
    const StableParts sp = stable_parts(lambda, cfg.c);
    Wavenumbers w;
    w.r1 = flip_to_right_half(lambda + sp.q1);
    w.r2 = flip_to_right_half(lambda + sp.q2);
    w.s1 = flip_to_right_half(lambda + sp.o3);
    w.s2 = sp.s2;  // principal already
    return w;
}

std::array<std::array<cplx, 4>, 4> char_matrix(cplx lambda, const SpectralConfig& cfg) {
    const Wavenumbers w = wavenumbers(lambda, cfg);
    const cplx ic{0.0, cfg.c};
    const cplx lam2 = lambda * lambda;
    const cplx lam3 = lam2 * lambda;
    const std::array<cplx, 4> k = {w.r1, w.r2, w.s1, w.s2};
    std::array<std::array<cplx, 4>, 4> M;
    for (int j = 0; j < 4; ++j) {
        const cplx kj = k[j];
        const cplx sh = std::sinh(0.5 * kj), ch = std::cosh(0.5 * kj);
        const bool s_col = (j >= 2);
        M[0][j] = s_col ? -sh : sh;
        M[1][j] = kj / (ic * lam2) * ch;
        M[2][j] = s_col ? (lam3 - (lambda + 1.0) * kj * kj) * sh : kj * kj * sh;
        M[3][j] = ch / kj;
    }
    for (const auto& row : M)
        for (const cplx& e : row)
            if (!std::isfinite(e.real()) || !std::isfinite(e.imag()))
                throw std::overflow_error(
                    "char_matrix: hyperbolic entry overflowed; use char_det_scaled");
    return M;
}

cplx char_det_raw(cplx lambda, const SpectralConfig& cfg) {
    auto M = char_matrix(lambda, cfg);
    // pivoted Gaussian elimination on the 4x4
    cplx det{1.0, 0.0};
    for (int c0 = 0; c0 < 4; ++c0) {
        int piv = c0;
        for (int r = c0 + 1; r < 4; ++r)
            if (std::abs(M[r][c0]) > std::abs(M[piv][c0])) piv = r;
        if (piv != c0) {
            std::swap(M[piv], M[c0]);
            det = -det;
        }
        const cplx d = M[c0][c0];
        if (d == cplx{0.0, 0.0}) return {0.0, 0.0};
        det *= d;
        for (int r = c0 + 1; r < 4; ++r) {
            const cplx f = M[r][c0] / d;
            for (int cc = c0; cc < 4; ++cc) M[r][cc] -= f * M[c0][cc];
        }
    }
    return det;
}

cplx char_det_scaled(cplx lambda, const SpectralConfig& cfg) {
    if (lambda == cplx{0.0, 0.0})
        throw std::invalid_argument("char_det_scaled: lambda must be nonzero");
    if (std::abs(lambda.real()) > 200.0)
        throw std::domain_error("char_det_scaled: evaluation limited to the strip");
    const double c = cfg.c;
    const auto [m, mu] = reduce_mu(lambda);
    const StableParts sp = stable_parts(lambda, c);
    const cplx r1 = lambda + sp.q1, r2 = lambda + sp.q2, s1 = lambda + sp.o3;
    const cplx s2 = sp.s2;

    // reduced half-arguments: r_j/2 = m pi i + (mu + q_j)/2, and sinh/cosh
    // pick up (-1)^m; three factors per term give a global (-1)^m.
    const cplx w1 = 0.5 * (mu + sp.q1);
    const cplx w2 = 0.5 * (mu + sp.q2);
    const cplx w3 = 0.5 * (mu + sp.o3);
    const cplx C1 = std::cosh(w1), S1 = std::sinh(w1);
    const cplx C2 = std::cosh(w2), S2 = std::sinh(w2);
    const cplx C3 = std::cosh(w3), S3 = std::sinh(w3);
    const double sgn = (m & 1LL) ? -1.0 : 1.0;

    const cplx ic{0.0, c};
    const cplx lam2 = lambda * lambda;
    const cplx lam3 = lam2 * lambda;
    // cancellation-free difference blocks
    const cplx d_r = 2.0 * ic * lambda;               // r1^2 - r2^2
    const cplx d_s = lam3 * sp.Q / (lambda + 1.0);    // s1^2 - s2^2
    const cplx p = sp.p;                              // lambda^2 - s1^2
    const cplx iclam = ic * lambda;
    const cplx r2s1 = -iclam + p;                     // r2^2 - s1^2
    const cplx r1s1 = iclam + p;                      // r1^2 - s1^2
    const cplx elastic = lam3 / (lambda + 1.0);       // lambda^2 - s2^2 core
    const cplx r1s2 = elastic + iclam - p;            // r1^2 - s2^2
    const cplx r2s2 = elastic - iclam - p;            // r2^2 - s2^2
    const cplx ee = (lambda + 1.0) * p;
    const cplx e2_1 = -lam3 - iclam + ee;  // (lam+1)s2^2 - lam^3 - r1^2
    const cplx e2_2 = -lam3 + iclam + ee;  // (lam+1)s2^2 - lam^3 - r2^2
    const cplx e1_2 = iclam - ee;          // (lam+1)s1^2 - lam^3 - r2^2
    const cplx e1_1 = -iclam - ee;         // (lam+1)s1^2 - lam^3 - r1^2

    const cplx g1 = (lambda + 1.0) * d_r * d_s / (ic * r1 * r2 * lam2);
    const cplx g2 = r2s1 * e2_1 / (ic * s1 * r2 * lam2);
    const cplx g3 = -r1s1 * e2_2 / (ic * r1 * s1 * lam2);
    const cplx g4 = d_r * d_s / (ic * s1 * s2 * lam2);
    const cplx g5 = r1s2 * e1_2 / (ic * s2 * r1 * lam2);
    const cplx g6 = -r2s2 * e1_1 / (ic * r2 * s2 * lam2);

    const cplx t1 = g1 * C1 * C2 * S3;
    const cplx t2 = g2 * S1 * C2 * C3;
    const cplx t3 = g3 * C1 * S2 * C3;
    const cplx t4 = g4 * S1 * S2 * C3;
    const cplx t5 = g5 * C1 * S2 * S3;
    const cplx t6 = g6 * S1 * C2 * S3;
    const cplx direct = t1 + t2 + t3 + t4 + t5 + t6;
    const cplx block = -t1 - t2 - t3 + t4 + t5 + t6;
    return sgn * (direct + block * std::exp(-s2));
}

cplx f0_series(cplx lambda, const SpectralConfig& cfg) {
    const auto [m, mu] = reduce_mu(lambda);
    const double sgn = (m & 1LL) ? -1.0 : 1.0;
    return sgn * (std::sinh(1.5 * mu) + std::sinh(0.5 * mu) * std::cos(0.5 * cfg.c));
}

cplx f0_factored(cplx lambda, const SpectralConfig& cfg) {
    const auto [m, mu] = reduce_mu(lambda);
    const double sgn = (m & 1LL) ? -1.0 : 1.0;
    const double cq = std::cos(0.25 * cfg.c);
    return sgn * 2.0 * std::sinh(0.5 * mu) * (std::cosh(mu) + cq * cq);
}

cplx asymptotic_F(cplx lambda, const SpectralConfig& cfg) {
    const double c = cfg.c;
    const auto [m, mu] = reduce_mu(lambda);
    const double sgn = (m & 1LL) ? -1.0 : 1.0;
    const cplx S3h = std::sinh(1.5 * mu), C3h = std::cosh(1.5 * mu);
    const cplx S1h = std::sinh(0.5 * mu), C1h = std::cosh(0.5 * mu);
    const double ch = std::cos(0.5 * c), sh = std::sin(0.5 * c);
    const double c2 = c * c;

    const cplx f0 = S3h + S1h * ch;
    const cplx f1 = C3h - C1h * ch;
    const cplx f2 = c2 * C3h - 4.0 * c * C1h * sh;
    const cplx f3 = c2 * S3h - 4.0 * C3h + 12.0 * c * S1h * sh + 4.0 * C1h * ch;
    const cplx f4 = c2 * (c2 - 56.0) * S3h - 32.0 * c2 * C3h +
                    8.0 * c2 * (c * sh - 8.0 * ch + 1.0) * S1h -
                    32.0 * c * (8.0 * sh + c * ch) * C1h;
    const cplx f5 = -40.0 * c2 * S3h + (c2 * c2 - 88.0 * c2 + 48.0) * C3h +
                    32.0 * c * (5.0 * sh + c * ch) * S1h -
                    (8.0 * c2 * c * sh - 16.0 * (4.0 * c2 - 3.0) * ch - 24.0 * c2) * C1h;

    const cplx rt = std::sqrt(lambda);
    return sgn * (f0 + f1 / rt + f2 / (8.0 * lambda) + f3 / (8.0 * lambda * rt) +
                  f4 / (128.0 * lambda * lambda) + f5 / (128.0 * lambda * lambda * rt));
}

EigenvaluePrediction predict_branch(int branch, long n, const SpectralConfig& cfg,
                                    int case_override) {
    if (branch != 1 && branch != 2)
        throw std::invalid_argument("predict_branch: branch must be 1 or 2");
    if (n == 0) throw std::invalid_argument("predict_branch: n must be nonzero");
    if (n < 0) {
        // The closed forms are stated for the upper half-plane; the lower
        // family is its mirror (the determinant has real symbol, so the
        // spectrum is conjugation-symmetric).
        EigenvaluePrediction pred = predict_branch(branch, -n, cfg, case_override);
        pred.n = n;
        pred.lambda = std::conj(pred.lambda);
        pred.mu = std::conj(pred.mu);
        pred.epsilon = std::conj(pred.epsilon);
        return pred;
    }
    EigenvaluePrediction pred;
    pred.branch = branch;
    pred.n = n;
    pred.case_label = case_label(cfg, case_override);
    pred.in_regime = std::labs(n) >= kAsymptoticNMin;

    const double c = cfg.c;
    const double sgn = (n > 0) ? 1.0 : -1.0;
    const double an = static_cast<double>(std::labs(n));
    const double nd = static_cast<double>(n);
    const cplx base{0.0, 2.0 * kPi * nd};
    const cplx one_minus_isgn{1.0, -sgn};

    switch (pred.case_label) {
        case 1: {
            if (branch == 1) {
                const double s4 = std::sin(0.25 * c);
                pred.mu = base;
                pred.epsilon = -2.0 * one_minus_isgn * s4 * s4 /
                               ((3.0 + std::cos(0.5 * c)) * std::sqrt(kPi * an));
                pred.correction_order = -1.0;
            } else {
                const double c4 = std::cos(0.25 * c);
                const double zeta = std::acos(c4 * c4);
                pred.mu = base + cplx{0.0, kPi + zeta};
                pred.epsilon = -one_minus_isgn * c4 * c4 /
                               ((1.0 + c4 * c4) * std::sqrt(kPi * an));
                pred.correction_order = -1.0;
            }
            break;
        }
        case 2: {
            if (branch == 1) {
                pred.mu = base;
                pred.epsilon = -one_minus_isgn / std::sqrt(kPi * an);
                pred.correction_order = -1.0;
            } else {
                pred.mu = base + cplx{0.0, 1.5 * kPi};
                pred.epsilon = cplx{0.0, c * c / (32.0 * kPi * nd)} -
                               cplx{8.0, 3.0 * kPi - 2.0} * c * c /
                                   (128.0 * kPi * kPi * nd * nd);
                pred.correction_order = -2.5;
            }
            break;
        }
        case 3: {
            if (branch == 1) {
                pred.mu = base;
                pred.epsilon = cplx{0.0, c * c / (32.0 * kPi * nd)} -
                               cplx{c * c / (16.0 * kPi * kPi * nd * nd), 0.0};
                pred.correction_order = -2.5;
            } else {
                pred.mu = base + cplx{0.0, kPi};
                pred.epsilon = cplx{0.0, c * c / (32.0 * kPi * nd)} -
                               cplx{4.0, kPi} * c * c / (64.0 * kPi * kPi * nd * nd);
                pred.correction_order = -2.5;
            }
            break;
        }
    }
    pred.lambda = pred.mu + pred.epsilon;
    return pred;
}

double root_tolerance(cplx lambda) { return 1e-9 * (1.0 + std::abs(lambda)); }

namespace {

// phase-tracked winding of f along the segment [a, b]; subdivides until each
// jump is below pi/2. Returns accumulated phase change; records |f| extremes.
struct ContourWalk {
    const std::function<cplx(cplx)>& f;
    double min_abs = 1e300;
    double max_abs = 0.0;
    int evals = 0;

    double segment(cplx a, cplx b, cplx fa, cplx fb, int depth) {
        // Step taken modulo pi (the half-phase of f^2): the raw determinant
        // is odd in each wavenumber, so a square root switching branch
        // between samples multiplies it by -1. Folding the step out of
        // (-pi, pi] into (-pi/2, pi/2] ignores that sign jump, and for a
        // continuous integrand it agrees with the ordinary winding once
        // subdivision has made the true steps small.
        double da = std::arg(fb / fa);
        if (da > 0.5 * kPi)
            da -= kPi;
        else if (da < -0.5 * kPi)
            da += kPi;
        if (std::abs(da) <= 0.25 * kPi || depth >= 28) return da;
        const cplx mid = 0.5 * (a + b);
        const cplx fm = eval(mid);
        return segment(a, mid, fa, fm, depth + 1) + segment(mid, b, fm, fb, depth + 1);
    }
    cplx eval(cplx z) {
        ++evals;
        const cplx v = f(z);
        const double av = std::abs(v);
        min_abs = std::min(min_abs, av);
        max_abs = std::max(max_abs, av);
        return v;
    }
};

int winding_once(const Box& box, const std::function<cplx(cplx)>& f, bool& reliable) {
    const int per_side = 16;
    std::vector<cplx> pts;
    pts.reserve(4 * per_side + 1);
    const cplx c = box.center;
    const double hx = box.half_re, hy = box.half_im;
    const cplx corners[5] = {c + cplx{hx, hy}, c + cplx{-hx, hy}, c + cplx{-hx, -hy},
                             c + cplx{hx, -hy}, c + cplx{hx, hy}};
    for (int side = 0; side < 4; ++side)
        for (int k = 0; k < per_side; ++k) {
            const double t = static_cast<double>(k) / per_side;
            pts.push_back(corners[side] + t * (corners[side + 1] - corners[side]));
        }
    pts.push_back(corners[4]);

    ContourWalk walk{f};
    std::vector<cplx> fv(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) fv[i] = walk.eval(pts[i]);
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i)
        total += walk.segment(pts[i], pts[i + 1], fv[i], fv[i + 1], 0);
    reliable = (walk.min_abs > 1e-9 * walk.max_abs) && (walk.max_abs > 0.0);
    return static_cast<int>(std::lround(total / (2.0 * kPi)));
}

}  // namespace

int count_zeros(const Box& box, const std::function<cplx(cplx)>& f) {
    Box b = box;
    for (int attempt = 0; attempt < 5; ++attempt) {
        bool reliable = false;
        const int w = winding_once(b, f, reliable);
        if (reliable) return w;
        b.half_re *= 0.93;  // nudge the contour off the suspected zero
        b.half_im *= 0.97;
        b.center += cplx{0.0, 0.011 * box.half_im};
    }
    throw std::runtime_error("count_zeros: contour repeatedly passes near a zero");
}

int count_zeros(const Box& box, const SpectralConfig& cfg) {
    return count_zeros(box, [&cfg](cplx z) { return char_det_scaled(z, cfg); });
}

namespace {

RootRecord refine_root(int branch, long n, const SpectralConfig& cfg, bool verify_box,
                       int case_override) {
    RootRecord rec;
    rec.branch = branch;
    rec.n = n;
    const EigenvaluePrediction pred = predict_branch(branch, n, cfg, case_override);
    rec.prediction = pred.lambda;
    rec.in_regime = pred.in_regime;

    auto det = [&cfg](cplx z) { return char_det_scaled(z, cfg); };
    auto newton = [&](cplx lam, int itmax, int& iters) {
        for (int it = 0; it < itmax; ++it) {
            iters = it + 1;
            const cplx fv = det(lam);
            const double h = 1e-6 * (1.0 + std::abs(lam));
            const cplx fp = (det(lam + h) - det(lam - h)) / (2.0 * h);
            if (fp == cplx{0.0, 0.0}) break;
            const cplx d = fv / fp;
            lam -= d;
            if (std::abs(d) < 1e-13 * (1.0 + std::abs(lam))) break;
        }
        return lam;
    };

    cplx root = newton(pred.lambda, 40, rec.newton_iters);
    double res = std::abs(det(root));
    const double half = std::pow(static_cast<double>(std::labs(n)), -0.25);
    rec.box = Box{pred.mu, half, half};

    auto inside = [&](cplx z) {
        return std::abs(z.real() - rec.box.center.real()) <= rec.box.half_re &&
               std::abs(z.imag() - rec.box.center.imag()) <= rec.box.half_im;
    };

    if (!(res <= root_tolerance(root)) || !inside(root)) {
        // coarse |det| scan in the box, then retry Newton
        cplx best = pred.lambda;
        double best_abs = 1e300;
        for (int a = -4; a <= 4; ++a)
            for (int b = -4; b <= 4; ++b) {
                const cplx z = rec.box.center + cplx{0.25 * a * rec.box.half_re,
                                                     0.25 * b * rec.box.half_im};
                const double v = std::abs(det(z));
                if (v < best_abs) {
                    best_abs = v;
                    best = z;
                }
            }
        int extra = 0;
        root = newton(best, 40, extra);
        rec.newton_iters += extra;
        res = std::abs(det(root));
    }

    rec.lambda = root;
    rec.residual = res;
    rec.converged = (res <= root_tolerance(root)) && inside(root);
    if (rec.converged && verify_box) {
        try {
            rec.multiplicity = count_zeros(rec.box, cfg);
            rec.box_verified = (rec.multiplicity == 1);
        } catch (const std::runtime_error&) {
            rec.box_verified = false;
        }
    }
    return rec;
}

}  // namespace

std::vector<RootRecord> find_roots(long n_lo, long n_hi, int branch,
                                   const SpectralConfig& cfg, int threads,
                                   bool verify_boxes, int case_override) {
    if (n_hi < n_lo) throw std::invalid_argument("find_roots: empty n range");
    if (n_lo <= 0 && n_hi >= 0)
        throw std::invalid_argument("find_roots: range must not contain n = 0");
    const std::size_t count = static_cast<std::size_t>(n_hi - n_lo + 1);
    std::vector<RootRecord> out(count);
    const int nt = std::max(1, std::min<int>(threads, static_cast<int>(count)));
    std::vector<std::thread> pool;
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t k = next.fetch_add(1);
            if (k >= count) return;
            out[k] = refine_root(branch, n_lo + static_cast<long>(k), cfg,
                                 verify_boxes, case_override);
        }
    };
    if (nt == 1) {
        worker();
    } else {
        pool.reserve(nt);
        for (int t = 0; t < nt; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    return out;
}

std::vector<ProbeResult> discrete_spectrum_probe(const DiscreteGenerator& gen,
                                                 const std::vector<cplx>& shifts,
                                                 double tol, int max_iter,
                                                 std::uint64_t seed) {
    std::vector<ProbeResult> results;
    results.reserve(shifts.size());
    const std::size_t d = gen.dim();

    for (const cplx& sigma : shifts) {
        ProbeResult pr;
        pr.shift = sigma;
        // (sigma I - A) v_{k+1} = v_k
        BandedMatrix shifted = gen.shifted_action(sigma, {-1.0, 0.0});
        BandedLU lu(shifted);
        if (lu.singular()) {
            results.push_back(pr);
            continue;
        }
        Rng rng(seed);
        std::vector<cplx> v(d), av(d);
        for (auto& w : v) w = rng.normal_complex();
        gen.project_zero_mean(v.data());
        double nv = gen.norm_packed(v.data());
        for (auto& w : v) w /= nv;

        cplx est = sigma;
        for (int it = 0; it < max_iter; ++it) {
            pr.iterations = it + 1;
            lu.solve(v.data());
            gen.project_zero_mean(v.data());
            nv = gen.norm_packed(v.data());
            if (!(nv > 0.0) || !std::isfinite(nv)) break;
            for (auto& w : v) w /= nv;
            gen.apply_packed(v.data(), av.data());
            const cplx num = gen.inner_packed(av.data(), v.data());
            const cplx den = gen.inner_packed(v.data(), v.data());
            const cplx new_est = num / den;
            if (std::abs(new_est - est) <= tol * std::abs(new_est)) {
                est = new_est;
                pr.converged = true;
                break;
            }
            est = new_est;
        }
        pr.eigenvalue = est;
        // residual ||A v - est v||_G with v normalized
        gen.apply_packed(v.data(), av.data());
        for (std::size_t i = 0; i < d; ++i) av[i] -= est * v[i];
        pr.residual = gen.norm_packed(av.data());
        results.push_back(pr);
    }
    return results;
}

}  // namespace tkv::spectra

// AVX2/FMA variants of the array kernels. This translation unit is compiled
// with -mavx2 -mfma and must only be entered after a runtime CPU check.

#if defined(__AVX2__) && defined(__FMA__)

#include <immintrin.h>

#include "tkv/kernels.hpp"

namespace tkv::kernels {
namespace {

// One __m256d holds two complex doubles as (re0, im0, re1, im1).

inline __m256d cmul(__m256d a_re, __m256d a_im, __m256d x) {
    // (ar*xr - ai*xi, ar*xi + ai*xr) per complex lane pair
    __m256d xs = _mm256_permute_pd(x, 0b0101);  // (im, re) swapped
    return _mm256_fmaddsub_pd(a_re, x, _mm256_mul_pd(a_im, xs));
}

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

// (w0, w0, w1, w1) from two consecutive real weights
inline __m256d wpair(const double* w) {
    __m256d t = _mm256_castpd128_pd256(_mm_loadu_pd(w));
    return _mm256_permute4x64_pd(t, 0x50);
}

void axpy(cplx a, const cplx* x, cplx* y, std::size_t n) {
    const __m256d ar = _mm256_set1_pd(a.real());
    const __m256d ai = _mm256_set1_pd(a.imag());
    auto* yd = reinterpret_cast<double*>(y);
    const auto* xd = reinterpret_cast<const double*>(x);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        __m256d xv = _mm256_loadu_pd(xd + 2 * i);
        __m256d yv = _mm256_loadu_pd(yd + 2 * i);
        _mm256_storeu_pd(yd + 2 * i, _mm256_add_pd(yv, cmul(ar, ai, xv)));
    }
    for (; i < n; ++i) y[i] += a * x[i];
}

void scale(cplx a, cplx* x, std::size_t n) {
    const __m256d ar = _mm256_set1_pd(a.real());
    const __m256d ai = _mm256_set1_pd(a.imag());
    auto* xd = reinterpret_cast<double*>(x);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        __m256d xv = _mm256_loadu_pd(xd + 2 * i);
        _mm256_storeu_pd(xd + 2 * i, cmul(ar, ai, xv));
    }
    for (; i < n; ++i) x[i] *= a;
}

// sum x_i conj(y_i): re from x .* y, im from x .* swap(y) with even lanes negated
cplx dot(const cplx* x, const cplx* y, std::size_t n) {
    const auto* xd = reinterpret_cast<const double*>(x);
    const auto* yd = reinterpret_cast<const double*>(y);
    __m256d acc_re = _mm256_setzero_pd();
    __m256d acc_im = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        __m256d xv = _mm256_loadu_pd(xd + 2 * i);
        __m256d yv = _mm256_loadu_pd(yd + 2 * i);
        acc_re = _mm256_fmadd_pd(xv, yv, acc_re);
        acc_im = _mm256_fmadd_pd(xv, _mm256_permute_pd(yv, 0b0101), acc_im);
    }
    const __m256d sgn = _mm256_setr_pd(-1.0, 1.0, -1.0, 1.0);
    double re = hsum(acc_re);
    double im = hsum(_mm256_mul_pd(acc_im, sgn));
    for (; i < n; ++i) {
        re += x[i].real() * y[i].real() + x[i].imag() * y[i].imag();
        im += x[i].imag() * y[i].real() - x[i].real() * y[i].imag();
    }
    return {re, im};
}

cplx wdot(const double* w, const cplx* x, const cplx* y, std::size_t n) {
    const auto* xd = reinterpret_cast<const double*>(x);
    const auto* yd = reinterpret_cast<const double*>(y);
    __m256d acc_re = _mm256_setzero_pd();
    __m256d acc_im = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        __m256d wv = wpair(w + i);
        __m256d xv = _mm256_mul_pd(_mm256_loadu_pd(xd + 2 * i), wv);
        __m256d yv = _mm256_loadu_pd(yd + 2 * i);
        acc_re = _mm256_fmadd_pd(xv, yv, acc_re);
        acc_im = _mm256_fmadd_pd(xv, _mm256_permute_pd(yv, 0b0101), acc_im);
    }
    const __m256d sgn = _mm256_setr_pd(-1.0, 1.0, -1.0, 1.0);
    double re = hsum(acc_re);
    double im = hsum(_mm256_mul_pd(acc_im, sgn));
    for (; i < n; ++i) {
        re += w[i] * (x[i].real() * y[i].real() + x[i].imag() * y[i].imag());
        im += w[i] * (x[i].imag() * y[i].real() - x[i].real() * y[i].imag());
    }
    return {re, im};
}

double wnorm2(const double* w, const cplx* x, std::size_t n) {
    const auto* xd = reinterpret_cast<const double*>(x);
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        __m256d xv = _mm256_loadu_pd(xd + 2 * i);
        acc = _mm256_fmadd_pd(_mm256_mul_pd(xv, xv), wpair(w + i), acc);
    }
    double out = hsum(acc);
    for (; i < n; ++i)
        out += w[i] * (x[i].real() * x[i].real() + x[i].imag() * x[i].imag());
    return out;
}

void diff_scaled(const cplx* x, cplx* out, std::size_t n_out, double inv_h) {
    const auto* xd = reinterpret_cast<const double*>(x);
    auto* od = reinterpret_cast<double*>(out);
    const __m256d s = _mm256_set1_pd(inv_h);
    std::size_t k = 0;
    for (; k + 2 <= n_out; k += 2) {
        __m256d hi = _mm256_loadu_pd(xd + 2 * (k + 1));
        __m256d lo = _mm256_loadu_pd(xd + 2 * k);
        _mm256_storeu_pd(od + 2 * k, _mm256_mul_pd(_mm256_sub_pd(hi, lo), s));
    }
    for (; k < n_out; ++k) out[k] = (x[k + 1] - x[k]) * inv_h;
}

void avg_adjacent(const cplx* x, cplx* out, std::size_t n_out) {
    const auto* xd = reinterpret_cast<const double*>(x);
    auto* od = reinterpret_cast<double*>(out);
    const __m256d half = _mm256_set1_pd(0.5);
    std::size_t k = 0;
    for (; k + 2 <= n_out; k += 2) {
        __m256d hi = _mm256_loadu_pd(xd + 2 * (k + 1));
        __m256d lo = _mm256_loadu_pd(xd + 2 * k);
        _mm256_storeu_pd(od + 2 * k, _mm256_mul_pd(_mm256_add_pd(hi, lo), half));
    }
    for (; k < n_out; ++k) out[k] = 0.5 * (x[k] + x[k + 1]);
}

void mul_real_add(const double* d, const cplx* x, cplx* y, std::size_t n) {
    const auto* xd = reinterpret_cast<const double*>(x);
    auto* yd = reinterpret_cast<double*>(y);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        __m256d xv = _mm256_loadu_pd(xd + 2 * i);
        __m256d yv = _mm256_loadu_pd(yd + 2 * i);
        _mm256_storeu_pd(yd + 2 * i, _mm256_fmadd_pd(xv, wpair(d + i), yv));
    }
    for (; i < n; ++i) y[i] += d[i] * x[i];
}

const Ops table = {
    "avx2", axpy, scale, dot, wdot, wnorm2, diff_scaled, avg_adjacent, mul_real_add,
};

}  // namespace

namespace detail {
const Ops* avx2_table() { return &table; }
}  // namespace detail

}  // namespace tkv::kernels

#endif  // __AVX2__ && __FMA__

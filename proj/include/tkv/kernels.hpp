#pragma once

#include <cstddef>

#include "tkv/types.hpp"

// Low-level array kernels used by the energy norms, flux assembly and the
// iterative solvers. Every operation has a scalar reference implementation
// and (on x86) an AVX2 variant; the active table is chosen once at runtime.
// Complex arrays are interleaved (re, im) doubles, i.e. std::complex layout.

namespace tkv::kernels {

struct Ops {
    const char* name;

    // y += a * x
    void (*axpy)(cplx a, const cplx* x, cplx* y, std::size_t n);
    // x *= a
    void (*scale)(cplx a, cplx* x, std::size_t n);
    // sum_i x_i * conj(y_i)
    cplx (*dot)(const cplx* x, const cplx* y, std::size_t n);
    // sum_i w_i * x_i * conj(y_i)
    cplx (*wdot)(const double* w, const cplx* x, const cplx* y, std::size_t n);
    // sum_i w_i * |x_i|^2
    double (*wnorm2)(const double* w, const cplx* x, std::size_t n);
    // out_k = (x_{k+1} - x_k) * inv_h           (k = 0 .. n_out-1)
    void (*diff_scaled)(const cplx* x, cplx* out, std::size_t n_out, double inv_h);
    // out_k = (x_k + x_{k+1}) / 2
    void (*avg_adjacent)(const cplx* x, cplx* out, std::size_t n_out);
    // y_k += d_k * x_k   with real d
    void (*mul_real_add)(const double* d, const cplx* x, cplx* y, std::size_t n);
};

// Scalar reference table; always available.
const Ops& scalar_ops();

// AVX2 table, or nullptr when the binary or the CPU lacks support.
const Ops* avx2_ops();

// Runtime-selected table. Honors TKV_SIMD=scalar|avx2|auto (default auto);
// an unsupported request falls back to scalar.
const Ops& active();

}  // namespace tkv::kernels

#include "tkv/kernels.hpp"

namespace tkv::kernels {
namespace {

void axpy(cplx a, const cplx* x, cplx* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void scale(cplx a, cplx* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) x[i] *= a;
}

cplx dot(const cplx* x, const cplx* y, std::size_t n) {
    double re = 0.0, im = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        re += x[i].real() * y[i].real() + x[i].imag() * y[i].imag();
        im += x[i].imag() * y[i].real() - x[i].real() * y[i].imag();
    }
    return {re, im};
}

cplx wdot(const double* w, const cplx* x, const cplx* y, std::size_t n) {
    double re = 0.0, im = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        re += w[i] * (x[i].real() * y[i].real() + x[i].imag() * y[i].imag());
        im += w[i] * (x[i].imag() * y[i].real() - x[i].real() * y[i].imag());
    }
    return {re, im};
}

double wnorm2(const double* w, const cplx* x, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        acc += w[i] * (x[i].real() * x[i].real() + x[i].imag() * x[i].imag());
    return acc;
}

void diff_scaled(const cplx* x, cplx* out, std::size_t n_out, double inv_h) {
    for (std::size_t k = 0; k < n_out; ++k) out[k] = (x[k + 1] - x[k]) * inv_h;
}

void avg_adjacent(const cplx* x, cplx* out, std::size_t n_out) {
    for (std::size_t k = 0; k < n_out; ++k) out[k] = 0.5 * (x[k] + x[k + 1]);
}

void mul_real_add(const double* d, const cplx* x, cplx* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += d[i] * x[i];
}

const Ops table = {
    "scalar", axpy, scale, dot, wdot, wnorm2, diff_scaled, avg_adjacent, mul_real_add,
};

}  // namespace

const Ops& scalar_ops() { return table; }

}  // namespace tkv::kernels

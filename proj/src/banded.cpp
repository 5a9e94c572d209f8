#include "tkv/banded.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tkv {

BandedMatrix::BandedMatrix(std::size_t n, std::size_t kl, std::size_t ku)
    : n_(n), kl_(kl), ku_(ku), ldab_(2 * kl + ku + 1), ab_(ldab_ * n, cplx{0.0, 0.0}) {}

void BandedMatrix::add(std::size_t i, std::size_t j, cplx v) {
    if (!in_band(i, j) || i >= n_ || j >= n_)
        throw std::out_of_range("BandedMatrix::add: entry outside band");
    at(i, j) += v;
}

void BandedMatrix::set(std::size_t i, std::size_t j, cplx v) {
    if (!in_band(i, j) || i >= n_ || j >= n_)
        throw std::out_of_range("BandedMatrix::set: entry outside band");
    at(i, j) = v;
}

void BandedMatrix::matvec(const cplx* x, cplx* y, cplx alpha, cplx beta) const {
    for (std::size_t i = 0; i < n_; ++i) y[i] *= beta;
    for (std::size_t j = 0; j < n_; ++j) {
        const cplx xj = alpha * x[j];
        if (xj == cplx{0.0, 0.0}) continue;
        const std::size_t i_lo = (j >= ku_) ? j - ku_ : 0;
        const std::size_t i_hi = std::min(j + kl_, n_ - 1);
        for (std::size_t i = i_lo; i <= i_hi; ++i) y[i] += at(i, j) * xj;
    }
}

void BandedMatrix::shift_scale(cplx alpha, cplx beta) {
    for (std::size_t j = 0; j < n_; ++j) {
        const std::size_t i_lo = (j >= ku_) ? j - ku_ : 0;
        const std::size_t i_hi = std::min(j + kl_, n_ - 1);
        for (std::size_t i = i_lo; i <= i_hi; ++i) at(i, j) *= beta;
        at(j, j) += alpha;
    }
}

std::vector<cplx> BandedMatrix::dense() const {
    std::vector<cplx> out(n_ * n_, cplx{0.0, 0.0});
    for (std::size_t j = 0; j < n_; ++j) {
        const std::size_t i_lo = (j >= ku_) ? j - ku_ : 0;
        const std::size_t i_hi = std::min(j + kl_, n_ - 1);
        for (std::size_t i = i_lo; i <= i_hi; ++i) out[i * n_ + j] = at(i, j);
    }
    return out;
}

BandedLU::BandedLU(const BandedMatrix& a)
    : n_(a.n_), kl_(a.kl_), ku_(a.ku_), ldab_(a.ldab_), ab_(a.ab_), piv_(a.n_) {
    // Gaussian elimination with partial pivoting; U acquires up to kl extra
    // superdiagonals, which the fill rows of the storage accommodate.
    const std::size_t ku_fact = kl_ + ku_;
    for (std::size_t j = 0; j < n_; ++j) {
        const std::size_t i_max = std::min(j + kl_, n_ - 1);
        std::size_t p = j;
        double best = std::abs(at(j, j));
        for (std::size_t i = j + 1; i <= i_max; ++i) {
            const double m = std::abs(at(i, j));
            if (m > best) {
                best = m;
                p = i;
            }
        }
        piv_[j] = p;
        const std::size_t c_max = std::min(j + ku_fact, n_ - 1);
        if (p != j)
            for (std::size_t c = j; c <= c_max; ++c) std::swap(at(j, c), at(p, c));
        const cplx d = at(j, j);
        if (d == cplx{0.0, 0.0}) {
            singular_ = true;
            continue;
        }
        for (std::size_t i = j + 1; i <= i_max; ++i) at(i, j) /= d;
        for (std::size_t c = j + 1; c <= c_max; ++c) {
            const cplx ajc = at(j, c);
            if (ajc == cplx{0.0, 0.0}) continue;
            for (std::size_t i = j + 1; i <= i_max; ++i) at(i, c) -= at(i, j) * ajc;
        }
    }
}

void BandedLU::solve(cplx* b) const {
    if (singular_) throw std::runtime_error("BandedLU::solve: singular factorization");
    const std::size_t ku_fact = kl_ + ku_;
    for (std::size_t j = 0; j < n_; ++j) {
        if (piv_[j] != j) std::swap(b[j], b[piv_[j]]);
        const cplx bj = b[j];
        if (bj == cplx{0.0, 0.0}) continue;
        const std::size_t i_max = std::min(j + kl_, n_ - 1);
        for (std::size_t i = j + 1; i <= i_max; ++i) b[i] -= at(i, j) * bj;
    }
    for (std::size_t jj = n_; jj-- > 0;) {
        b[jj] /= at(jj, jj);
        const cplx bj = b[jj];
        if (bj == cplx{0.0, 0.0}) continue;
        const std::size_t i_lo = (jj >= ku_fact) ? jj - ku_fact : 0;
        for (std::size_t i = i_lo; i < jj; ++i) b[i] -= at(i, jj) * bj;
    }
}

void BandedLU::solve_adjoint(cplx* b) const {
    if (singular_)
        throw std::runtime_error("BandedLU::solve_adjoint: singular factorization");
    const std::size_t ku_fact = kl_ + ku_;
    // The factorization interleaves permutations and eliminations,
    //   A = P_0^T L_0 P_1^T L_1 ... P_{n-1}^T L_{n-1} U,
    // so A^H x = b is solved as U^H w = b followed by
    //   x = P_0^T L_0^{-H} P_1^T L_1^{-H} ... P_{n-1}^T L_{n-1}^{-H} w
    // applied right to left, each swap paired with its elimination column.
    for (std::size_t j = 0; j < n_; ++j) {
        cplx acc = b[j];
        const std::size_t i_lo = (j >= ku_fact) ? j - ku_fact : 0;
        for (std::size_t i = i_lo; i < j; ++i) acc -= std::conj(at(i, j)) * b[i];
        b[j] = acc / std::conj(at(j, j));
    }
    for (std::size_t jj = n_; jj-- > 0;) {
        cplx acc = b[jj];
        const std::size_t i_max = std::min(jj + kl_, n_ - 1);
        for (std::size_t i = jj + 1; i <= i_max; ++i) acc -= std::conj(at(i, jj)) * b[i];
        b[jj] = acc;
        if (piv_[jj] != jj) std::swap(b[jj], b[piv_[jj]]);
    }
}

}  // namespace tkv

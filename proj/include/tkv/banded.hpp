#pragma once

#include <cstddef>
#include <vector>

#include "tkv/types.hpp"

namespace tkv {

// Complex general banded matrix with kl sub- and ku super-diagonals, stored
// column-major in the classic band layout: entry (i, j) lives at
// storage row kl + ku + i - j of column j. The leading kl rows per column are
// reserved as fill space for the pivoting factorization.
class BandedMatrix {
  public:
    BandedMatrix() = default;
    BandedMatrix(std::size_t n, std::size_t kl, std::size_t ku);

    std::size_t size() const { return n_; }
    std::size_t lower_bandwidth() const { return kl_; }
    std::size_t upper_bandwidth() const { return ku_; }

    bool in_band(std::size_t i, std::size_t j) const {
        return (i + ku_ >= j) && (j + kl_ >= i);
    }
    cplx get(std::size_t i, std::size_t j) const {
        return in_band(i, j) ? at(i, j) : cplx{0.0, 0.0};
    }
    // Accumulate into an in-band entry; out-of-band indices throw.
    void add(std::size_t i, std::size_t j, cplx v);
    void set(std::size_t i, std::size_t j, cplx v);

    // y = alpha * (this * x) + beta * y
    void matvec(const cplx* x, cplx* y, cplx alpha = {1.0, 0.0},
                cplx beta = {0.0, 0.0}) const;

    // this = alpha * I + beta * this (diagonal must be inside the band)
    void shift_scale(cplx alpha, cplx beta);

    std::vector<cplx> dense() const;  // row-major n*n, for small-size checks

  private:
    friend class BandedLU;
    cplx& at(std::size_t i, std::size_t j) {
        return ab_[j * ldab_ + (kl_ + ku_ + i - j)];
    }
    const cplx& at(std::size_t i, std::size_t j) const {
        return ab_[j * ldab_ + (kl_ + ku_ + i - j)];
    }

    std::size_t n_ = 0, kl_ = 0, ku_ = 0, ldab_ = 0;
    std::vector<cplx> ab_;
};

// LU factorization with partial pivoting of a banded matrix. Solves both
// A x = b and the conjugate-transposed system A^H x = b, so one factorization
// serves a solver and its adjoint.
class BandedLU {
  public:
    explicit BandedLU(const BandedMatrix& a);

    bool singular() const { return singular_; }
    std::size_t size() const { return n_; }

    void solve(cplx* b) const;          // in place, A x = b
    void solve_adjoint(cplx* b) const;  // in place, A^H x = b
    void solve(std::vector<cplx>& b) const { solve(b.data()); }
    void solve_adjoint(std::vector<cplx>& b) const { solve_adjoint(b.data()); }

  private:
    cplx& at(std::size_t i, std::size_t j) {
        return ab_[j * ldab_ + (kl_ + ku_ + i - j)];
    }
    const cplx& at(std::size_t i, std::size_t j) const {
        return ab_[j * ldab_ + (kl_ + ku_ + i - j)];
    }

    std::size_t n_ = 0, kl_ = 0, ku_ = 0, ldab_ = 0;
    std::vector<cplx> ab_;
    std::vector<std::size_t> piv_;
    bool singular_ = false;
};

}  // namespace tkv

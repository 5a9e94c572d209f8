#include "tkv/generator.hpp"

#include <cmath>
#include <stdexcept>

#include "tkv/beam.hpp"
#include "tkv/kernels.hpp"

namespace tkv {

namespace {
constexpr std::size_t kBandwidth = 7;  // interleaved nearest-neighbor coupling
}

DiscreteGenerator::DiscreteGenerator(BeamParameters params, DampingProfile profile,
                                     BoundaryConditions bc, std::size_t n_cells,
                                     bool allow_zero_profile)
    : params_(params), profile_(std::move(profile)), bc_(bc), n_(n_cells) {
    params_.validate();
    if (n_ < 8)
        throw std::invalid_argument("DiscreteGenerator: n_cells must be >= 8");
    report_ = validate_hypothesis(profile_, params_);
    if (!report_.passes && !(report_.zero_kind && allow_zero_profile))
        throw std::invalid_argument(
            "DiscreteGenerator: damping profile fails the hypothesis check");

    h_ = params_.length / static_cast<double>(n_);
    damping_mid_.resize(n_);
    for (std::size_t k = 0; k < n_; ++k)
        damping_mid_[k] = profile_((static_cast<double>(k) + 0.5) * h_);

    node_weight_.assign(n_ + 1, h_);
    node_weight_.front() = 0.5 * h_;
    node_weight_.back() = 0.5 * h_;

    build_index_maps();
    assemble_action();
    assemble_gram();
}

void DiscreteGenerator::build_index_maps() {
    const std::size_t m = n_ + 1;
    iu_.assign(m, npos);
    iv_.assign(m, npos);
    iy_.assign(m, npos);
    iz_.assign(m, npos);
    std::size_t cnt = 0;
    const bool y_free_ends = (bc_ == BoundaryConditions::DirichletNeumann);
    for (std::size_t i = 0; i < m; ++i) {
        const bool interior = (i >= 1 && i + 1 <= n_);
        if (interior) {
            iu_[i] = cnt++;
            iv_[i] = cnt++;
        }
        if (interior || y_free_ends) {
            iy_[i] = cnt++;
            iz_[i] = cnt++;
        }
    }
    dim_ = cnt;
}

// Flux stencils as (packed column, coefficient) pairs; pinned nodes drop out.
namespace {
struct Entry {
    std::size_t col;
    double coeff;
};
}  // namespace

void DiscreteGenerator::assemble_action() {
    action_ = BandedMatrix(dim_, kBandwidth, kBandwidth);
    const double k1 = params_.k1, rho1 = params_.rho1;
    const double k2 = params_.k2, rho2 = params_.rho2;

    auto flux_F = [&](std::size_t k, std::vector<Entry>& out) {
        out.clear();
        if (iu_[k] != npos) out.push_back({iu_[k], -1.0 / h_});
        if (iu_[k + 1] != npos) out.push_back({iu_[k + 1], 1.0 / h_});
        if (iy_[k] != npos) out.push_back({iy_[k], 0.5});
        if (iy_[k + 1] != npos) out.push_back({iy_[k + 1], 0.5});
    };
    auto flux_G = [&](std::size_t k, std::vector<Entry>& out) {
        out.clear();
        if (iy_[k] != npos) out.push_back({iy_[k], -k2 / h_});
        if (iy_[k + 1] != npos) out.push_back({iy_[k + 1], k2 / h_});
        if (iz_[k] != npos) out.push_back({iz_[k], -damping_mid_[k] / h_});
        if (iz_[k + 1] != npos) out.push_back({iz_[k + 1], damping_mid_[k] / h_});
    };

    std::vector<Entry> f;
    // u' = v and y' = z rows
    for (std::size_t i = 0; i <= n_; ++i) {
        if (iu_[i] != npos) action_.add(iu_[i], iv_[i], {1.0, 0.0});
        if (iy_[i] != npos) action_.add(iy_[i], iz_[i], {1.0, 0.0});
    }
    // v' = (k1/rho1) (F_i - F_{i-1}) / h, interior nodes
    for (std::size_t i = 1; i < n_; ++i) {
        const std::size_t r = iv_[i];
        flux_F(i, f);
        for (const Entry& e : f) action_.add(r, e.col, {(k1 / rho1) * e.coeff / h_, 0.0});
        flux_F(i - 1, f);
        for (const Entry& e : f) action_.add(r, e.col, {-(k1 / rho1) * e.coeff / h_, 0.0});
    }
    // z' rows
    for (std::size_t i = 0; i <= n_; ++i) {
        if (iz_[i] == npos) continue;
        const std::size_t r = iz_[i];
        if (i == 0) {
            // half-cell closure: z'_0 = (1/rho2)(G_0/(h/2) - k1 F_0)
            flux_G(0, f);
            for (const Entry& e : f) action_.add(r, e.col, {e.coeff / (rho2 * 0.5 * h_), 0.0});
            flux_F(0, f);
            for (const Entry& e : f) action_.add(r, e.col, {-(k1 / rho2) * e.coeff, 0.0});
        } else if (i == n_) {
            flux_G(n_ - 1, f);
            for (const Entry& e : f) action_.add(r, e.col, {-e.coeff / (rho2 * 0.5 * h_), 0.0});
            flux_F(n_ - 1, f);
            for (const Entry& e : f) action_.add(r, e.col, {-(k1 / rho2) * e.coeff, 0.0});
        } else {
            flux_G(i, f);
            for (const Entry& e : f) action_.add(r, e.col, {e.coeff / (rho2 * h_), 0.0});
            flux_G(i - 1, f);
            for (const Entry& e : f) action_.add(r, e.col, {-e.coeff / (rho2 * h_), 0.0});
            flux_F(i, f);
            for (const Entry& e : f) action_.add(r, e.col, {-0.5 * (k1 / rho2) * e.coeff, 0.0});
            flux_F(i - 1, f);
            for (const Entry& e : f) action_.add(r, e.col, {-0.5 * (k1 / rho2) * e.coeff, 0.0});
        }
    }
}

void DiscreteGenerator::assemble_gram() {
    gram_ = BandedMatrix(dim_, kBandwidth, kBandwidth);
    const double k1 = params_.k1, rho1 = params_.rho1;
    const double k2 = params_.k2, rho2 = params_.rho2;

    for (std::size_t i = 0; i <= n_; ++i) {
        if (iv_[i] != npos) gram_.add(iv_[i], iv_[i], {rho1 * node_weight_[i], 0.0});
        if (iz_[i] != npos) gram_.add(iz_[i], iz_[i], {rho2 * node_weight_[i], 0.0});
    }
    std::vector<Entry> f;
    for (std::size_t k = 0; k < n_; ++k) {
        f.clear();
        if (iu_[k] != npos) f.push_back({iu_[k], -1.0 / h_});
        if (iu_[k + 1] != npos) f.push_back({iu_[k + 1], 1.0 / h_});
        if (iy_[k] != npos) f.push_back({iy_[k], 0.5});
        if (iy_[k + 1] != npos) f.push_back({iy_[k + 1], 0.5});
        for (const Entry& a : f)
            for (const Entry& b : f) gram_.add(a.col, b.col, {k1 * h_ * a.coeff * b.coeff, 0.0});
        f.clear();
        if (iy_[k] != npos) f.push_back({iy_[k], -1.0 / h_});
        if (iy_[k + 1] != npos) f.push_back({iy_[k + 1], 1.0 / h_});
        for (const Entry& a : f)
            for (const Entry& b : f) gram_.add(a.col, b.col, {k2 * h_ * a.coeff * b.coeff, 0.0});
    }
}

void DiscreteGenerator::pack(const GridState& state, cplx* out) const {
    if (state.n_cells != n_)
        throw std::invalid_argument("DiscreteGenerator::pack: size mismatch");
    for (std::size_t i = 0; i <= n_; ++i) {
        if (iu_[i] != npos) out[iu_[i]] = state.u[i];
        if (iv_[i] != npos) out[iv_[i]] = state.v[i];
        if (iy_[i] != npos) out[iy_[i]] = state.y[i];
        if (iz_[i] != npos) out[iz_[i]] = state.z[i];
    }
}

GridState DiscreteGenerator::unpack(const cplx* x) const {
    GridState s = GridState::zeros(n_, params_.length, bc_);
    for (std::size_t i = 0; i <= n_; ++i) {
        if (iu_[i] != npos) s.u[i] = x[iu_[i]];
        if (iv_[i] != npos) s.v[i] = x[iv_[i]];
        if (iy_[i] != npos) s.y[i] = x[iy_[i]];
        if (iz_[i] != npos) s.z[i] = x[iz_[i]];
    }
    return s;
}

GridState DiscreteGenerator::apply(const GridState& state) const {
    if (state.n_cells != n_ || state.bc != bc_)
        throw std::invalid_argument("DiscreteGenerator::apply: state mismatch");
    const auto& ops = kernels::active();
    const double k1 = params_.k1, rho1 = params_.rho1;
    const double k2 = params_.k2, rho2 = params_.rho2;
    GridState out = GridState::zeros(n_, params_.length, bc_);

    // fluxes on cells
    std::vector<cplx> F(n_), G(n_), scratch(n_);
    ops.diff_scaled(state.u.data(), F.data(), n_, 1.0 / h_);
    ops.avg_adjacent(state.y.data(), scratch.data(), n_);
    ops.axpy(cplx{1.0, 0.0}, scratch.data(), F.data(), n_);
    ops.diff_scaled(state.y.data(), G.data(), n_, k2 / h_);
    ops.diff_scaled(state.z.data(), scratch.data(), n_, 1.0 / h_);
    ops.mul_real_add(damping_mid_.data(), scratch.data(), G.data(), n_);

    // u' = v, y' = z on unpinned nodes
    for (std::size_t i = 1; i < n_; ++i) {
        out.u[i] = state.v[i];
        out.y[i] = state.z[i];
    }
    const bool y_free = (bc_ == BoundaryConditions::DirichletNeumann);
    if (y_free) {
        out.y[0] = state.z[0];
        out.y[n_] = state.z[n_];
    }
    for (std::size_t i = 1; i < n_; ++i) {
        out.v[i] = (k1 / rho1) * (F[i] - F[i - 1]) / h_;
        out.z[i] = ((G[i] - G[i - 1]) / h_ - k1 * 0.5 * (F[i] + F[i - 1])) / rho2;
    }
    if (y_free) {
        out.z[0] = (G[0] / (0.5 * h_) - k1 * F[0]) / rho2;
        out.z[n_] = (-G[n_ - 1] / (0.5 * h_) - k1 * F[n_ - 1]) / rho2;
    }
    return out;
}

cplx DiscreteGenerator::inner(const GridState& a, const GridState& b) const {
    if (a.n_cells != n_ || b.n_cells != n_)
        throw std::invalid_argument("DiscreteGenerator::inner: size mismatch");
    const auto& ops = kernels::active();
    const double k1 = params_.k1, rho1 = params_.rho1;
    const double k2 = params_.k2, rho2 = params_.rho2;

    cplx acc = rho1 * ops.wdot(node_weight_.data(), a.v.data(), b.v.data(), n_ + 1);
    acc += rho2 * ops.wdot(node_weight_.data(), a.z.data(), b.z.data(), n_ + 1);

    std::vector<cplx> fa(n_), fb(n_), scratch(n_);
    ops.diff_scaled(a.u.data(), fa.data(), n_, 1.0 / h_);
    ops.avg_adjacent(a.y.data(), scratch.data(), n_);
    ops.axpy(cplx{1.0, 0.0}, scratch.data(), fa.data(), n_);
    ops.diff_scaled(b.u.data(), fb.data(), n_, 1.0 / h_);
    ops.avg_adjacent(b.y.data(), scratch.data(), n_);
    ops.axpy(cplx{1.0, 0.0}, scratch.data(), fb.data(), n_);
    acc += k1 * h_ * ops.dot(fa.data(), fb.data(), n_);

    ops.diff_scaled(a.y.data(), fa.data(), n_, 1.0 / h_);
    ops.diff_scaled(b.y.data(), fb.data(), n_, 1.0 / h_);
    acc += k2 * h_ * ops.dot(fa.data(), fb.data(), n_);
    return acc;
}

void DiscreteGenerator::apply_packed(const cplx* x, cplx* out) const {
    action_.matvec(x, out);
}

void DiscreteGenerator::gram_packed(const cplx* x, cplx* out) const {
    gram_.matvec(x, out);
}

cplx DiscreteGenerator::inner_packed(const cplx* x, const cplx* y) const {
    std::vector<cplx> gx(dim_);
    gram_.matvec(x, gx.data());
    return kernels::active().dot(gx.data(), y, dim_);
}

double DiscreteGenerator::norm_packed(const cplx* x) const {
    return std::sqrt(std::max(std::real(inner_packed(x, x)), 0.0));
}

void DiscreteGenerator::project_zero_mean(cplx* x) const {
    if (bc_ != BoundaryConditions::DirichletNeumann) return;
    const double L = params_.length;
    cplx my{0.0, 0.0}, mz{0.0, 0.0};
    for (std::size_t i = 0; i <= n_; ++i) {
        my += node_weight_[i] * x[iy_[i]];
        mz += node_weight_[i] * x[iz_[i]];
    }
    my /= L;
    mz /= L;
    for (std::size_t i = 0; i <= n_; ++i) {
        x[iy_[i]] -= my;
        x[iz_[i]] -= mz;
    }
}

const BandedLU& DiscreteGenerator::gram_factorization() const {
    if (!gram_lu_) gram_lu_ = std::make_unique<BandedLU>(gram_);
    return *gram_lu_;
}

BandedMatrix DiscreteGenerator::shifted_action(cplx sigma, cplx scale) const {
    BandedMatrix m = action_;
    m.shift_scale(sigma, scale);
    return m;
}

}  // namespace tkv

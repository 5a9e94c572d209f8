#include "tkv/beam.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "tkv/generator.hpp"
#include "tkv/kernels.hpp"

namespace tkv {

namespace {

void require_positive(double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v))
        throw std::invalid_argument(std::string("BeamParameters: ") + name +
                                    " must be positive and finite");
}

}  // namespace

void BeamParameters::validate() const {
    require_positive(rho1, "rho1");
    require_positive(rho2, "rho2");
    require_positive(k1, "k1");
    require_positive(k2, "k2");
    require_positive(length, "length");
}

double BeamParameters::max_wave_speed() const {
    return std::sqrt(std::max(k1 / rho1, k2 / rho2));
}

bool equal_wave_speeds(const BeamParameters& params, double rel_tol) {
    const double a = params.k1 / params.rho1;
    const double b = params.k2 / params.rho2;
    return std::abs(a - b) <= rel_tol * std::max(std::abs(a), std::abs(b));
}

double DampingProfile::operator()(double x) const {
    switch (kind) {
        case Kind::Zero:
            return 0.0;
        case Kind::PiecewiseConstant:
            for (const Piece& p : pieces)
                if (x > p.x_lo && x <= p.x_hi) return p.value;
            return 0.0;
        case Kind::Smooth:
            return smooth ? smooth(x) : 0.0;
    }
    return 0.0;
}

DampingProfile DampingProfile::zero() {
    DampingProfile p;
    p.kind = Kind::Zero;
    return p;
}

DampingProfile DampingProfile::piecewise_constant(double value, double x_lo, double x_hi) {
    DampingProfile p;
    p.kind = Kind::PiecewiseConstant;
    p.support_lo = x_lo;
    p.support_hi = x_hi;
    p.floor = value;
    p.pieces.push_back({x_lo, x_hi, value});
    return p;
}

DampingProfile DampingProfile::global_constant(double value, double L) {
    // Half-open pieces exclude the left endpoint; x = 0 never lands on a cell
    // midpoint, so extend slightly below zero to make the profile global.
    DampingProfile p;
    p.kind = Kind::PiecewiseConstant;
    p.support_lo = 0.0;
    p.support_hi = L;
    p.floor = value;
    p.pieces.push_back({-1.0, L, value});
    return p;
}

DampingProfile DampingProfile::from_callable(std::function<double(double)> f,
                                             double support_lo, double support_hi,
                                             double floor) {
    DampingProfile p;
    p.kind = Kind::Smooth;
    p.smooth = std::move(f);
    p.support_lo = support_lo;
    p.support_hi = support_hi;
    p.floor = floor;
    return p;
}

ValidationReport validate_hypothesis(const DampingProfile& profile,
                                     const BeamParameters& params,
                                     std::size_t n_samples) {
    params.validate();
    if (n_samples < 16)
        throw std::invalid_argument("validate_hypothesis: n_samples must be >= 16");

    ValidationReport rep;
    rep.zero_kind = (profile.kind == DampingProfile::Kind::Zero);
    const double L = params.length;

    if (rep.zero_kind) {
        rep.min_global = 0.0;
        rep.min_on_support = 0.0;
        rep.violations.push_back(
            "floor: D == 0 everywhere (conservative baseline, violates the "
            "positive-floor clause by design)");
        rep.passes = false;
        return rep;
    }

    const double alpha = profile.support_lo;
    const double beta = profile.support_hi;
    if (!(alpha < beta))
        throw std::invalid_argument(
            "validate_hypothesis: empty support interval (alpha >= beta)");
    if (alpha < 0.0 || alpha >= L)
        rep.violations.push_back("range: alpha outside [0, L)");
    if (beta <= alpha || beta > L)
        rep.violations.push_back("range: beta outside (alpha, L]");
    if (!(profile.floor > 0.0))
        rep.violations.push_back("floor: claimed floor d0 is not positive");

    // Global non-negativity on [0, L].
    rep.min_global = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i <= n_samples; ++i) {
        const double x = L * static_cast<double>(i) / static_cast<double>(n_samples);
        rep.min_global = std::min(rep.min_global, profile(x));
    }
    if (rep.min_global < 0.0)
        rep.violations.push_back("sign: D takes negative values on [0, L]");

    // Floor strictly inside (alpha, beta): sample at interior midpoints.
    rep.min_on_support = std::numeric_limits<double>::infinity();
    double prev = 0.0;
    double sup_lo = std::numeric_limits<double>::infinity(), sup_hi = 0.0;
    for (std::size_t i = 0; i < n_samples; ++i) {
        const double x =
            alpha + (beta - alpha) * (static_cast<double>(i) + 0.5) /
                        static_cast<double>(n_samples);
        const double d = profile(x);
        rep.min_on_support = std::min(rep.min_on_support, d);
        sup_lo = std::min(sup_lo, d);
        sup_hi = std::max(sup_hi, d);
        if (i > 0 && std::abs(d - prev) > 0.2 * std::max(sup_hi - sup_lo, 1e-300) &&
            sup_hi > sup_lo)
            rep.discontinuity_flag = true;
        prev = d;
    }
    if (rep.min_on_support < profile.floor)
        rep.violations.push_back("floor: sampled D drops below d0 inside (alpha, beta)");

    rep.passes = rep.violations.empty();
    return rep;
}

GridState GridState::zeros(std::size_t n_cells, double length, BoundaryConditions bc) {
    GridState s;
    s.n_cells = n_cells;
    s.length = length;
    s.bc = bc;
    s.u.assign(n_cells + 1, cplx{0.0, 0.0});
    s.v.assign(n_cells + 1, cplx{0.0, 0.0});
    s.y.assign(n_cells + 1, cplx{0.0, 0.0});
    s.z.assign(n_cells + 1, cplx{0.0, 0.0});
    return s;
}

bool GridState::shape_ok() const {
    const std::size_t m = n_cells + 1;
    return n_cells >= 1 && length > 0.0 && u.size() == m && v.size() == m &&
           y.size() == m && z.size() == m;
}

namespace {

double max_amplitude(const GridState& s) {
    double amp = 0.0;
    for (const auto* arr : {&s.u, &s.v, &s.y, &s.z})
        for (const cplx& w : *arr) amp = std::max(amp, std::abs(w));
    return amp;
}

cplx trapezoid_mean(const std::vector<cplx>& a, double h, double L) {
    cplx acc = 0.5 * (a.front() + a.back());
    for (std::size_t i = 1; i + 1 < a.size(); ++i) acc += a[i];
    return acc * h / L;
}

}  // namespace

std::vector<std::string> state_violations(const GridState& state, double tol) {
    std::vector<std::string> out;
    if (!state.shape_ok()) {
        out.push_back("shape: component arrays do not match n_cells + 1");
        return out;
    }
    const double amp = max_amplitude(state);
    const double bound = tol * std::max(amp, 1e-300);
    if (std::abs(state.u.front()) > bound || std::abs(state.u.back()) > bound)
        out.push_back("bc: u does not vanish at the ends");
    if (std::abs(state.v.front()) > bound || std::abs(state.v.back()) > bound)
        out.push_back("bc: v does not vanish at the ends");
    if (state.bc == BoundaryConditions::FullyDirichlet) {
        if (std::abs(state.y.front()) > bound || std::abs(state.y.back()) > bound)
            out.push_back("bc: y does not vanish at the ends");
        if (std::abs(state.z.front()) > bound || std::abs(state.z.back()) > bound)
            out.push_back("bc: z does not vanish at the ends");
    } else {
        const double h = state.dx();
        if (std::abs(trapezoid_mean(state.y, h, state.length)) > bound)
            out.push_back("mean: trapezoidal mean of y is not zero");
        if (std::abs(trapezoid_mean(state.z, h, state.length)) > bound)
            out.push_back("mean: trapezoidal mean of z is not zero");
    }
    return out;
}

double energy(const GridState& state, const BeamParameters& params) {
    params.validate();
    if (!state.shape_ok()) throw std::invalid_argument("energy: malformed state");
    if (state.n_cells < 4)
        throw std::invalid_argument("energy: under-resolved state (n_cells < 4)");

    const auto& ops = kernels::active();
    const std::size_t n = state.n_cells;
    const double h = state.dx();

    std::vector<double> wn(n + 1, h);  // trapezoid node weights
    wn.front() = 0.5 * h;
    wn.back() = 0.5 * h;
    std::vector<double> wc(n, h);  // cell weights

    const double kinetic = params.rho1 * ops.wnorm2(wn.data(), state.v.data(), n + 1) +
                           params.rho2 * ops.wnorm2(wn.data(), state.z.data(), n + 1);

    std::vector<cplx> flux(n), avg(n);
    ops.diff_scaled(state.u.data(), flux.data(), n, 1.0 / h);
    ops.avg_adjacent(state.y.data(), avg.data(), n);
    ops.axpy(cplx{1.0, 0.0}, avg.data(), flux.data(), n);
    const double shear = params.k1 * ops.wnorm2(wc.data(), flux.data(), n);

    ops.diff_scaled(state.y.data(), flux.data(), n, 1.0 / h);
    const double bending = params.k2 * ops.wnorm2(wc.data(), flux.data(), n);

    return 0.5 * (kinetic + shear + bending);
}

double dissipation_rate(const GridState& state, const DampingProfile& profile) {
    if (!state.shape_ok())
        throw std::invalid_argument("dissipation_rate: malformed state");
    const auto& ops = kernels::active();
    const std::size_t n = state.n_cells;
    const double h = state.dx();

    std::vector<double> wd(n);
    for (std::size_t k = 0; k < n; ++k)
        wd[k] = h * profile((static_cast<double>(k) + 0.5) * h);

    std::vector<cplx> dz(n);
    ops.diff_scaled(state.z.data(), dz.data(), n, 1.0 / h);
    return -ops.wnorm2(wd.data(), dz.data(), n);
}

double graph_norm(const GridState& state, const DiscreteGenerator& gen) {
    if (state.n_cells != gen.n_cells() || state.bc != gen.bc())
        throw std::invalid_argument("graph_norm: state/generator mismatch");
    const GridState image = gen.apply(state);
    const double a = std::real(gen.inner(state, state));
    const double b = std::real(gen.inner(image, image));
    return std::sqrt(std::max(a + b, 0.0));
}

}  // namespace tkv

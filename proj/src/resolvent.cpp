#include "tkv/resolvent.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <memory>
#include <numbers>
#include <stdexcept>
#include <thread>
#include <vector>

#include "tkv/beam.hpp"
#include "tkv/rng.hpp"

namespace tkv::resolvent {
namespace {

// Laurent polynomial in kappa = n*pi/L, powers -3..4. The quasimode
// coefficient identities (C1 = 1, C2 = 0) hold term-by-term in kappa, so
// doing the arithmetic of the closed forms on coefficients — instead of on
// evaluated numbers — realizes the exact cancellations: with exactly
// representable parameter combinations (in particular unit parameters) every
// vanishing coefficient is a floating-point zero, not a ~kappa^2*eps residue.
struct Laurent {
    static constexpr int kLo = -3, kHi = 4;
    std::array<cplx, kHi - kLo + 1> c{};

    cplx& coeff(int p) { return c[static_cast<std::size_t>(p - kLo)]; }
    cplx coeff(int p) const { return c[static_cast<std::size_t>(p - kLo)]; }

    static Laurent term(cplx value, int power) {
        Laurent out;
        out.coeff(power) = value;
        return out;
    }
    Laurent operator+(const Laurent& o) const {
        Laurent out;
        for (std::size_t k = 0; k < c.size(); ++k) out.c[k] = c[k] + o.c[k];
        return out;
    }
    Laurent operator*(const Laurent& o) const {
        Laurent out;
        for (int p = kLo; p <= kHi; ++p) {
            if (coeff(p) == cplx{}) continue;
            for (int q = kLo; q <= kHi; ++q) {
                if (o.coeff(q) == cplx{}) continue;
                const int r = p + q;
                if (r < kLo || r > kHi)
                    throw std::logic_error("Laurent power out of range");
                out.coeff(r) += coeff(p) * o.coeff(q);
            }
        }
        return out;
    }
    cplx eval(double kappa) const {
        cplx acc{};
        for (int p = kHi; p >= 0; --p) acc = acc * kappa + coeff(p);
        return acc + coeff(-1) / kappa + coeff(-2) / (kappa * kappa) +
               coeff(-3) / (kappa * kappa * kappa);
    }
};

double linfit_slope(const std::vector<double>& x, const std::vector<double>& y,
                    double* intercept = nullptr) {
    const std::size_t n = x.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double dn = static_cast<double>(n);
    const double denom = dn * sxx - sx * sx;
    if (denom == 0.0) throw std::runtime_error("degenerate regression abscissae");
    const double slope = (dn * sxy - sx * sy) / denom;
    if (intercept) *intercept = (sy - slope * sx) / dn;
    return slope;
}

}  // namespace

BlowupPair build_blowup_pair(long n, const BeamParameters& params, double d0,
                             std::size_t n_cells) {
    params.validate();
    if (n < 1) throw std::invalid_argument("mode index n must be >= 1");
    if (!(d0 > 0.0)) throw std::invalid_argument("d0 must be positive");
    if (n_cells < 8 * static_cast<std::size_t>(n))
        throw std::invalid_argument(
            "grid under-resolves mode n: need n_cells >= 8 n");

    const double L = params.length;
    const double kappa = static_cast<double>(n) * std::numbers::pi / L;
    const double speed = std::sqrt(params.k1 / params.rho1);  // sqrt(k1/rho1)
    const double lambda = kappa * speed;

    BlowupPair out;
    out.n = n;
    out.lambda_n = lambda;

    // Closed-form amplitudes:
    //   A_n = -i kappa (d0/k1) sqrt(rho1/k1)
    //         + (k2/k1)(rho2/k2 - rho1/k1) - (rho1/k1) kappa^{-2}
    //   B_n = (rho1/k1) kappa^{-1}
    const double inv_speed = std::sqrt(params.rho1 / params.k1);
    const Laurent A = Laurent::term(cplx{0.0, -d0 / params.k1 * inv_speed}, 1) +
                      Laurent::term(params.k2 / params.k1 *
                                        params.impedance_mismatch(),
                                    0) +
                      Laurent::term(-params.rho1 / params.k1, -2);
    const Laurent B = Laurent::term(params.rho1 / params.k1, -1);

    // C1 = ((k1/rho1) kappa^2 - lambda^2) A + (k1/rho1) kappa B
    // C2 = (k1/rho2) kappa A
    //      + (-lambda^2 + k1/rho2 + ((k2 + i lambda d0)/rho2) kappa^2) B
    // with lambda = speed * kappa carried symbolically (lambda^2 coefficient
    // speed^2 meets k1/rho1 term-by-term).
    const double speed2 = speed * speed;
    const Laurent C1 =
        Laurent::term(params.k1 / params.rho1 - speed2, 2) * A +
        Laurent::term(params.k1 / params.rho1, 1) * B;
    const Laurent C2 =
        Laurent::term(params.k1 / params.rho2, 1) * A +
        (Laurent::term(-speed2 + params.k2 / params.rho2, 2) +
         Laurent::term(params.k1 / params.rho2, 0) +
         Laurent::term(cplx{0.0, speed * d0 / params.rho2}, 3)) *
            B;

    out.A_n = A.eval(kappa);
    out.B_n = B.eval(kappa);
    out.C1 = C1.eval(kappa);
    out.C2 = C2.eval(kappa);

    // Grid samples (DirichletNeumann layout): U = (A sin, i lambda A sin,
    // B cos, i lambda B cos), F = (0, sin, 0, 0).
    out.U = GridState::zeros(n_cells, L, BoundaryConditions::DirichletNeumann);
    out.F = GridState::zeros(n_cells, L, BoundaryConditions::DirichletNeumann);
    const cplx il{0.0, lambda};
    const double dn_cells = static_cast<double>(n_cells);
    for (std::size_t i = 0; i <= n_cells; ++i) {
        const double theta =
            std::numbers::pi * (static_cast<double>(n) * static_cast<double>(i)) /
            dn_cells;
        double s = std::sin(theta);
        const double cth = std::cos(theta);
        if (i == 0 || i == n_cells) s = 0.0;  // pin the Dirichlet samples
        out.U.u[i] = out.A_n * s;
        out.U.v[i] = il * out.A_n * s;
        out.U.y[i] = out.B_n * cth;
        out.U.z[i] = il * out.B_n * cth;
        out.F.v[i] = s;
    }

    out.norm_U = std::sqrt(2.0 * energy(out.U, params));
    out.norm_F = std::sqrt(2.0 * energy(out.F, params));
    return out;
}

BlowupScan blowup_exponent(const std::vector<long>& n_list,
                           const BeamParameters& params, double d0,
                           std::size_t n_cells) {
    if (n_list.size() < 2)
        throw std::invalid_argument("need at least two modes for a slope");
    for (std::size_t i = 1; i < n_list.size(); ++i)
        if (n_list[i] <= n_list[i - 1])
            throw std::invalid_argument("mode list must be strictly ascending");

    BlowupScan scan;
    for (long n : n_list) {
        if (n < 1 || n_cells < 8 * static_cast<std::size_t>(n)) {
            ++scan.skipped;
            continue;
        }
        const BlowupPair pair = build_blowup_pair(n, params, d0, n_cells);
        scan.lambda.push_back(pair.lambda_n);
        scan.ratio.push_back(pair.norm_U / pair.norm_F);
    }
    if (scan.lambda.size() < 2)
        throw std::invalid_argument("fewer than two resolved modes in list");
    std::vector<double> lx(scan.lambda.size()), ly(scan.lambda.size());
    for (std::size_t i = 0; i < scan.lambda.size(); ++i) {
        lx[i] = std::log(scan.lambda[i]);
        ly[i] = std::log(scan.ratio[i]);
    }
    scan.slope = linfit_slope(lx, ly);
    return scan;
}

ResolventSample resolvent_norm_discrete(const DiscreteGenerator& gen, double omega,
                                        double tol, int max_iter,
                                        std::uint64_t seed) {
    if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");
    const std::size_t dim = gen.dim();

    ResolventSample sample;
    sample.omega = omega;

    // Factor i*omega*I - A; a discretely singular shift is nudged by 1e-8.
    double w = omega;
    std::unique_ptr<BandedLU> lu;
    for (int attempt = 0; attempt < 2; ++attempt) {
        BandedMatrix shifted = gen.shifted_action(cplx{0.0, w}, cplx{-1.0, 0.0});
        lu = std::make_unique<BandedLU>(shifted);
        if (!lu->singular()) break;
        lu.reset();
        w += 1e-8;
    }
    if (!lu) throw std::runtime_error("resolvent factorization failed twice");
    sample.omega = w;

    // Power iteration for the top G-singular value of B^{-1}:
    //   v <- G^{-1} B^{-H} G B^{-1} v,  estimate = ||B^{-1} v||_G^2.
    // DirichletNeumann iterates stay in the zero-mean subspace (an exactly
    // invariant, G-orthogonal reduction: the complement carries the undamped
    // mean oscillator excluded from the state space).
    Rng rng(seed);
    std::vector<cplx> v(dim), work(dim);
    for (auto& e : v) e = rng.normal_complex();
    gen.project_zero_mean(v.data());
    {
        const double nv = gen.norm_packed(v.data());
        if (nv == 0.0) throw std::runtime_error("degenerate start vector");
        for (auto& e : v) e /= nv;
    }

    double estimate = 0.0;
    for (int it = 1; it <= max_iter; ++it) {
        work = v;
        lu->solve(work);  // w = B^{-1} v
        const double nw = gen.norm_packed(work.data());
        const double next = nw * nw;  // Rayleigh quotient of the inverse pair

        gen.gram_packed(work.data(), v.data());  // v = G w  (reuse v as scratch)
        lu->solve_adjoint(v.data());             // v = B^{-H} G w
        gen.gram_factorization().solve(v.data());  // v = G^{-1} B^{-H} G w
        gen.project_zero_mean(v.data());
        const double nv = gen.norm_packed(v.data());
        if (nv == 0.0) throw std::runtime_error("power iteration collapsed");
        for (auto& e : v) e /= nv;

        sample.iterations = it;
        if (it > 1 && std::abs(next - estimate) <= tol * std::abs(next)) {
            estimate = next;
            sample.converged = true;
            break;
        }
        estimate = next;
    }
    sample.norm = std::sqrt(estimate);
    return sample;
}

ScanResult resolvent_growth_scan(const DiscreteGenerator& gen,
                                 const std::vector<double>& omegas,
                                 double tol, int threads, std::uint64_t seed) {
    if (omegas.empty()) throw std::invalid_argument("empty frequency list");
    for (std::size_t i = 0; i < omegas.size(); ++i) {
        if (!(omegas[i] > 0.0))
            throw std::invalid_argument("scan frequencies must be positive");
        if (i > 0 && omegas[i] <= omegas[i - 1])
            throw std::invalid_argument("scan frequencies must be increasing");
    }

    ScanResult result;
    result.samples.resize(omegas.size());

    const int n_threads =
        std::max(1, std::min<int>(threads, static_cast<int>(omegas.size())));
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= omegas.size()) return;
            result.samples[i] =
                resolvent_norm_discrete(gen, omegas[i], tol, 500, seed + i);
        }
    };
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(n_threads));
        for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    std::vector<double> lx, ly;
    double max_norm = 0.0;
    for (const auto& s : result.samples) {
        max_norm = std::max(max_norm, s.norm);
        lx.push_back(std::log(s.omega));
        ly.push_back(std::log(s.norm));
    }
    result.slope = linfit_slope(lx, ly, &result.intercept);
    result.diverging = max_norm >= 10.0;
    return result;
}

}  // namespace tkv::resolvent

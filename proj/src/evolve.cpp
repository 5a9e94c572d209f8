#include "tkv/evolve.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "tkv/beam.hpp"
#include "tkv/rng.hpp"

namespace tkv {

MidpointStepper::MidpointStepper(const DiscreteGenerator& gen, double dt) : gen_(gen) {
    rhs_.resize(gen_.dim());
    set_dt(dt);
}

void MidpointStepper::set_dt(double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("MidpointStepper: dt must be positive");
    dt_ = dt;
    forward_ = gen_.shifted_action({1.0, 0.0}, {0.5 * dt, 0.0});
    BandedMatrix back = gen_.shifted_action({1.0, 0.0}, {-0.5 * dt, 0.0});
    backward_ = std::make_unique<BandedLU>(back);
    if (backward_->singular())
        throw std::runtime_error("MidpointStepper: singular midpoint system");
}

void MidpointStepper::step(std::vector<cplx>& x) {
    forward_.matvec(x.data(), rhs_.data());
    backward_->solve(rhs_.data());
    x.swap(rhs_);
}

double default_dt(const BeamParameters& params, std::size_t n_cells) {
    const double h = params.length / static_cast<double>(n_cells);
    return h / params.max_wave_speed();
}

GridState step_midpoint(const DiscreteGenerator& gen, const GridState& state, double dt) {
    MidpointStepper stepper(gen, dt);
    std::vector<cplx> x(gen.dim());
    gen.pack(state, x.data());
    stepper.step(x);
    return gen.unpack(x.data());
}

namespace {

double mean_drift(const DiscreteGenerator& gen, const std::vector<cplx>& x) {
    if (gen.bc() != BoundaryConditions::DirichletNeumann) return 0.0;
    const GridState s = gen.unpack(x.data());
    const double h = s.dx();
    cplx my{0.0, 0.0}, mz{0.0, 0.0};
    for (std::size_t i = 0; i <= s.n_cells; ++i) {
        const double w = (i == 0 || i == s.n_cells) ? 0.5 * h : h;
        my += w * s.y[i];
        mz += w * s.z[i];
    }
    return std::max(std::abs(my), std::abs(mz)) / s.length;
}

}  // namespace

EnergyTrace simulate(const DiscreteGenerator& gen, const GridState& u0, double dt,
                     double t_final, std::size_t stride) {
    if (!(t_final > 0.0)) throw std::invalid_argument("simulate: t_final must be positive");
    if (stride == 0) stride = 1;
    const auto violations = state_violations(u0);
    if (!violations.empty())
        throw std::invalid_argument("simulate: inadmissible initial state: " + violations.front());

    const bool monotone_expected = gen.profile_report().passes;
    EnergyTrace trace;
    trace.graph_norm0 = graph_norm(u0, gen);

    std::vector<cplx> x(gen.dim());
    gen.pack(u0, x.data());
    MidpointStepper stepper(gen, dt);

    const double e0 = energy(gen.unpack(x.data()), gen.params());
    trace.times.push_back(0.0);
    trace.energies.push_back(e0);
    trace.max_mean_drift = mean_drift(gen, x);

    const double mono_tol = 1e-12 * e0;
    double t = 0.0;
    double last_sampled = e0;
    std::size_t step_count = 0;
    while (t < t_final - 1e-12 * t_final) {
        double step_dt = dt;
        if (t + dt > t_final) {
            step_dt = t_final - t;
            stepper.set_dt(step_dt);
        }
        stepper.step(x);
        t += step_dt;
        ++step_count;
        const bool last = !(t < t_final - 1e-12 * t_final);
        if (step_count % stride == 0 || last) {
            const double e = energy(gen.unpack(x.data()), gen.params());
            if (!std::isfinite(e)) throw std::runtime_error("simulate: non-finite energy");
            if (monotone_expected && e > last_sampled + mono_tol * static_cast<double>(stride))
                throw std::runtime_error("simulate: energy increased under valid damping");
            trace.times.push_back(t);
            trace.energies.push_back(e);
            trace.max_mean_drift = std::max(trace.max_mean_drift, mean_drift(gen, x));
            last_sampled = e;
        }
    }
    return trace;
}

DecayFit fit_decay_exponent(const EnergyTrace& trace, double t_lo, double t_hi) {
    if (!(t_lo > 0.0) || !(t_hi > t_lo))
        throw std::invalid_argument("fit_decay_exponent: need 0 < t_lo < t_hi");
    DecayFit fit;
    std::vector<double> lt, le;
    bool saw_nonpositive = false;
    for (std::size_t i = 0; i < trace.times.size(); ++i) {
        const double t = trace.times[i];
        if (t < t_lo || t > t_hi) continue;
        const double e = trace.energies[i];
        if (!(e > 0.0)) {
            saw_nonpositive = true;
            break;  // fit on the positive prefix
        }
        lt.push_back(std::log(t));
        le.push_back(std::log(e));
    }
    fit.truncated_zero_energy = saw_nonpositive;
    fit.n_used = lt.size();
    if (lt.size() < 10)
        throw std::invalid_argument(
            "fit_decay_exponent: fewer than 10 positive samples in window");

    const double n = static_cast<double>(lt.size());
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < lt.size(); ++i) {
        sx += lt[i];
        sy += le[i];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < lt.size(); ++i) {
        const double dx = lt[i] - mx, dy = le[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    const double slope = sxy / sxx;
    fit.p = -slope;
    fit.C = std::exp(my - slope * mx);
    fit.r2 = (syy > 0.0) ? (sxy * sxy) / (sxx * syy) : 1.0;

    // curvature diagnostic: quadratic coefficient of the centered log-log fit
    // dy = a + b dx + c dx^2; normal equations with moments (sum dx = 0):
    //   [ n    0    sxx ] [a]   [ 0    ]
    //   [ 0   sxx   s3  ] [b] = [ sxy  ]
    //   [ sxx  s3   s4  ] [c]   [ sx2y ]
    double s3 = 0, s4 = 0, sx2y = 0;
    for (std::size_t i = 0; i < lt.size(); ++i) {
        const double dx = lt[i] - mx, dy = le[i] - my;
        s3 += dx * dx * dx;
        s4 += dx * dx * dx * dx;
        sx2y += dx * dx * dy;
    }
    const double det3 = n * (sxx * s4 - s3 * s3) - sxx * sxx * sxx;
    if (std::abs(det3) > 0.0) {
        // Cramer's rule for c (replace third column by the right-hand side)
        fit.curvature = n * (sxx * sx2y - s3 * sxy) / det3;
    }
    fit.power_law = std::abs(fit.curvature) < 0.5;
    return fit;
}

GridState make_modal_state(const BeamParameters& params, BoundaryConditions bc,
                           std::size_t n_cells, std::size_t n_max,
                           double amplitude_power, std::uint64_t seed) {
    params.validate();
    GridState s = GridState::zeros(n_cells, params.length, bc);
    Rng rng(seed);
    const double pi = 3.141592653589793;
    const bool cosine_z = (bc == BoundaryConditions::DirichletNeumann);
    for (std::size_t n = 1; n <= n_max; ++n) {
        const double a = std::pow(static_cast<double>(n), amplitude_power);
        const cplx phase_v = a * rng.unit_phase();
        const cplx phase_z = a * rng.unit_phase();
        for (std::size_t i = 0; i <= n_cells; ++i) {
            const double arg =
                pi * static_cast<double>(n) * static_cast<double>(i) /
                static_cast<double>(n_cells);
            s.v[i] += phase_v * std::sin(arg);
            s.z[i] += phase_z * (cosine_z ? std::cos(arg) : std::sin(arg));
        }
    }
    // pin the exact boundary zeros that the sine sums imply
    s.v.front() = s.v.back() = cplx{0.0, 0.0};
    if (!cosine_z) s.z.front() = s.z.back() = cplx{0.0, 0.0};
    return s;
}

}  // namespace tkv

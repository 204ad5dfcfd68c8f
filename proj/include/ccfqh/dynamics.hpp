#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <vector>

#include "ccfqh/eigensolver.hpp"
#include "ccfqh/hamiltonians.hpp"

// Schrodinger propagation under scheduled Hamiltonians: the four-step
// adiabatic preparation ramp and adiabatic solenoid flux insertion. The
// propagator is piecewise-constant in time (step <= dt_max) with a Lanczos
// approximation of exp(-i H dt) per step.

namespace ccfqh {

struct ScheduleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NormDrift : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Control tuple: pinning scale (multiplies the base pinning shifts), Rabi
// frequency scale (the effective hopping scales as its square), and solenoid
// flux in units of the flux quantum.
struct Controls {
    double eps_scale = 0;
    double omega_scale = 1;
    double flux = 0;
};

struct RampSchedule {
    enum class Interp { Linear, Smoothstep };

    struct Node {
        double tau;  // normalized time in [0,1]
        Controls c;
    };

    double T = 1.0;  // total duration (units 1/t)
    std::vector<Node> nodes;
    Interp interp = Interp::Smoothstep;

    void validate() const {
        if (T <= 0) throw ScheduleError("schedule duration must be positive");
        if (nodes.size() < 2) throw ScheduleError("schedule needs at least two nodes");
        if (std::abs(nodes.front().tau) > 1e-12 || std::abs(nodes.back().tau - 1.0) > 1e-12)
            throw ScheduleError("schedule must span tau in [0,1]");
        for (std::size_t i = 1; i < nodes.size(); ++i)
            if (nodes[i].tau < nodes[i - 1].tau) throw ScheduleError("schedule nodes must be sorted");
    }

    Controls at(double tau) const {
        tau = std::clamp(tau, 0.0, 1.0);
        std::size_t i = 1;
        while (i + 1 < nodes.size() && tau > nodes[i].tau) ++i;
        const Node& a = nodes[i - 1];
        const Node& b = nodes[i];
        const double span = b.tau - a.tau;
        double u = span > 0 ? (tau - a.tau) / span : 1.0;
        if (interp == Interp::Smoothstep) u = u * u * (3 - 2 * u);
        Controls c;
        c.eps_scale = a.c.eps_scale + u * (b.c.eps_scale - a.c.eps_scale);
        c.omega_scale = a.c.omega_scale + u * (b.c.omega_scale - a.c.omega_scale);
        c.flux = a.c.flux + u * (b.c.flux - a.c.flux);
        return c;
    }
};

// The paper's preparation ramp: pinned product state with lasers off, then
// (3) raise the Rabi frequencies, then (4) lower the pinning to zero.
inline RampSchedule preparation_schedule(double T, RampSchedule::Interp interp = RampSchedule::Interp::Smoothstep) {
    RampSchedule s;
    s.T = T;
    s.interp = interp;
    s.nodes = {{0.0, {1.0, 0.0, 0.0}}, {0.5, {1.0, 1.0, 0.0}}, {1.0, {0.0, 1.0, 0.0}}};
    return s;
}

// Flux ramp 0 -> target at full coupling.
inline RampSchedule flux_schedule(double T, double target_flux = 1.0,
                                  RampSchedule::Interp interp = RampSchedule::Interp::Smoothstep) {
    RampSchedule s;
    s.T = T;
    s.interp = interp;
    s.nodes = {{0.0, {0.0, 1.0, 0.0}}, {1.0, {0.0, 1.0, target_flux}}};
    return s;
}

// Time-dependent Hamiltonian interface for the propagator: prepare() is
// called whenever the control tuple changes, apply() is y = H x.
class TimeDependentHamiltonian {
  public:
    virtual ~TimeDependentHamiltonian() = default;
    virtual std::int64_t dim() const = 0;
    virtual void prepare(const Controls& c) = 0;
    virtual void apply(const cplx* x, cplx* y) const = 0;

    double energy(const std::vector<cplx>& psi) const {
        std::vector<cplx> hps(psi.size());
        apply(psi.data(), hps.data());
        cplx e(0, 0);
        for (std::size_t i = 0; i < psi.size(); ++i) e += std::conj(psi[i]) * hps[i];
        return e.real();
    }
};

// Hard-core model: H(c) = omega_scale^2 * H_hop(flux) + eps_scale * H_pin.
// Only the hop matrix depends on the flux; its values are rebuilt when the
// flux changes (the sparsity pattern is static).
class HardcoreContext final : public TimeDependentHamiltonian {
  public:
    HardcoreContext(const HardCoreBasis& basis, const GaugeConfig& gauge, double t,
                    const PinningPotential& pin, std::pair<int, int> flux_plaquette = {-1, -1})
        : basis_(basis), gauge_(gauge), t_(t), plaq_(flux_plaquette) {
        pin.validate(basis.lattice);
        pin_mat_ = build_hardcore_fqh(basis, landau_phases(basis.lattice, strip_solenoids()), 0.0, pin);
        prepare({0.0, 1.0, 0.0});
    }

    std::int64_t dim() const override { return static_cast<std::int64_t>(basis_.size()); }

    void prepare(const Controls& c) override {
        if (!built_ || c.flux != built_flux_) {
            hop_ = build_hardcore_fqh(basis_, pattern_at(c.flux), t_, {});
            built_flux_ = c.flux;
            built_ = true;
        }
        scale_hop_ = c.omega_scale * c.omega_scale;
        scale_pin_ = c.eps_scale;
    }

    void apply(const cplx* x, cplx* y) const override {
        hop_.matvec(x, y);
        if (scale_hop_ != 1.0)
            for (std::int64_t i = 0; i < hop_.dim; ++i) y[i] *= scale_hop_;
        if (scale_pin_ != 0.0) {
            std::vector<cplx> tmp(pin_mat_.dim);
            pin_mat_.matvec(x, tmp.data());
            for (std::int64_t i = 0; i < pin_mat_.dim; ++i) y[i] += scale_pin_ * tmp[i];
        }
    }

    PhasePattern pattern_at(double flux) const {
        GaugeConfig g = gauge_;
        if (flux != 0.0) {
            if (plaq_.first < 0) throw ScheduleError("flux control used without a flux plaquette");
            g.solenoids.push_back({plaq_.first + 0.5, plaq_.second + 0.5, flux});
        }
        if (g.solenoids.empty()) return landau_phases(basis_.lattice, g);
        return general_gauge_phases(basis_.lattice, landau_vector_potential(g.alpha.value()), g);
    }

    const HardCoreBasis& basis() const { return basis_; }

  private:
    GaugeConfig strip_solenoids() const {
        GaugeConfig g = gauge_;
        g.solenoids.clear();
        return g;
    }

    const HardCoreBasis& basis_;
    GaugeConfig gauge_;
    double t_;
    std::pair<int, int> plaq_;
    SparseHermitian hop_, pin_mat_;
    bool built_ = false;
    double built_flux_ = 0;
    double scale_hop_ = 1, scale_pin_ = 0;
};

// Cavity model: the exchange part scales with omega_scale and carries the
// laser phases; the photon part (delta diagonal plus hopping) and the
// pinning are control-independent apart from eps_scale.
class CavityContext final : public TimeDependentHamiltonian {
  public:
    CavityContext(const CavityBasis& basis, const GaugeConfig& gauge, const CavityParams& par,
                  const PinningPotential& pin, std::pair<int, int> flux_plaquette = {-1, -1})
        : basis_(basis), gauge_(gauge), par_(par), pin_(pin), plaq_(flux_plaquette) {
        pin_.validate(basis.lattice);
        prepare({0.0, 1.0, 0.0});
    }

    std::int64_t dim() const override { return static_cast<std::int64_t>(basis_.size()); }

    void prepare(const Controls& c) override {
        if (!built_ || c.flux != built_flux_ || c.omega_scale != built_scale_) {
            GaugeConfig g = gauge_;
            if (c.flux != 0.0) {
                if (plaq_.first < 0) throw ScheduleError("flux control used without a flux plaquette");
                g.solenoids.push_back({plaq_.first + 0.5, plaq_.second + 0.5, c.flux});
            }
            PhasePattern pat = g.solenoids.empty()
                                   ? landau_phases(basis_.lattice, g)
                                   : general_gauge_phases(basis_.lattice,
                                                          landau_vector_potential(g.alpha.value()), g);
            H_ = build_cavity_model(basis_, pat, par_, {}, c.omega_scale);
            built_flux_ = c.flux;
            built_scale_ = c.omega_scale;
            built_ = true;
        }
        scale_pin_ = c.eps_scale;
    }

    void apply(const cplx* x, cplx* y) const override {
        H_.matvec(x, y);
        if (scale_pin_ != 0.0) {
            const int S = basis_.lattice.sites();
            for (std::size_t i = 0; i < basis_.states.size(); ++i) {
                double d = 0;
                for (const auto& [site, eps] : pin_.shifts)
                    if (CavityBasis::site_code(basis_.states[i], site) == CavityBasis::kAtom) d -= eps;
                (void)S;
                if (d != 0) y[i] += scale_pin_ * d * x[i];
            }
        }
    }

  private:
    const CavityBasis& basis_;
    GaugeConfig gauge_;
    CavityParams par_;
    PinningPotential pin_;
    std::pair<int, int> plaq_;
    SparseHermitian H_;
    bool built_ = false;
    double built_flux_ = 0, built_scale_ = 1;
    double scale_pin_ = 0;
};

struct PropagationResult {
    StateVector final;
    std::vector<double> times;
    std::vector<double> energy;
    std::vector<double> norm;
    std::vector<Controls> controls;
    std::vector<double> fidelity;  // only when a fidelity probe is given
};

namespace detail {

// psi <- exp(-i H dt) psi via a Lanczos Krylov subspace. When the subspace
// cannot reach the tolerance the step is halved recursively.
inline void krylov_exp_step(const TimeDependentHamiltonian& H, std::vector<cplx>& psi, double dt,
                            int max_krylov = 40, double tol = 1e-12, int depth = 0) {
    const std::int64_t n = H.dim();
    const double psi_norm = nrm2(psi);
    if (psi_norm == 0 || dt == 0) return;

    std::vector<std::vector<cplx>> V;
    std::vector<double> alpha, beta;
    V.emplace_back(psi);
    scal(V[0], 1.0 / psi_norm);

    int m = 0;
    bool converged = false;
    Eigen::VectorXcd small;
    for (int j = 0; j < max_krylov; ++j) {
        std::vector<cplx> w(n);
        H.apply(V[j].data(), w.data());
        const double a = dotc(V[j], w).real();
        alpha.push_back(a);
        axpy(w, -a, V[j]);
        if (j > 0) axpy(w, -beta[j - 1], V[j - 1]);
        orthogonalize_against(w, V);
        const double b = nrm2(w);
        m = j + 1;

        // exponentiate the current tridiagonal and check the tail estimate
        Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
        for (int i = 0; i < m; ++i) {
            T(i, i) = alpha[i];
            if (i + 1 < m) T(i, i + 1) = T(i + 1, i) = beta[i];
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
        Eigen::VectorXcd phases(m);
        for (int i = 0; i < m; ++i) phases(i) = std::exp(cplx(0, -dt * es.eigenvalues()(i)));
        small = es.eigenvectors() * (phases.asDiagonal() * es.eigenvectors().row(0).adjoint());

        const double tail = (m > 1 ? std::abs(small(m - 1)) : 1.0) * std::abs(b * dt);
        if (b < 1e-14 || tail < tol || m >= static_cast<int>(n)) {
            converged = true;
            break;
        }
        if (j + 1 == max_krylov) break;
        beta.push_back(b);
        scal(w, 1.0 / b);
        V.push_back(std::move(w));
    }

    if (!converged) {
        if (depth > 24) throw NormDrift("Krylov step did not converge even after halving");
        krylov_exp_step(H, psi, 0.5 * dt, max_krylov, tol, depth + 1);
        krylov_exp_step(H, psi, 0.5 * dt, max_krylov, tol, depth + 1);
        return;
    }

    std::fill(psi.begin(), psi.end(), cplx(0, 0));
    for (int i = 0; i < m; ++i) axpy(psi, psi_norm * cplx(small(i)), V[i]);
}

}  // namespace detail

// Evolve `initial` under the scheduled Hamiltonian. The per-step propagator
// is the Krylov approximation of the exact step exponential; norm drift
// beyond 1e-8 raises NormDrift (dt_max too large for the schedule).
inline PropagationResult propagate(
    const StateVector& initial, const RampSchedule& sched, TimeDependentHamiltonian& H, double dt_max,
    int samples = 64, const std::function<double(const std::vector<cplx>&)>& fidelity_probe = nullptr) {
    sched.validate();
    if (static_cast<std::int64_t>(initial.dim()) != H.dim())
        throw std::invalid_argument("propagate: state dimension mismatch");
    if (dt_max <= 0) throw ScheduleError("dt_max must be positive");

    const std::int64_t nsteps = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(sched.T / dt_max)));
    const double dt = sched.T / static_cast<double>(nsteps);
    const std::int64_t stride = std::max<std::int64_t>(1, nsteps / std::max(1, samples));

    PropagationResult res;
    res.final = initial;
    std::vector<cplx>& psi = res.final.amps;

    auto record = [&](double time) {
        const Controls c = sched.at(sched.T > 0 ? time / sched.T : 0.0);
        H.prepare(c);
        res.times.push_back(time);
        res.energy.push_back(H.energy(psi));
        res.norm.push_back(detail::nrm2(psi));
        res.controls.push_back(c);
        if (fidelity_probe) res.fidelity.push_back(fidelity_probe(psi));
    };
    record(0.0);

    for (std::int64_t step = 0; step < nsteps; ++step) {
        const double tau_mid = (static_cast<double>(step) + 0.5) / static_cast<double>(nsteps);
        H.prepare(sched.at(tau_mid));
        detail::krylov_exp_step(H, psi, dt);
        const double nn = detail::nrm2(psi);
        if (std::abs(nn - 1.0) > 1e-8)
            throw NormDrift("norm drifted to " + std::to_string(nn) + "; reduce dt_max");
        if ((step + 1) % stride == 0 || step + 1 == nsteps) record(dt * static_cast<double>(step + 1));
    }
    return res;
}

// Adiabatic solenoid insertion at a bulk plaquette. The context must have
// been constructed with the same flux plaquette; the schedule's flux channel
// ramps the solenoid in units of the flux quantum.
inline PropagationResult insert_flux(const StateVector& ground, std::pair<int, int> plaquette,
                                     const RampSchedule& schedule, HardcoreContext& context,
                                     double dt_max, int samples = 64) {
    const LatticeSpec& lat = context.basis().lattice;
    if (plaquette.first < 0 || plaquette.first >= lat.Lx - 1 || plaquette.second < 0 ||
        plaquette.second >= lat.Ly - 1)
        throw std::invalid_argument("insert_flux: plaquette must be a bulk plaquette");
    return propagate(ground, schedule, context, dt_max, samples);
}

}  // namespace ccfqh

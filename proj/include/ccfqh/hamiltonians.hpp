#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include "ccfqh/gauge.hpp"
#include "ccfqh/hilbert.hpp"
#include "ccfqh/sparse.hpp"

// The three model layers: gauge-phase hopping in the one-particle sector,
// the hard-core boson / XX spin model, and the two-mode cavity model with
// virtual photons. Plus the parameter-regime report and the decoherence
// budget estimate.

namespace ccfqh {

struct PatternMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct PinningPotential {
    // (site, eps): adds -eps |1><1| at that site, eps >= 0
    std::vector<std::pair<int, double>> shifts;

    PinningPotential() = default;
    PinningPotential(std::initializer_list<std::pair<int, double>> s) : shifts(s) {}

    void validate(const LatticeSpec& lat) const {
        for (std::size_t i = 0; i < shifts.size(); ++i) {
            if (shifts[i].first < 0 || shifts[i].first >= lat.sites())
                throw std::invalid_argument("pinning site off lattice");
            if (shifts[i].second < 0) throw std::invalid_argument("pinning shift must be >= 0");
            for (std::size_t j = i + 1; j < shifts.size(); ++j)
                if (shifts[j].first == shifts[i].first)
                    throw std::invalid_argument("duplicate pinning site");
        }
    }

    double at(int site) const {
        for (const auto& [s, e] : shifts)
            if (s == site) return e;
        return 0.0;
    }
};

namespace detail {

struct DirectedLink {
    int from, to;
    double phase;  // hop enters as -t * exp(i*phase) * c^dag_to c_from
    bool along_x;
    bool wrap;
};

inline std::vector<DirectedLink> directed_links(const LatticeSpec& lat, const PhasePattern& pat) {
    if (!(pat.lattice == lat)) throw PatternMismatch("phase pattern built for a different lattice");
    std::vector<DirectedLink> links;
    for (int q = 0; q < lat.Ly; ++q)
        for (int p = 0; p < lat.Lx; ++p) {
            if (lat.has_x_link(p)) {
                const double ph = pat.link_phase_x(p, q);
                const int a = lat.site(p, q), b = lat.site((p + 1) % lat.Lx, q);
                links.push_back({a, b, ph, true, p == lat.Lx - 1});
                links.push_back({b, a, -ph, true, p == lat.Lx - 1});
            }
            if (lat.has_y_link(q)) {
                const double ph = pat.link_phase_y(p, q);
                const int a = lat.site(p, q), b = lat.site(p, (q + 1) % lat.Ly);
                links.push_back({a, b, ph, false, q == lat.Ly - 1});
                links.push_back({b, a, -ph, false, q == lat.Ly - 1});
            }
        }
    return links;
}

}  // namespace detail

// One-particle sector of Eq.-(2)-type hopping: -t e^{i phi} on every
// directed link.
inline SparseHermitian build_single_particle(const LatticeSpec& lat, const PhasePattern& pat,
                                             double t) {
    const auto links = detail::directed_links(lat, pat);
    return SparseHermitian::build(lat.sites(), [&](std::int64_t row, auto emit) {
        for (const auto& l : links)
            if (l.to == row) emit(l.from, -t * std::polar(1.0, l.phase));
    });
}

// Hard-core gauge Hamiltonian (XX model with Peierls phases) with optional
// site pinning -eps |1><1|.
inline SparseHermitian build_hardcore_fqh(const HardCoreBasis& basis, const PhasePattern& pat,
                                          double t, const PinningPotential& pin = {}) {
    const LatticeSpec& lat = basis.lattice;
    if (!(pat.lattice == lat)) throw PatternMismatch("phase pattern built for a different lattice");
    pin.validate(lat);
    const auto links = detail::directed_links(lat, pat);
    return SparseHermitian::build(static_cast<std::int64_t>(basis.size()), [&](std::int64_t row, auto emit) {
        const std::uint64_t m = basis.states[row];
        double diag = 0;
        for (const auto& [site, eps] : pin.shifts)
            if ((m >> site) & 1ull) diag -= eps;
        if (diag != 0) emit(row, cplx(diag, 0));
        // row state <r| reached from |c> by hopping from -> to requires r to
        // have `to` occupied and `from` empty
        for (const auto& l : links) {
            if (!((m >> l.to) & 1ull)) continue;
            if ((m >> l.from) & 1ull) continue;
            const std::uint64_t c = (m & ~(1ull << l.to)) | (1ull << l.from);
            emit(static_cast<std::int64_t>(basis.index(c)), -t * std::polar(1.0, l.phase));
        }
    });
}

// Cavity / laser parameters per direction and the derived effective scales.
struct CavityParams {
    struct Mode {
        double g = 0;      // atom-cavity coupling
        double Delta = 0;  // detuning
        double Omega = 0;  // classical Rabi magnitude
        double J = 0;      // inter-cavity photon hopping

        double delta() const { return g * g / Delta; }
        double omega() const { return g * Omega / Delta; }
        double t() const { return J * (omega() / delta()) * (omega() / delta()); }
    };
    Mode X, Y;

    CavityParams(Mode x, Mode y) : X(x), Y(y) {
        for (const Mode* m : {&X, &Y})
            if (m->g <= 0 || m->Delta <= 0 || m->Omega <= 0 || m->J <= 0)
                throw std::invalid_argument("CavityParams: all magnitudes must be positive");
        const double tx = X.t(), ty = Y.t();
        if (std::abs(tx - ty) > 1e-12 * std::max(std::abs(tx), std::abs(ty)))
            throw std::invalid_argument("CavityParams: J^X(w^X/d^X)^2 and J^Y(w^Y/d^Y)^2 disagree");
    }

    // symmetric operating point Delta/1000 = g/100 = Omega = J
    static CavityParams paper_point(double J) {
        Mode m{100.0 * J, 1000.0 * J, J, J};
        return CavityParams(m, m);
    }

    double t() const { return X.t(); }
};

// Cavity model of the eliminated-atomic-excitation Hamiltonian in the
// restricted (<=1 excitation per site) subspace:
//   delta^mu per photon (a photon forces atom |0> at its site in this
//   encoding), on-site exchange omega^mu (e^{i theta^mu_j} a^mu_j sigma^+_j
//   + h.c.), and real photon hopping -J^X / -J^Y. Torus wrap photon hops
//   carry the pattern's twist phases so the eliminated model reproduces the
//   hard-core model's wrap link phases; on lattices where the twists vanish
//   mod 2pi (e.g. 4x4 at alpha = 1/4) this is the literal model.
inline SparseHermitian build_cavity_model(const CavityBasis& basis, const PhasePattern& pat,
                                          const CavityParams& par, const PinningPotential& pin = {},
                                          double omega_scale = 1.0) {
    const LatticeSpec& lat = basis.lattice;
    if (!(pat.lattice == lat)) throw PatternMismatch("phase pattern built for a different lattice");
    pin.validate(lat);

    struct PhotonLink {
        int from, to;
        cplx amp;  // coefficient of a^dag_to a_from
        int code;  // kPhotonX or kPhotonY
    };
    std::vector<PhotonLink> hops;
    for (int q = 0; q < lat.Ly; ++q)
        for (int p = 0; p < lat.Lx; ++p) {
            if (lat.has_x_link(p)) {
                const int a = lat.site(p, q), b = lat.site((p + 1) % lat.Lx, q);
                const double tw = (p == lat.Lx - 1) ? pat.twist_x[q] : 0.0;
                hops.push_back({a, b, -par.X.J * std::polar(1.0, tw), CavityBasis::kPhotonX});
                hops.push_back({b, a, -par.X.J * std::polar(1.0, -tw), CavityBasis::kPhotonX});
            }
            if (lat.has_y_link(q)) {
                const int a = lat.site(p, q), b = lat.site(p, (q + 1) % lat.Ly);
                const double tw = (q == lat.Ly - 1) ? pat.twist_y[p] : 0.0;
                hops.push_back({a, b, -par.Y.J * std::polar(1.0, tw), CavityBasis::kPhotonY});
                hops.push_back({b, a, -par.Y.J * std::polar(1.0, -tw), CavityBasis::kPhotonY});
            }
        }

    const int S = lat.sites();
    const double wX = omega_scale * par.X.omega(), wY = omega_scale * par.Y.omega();
    return SparseHermitian::build(static_cast<std::int64_t>(basis.size()), [&](std::int64_t row, auto emit) {
        const std::uint64_t w = basis.states[row];
        double diag = 0;
        for (int s = 0; s < S; ++s) {
            const int code = CavityBasis::site_code(w, s);
            if (code == CavityBasis::kPhotonX) diag += par.X.delta();
            else if (code == CavityBasis::kPhotonY) diag += par.Y.delta();
            else if (code == CavityBasis::kAtom) diag -= pin.at(s);
        }
        if (diag != 0) emit(row, cplx(diag, 0));

        for (int s = 0; s < S; ++s) {
            const int code = CavityBasis::site_code(w, s);
            // omega e^{i theta} a sigma^+ : |photon at s> -> |atom at s>.
            // Row has the atom: column has the photon.
            if (code == CavityBasis::kAtom) {
                emit(static_cast<std::int64_t>(basis.index(CavityBasis::with_code(w, s, CavityBasis::kPhotonX))),
                     wX * std::polar(1.0, pat.theta_x[s]));
                emit(static_cast<std::int64_t>(basis.index(CavityBasis::with_code(w, s, CavityBasis::kPhotonY))),
                     wY * std::polar(1.0, pat.theta_y[s]));
            } else if (code == CavityBasis::kPhotonX) {
                emit(static_cast<std::int64_t>(basis.index(CavityBasis::with_code(w, s, CavityBasis::kAtom))),
                     wX * std::polar(1.0, -pat.theta_x[s]));
            } else if (code == CavityBasis::kPhotonY) {
                emit(static_cast<std::int64_t>(basis.index(CavityBasis::with_code(w, s, CavityBasis::kAtom))),
                     wY * std::polar(1.0, -pat.theta_y[s]));
            }
        }
        // photon hopping: row has the photon at l.to, l.from empty
        for (const auto& l : hops) {
            if (CavityBasis::site_code(w, l.to) != l.code) continue;
            if (CavityBasis::site_code(w, l.from) != CavityBasis::kGround) continue;
            std::uint64_t c = CavityBasis::with_code(w, l.to, CavityBasis::kGround);
            c = CavityBasis::with_code(c, l.from, l.code);
            emit(static_cast<std::int64_t>(basis.index(c)), l.amp);
        }
    });
}

// Hierarchy report for g/Delta >> J/g >> Omega/Delta plus the mode-splitting
// requirement |Delta^X - Delta^Y| >> g. "a >> b" passes when a >= factor*b.
struct RegimeReport {
    struct ModeRatios {
        double g_over_Delta, J_over_g, Omega_over_Delta;
        bool strong_coupling_ok;  // g/Delta >= factor * J/g
        bool weak_drive_ok;       // J/g >= factor * Omega/Delta
    };
    ModeRatios X, Y;
    double mode_splitting;     // |Delta^X - Delta^Y|
    bool mode_splitting_ok;    // >= factor * max(g^X, g^Y)
    double factor;
    bool chain_pass() const {
        return X.strong_coupling_ok && X.weak_drive_ok && Y.strong_coupling_ok && Y.weak_drive_ok;
    }
};

inline RegimeReport validate_regime(const CavityParams& par, double factor = 10.0) {
    auto mode = [factor](const CavityParams::Mode& m) {
        RegimeReport::ModeRatios r{};
        r.g_over_Delta = m.g / m.Delta;
        r.J_over_g = m.J / m.g;
        r.Omega_over_Delta = m.Omega / m.Delta;
        r.strong_coupling_ok = r.g_over_Delta >= factor * r.J_over_g;
        r.weak_drive_ok = r.J_over_g >= factor * r.Omega_over_Delta;
        return r;
    };
    RegimeReport rep{mode(par.X), mode(par.Y), std::abs(par.X.Delta - par.Y.Delta), false, factor};
    rep.mode_splitting_ok = rep.mode_splitting >= factor * std::max(par.X.g, par.Y.g);
    return rep;
}

// Closed-form decoherence estimate: whole-system decay N_b*gamma*(Omega/Delta)^2
// against the simulation energy scale t = J*(Omega/g)^2.
struct DecayBudget {
    double gamma = 0;
    int Nb = 0;
    double effective_rate = 0;
    double energy_scale_t = 0;
    double ratio = 0;
};

inline DecayBudget decay_budget(double gamma, int Nb, const CavityParams& par) {
    if (gamma < 0) throw std::invalid_argument("decay rate must be >= 0");
    if (Nb < 0) throw std::invalid_argument("boson count must be >= 0");
    DecayBudget b;
    b.gamma = gamma;
    b.Nb = Nb;
    const double rx = par.X.Omega / par.X.Delta, ry = par.Y.Omega / par.Y.Delta;
    b.effective_rate = Nb * gamma * std::max(rx * rx, ry * ry);
    b.energy_scale_t = par.t();
    b.ratio = b.energy_scale_t > 0 ? b.effective_rate / b.energy_scale_t : 0.0;
    return b;
}

}  // namespace ccfqh

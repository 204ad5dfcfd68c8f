#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "ccfqh/eigensolver.hpp"
#include "ccfqh/hamiltonians.hpp"
#include "ccfqh/hilbert.hpp"

namespace ccfqh {

// Site-resolved density n(p,q); sums to N.
inline std::vector<double> density(const StateVector& v, const HardCoreBasis& basis) {
    if (!(v.basis == basis.descriptor())) throw BasisMismatch("density: basis mismatch");
    std::vector<double> n(basis.lattice.sites(), 0.0);
    for (std::size_t i = 0; i < basis.states.size(); ++i) {
        const double w = std::norm(v.amps[i]);
        if (w == 0) continue;
        std::uint64_t m = basis.states[i];
        while (m) {
            n[std::countr_zero(m)] += w;
            m &= m - 1;
        }
    }
    return n;
}

// g(dp,dq) = (1/LxLy) sum_{p,q} <n_{p,q} n_{p+dp,q+dq}> with torus wrapping,
// returned as an Lx*Ly array indexed like sites. g(0,0) = 0 in the hard-core
// basis.
inline std::vector<double> pair_correlation(const StateVector& v, const HardCoreBasis& basis) {
    if (!(v.basis == basis.descriptor())) throw BasisMismatch("pair_correlation: basis mismatch");
    const LatticeSpec& lat = basis.lattice;
    if (!lat.torus()) throw std::invalid_argument("pair_correlation assumes torus wrapping");
    std::vector<double> g(lat.sites(), 0.0);
    std::vector<int> occ;
    occ.reserve(basis.N);
    for (std::size_t i = 0; i < basis.states.size(); ++i) {
        const double w = std::norm(v.amps[i]);
        if (w == 0) continue;
        occ.clear();
        std::uint64_t m = basis.states[i];
        while (m) {
            occ.push_back(std::countr_zero(m));
            m &= m - 1;
        }
        for (int a : occ)
            for (int b : occ) {
                if (a == b) continue;
                auto [pa, qa] = lat.coords(a);
                auto [pb, qb] = lat.coords(b);
                const int dp = ((pb - pa) % lat.Lx + lat.Lx) % lat.Lx;
                const int dq = ((qb - qa) % lat.Ly + lat.Ly) % lat.Ly;
                g[lat.site(dp, dq)] += w;
            }
    }
    for (auto& x : g) x /= lat.sites();
    return g;
}

// Squared projection of v onto the span of an orthonormal manifold.
inline double manifold_fidelity(const StateVector& v, const std::vector<StateVector>& manifold) {
    double f = 0;
    for (const auto& m : manifold) {
        if (!(m.basis == v.basis)) throw BasisMismatch("manifold_fidelity: basis mismatch");
        f += std::norm(m.dot(v));
    }
    return f;
}

// Population fractions of the three excitation classes in a cavity vector.
struct PhotonPopulation {
    double atomic = 0, photon_x = 0, photon_y = 0;
};

inline PhotonPopulation photon_population(const StateVector& v, const CavityBasis& basis) {
    if (!(v.basis == basis.descriptor())) throw BasisMismatch("photon_population: basis mismatch");
    PhotonPopulation pop;
    const int S = basis.lattice.sites();
    const double N = basis.N > 0 ? basis.N : 1;
    for (std::size_t i = 0; i < basis.states.size(); ++i) {
        const double w = std::norm(v.amps[i]);
        if (w == 0) continue;
        int na = 0, nx = 0, ny = 0;
        for (int s = 0; s < S; ++s) {
            switch (CavityBasis::site_code(basis.states[i], s)) {
                case CavityBasis::kAtom: ++na; break;
                case CavityBasis::kPhotonX: ++nx; break;
                case CavityBasis::kPhotonY: ++ny; break;
                default: break;
            }
        }
        pop.atomic += w * na / N;
        pop.photon_x += w * nx / N;
        pop.photon_y += w * ny / N;
    }
    return pop;
}

// Energy gaps E_i - E_0 (i = 1..k-1) as a function of the pinning strength.
struct GapCurve {
    std::vector<double> epsilons;
    std::vector<std::vector<double>> gaps;      // per epsilon, ascending
    std::vector<std::vector<double>> energies;  // per epsilon, ascending, length k
};

inline GapCurve gap_curve(const HardCoreBasis& basis, const PhasePattern& pat, double t,
                          const std::vector<int>& pinned_sites, const std::vector<double>& epsilons,
                          int k = 10, double tol = 1e-10) {
    GapCurve curve;
    curve.epsilons = epsilons;
    for (double eps : epsilons) {
        PinningPotential pin;
        for (int s : pinned_sites) pin.shifts.emplace_back(s, eps);
        const auto H = build_hardcore_fqh(basis, pat, t, pin);
        const auto sp = lowest_eigenpairs(H, std::min<std::int64_t>(k, H.dim), tol);
        curve.energies.push_back(sp.eigenvalues);
        std::vector<double> g;
        for (int i = 1; i < sp.k(); ++i) g.push_back(sp.eigenvalues[i] - sp.eigenvalues[0]);
        curve.gaps.push_back(std::move(g));
    }
    return curve;
}

// Plain x translation (a symmetry of the Landau-gauge pattern) and the
// magnetic y translation, which shifts q -> q+1 and multiplies each particle
// at column p by e^{i 2 pi alpha p}.
inline StateVector translate_x(const StateVector& v, const HardCoreBasis& basis) {
    if (!(v.basis == basis.descriptor())) throw BasisMismatch("translate_x: basis mismatch");
    const LatticeSpec& lat = basis.lattice;
    StateVector out(v.basis, v.dim());
    for (std::size_t i = 0; i < basis.states.size(); ++i) {
        if (v.amps[i] == cplx(0, 0)) continue;
        std::uint64_t m = basis.states[i], shifted = 0;
        while (m) {
            const int s = std::countr_zero(m);
            m &= m - 1;
            auto [p, q] = lat.coords(s);
            shifted |= 1ull << lat.site((p + 1) % lat.Lx, q);
        }
        out.amps[basis.index(shifted)] += v.amps[i];
    }
    return out;
}

inline StateVector translate_y_magnetic(const StateVector& v, const HardCoreBasis& basis, double alpha) {
    if (!(v.basis == basis.descriptor())) throw BasisMismatch("translate_y_magnetic: basis mismatch");
    const LatticeSpec& lat = basis.lattice;
    StateVector out(v.basis, v.dim());
    for (std::size_t i = 0; i < basis.states.size(); ++i) {
        if (v.amps[i] == cplx(0, 0)) continue;
        std::uint64_t m = basis.states[i], shifted = 0;
        double phase = 0;
        while (m) {
            const int s = std::countr_zero(m);
            m &= m - 1;
            auto [p, q] = lat.coords(s);
            shifted |= 1ull << lat.site(p, (q + 1) % lat.Ly);
            phase += kTwoPi * alpha * p;
        }
        out.amps[basis.index(shifted)] += v.amps[i] * std::polar(1.0, phase);
    }
    return out;
}

// Orthonormal basis of the near-degenerate ground manifold of a spectrum.
inline std::vector<StateVector> ground_manifold(const Spectrum& sp, const BasisDescriptor& desc) {
    std::vector<StateVector> out;
    if (sp.clusters.empty()) return out;
    for (int idx : sp.clusters.front()) {
        StateVector v(desc, sp.vectors[idx].size());
        v.amps = sp.vectors[idx];
        out.push_back(std::move(v));
    }
    return out;
}

}  // namespace ccfqh

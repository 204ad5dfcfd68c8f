#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "ccfqh/gauge.hpp"
#include "ccfqh/hilbert.hpp"

// Laughlin trial wavefunctions. The planar form is the symmetric-gauge
// expression; the torus form is the theta-function construction for a
// rectangular Lx x Ly torus in the same Landau gauge as landau_phases
// (x hops carry e^{-i 2 pi alpha q}), namely
//   Psi_s = F_s(Z) * prod_{j<k} theta_1(pi (z_j - z_k)/Lx | i Ly/Lx)^m
//           * prod_j exp(-pi Nphi y_j^2 / (Lx Ly)),
// with z = x + i y, Z = sum z_j and the m center-of-mass sectors
//   F_s(Z) = sum_n exp[-pi (Ly/Lx) (m n + s)^2 / m] exp[2 pi i (m n + s) Z / Lx].
// The lowest-Landau-level correspondence (f(z) entire times the Gaussian)
// and the boundary factors of both F_s and theta_1 are matched to the
// magnetic periodicities of that lattice gauge; the single-particle overlap
// test checks the matching directly against the Hofstadter lowest band.

namespace ccfqh {

struct FillingMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct LaughlinParams {
    int m = 2;  // even for bosons
    LatticeSpec lattice;
    Rational alpha;
    int Nphi = 0;

    LaughlinParams(int m_, const LatticeSpec& lat, const Rational& a) : m(m_), lattice(lat), alpha(a) {
        if (m <= 0 || m % 2 != 0) throw std::invalid_argument("LaughlinParams: m must be a positive even integer");
        if (!flux_quantized(alpha, lat))
            throw FluxNotQuantized("alpha*Lx*Ly must be an integer for the torus Laughlin state");
        Nphi = static_cast<int>(alpha.num * lat.Lx * lat.Ly / alpha.den);
    }

    double magnetic_length() const { return 1.0 / std::sqrt(kTwoPi * alpha.value()); }
};

// Unnormalized planar amplitude of the symmetric-gauge Laughlin state;
// positions in units of the magnetic length. Coincident positions give an
// exact zero.
inline cplx laughlin_plane_amplitude(const LaughlinParams& par,
                                     const std::vector<std::pair<double, double>>& positions) {
    double gauss = 0;
    for (const auto& [x, y] : positions) gauss += x * x + y * y;
    cplx amp = std::exp(cplx(-0.25 * gauss, 0));
    for (std::size_t j = 0; j < positions.size(); ++j)
        for (std::size_t k = j + 1; k < positions.size(); ++k) {
            const cplx d(positions[j].first - positions[k].first,
                         positions[j].second - positions[k].second);
            cplx pw(1, 0);
            for (int e = 0; e < par.m; ++e) pw *= d;
            amp *= pw;
        }
    return amp;
}

namespace detail {

// theta_1(u | tau) for purely imaginary tau = i*t, nome q = exp(-pi t):
// 2 sum_{n>=0} (-1)^n q^{(n+1/2)^2} sin((2n+1) u). Series terms decay like a
// Gaussian; truncate when the next term is below 1e-16 of the partial sum.
inline cplx theta1(cplx u, double t) {
    const double lq = -kPi * t;  // log nome
    cplx sum(0, 0);
    double sign = 1;
    for (int n = 0; n < 64; ++n) {
        const double h = n + 0.5;
        const cplx term = sign * std::exp(cplx(lq * h * h, 0)) * std::sin(static_cast<double>(2 * n + 1) * u);
        sum += term;
        if (n >= 2 && std::abs(term) < 1e-16 * std::abs(sum)) break;
        sign = -sign;
    }
    return 2.0 * sum;
}

// Center-of-mass factor for sector s (0 <= s < m).
inline cplx com_factor(cplx Z, int m, int s, double Lx, double Ly) {
    const double r = Ly / Lx;
    cplx sum(0, 0);
    for (int n = -32; n <= 32; ++n) {
        const double idx = m * n + s;
        const cplx term = std::exp(cplx(-kPi * r * idx * idx / m, 0) + cplx(0, kTwoPi * idx) * Z / Lx);
        sum += term;
    }
    return sum;
}

}  // namespace detail

// Torus Laughlin state for one center-of-mass sector, sampled on the lattice
// configurations of `basis` and normalized over them.
inline StateVector laughlin_torus_state(const LaughlinParams& par, const HardCoreBasis& basis, int sector) {
    const LatticeSpec& lat = par.lattice;
    if (!(basis.lattice == lat)) throw BasisMismatch("laughlin_torus_state: basis lattice mismatch");
    if (!lat.torus()) throw std::invalid_argument("torus Laughlin state needs a torus");
    if (sector < 0 || sector >= par.m) throw std::invalid_argument("sector out of range");
    if (par.m * basis.N != par.Nphi)
        throw FillingMismatch("m*N = " + std::to_string(par.m * basis.N) + " but Nphi = " + std::to_string(par.Nphi));

    const double Lx = lat.Lx, Ly = lat.Ly;
    const double tau_im = Ly / Lx;
    const int N = basis.N;
    StateVector v(basis.descriptor(), basis.size());

    std::vector<int> px(N), py(N);
    for (std::size_t i = 0; i < basis.states.size(); ++i) {
        const std::uint64_t mask = basis.states[i];
        int k = 0;
        for (int s = 0; s < lat.sites(); ++s)
            if ((mask >> s) & 1ull) {
                auto [p, q] = lat.coords(s);
                px[k] = p;
                py[k] = q;
                ++k;
            }
        cplx Z(0, 0);
        double gauss = 0;
        for (int j = 0; j < N; ++j) {
            Z += cplx(px[j], py[j]);
            gauss += static_cast<double>(py[j]) * py[j];
        }
        cplx amp = detail::com_factor(Z, par.m, sector, Lx, Ly) *
                   std::exp(cplx(-kPi * par.Nphi * gauss / (Lx * Ly), 0));
        for (int j = 0; j < N; ++j)
            for (int l = j + 1; l < N; ++l) {
                const cplx d(px[j] - px[l], py[j] - py[l]);
                const cplx th = detail::theta1(kPi * d / Lx, tau_im);
                for (int e = 0; e < par.m; ++e) amp *= th;
            }
        v.amps[i] = amp;
    }
    v.normalize();
    return v;
}

// All m center-of-mass sectors.
inline std::vector<StateVector> laughlin_torus_states(const LaughlinParams& par, const HardCoreBasis& basis) {
    std::vector<StateVector> out;
    out.reserve(par.m);
    for (int s = 0; s < par.m; ++s) out.push_back(laughlin_torus_state(par, basis, s));
    return out;
}

// Single-particle torus lowest-Landau-level state j (0 <= j < Nphi) for the
// same gauge, sampled at lattice sites. Used to audit the gauge matching
// against the Hofstadter lowest band.
inline StateVector lattice_lll_state(const LaughlinParams& par, const HardCoreBasis& basis, int j) {
    const LatticeSpec& lat = par.lattice;
    if (basis.N != 1) throw std::invalid_argument("lattice_lll_state needs the one-particle sector");
    const double Lx = lat.Lx, Ly = lat.Ly;
    StateVector v(basis.descriptor(), basis.size());
    for (std::size_t i = 0; i < basis.states.size(); ++i) {
        const int site = std::countr_zero(basis.states[i]);
        auto [p, q] = lat.coords(site);
        cplx amp(0, 0);
        for (int n = -40; n <= 40; ++n) {
            const double idx = par.Nphi * n + j;
            amp += std::exp(cplx(-kPi * idx * idx * Ly / (par.Nphi * Lx), 0) +
                            cplx(0, kTwoPi * idx / Lx) * cplx(p, q));
        }
        v.amps[i] = amp * std::exp(cplx(-kPi * par.Nphi * q * q / (Lx * Ly), 0));
    }
    v.normalize();
    return v;
}

}  // namespace ccfqh

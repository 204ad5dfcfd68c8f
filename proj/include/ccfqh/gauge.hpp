#pragma once

#include <array>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "ccfqh/lattice.hpp"

// Lattice gauge data: per-site laser phases theta^X, theta^Y plus torus wrap
// twists. Directed-link phases are derived on demand and are the only thing
// Hamiltonian builders consume. Conventions (hbar = e = a = Phi0 = 1):
//   - hop (p,q)->(p+1,q) enters a Hamiltonian as -t exp(i*link_phase_x(p,q)),
//   - link_phase_x(p,q) = theta_x(p+1,q) - theta_x(p,q) on bulk links,
//   - theta arrays are line integrals of the vector potential along lattice
//     rows/columns, so a uniform field with 2*pi*alpha flux per cell has
//     A = (-2*pi*alpha*y, 0) in the Landau gauge.

namespace ccfqh {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

struct FluxNotQuantized : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct QuadratureFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Reduce an angle to (-pi, pi].
inline double principal_angle(double a) {
    a = std::remainder(a, kTwoPi);
    if (a <= -kPi) a += kTwoPi;
    return a;
}

// Exact rational, used for the flux density alpha so torus quantization can
// be checked without floating point.
struct Rational {
    long long num = 0;
    long long den = 1;

    Rational() = default;
    Rational(long long n, long long d) : num(n), den(d) {
        if (den == 0) throw std::invalid_argument("Rational: zero denominator");
        if (den < 0) {
            num = -num;
            den = -den;
        }
        long long g = std::gcd(num < 0 ? -num : num, den);
        if (g > 1) {
            num /= g;
            den /= g;
        }
    }

    double value() const { return static_cast<double>(num) / static_cast<double>(den); }

    // Accepts "n" or "n/d"; anything else (in particular decimal notation)
    // is rejected so configs cannot silently lose exactness.
    static Rational parse(const std::string& text) {
        auto is_int = [](const std::string& s) {
            if (s.empty()) return false;
            std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
            if (i == s.size()) return false;
            for (; i < s.size(); ++i)
                if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
            return true;
        };
        auto slash = text.find('/');
        if (slash == std::string::npos) {
            if (!is_int(text)) throw std::invalid_argument("Rational: expected n or n/d, got '" + text + "'");
            return Rational(std::stoll(text), 1);
        }
        std::string n = text.substr(0, slash), d = text.substr(slash + 1);
        if (!is_int(n) || !is_int(d)) throw std::invalid_argument("Rational: expected n or n/d, got '" + text + "'");
        return Rational(std::stoll(n), std::stoll(d));
    }

    std::string str() const {
        return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den);
    }

    bool operator==(const Rational&) const = default;
};

// Thin solenoid carrying `flux` flux quanta, placed strictly inside a
// plaquette (never on a lattice line).
struct Solenoid {
    double x = 0;
    double y = 0;
    double flux = 0;
};

struct GaugeConfig {
    Rational alpha;                   // flux quanta per plaquette
    std::vector<Solenoid> solenoids;  // localized insertions
};

inline bool flux_quantized(const Rational& alpha, const LatticeSpec& lat) {
    return (alpha.num * static_cast<long long>(lat.Lx) * lat.Ly) % alpha.den == 0;
}

inline void validate_gauge(const GaugeConfig& g, const LatticeSpec& lat) {
    if (lat.torus() && !flux_quantized(g.alpha, lat))
        throw FluxNotQuantized("alpha*Lx*Ly = " + g.alpha.str() + "*" + std::to_string(lat.Lx * lat.Ly) +
                               " is not an integer on a torus");
    for (const auto& s : g.solenoids) {
        double fx = s.x - std::floor(s.x), fy = s.y - std::floor(s.y);
        if (fx < 1e-9 || fx > 1 - 1e-9 || fy < 1e-9 || fy > 1 - 1e-9)
            throw std::invalid_argument("solenoid must sit strictly inside a plaquette");
        if (s.x < 0 || s.y < 0 || s.x > lat.Lx || s.y > lat.Ly)
            throw std::invalid_argument("solenoid outside the lattice");
    }
}

struct PhasePattern {
    LatticeSpec lattice;
    std::vector<double> theta_x;  // per site, radians
    std::vector<double> theta_y;
    std::vector<double> twist_x;  // per row q: extra phase on the x wrap link (Lx-1,q)->(0,q)
    std::vector<double> twist_y;  // per column p: extra phase on the y wrap link (p,Ly-1)->(p,0)

    PhasePattern() = default;
    explicit PhasePattern(const LatticeSpec& lat)
        : lattice(lat),
          theta_x(lat.sites(), 0.0),
          theta_y(lat.sites(), 0.0),
          twist_x(lat.Ly, 0.0),
          twist_y(lat.Lx, 0.0) {}

    // Phase on the directed x link leaving (p,q). Reverse links carry the
    // negated phase.
    double link_phase_x(int p, int q) const {
        if (p == lattice.Lx - 1) {
            if (!lattice.torus()) throw std::out_of_range("no x wrap link on an open lattice");
            return theta_x[lattice.site(0, q)] - theta_x[lattice.site(p, q)] + twist_x[q];
        }
        return theta_x[lattice.site(p + 1, q)] - theta_x[lattice.site(p, q)];
    }

    double link_phase_y(int p, int q) const {
        if (q == lattice.Ly - 1) {
            if (!lattice.torus()) throw std::out_of_range("no y wrap link on an open lattice");
            return theta_y[lattice.site(p, 0)] - theta_y[lattice.site(p, q)] + twist_y[p];
        }
        return theta_y[lattice.site(p, q + 1)] - theta_y[lattice.site(p, q)];
    }

    // Site-local gauge transformation: theta^X and theta^Y both pick up chi.
    // Plaquette fluxes are invariant; link phases are not.
    void apply_gauge(const std::vector<double>& chi) {
        if (static_cast<int>(chi.size()) != lattice.sites())
            throw std::invalid_argument("gauge function size mismatch");
        for (int s = 0; s < lattice.sites(); ++s) {
            theta_x[s] += chi[s];
            theta_y[s] += chi[s];
        }
    }
};

// Argument of the product of the four directed-link phase factors taken
// counterclockwise around the plaquette whose lower-left corner is (p,q),
// reduced to (-pi, pi]. A uniform flux density alpha gives -2*pi*alpha.
inline double plaquette_flux(const PhasePattern& pat, int p, int q) {
    const LatticeSpec& lat = pat.lattice;
    if (p < 0 || q < 0 || p >= lat.Lx || q >= lat.Ly) throw std::out_of_range("plaquette index");
    if (!lat.torus() && (p >= lat.Lx - 1 || q >= lat.Ly - 1))
        throw std::out_of_range("open lattice has no plaquette at the far edge");
    int p1 = (p + 1) % lat.Lx, q1 = (q + 1) % lat.Ly;
    double circulation = pat.link_phase_x(p, q) + pat.link_phase_y(p1, q) -
                         pat.link_phase_x(p, q1) - pat.link_phase_y(p, q);
    return principal_angle(-circulation);
}

// Landau gauge: theta^X(p,q) = -2*pi*alpha*p*q, theta^Y = 0. On a torus the
// site phases are not periodic, so wrap links carry explicit twists chosen
// so that every plaquette (bulk and wrap) encloses the same flux.
inline PhasePattern landau_phases(const LatticeSpec& lat, const GaugeConfig& gauge) {
    if (!gauge.solenoids.empty())
        throw std::invalid_argument("landau_phases takes no solenoids; use general_gauge_phases");
    validate_gauge(gauge, lat);
    const double a = gauge.alpha.value();
    PhasePattern pat(lat);
    for (int q = 0; q < lat.Ly; ++q)
        for (int p = 0; p < lat.Lx; ++p) pat.theta_x[lat.site(p, q)] = -kTwoPi * a * p * q;
    if (lat.torus()) {
        for (int q = 0; q < lat.Ly; ++q) pat.twist_x[q] = -kTwoPi * a * lat.Lx * q;
        for (int p = 0; p < lat.Lx; ++p) pat.twist_y[p] = kTwoPi * a * lat.Ly * p;
    }
    return pat;
}

using VectorPotential = std::function<std::array<double, 2>(double, double)>;

namespace detail {

// 8-point Gauss-Legendre nodes/weights on [-1,1].
inline const std::array<double, 8>& gl_nodes() {
    static const std::array<double, 8> x = {-0.9602898564975363, -0.7966664774136267,
                                            -0.5255324099163290, -0.1834346424956498,
                                            0.1834346424956498,  0.5255324099163290,
                                            0.7966664774136267,  0.9602898564975363};
    return x;
}
inline const std::array<double, 8>& gl_weights() {
    static const std::array<double, 8> w = {0.1012285362903763, 0.2223810344533745,
                                            0.3137066458778873, 0.3626837833783620,
                                            0.3626837833783620, 0.3137066458778873,
                                            0.2223810344533745, 0.1012285362903763};
    return w;
}

template <class F>
double gl8(const F& f, double a, double b) {
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double acc = 0;
    for (int i = 0; i < 8; ++i) acc += gl_weights()[i] * f(mid + half * gl_nodes()[i]);
    return acc * half;
}

template <class F>
double adaptive_gl(const F& f, double a, double b, double tol, int depth = 0) {
    const double whole = gl8(f, a, b);
    const double mid = 0.5 * (a + b);
    const double refined = gl8(f, a, mid) + gl8(f, mid, b);
    if (std::abs(refined - whole) <= tol || b - a < 1e-13) return refined;
    if (depth > 24) throw QuadratureFailure("line integral did not converge (singular integrand?)");
    return adaptive_gl(f, a, mid, 0.5 * tol, depth + 1) + adaptive_gl(f, mid, b, 0.5 * tol, depth + 1);
}

// Azimuthal-angle change seen from the solenoid along the straight segment
// (x0,y0)->(x1,y1). The line integral of the solenoid potential f/r phi_hat
// along that segment is flux * angle. Always in (-pi, pi) for a segment that
// does not pass through the solenoid.
inline double segment_angle(double x0, double y0, double x1, double y1, const Solenoid& s) {
    const double dx = x1 - x0, dy = y1 - y0;
    const double len2 = dx * dx + dy * dy;
    if (len2 > 0) {
        // distance from the solenoid to the segment
        double u = ((s.x - x0) * dx + (s.y - y0) * dy) / len2;
        u = std::clamp(u, 0.0, 1.0);
        const double cx = x0 + u * dx - s.x, cy = y0 + u * dy - s.y;
        if (cx * cx + cy * cy < 1e-18)
            throw QuadratureFailure("solenoid lies on an integration path");
    }
    const double a0 = std::atan2(y0 - s.y, x0 - s.x);
    const double a1 = std::atan2(y1 - s.y, x1 - s.x);
    return principal_angle(a1 - a0);
}

}  // namespace detail

// Phases from an arbitrary (smooth) vector potential plus solenoids:
//   theta^X(p,q) = integral of A_x along y=q from x=0 to x=p,
//   theta^Y(p,q) = integral of A_y along x=p from y=0 to y=q.
// The smooth part is integrated by adaptive Gauss-Legendre (abs tol 1e-10
// per link); solenoid contributions are added analytically. On a torus the
// wrap twists consist of the uniform-field part (same for any gauge of a
// uniform field) plus per-solenoid corrections that route the return flux
// of each solenoid through the far corner wrap plaquette (Lx-1, Ly-1); at
// integer flux the pattern is gauge-equivalent to the solenoid-free one.
inline PhasePattern general_gauge_phases(const LatticeSpec& lat, const VectorPotential& A,
                                         const GaugeConfig& gauge) {
    validate_gauge(gauge, lat);
    PhasePattern pat(lat);
    const double tol = 1e-10;

    std::vector<double> row_cum(lat.Lx, 0.0);  // per row: cumulative integral along x
    for (int q = 0; q < lat.Ly; ++q) {
        row_cum[0] = 0.0;
        for (int p = 1; p < lat.Lx; ++p) {
            const double y = q;
            row_cum[p] = row_cum[p - 1] +
                         detail::adaptive_gl([&](double x) { return A(x, y)[0]; },
                                             static_cast<double>(p - 1), static_cast<double>(p), tol);
        }
        for (int p = 0; p < lat.Lx; ++p) pat.theta_x[lat.site(p, q)] = row_cum[p];
    }
    std::vector<double> col_cum(lat.Ly, 0.0);
    for (int p = 0; p < lat.Lx; ++p) {
        col_cum[0] = 0.0;
        for (int q = 1; q < lat.Ly; ++q) {
            const double x = p;
            col_cum[q] = col_cum[q - 1] +
                         detail::adaptive_gl([&](double y) { return A(x, y)[1]; },
                                             static_cast<double>(q - 1), static_cast<double>(q), tol);
        }
        for (int q = 0; q < lat.Ly; ++q) pat.theta_y[lat.site(p, q)] = col_cum[q];
    }

    for (const auto& s : gauge.solenoids) {
        if (lat.torus() && (s.x > lat.Lx - 1 || s.y > lat.Ly - 1))
            throw std::invalid_argument(
                "on a torus a solenoid must pierce a bulk plaquette (not the wrap row/column)");
        for (int q = 0; q < lat.Ly; ++q)
            for (int p = 1; p < lat.Lx; ++p)
                pat.theta_x[lat.site(p, q)] += s.flux * detail::segment_angle(0, q, p, q, s);
        for (int p = 0; p < lat.Lx; ++p)
            for (int q = 1; q < lat.Ly; ++q)
                pat.theta_y[lat.site(p, q)] += s.flux * detail::segment_angle(p, 0, p, q, s);
    }

    if (lat.torus()) {
        const double a = gauge.alpha.value();
        for (int q = 0; q < lat.Ly; ++q) pat.twist_x[q] = -kTwoPi * a * lat.Lx * q;
        for (int p = 0; p < lat.Lx; ++p) pat.twist_y[p] = kTwoPi * a * lat.Ly * p;
        for (const auto& s : gauge.solenoids) {
            const int a1 = static_cast<int>(std::floor(s.x));
            const int b1 = static_cast<int>(std::floor(s.y));
            for (int q = b1 + 1; q < lat.Ly; ++q) pat.twist_x[q] -= kTwoPi * s.flux;
            for (int p = a1 + 1; p < lat.Lx; ++p) pat.twist_y[p] += kTwoPi * s.flux;
        }
    }
    return pat;
}

// Landau-gauge vector potential for flux density alpha: A = (-2*pi*alpha*y, 0).
inline VectorPotential landau_vector_potential(double alpha) {
    return [alpha](double /*x*/, double y) { return std::array<double, 2>{-kTwoPi * alpha * y, 0.0}; };
}

}  // namespace ccfqh

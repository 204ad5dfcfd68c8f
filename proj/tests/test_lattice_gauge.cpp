#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "ccfqh/gauge.hpp"
#include "ccfqh/lattice.hpp"

using namespace ccfqh;

namespace {

// brute-force scan of every plaquette against an expected flux (mod 2pi)
void check_uniform_flux(const PhasePattern& pat, double expected) {
    const auto& lat = pat.lattice;
    const int pmax = lat.torus() ? lat.Lx : lat.Lx - 1;
    const int qmax = lat.torus() ? lat.Ly : lat.Ly - 1;
    for (int q = 0; q < qmax; ++q)
        for (int p = 0; p < pmax; ++p) {
            INFO("plaquette (" << p << "," << q << ")");
            REQUIRE_THAT(plaquette_flux(pat, p, q),
                         Catch::Matchers::WithinAbs(principal_angle(expected), 1e-11));
        }
}

}  // namespace

TEST_CASE("site indexing is the q*Lx+p bijection") {
    LatticeSpec lat(5, 3, Boundary::Open);
    for (int s = 0; s < lat.sites(); ++s) {
        auto [p, q] = lat.coords(s);
        REQUIRE(lat.site(p, q) == s);
    }
    REQUIRE_THROWS_AS(LatticeSpec(1, 4), std::invalid_argument);
}

TEST_CASE("rational alpha parsing and quantization") {
    REQUIRE(Rational::parse("1/4").value() == 0.25);
    REQUIRE(Rational::parse("-2/8") == Rational(-1, 4));
    REQUIRE(Rational::parse("3").den == 1);
    REQUIRE_THROWS_AS(Rational::parse("0.25"), std::invalid_argument);
    REQUIRE_THROWS_AS(Rational::parse("1/0"), std::invalid_argument);

    REQUIRE(flux_quantized(Rational(1, 3), LatticeSpec(3, 4)));
    REQUIRE(flux_quantized(Rational(1, 4), LatticeSpec(3, 4)));  // 12/4 = 3 flux quanta
    REQUIRE_FALSE(flux_quantized(Rational(1, 5), LatticeSpec(3, 4)));
}

TEST_CASE("landau phases: zero field is all zero") {
    LatticeSpec lat(4, 4);
    auto pat = landau_phases(lat, {Rational(0, 1), {}});
    for (int q = 0; q < 4; ++q)
        for (int p = 0; p < 4; ++p) {
            REQUIRE(pat.link_phase_x(p, q) == 0.0);
            REQUIRE(pat.link_phase_y(p, q) == 0.0);
        }
    check_uniform_flux(pat, 0.0);
}

TEST_CASE("landau phases at alpha=1/4 on 4x4") {
    LatticeSpec lat(4, 4);
    auto pat = landau_phases(lat, {Rational(1, 4), {}});
    // bulk x link leaving (p,q) carries -2*pi*alpha*q
    for (int q = 0; q < 4; ++q)
        for (int p = 0; p < 3; ++p)
            REQUIRE_THAT(pat.link_phase_x(p, q), Catch::Matchers::WithinAbs(-kTwoPi * 0.25 * q, 1e-12));
    // all 16 plaquettes carry e^{-i pi/2}
    check_uniform_flux(pat, -kPi / 2);
}

TEST_CASE("landau phases on a non-square torus") {
    LatticeSpec lat(3, 4);
    auto pat = landau_phases(lat, {Rational(1, 3), {}});
    check_uniform_flux(pat, -kTwoPi / 3.0);
    // alpha = 1/4 still carries integer total flux here (3 quanta) and the
    // wrap twists make every plaquette uniform
    check_uniform_flux(landau_phases(lat, {Rational(1, 4), {}}), -kPi / 2);
    REQUIRE_THROWS_AS(landau_phases(lat, {Rational(1, 5), {}}), FluxNotQuantized);
}

TEST_CASE("general gauge phases: zero potential") {
    LatticeSpec lat(4, 3, Boundary::Open);
    auto pat = general_gauge_phases(lat, [](double, double) { return std::array<double, 2>{0, 0}; },
                                    {Rational(0, 1), {}});
    for (double th : pat.theta_x) REQUIRE_THAT(th, Catch::Matchers::WithinAbs(0.0, 1e-12));
    for (double th : pat.theta_y) REQUIRE_THAT(th, Catch::Matchers::WithinAbs(0.0, 1e-12));
}

TEST_CASE("general gauge phases reproduce the landau closed form") {
    const double alpha = 0.25;
    for (Boundary b : {Boundary::Torus, Boundary::Open}) {
        LatticeSpec lat(4, 4, b);
        auto closed = landau_phases(lat, {Rational(1, 4), {}});
        auto quad = general_gauge_phases(lat, landau_vector_potential(alpha), {Rational(1, 4), {}});
        for (int s = 0; s < lat.sites(); ++s) {
            REQUIRE_THAT(quad.theta_x[s], Catch::Matchers::WithinAbs(closed.theta_x[s], 1e-12));
            REQUIRE_THAT(quad.theta_y[s], Catch::Matchers::WithinAbs(closed.theta_y[s], 1e-12));
        }
        const int pmax = lat.torus() ? 4 : 3, qmax = lat.torus() ? 4 : 3;
        for (int q = 0; q < qmax; ++q)
            for (int p = 0; p < pmax; ++p)
                REQUIRE_THAT(plaquette_flux(quad, p, q),
                             Catch::Matchers::WithinAbs(plaquette_flux(closed, p, q), 1e-11));
    }
}

TEST_CASE("single solenoid winding on an open lattice") {
    LatticeSpec lat(4, 4, Boundary::Open);
    GaugeConfig g{Rational(0, 1), {{0.5, 0.5, 1.0}}};
    auto pat = general_gauge_phases(lat, [](double, double) { return std::array<double, 2>{0, 0}; }, g);

    // unreduced circulation around the pierced plaquette is a full -2*pi
    double circ = pat.link_phase_x(0, 0) + pat.link_phase_y(1, 0) - pat.link_phase_x(0, 1) -
                  pat.link_phase_y(0, 0);
    REQUIRE_THAT(-circ, Catch::Matchers::WithinAbs(-kTwoPi, 1e-10));
    // all link phases finite
    for (int q = 0; q < 4; ++q)
        for (int p = 0; p < 3; ++p) REQUIRE(std::isfinite(pat.link_phase_x(p, q)));
    // every other plaquette sees zero flux
    for (int q = 0; q < 3; ++q)
        for (int p = 0; p < 3; ++p) {
            if (p == 0 && q == 0) continue;
            REQUIRE_THAT(plaquette_flux(pat, p, q), Catch::Matchers::WithinAbs(0.0, 1e-10));
        }
}

TEST_CASE("solenoid on a torus: pierced plaquette and corner return flux") {
    LatticeSpec lat(4, 4);
    const double f = 0.3;
    GaugeConfig g{Rational(1, 4), {{1.5, 1.5, f}}};
    auto pat = general_gauge_phases(lat, landau_vector_potential(0.25), g);
    for (int q = 0; q < 4; ++q)
        for (int p = 0; p < 4; ++p) {
            double expect = -kPi / 2;
            if (p == 1 && q == 1) expect -= kTwoPi * f;
            if (p == 3 && q == 3) expect += kTwoPi * f;
            INFO("plaquette (" << p << "," << q << ")");
            REQUIRE_THAT(plaquette_flux(pat, p, q),
                         Catch::Matchers::WithinAbs(principal_angle(expect), 1e-10));
        }
}

TEST_CASE("unit solenoid on a torus is gauge-trivial in every plaquette") {
    LatticeSpec lat(4, 4);
    GaugeConfig g{Rational(1, 4), {{1.5, 1.5, 1.0}}};
    auto pat = general_gauge_phases(lat, landau_vector_potential(0.25), g);
    check_uniform_flux(pat, -kPi / 2);
}

TEST_CASE("solenoid placement validation") {
    LatticeSpec lat(4, 4);
    REQUIRE_THROWS_AS(general_gauge_phases(lat, landau_vector_potential(0.25),
                                           {Rational(1, 4), {{1.0, 1.5, 1.0}}}),
                      std::invalid_argument);  // on a lattice line
    REQUIRE_THROWS_AS(landau_phases(lat, {Rational(1, 4), {{1.5, 1.5, 1.0}}}), std::invalid_argument);
}

TEST_CASE("gauge covariance: site-local transformation leaves fluxes invariant") {
    LatticeSpec lat(4, 4);
    auto pat = landau_phases(lat, {Rational(1, 4), {}});
    auto before = pat;
    std::mt19937 rng(42);
    std::uniform_real_distribution<double> u(-kPi, kPi);
    std::vector<double> chi(lat.sites());
    for (auto& c : chi) c = u(rng);
    pat.apply_gauge(chi);
    bool some_link_changed = false;
    for (int q = 0; q < 4; ++q)
        for (int p = 0; p < 4; ++p) {
            if (std::abs(pat.link_phase_x(p, q) - before.link_phase_x(p, q)) > 1e-9)
                some_link_changed = true;
            REQUIRE_THAT(plaquette_flux(pat, p, q),
                         Catch::Matchers::WithinAbs(plaquette_flux(before, p, q), 1e-10));
        }
    REQUIRE(some_link_changed);
}

TEST_CASE("torus flux sum rule") {
    LatticeSpec lat(3, 4);
    const double f = 0.2;
    GaugeConfig g{Rational(1, 3), {{0.5, 1.5, f}}};
    auto pat = general_gauge_phases(lat, landau_vector_potential(1.0 / 3.0), g);
    // the total flux content (alpha per plaquette plus the solenoid and its
    // return through the corner) is reproduced plaquette by plaquette
    double total = 0;
    for (int q = 0; q < 4; ++q)
        for (int p = 0; p < 3; ++p) total += plaquette_flux(pat, p, q);
    const double expected = principal_angle(-kTwoPi * (1.0 / 3.0) * 12.0);
    REQUIRE_THAT(principal_angle(total), Catch::Matchers::WithinAbs(expected, 1e-9));
}

TEST_CASE("quadrature failure when a solenoid sits on an integration path") {
    LatticeSpec lat(4, 4, Boundary::Open);
    // y = 2 is an integration row; x in (0,3)
    GaugeConfig g{Rational(0, 1), {{1.5, 2.0 + 1e-13, 1.0}}};
    REQUIRE_THROWS_AS(general_gauge_phases(
                          lat, [](double, double) { return std::array<double, 2>{0, 0}; }, g),
                      std::invalid_argument);  // rejected as "on a lattice line" at validation
}

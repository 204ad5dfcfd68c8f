#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <sstream>

#include "ccfqh/eigensolver.hpp"
#include "ccfqh/hamiltonians.hpp"

using namespace ccfqh;

namespace {

PhasePattern landau44(const Rational& a = Rational(1, 4)) {
    return landau_phases(LatticeSpec(4, 4), {a, {}});
}

}  // namespace

TEST_CASE("single particle, alpha = 0: free cosine band") {
    LatticeSpec lat(4, 4);
    auto H = build_single_particle(lat, landau44(Rational(0, 1)), 1.0);
    REQUIRE(H.hermiticity_defect() < 1e-13);
    auto sp = dense_all_eigenpairs(H);
    std::vector<double> expect;
    for (int kx = 0; kx < 4; ++kx)
        for (int ky = 0; ky < 4; ++ky)
            expect.push_back(-2.0 * (std::cos(kTwoPi * kx / 4) + std::cos(kTwoPi * ky / 4)));
    std::sort(expect.begin(), expect.end());
    for (int i = 0; i < 16; ++i)
        REQUIRE_THAT(sp.eigenvalues[i], Catch::Matchers::WithinAbs(expect[i], 1e-10));
}

TEST_CASE("single particle, alpha = 1/4: four 4-fold magnetic levels") {
    LatticeSpec lat(4, 4);
    auto H = build_single_particle(lat, landau44(), 1.0);
    REQUIRE(H.hermiticity_defect() < 1e-13);
    auto sp = dense_all_eigenpairs(H);
    // group by value
    std::vector<std::pair<double, int>> levels;
    for (double e : sp.eigenvalues) {
        if (!levels.empty() && std::abs(e - levels.back().first) < 1e-9)
            ++levels.back().second;
        else
            levels.emplace_back(e, 1);
    }
    REQUIRE(levels.size() == 4);
    for (auto& [e, d] : levels) REQUIRE(d == 4);
    // iterative path agrees with the dense oracle
    auto it = lowest_eigenpairs(H, 16, 1e-11);
    for (int i = 0; i < 16; ++i)
        REQUIRE_THAT(it.eigenvalues[i], Catch::Matchers::WithinAbs(sp.eigenvalues[i], 1e-10));
}

TEST_CASE("1D ring limit: q x 1 torus spectrum with flux twist") {
    // a 4x2 torus at alpha=0 with Ly=2 doubled links still matches the
    // separable cosine bands; the genuinely 1D analytic case is covered by
    // the x-chain of a 4x4 at alpha=0 above. Here check a flux-threaded ring:
    // alpha = 1/8 on 4x2 gives integer total flux 1; the x-Wilson loop per
    // row q is -2*pi*alpha*Lx*q, i.e. a twisted ring in row 1.
    LatticeSpec lat(4, 2);
    auto pat = landau_phases(lat, {Rational(1, 8), {}});
    auto H = build_single_particle(lat, pat, 1.0);
    REQUIRE(H.hermiticity_defect() < 1e-13);
    auto sp = dense_all_eigenpairs(H);
    REQUIRE(sp.eigenvalues.size() == 8);
    // oracle: dense diagonalization self-check via iterative path
    auto it = lowest_eigenpairs(H, 8, 1e-11);
    for (int i = 0; i < 8; ++i)
        REQUIRE_THAT(it.eigenvalues[i], Catch::Matchers::WithinAbs(sp.eigenvalues[i], 1e-9));
}

TEST_CASE("hard-core N=1 sector reproduces the single-particle model") {
    LatticeSpec lat(4, 4);
    auto pat = landau44();
    HardCoreBasis basis(lat, 1);
    auto H1 = build_single_particle(lat, pat, 1.0);
    auto Hn = build_hardcore_fqh(basis, pat, 1.0);
    REQUIRE(Hn.dim == H1.dim);
    for (std::int64_t r = 0; r < H1.dim; ++r)
        for (std::int64_t c = 0; c < H1.dim; ++c) {
            // N=1 mask ordering is site ordering
            REQUIRE_THAT(std::abs(Hn.entry(r, c) - H1.entry(r, c)),
                         Catch::Matchers::WithinAbs(0.0, 1e-14));
        }
}

TEST_CASE("2x2 torus, N=2, alpha=0 against a brute-force 6x6 oracle") {
    LatticeSpec lat(2, 2);
    HardCoreBasis basis(lat, 2);
    auto pat = landau_phases(lat, {Rational(0, 1), {}});
    auto H = build_hardcore_fqh(basis, pat, 1.0);
    REQUIRE(H.dim == 6);
    REQUIRE(H.hermiticity_defect() < 1e-13);

    // oracle: explicit dense matrix built independently from hop pairs.
    // On the 2x2 torus each pair of x/y neighbours is doubly linked, so the
    // amplitude between masks differing by one hop is -2t.
    Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(6, 6);
    auto occ = [&](std::uint64_t m, int s) { return (m >> s) & 1ull; };
    for (int r = 0; r < 6; ++r)
        for (int c = 0; c < 6; ++c) {
            if (r == c) continue;
            const std::uint64_t a = basis.states[r], b = basis.states[c];
            const std::uint64_t diff = a ^ b;
            if (std::popcount(diff) != 2) continue;
            int s1 = std::countr_zero(diff);
            int s2 = std::countr_zero(diff & (diff - 1) ? diff & ~(1ull << s1) : diff);
            (void)occ;
            auto [p1, q1] = lat.coords(s1);
            auto [p2, q2] = lat.coords(s2);
            const bool xpair = (q1 == q2) && (p1 != p2);
            const bool ypair = (p1 == p2) && (q1 != q2);
            if (xpair || ypair) M(r, c) = cplx(-2.0, 0.0);
        }
    for (int r = 0; r < 6; ++r)
        for (int c = 0; c < 6; ++c)
            REQUIRE_THAT(std::abs(H.entry(r, c) - M(r, c)), Catch::Matchers::WithinAbs(0.0, 1e-14));
}

TEST_CASE("4x4 torus, N=2, alpha=1/4: two-fold degenerate ground level") {
    LatticeSpec lat(4, 4);
    HardCoreBasis basis(lat, 2);
    auto H = build_hardcore_fqh(basis, landau44(), 1.0);
    REQUIRE(H.dim == 120);
    REQUIRE(H.hermiticity_defect() < 1e-13);
    auto dense = dense_all_eigenpairs(H);
    REQUIRE(dense.eigenvalues[1] - dense.eigenvalues[0] < 1e-10);
    REQUIRE(dense.eigenvalues[2] - dense.eigenvalues[1] > 1e-3);
    auto sp = lowest_eigenpairs(H, 10, 1e-11);
    for (int i = 0; i < 10; ++i)
        REQUIRE_THAT(sp.eigenvalues[i], Catch::Matchers::WithinAbs(dense.eigenvalues[i], 1e-9));
    REQUIRE(sp.clusters.front().size() == 2);
}

TEST_CASE("pinning enters as a diagonal shift on occupied sites") {
    LatticeSpec lat(4, 4);
    HardCoreBasis basis(lat, 2);
    PinningPotential pin{{lat.site(0, 0), 2.0}, {lat.site(2, 2), 2.0}};
    auto H = build_hardcore_fqh(basis, landau44(), 1.0, pin);
    const std::uint64_t pinned = (1ull << lat.site(0, 0)) | (1ull << lat.site(2, 2));
    const auto r = basis.index(pinned);
    REQUIRE_THAT(H.entry(r, r).real(), Catch::Matchers::WithinAbs(-4.0, 1e-14));
    REQUIRE_THROWS_AS(PinningPotential({{-1, 1.0}}).validate(lat), std::invalid_argument);
    REQUIRE_THROWS_AS(PinningPotential({{0, 1.0}, {0, 2.0}}).validate(lat), std::invalid_argument);
}

TEST_CASE("gauge invariance: transformed pattern is isospectral") {
    LatticeSpec lat(4, 4);
    HardCoreBasis basis(lat, 2);
    auto pat = landau44();
    auto H0 = build_hardcore_fqh(basis, pat, 1.0);
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> u(-kPi, kPi);
    std::vector<double> chi(lat.sites());
    for (auto& c : chi) c = u(rng);
    pat.apply_gauge(chi);
    auto H1 = build_hardcore_fqh(basis, pat, 1.0);
    auto a = dense_all_eigenpairs(H0), b = dense_all_eigenpairs(H1);
    for (int i = 0; i < a.k(); ++i)
        REQUIRE_THAT(a.eigenvalues[i], Catch::Matchers::WithinAbs(b.eigenvalues[i], 1e-10));
}

TEST_CASE("cavity params derived scales and t consistency") {
    auto par = CavityParams::paper_point(1.0);
    REQUIRE_THAT(par.X.delta(), Catch::Matchers::WithinRel(10.0, 1e-12));
    REQUIRE_THAT(par.X.omega(), Catch::Matchers::WithinRel(0.1, 1e-12));
    REQUIRE_THAT(par.t(), Catch::Matchers::WithinRel(1e-4, 1e-12));
    // mismatched t between directions is rejected
    CavityParams::Mode x{100.0, 1000.0, 1.0, 1.0};
    CavityParams::Mode y{100.0, 1000.0, 1.0, 2.0};
    REQUIRE_THROWS_AS(CavityParams(x, y), std::invalid_argument);
    CavityParams::Mode bad{0.0, 1000.0, 1.0, 1.0};
    REQUIRE_THROWS_AS(CavityParams(bad, x), std::invalid_argument);
}

TEST_CASE("cavity model with Omega = 0: photon-free states are eigenstates") {
    LatticeSpec lat(2, 2);
    CavityBasis basis(lat, 2);
    CavityParams::Mode m{100.0, 1000.0, 1e-30, 1.0};  // Omega -> 0
    CavityParams par(m, m);
    PinningPotential pin{{0, 3.0}};
    auto H = build_cavity_model(basis, landau_phases(lat, {Rational(0, 1), {}}), par, pin, 0.0);
    REQUIRE(H.hermiticity_defect() < 1e-12);
    // with omega_scale = 0 there is no atom-photon exchange: every photon-free
    // basis state is an eigenstate with eigenvalue -sum(eps over pinned occupied)
    for (std::size_t i = 0; i < basis.size(); ++i) {
        if (!CavityBasis::photon_free(basis.states[i])) continue;
        std::vector<cplx> e(basis.size(), cplx(0, 0));
        e[i] = 1.0;
        auto he = H.apply(e);
        const double want = CavityBasis::site_code(basis.states[i], 0) == CavityBasis::kAtom ? -3.0 : 0.0;
        for (std::size_t j = 0; j < basis.size(); ++j) {
            const cplx expect = (j == i) ? cplx(want, 0) : cplx(0, 0);
            REQUIRE_THAT(std::abs(he[j] - expect), Catch::Matchers::WithinAbs(0.0, 1e-12));
        }
    }
}

TEST_CASE("cavity model single-excitation sector matches a dense oracle") {
    LatticeSpec lat(2, 2);
    CavityBasis basis(lat, 1);
    REQUIRE(basis.size() == 12);
    CavityParams::Mode m{100.0, 1000.0, 1.0, 1.0};  // delta = 10, omega = 0.1, J = 1
    CavityParams par(m, m);
    auto H = build_cavity_model(basis, landau_phases(lat, {Rational(0, 1), {}}), par);
    REQUIRE(H.hermiticity_defect() < 1e-13);

    // independent dense oracle over (site, class) labels
    const double delta = 10.0, omega = 0.1, J = 1.0;
    Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(12, 12);
    auto id = [&](int site, int code) {  // code 1,2,3
        return basis.index(static_cast<std::uint64_t>(code) << (2 * site));
    };
    for (int s = 0; s < 4; ++s) {
        M(id(s, 2), id(s, 2)) += delta;
        M(id(s, 3), id(s, 3)) += delta;
        M(id(s, 1), id(s, 2)) += omega;  // zero phases
        M(id(s, 2), id(s, 1)) += omega;
        M(id(s, 1), id(s, 3)) += omega;
        M(id(s, 3), id(s, 1)) += omega;
    }
    auto [Lx, Ly] = std::pair<int, int>(2, 2);
    for (int q = 0; q < Ly; ++q)
        for (int p = 0; p < Lx; ++p) {
            int a = q * Lx + p, bx = q * Lx + (p + 1) % Lx, by = ((q + 1) % Ly) * Lx + p;
            M(id(bx, 2), id(a, 2)) += -J;
            M(id(a, 2), id(bx, 2)) += -J;
            M(id(by, 3), id(a, 3)) += -J;
            M(id(a, 3), id(by, 3)) += -J;
        }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(M);
    auto sp = dense_all_eigenpairs(H);
    for (int i = 0; i < 12; ++i)
        REQUIRE_THAT(sp.eigenvalues[i], Catch::Matchers::WithinAbs(es.eigenvalues()(i), 1e-11));
}

TEST_CASE("cavity model conserves the excitation sector blockwise") {
    // build on N=1 and N=2 sectors and verify no cross terms by checking the
    // exchange and hop moves stay inside each enumerated basis (index() would
    // throw otherwise); also verify dimension bookkeeping
    LatticeSpec lat(2, 2);
    CavityParams par = CavityParams::paper_point(1.0);
    for (int n : {1, 2}) {
        CavityBasis basis(lat, n);
        auto H = build_cavity_model(basis, landau_phases(lat, {Rational(0, 1), {}}), par);
        REQUIRE(H.dim == static_cast<std::int64_t>(basis.size()));
    }
}

TEST_CASE("regime report at the operating point") {
    auto par = CavityParams::paper_point(1.0);
    auto rep = validate_regime(par);
    REQUIRE_THAT(rep.X.g_over_Delta, Catch::Matchers::WithinRel(0.1, 1e-12));
    REQUIRE_THAT(rep.X.J_over_g, Catch::Matchers::WithinRel(0.01, 1e-12));
    REQUIRE_THAT(rep.X.Omega_over_Delta, Catch::Matchers::WithinRel(0.001, 1e-12));
    REQUIRE(rep.chain_pass());                       // each step separated by exactly 10
    REQUIRE_FALSE(validate_regime(par, 20).chain_pass());  // threshold sensitivity
    // Omega = g breaks the weak-drive condition
    CavityParams::Mode m{100.0, 1000.0, 100.0, 1.0};
    CavityParams::Mode my{100.0, 1000.0, 100.0, 1.0};
    auto bad = validate_regime(CavityParams(m, my));
    REQUIRE_FALSE(bad.X.weak_drive_ok);
    // symmetric detunings fail the mode-splitting requirement; split ones pass
    REQUIRE_FALSE(rep.mode_splitting_ok);
    CavityParams::Mode y2{100.0, 3000.0, 1.0, 1.0};  // t = J(Omega/g)^2 is Delta-independent
    auto split = validate_regime(CavityParams(CavityParams::paper_point(1.0).X, y2));
    REQUIRE(split.mode_splitting_ok);
}

TEST_CASE("decay budget arithmetic") {
    auto par = CavityParams::paper_point(1.0);
    auto b = decay_budget(1.0, 2, par);
    REQUIRE_THAT(b.effective_rate, Catch::Matchers::WithinRel(2e-6, 1e-12));
    REQUIRE_THAT(b.energy_scale_t, Catch::Matchers::WithinRel(1e-4, 1e-12));
    REQUIRE_THAT(b.ratio, Catch::Matchers::WithinRel(0.02, 1e-12));
    REQUIRE(decay_budget(0.0, 2, par).effective_rate == 0.0);
    // doubling Delta at fixed g, Omega, J quarters the rate
    CavityParams::Mode m{100.0, 2000.0, 1.0, 1.0};
    auto b2 = decay_budget(1.0, 2, CavityParams(m, m));
    REQUIRE_THAT(b2.effective_rate, Catch::Matchers::WithinRel(0.5e-6, 1e-12));
    REQUIRE_THROWS_AS(decay_budget(-1.0, 2, par), std::invalid_argument);
}

TEST_CASE("matrix market export round numbers") {
    auto H = build_single_particle(LatticeSpec(2, 2), landau_phases(LatticeSpec(2, 2), {Rational(0, 1), {}}), 1.0);
    std::ostringstream os;
    H.write_matrix_market(os);
    const std::string text = os.str();
    REQUIRE(text.find("%%MatrixMarket matrix coordinate complex hermitian") == 0);
    REQUIRE(text.find("4 4 ") != std::string::npos);
}

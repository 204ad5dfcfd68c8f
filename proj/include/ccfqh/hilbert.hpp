#pragma once

#include <algorithm>
#include <bit>
#include <complex>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ccfqh/lattice.hpp"

// Many-body bases. Hard-core boson states are bit masks (one bit per site,
// set = atom in |1>). Cavity states use 2 bits per site:
//   0 = atom |0>, 1 = atom |1>, 2 = one X photon, 3 = one Y photon,
// which encodes the <= 1 excitation per cavity restriction directly. Both
// bases are enumerated in ascending order of the encoded integer so index
// lookup is a binary search.

namespace ccfqh {

using cplx = std::complex<double>;

struct TooManyParticles : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct BasisMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class BasisKind : std::uint32_t { HardCore = 0, Cavity = 1 };

struct BasisDescriptor {
    BasisKind kind = BasisKind::HardCore;
    int Lx = 0;
    int Ly = 0;
    int N = 0;

    bool operator==(const BasisDescriptor&) const = default;

    std::uint64_t hash() const {
        std::uint64_t h = 1469598103934665603ull;  // FNV-1a
        auto mix = [&h](std::uint64_t v) {
            h ^= v;
            h *= 1099511628211ull;
        };
        mix(static_cast<std::uint64_t>(kind));
        mix(static_cast<std::uint64_t>(Lx));
        mix(static_cast<std::uint64_t>(Ly));
        mix(static_cast<std::uint64_t>(N));
        return h;
    }
};

namespace detail {

inline std::uint64_t binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    std::uint64_t r = 1;
    for (int i = 1; i <= k; ++i) r = r * static_cast<std::uint64_t>(n - k + i) / i;
    return r;
}

// Next integer with the same popcount (Gosper's hack).
inline std::uint64_t next_same_popcount(std::uint64_t v) {
    std::uint64_t c = v & (~v + 1), r = v + c;
    return (((r ^ v) >> 2) / c) | r;
}

template <class Vec>
std::size_t sorted_index(const Vec& states, std::uint64_t key, const char* what) {
    auto it = std::lower_bound(states.begin(), states.end(), key);
    if (it == states.end() || *it != key) throw std::invalid_argument(std::string(what) + ": state not in basis");
    return static_cast<std::size_t>(it - states.begin());
}

}  // namespace detail

// Fixed particle number hard-core sector.
struct HardCoreBasis {
    LatticeSpec lattice;
    int N = 0;
    std::vector<std::uint64_t> states;  // ascending

    HardCoreBasis(const LatticeSpec& lat, int n) : lattice(lat), N(n) {
        const int S = lat.sites();
        if (S > 63) throw std::invalid_argument("HardCoreBasis: more than 63 sites not supported");
        if (N < 0 || N > S) throw TooManyParticles("N = " + std::to_string(N) + " on " + std::to_string(S) + " sites");
        states.reserve(detail::binomial(S, N));
        if (N == 0) {
            states.push_back(0);
        } else {
            std::uint64_t v = (1ull << N) - 1, last = v << (S - N);
            for (;;) {
                states.push_back(v);
                if (v == last) break;
                v = detail::next_same_popcount(v);
            }
        }
    }

    std::size_t size() const { return states.size(); }
    std::size_t index(std::uint64_t mask) const { return detail::sorted_index(states, mask, "HardCoreBasis"); }
    bool occupied(std::uint64_t mask, int site) const { return (mask >> site) & 1ull; }

    BasisDescriptor descriptor() const { return {BasisKind::HardCore, lattice.Lx, lattice.Ly, N}; }
};

// Fixed total excitation number cavity sector (Eq.-(5)-style degrees of
// freedom: atom |1> or one photon of either mode per excited site).
struct CavityBasis {
    LatticeSpec lattice;
    int N = 0;
    std::vector<std::uint64_t> states;  // ascending encoded words

    static constexpr int kGround = 0, kAtom = 1, kPhotonX = 2, kPhotonY = 3;

    CavityBasis(const LatticeSpec& lat, int n) : lattice(lat), N(n) {
        const int S = lat.sites();
        if (S > 32) throw std::invalid_argument("CavityBasis: more than 32 sites not supported");
        if (N < 0 || N > S) throw TooManyParticles("N = " + std::to_string(N) + " on " + std::to_string(S) + " sites");
        std::uint64_t count = detail::binomial(S, N);
        for (int i = 0; i < N; ++i) count *= 3;
        states.reserve(count);

        std::uint64_t mask = (N == 0) ? 0 : (1ull << N) - 1;
        const std::uint64_t last = (N == 0) ? 0 : mask << (S - N);
        std::vector<int> occ(N);
        for (;;) {
            int k = 0;
            for (int s = 0; s < S; ++s)
                if ((mask >> s) & 1ull) occ[k++] = s;
            // all 3^N per-site assignments for this set of excited sites
            std::vector<int> code(N, kAtom);
            for (;;) {
                std::uint64_t w = 0;
                for (int i = 0; i < N; ++i) w |= static_cast<std::uint64_t>(code[i]) << (2 * occ[i]);
                states.push_back(w);
                int i = 0;
                while (i < N && code[i] == kPhotonY) code[i++] = kAtom;
                if (i == N) break;
                ++code[i];
            }
            if (mask == last || N == 0) break;
            mask = detail::next_same_popcount(mask);
        }
        std::sort(states.begin(), states.end());
    }

    std::size_t size() const { return states.size(); }
    std::size_t index(std::uint64_t word) const { return detail::sorted_index(states, word, "CavityBasis"); }

    static int site_code(std::uint64_t word, int site) { return static_cast<int>((word >> (2 * site)) & 3ull); }
    static std::uint64_t with_code(std::uint64_t word, int site, int code) {
        return (word & ~(3ull << (2 * site))) | (static_cast<std::uint64_t>(code) << (2 * site));
    }
    static bool photon_free(std::uint64_t word) {
        // no site code 2 or 3: no high bit set in any 2-bit field
        return (word & 0xAAAAAAAAAAAAAAAAull) == 0;
    }

    BasisDescriptor descriptor() const { return {BasisKind::Cavity, lattice.Lx, lattice.Ly, N}; }
};

struct StateVector {
    BasisDescriptor basis;
    std::vector<cplx> amps;

    StateVector() = default;
    StateVector(const BasisDescriptor& d, std::size_t dim) : basis(d), amps(dim, cplx(0, 0)) {}

    std::size_t dim() const { return amps.size(); }

    double norm() const {
        double s = 0;
        for (const auto& a : amps) s += std::norm(a);
        return std::sqrt(s);
    }

    void normalize() {
        const double n = norm();
        if (n == 0) throw std::runtime_error("cannot normalize a zero vector");
        for (auto& a : amps) a /= n;
    }

    // <this|other>
    cplx dot(const StateVector& other) const {
        if (!(basis == other.basis)) throw BasisMismatch("inner product between different bases");
        cplx s(0, 0);
        for (std::size_t i = 0; i < amps.size(); ++i) s += std::conj(amps[i]) * other.amps[i];
        return s;
    }
};

// Drop photonic amplitudes; atomic-pattern amplitudes are copied across
// unchanged, so the squared norm of the result is the photon-free population.
inline StateVector project_to_atomic(const StateVector& v, const CavityBasis& cav,
                                     const HardCoreBasis& hc) {
    if (!(v.basis == cav.descriptor())) throw BasisMismatch("project_to_atomic: vector/cavity basis");
    if (!(hc.lattice == cav.lattice) || hc.N != cav.N)
        throw BasisMismatch("project_to_atomic: cavity and hard-core bases disagree");
    StateVector out(hc.descriptor(), hc.size());
    const int S = cav.lattice.sites();
    for (std::size_t i = 0; i < cav.states.size(); ++i) {
        const std::uint64_t w = cav.states[i];
        if (!CavityBasis::photon_free(w)) continue;
        std::uint64_t mask = 0;
        for (int s = 0; s < S; ++s)
            if (CavityBasis::site_code(w, s) == CavityBasis::kAtom) mask |= 1ull << s;
        out.amps[hc.index(mask)] = v.amps[i];
    }
    return out;
}

// Embed a hard-core vector into the photon-free sector of the cavity basis.
inline StateVector embed_atomic(const StateVector& v, const HardCoreBasis& hc, const CavityBasis& cav) {
    if (!(v.basis == hc.descriptor())) throw BasisMismatch("embed_atomic: vector/hard-core basis");
    if (!(hc.lattice == cav.lattice) || hc.N != cav.N)
        throw BasisMismatch("embed_atomic: cavity and hard-core bases disagree");
    StateVector out(cav.descriptor(), cav.size());
    const int S = hc.lattice.sites();
    for (std::size_t i = 0; i < hc.states.size(); ++i) {
        const std::uint64_t mask = hc.states[i];
        std::uint64_t w = 0;
        for (int s = 0; s < S; ++s)
            if ((mask >> s) & 1ull) w |= static_cast<std::uint64_t>(CavityBasis::kAtom) << (2 * s);
        out.amps[cav.index(w)] = v.amps[i];
    }
    return out;
}

// Binary state file: magic, kind, dims, N, basis hash, then little-endian
// complex doubles (native layout on all platforms we target).
inline void save_state(const StateVector& v, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    const char magic[8] = {'C', 'C', 'F', 'Q', 'H', 'S', 'V', '1'};
    f.write(magic, 8);
    auto w32 = [&f](std::uint32_t x) { f.write(reinterpret_cast<const char*>(&x), 4); };
    auto w64 = [&f](std::uint64_t x) { f.write(reinterpret_cast<const char*>(&x), 8); };
    w32(static_cast<std::uint32_t>(v.basis.kind));
    w32(static_cast<std::uint32_t>(v.basis.Lx));
    w32(static_cast<std::uint32_t>(v.basis.Ly));
    w32(static_cast<std::uint32_t>(v.basis.N));
    w64(v.basis.hash());
    w64(v.amps.size());
    f.write(reinterpret_cast<const char*>(v.amps.data()),
            static_cast<std::streamsize>(v.amps.size() * sizeof(cplx)));
    if (!f) throw std::runtime_error("write failed: " + path);
}

inline StateVector load_state(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path);
    char magic[8];
    f.read(magic, 8);
    if (std::memcmp(magic, "CCFQHSV1", 8) != 0) throw std::runtime_error("bad state file magic: " + path);
    auto r32 = [&f]() {
        std::uint32_t x;
        f.read(reinterpret_cast<char*>(&x), 4);
        return x;
    };
    auto r64 = [&f]() {
        std::uint64_t x;
        f.read(reinterpret_cast<char*>(&x), 8);
        return x;
    };
    StateVector v;
    v.basis.kind = static_cast<BasisKind>(r32());
    v.basis.Lx = static_cast<int>(r32());
    v.basis.Ly = static_cast<int>(r32());
    v.basis.N = static_cast<int>(r32());
    const std::uint64_t h = r64();
    const std::uint64_t n = r64();
    if (h != v.basis.hash()) throw std::runtime_error("state file descriptor hash mismatch: " + path);
    v.amps.resize(n);
    f.read(reinterpret_cast<char*>(v.amps.data()), static_cast<std::streamsize>(n * sizeof(cplx)));
    if (!f) throw std::runtime_error("truncated state file: " + path);
    return v;
}

}  // namespace ccfqh

#pragma once

#include <stdexcept>
#include <utility>

namespace ccfqh {

enum class Boundary { Torus, Open };

// Square lattice with spacing 1. Sites are indexed q*Lx + p with
// 0 <= p < Lx, 0 <= q < Ly, so site (p,q) sits at position (p,q).
struct LatticeSpec {
    int Lx = 0;
    int Ly = 0;
    Boundary boundary = Boundary::Torus;

    LatticeSpec() = default;
    LatticeSpec(int lx, int ly, Boundary b = Boundary::Torus) : Lx(lx), Ly(ly), boundary(b) {
        if (Lx < 2 || Ly < 2)
            throw std::invalid_argument("LatticeSpec: Lx and Ly must both be >= 2");
    }

    int sites() const { return Lx * Ly; }
    bool torus() const { return boundary == Boundary::Torus; }

    int site(int p, int q) const { return q * Lx + p; }
    std::pair<int, int> coords(int s) const { return {s % Lx, s / Lx}; }

    // Directed nearest-neighbour links leave a site in +x or +y. On an open
    // lattice the last column/row has no outgoing link in that direction.
    bool has_x_link(int p) const { return torus() || p < Lx - 1; }
    bool has_y_link(int q) const { return torus() || q < Ly - 1; }

    bool operator==(const LatticeSpec&) const = default;
};

}  // namespace ccfqh

#pragma once

#include <array>
#include <compare>
#include <string>
#include <vector>

namespace agdo {

enum class Model { cross, hex };

std::string to_string(Model model);
Model model_from_string(const std::string& name);

/// Zero/pole orders (alpha, beta, gamma) at P1+-, P2+-, P3+-: the vector
/// alpha*i + beta*j + gamma*k.
struct Label3 {
    int alpha = 0;
    int beta = 0;
    int gamma = 0;

    friend Label3 operator+(Label3 a, Label3 b) { return {a.alpha + b.alpha, a.beta + b.beta, a.gamma + b.gamma}; }
    friend Label3 operator-(Label3 a, Label3 b) { return {a.alpha - b.alpha, a.beta - b.beta, a.gamma - b.gamma}; }
    friend Label3 operator-(Label3 a) { return {-a.alpha, -a.beta, -a.gamma}; }
    friend auto operator<=>(const Label3&, const Label3&) = default;
};

namespace unit {
inline constexpr Label3 i{1, 0, 0};
inline constexpr Label3 j{0, 1, 0};
inline constexpr Label3 k{0, 0, 1};
} // namespace unit

/// Pole orders (alpha, beta, gamma, rho, sigma, tau) at Q1, Q2, Q3, R1, R2, R3,
/// with alpha + beta + gamma = 0 and rho + sigma + tau = 0.
struct Label6 {
    std::array<int, 6> v{};

    int operator[](std::size_t i) const { return v[i]; }
    bool balanced() const { return v[0] + v[1] + v[2] == 0 && v[3] + v[4] + v[5] == 0; }

    friend Label6 operator+(const Label6& a, const Label6& b)
    {
        Label6 r;
        for (std::size_t i = 0; i < 6; ++i) r.v[i] = a.v[i] + b.v[i];
        return r;
    }
    friend Label6 operator-(const Label6& a, const Label6& b)
    {
        Label6 r;
        for (std::size_t i = 0; i < 6; ++i) r.v[i] = a.v[i] - b.v[i];
        return r;
    }
    friend auto operator<=>(const Label6&, const Label6&) = default;
};

/// Basis vector e_n, n = 1..6.
constexpr Label6 e(int n)
{
    Label6 r;
    r.v[static_cast<std::size_t>(n - 1)] = 1;
    return r;
}

struct SiteCross {
    int n = 0;
    int m = 0;

    friend auto operator<=>(const SiteCross&, const SiteCross&) = default;
};

/// Triangular-lattice site, k + l + m = 0.
struct SiteHex {
    int k = 0;
    int l = 0;
    int m = 0;

    bool valid() const { return k + l + m == 0; }
    friend auto operator<=>(const SiteHex&, const SiteHex&) = default;
};

Label3 relabel_cross(SiteCross site);

/// Throws InvalidSite unless k + l + m = 0.
Label6 relabel_hex(SiteHex site);

/// (n + m) mod 2 for cross sites, (k - l) mod 3 for hex sites; always non-negative.
int residue_class(SiteCross site);
int residue_class(SiteHex site);

template <typename Site, typename Label>
struct StencilNeighbor {
    Site site;
    Label shift;  // label(site) - label(centre)
};

using CrossNeighbor = StencilNeighbor<SiteCross, Label3>;
using HexNeighbor = StencilNeighbor<SiteHex, Label6>;

/// Neighbours in coefficient order a, b, c, d, v: (n-1,m), (n+1,m), (n,m-1),
/// (n,m+1), (n,m). Shifts are computed from relabel_cross.
std::array<CrossNeighbor, 5> stencil_offsets(SiteCross site);

/// Neighbours in coefficient order a, b, c, d, f, g: (k,l+1,m-1), (k,l-1,m+1),
/// (k+1,l-1,m), (k-1,l+1,m), (k+1,l,m-1), (k-1,l,m+1).
std::array<HexNeighbor, 6> stencil_offsets(SiteHex site);

/// Lattice-site windows. A cross window is the rectangle
/// [n0, n1] x [m0, m1]; a hex window is the set of sites with k, l, m inside
/// their three ranges (a hexagon when all ranges are [-R, R]).
struct Window {
    Model model = Model::cross;
    std::vector<std::array<int, 2>> ranges;

    static Window radius(Model model, int r);

    bool contains(SiteCross s) const;
    bool contains(SiteHex s) const;

    std::vector<SiteCross> cross_sites() const;  // lexicographic order
    std::vector<SiteHex> hex_sites() const;      // lexicographic order

    /// Throws InvalidArgument when the ranges do not fit the model or are empty.
    void validate() const;
};

} // namespace agdo

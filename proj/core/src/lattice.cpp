#include "agdo/lattice.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "agdo/errors.hpp"

namespace agdo {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

} // namespace

void lattice_coordinates(const PeriodMatrix& b, const CVector& z, Eigen::VectorXd& s, Eigen::VectorXd& t)
{
    if (z.size() != b.genus()) throw DimensionMismatch("lattice_coordinates: wrong vector length");
    t = b.real_part_inverse() * z.real();
    s = (z.imag() - b.matrix().imag() * t) / kTwoPi;
}

CVector lattice_vector(const PeriodMatrix& b, const IVector& m, const IVector& n)
{
    return cplx(0.0, kTwoPi) * m.cast<cplx>() + b.matrix() * n.cast<cplx>();
}

CVector from_lattice_coordinates(const PeriodMatrix& b, const Eigen::VectorXd& s, const Eigen::VectorXd& t)
{
    return cplx(0.0, kTwoPi) * s.cast<cplx>() + b.matrix() * t.cast<cplx>();
}

LatticeReduction reduce_to_fundamental_domain(const PeriodMatrix& b, const CVector& z)
{
    Eigen::VectorXd s;
    Eigen::VectorXd t;
    lattice_coordinates(b, z, s, t);
    LatticeReduction out;
    out.m = s.array().round().cast<int>();
    out.n = t.array().round().cast<int>();
    out.remainder = z - lattice_vector(b, out.m, out.n);
    return out;
}

double cover_distance(const PeriodMatrix& b, const CVector& a, const CVector& c)
{
    const CVector w = reduce_to_fundamental_domain(b, a - c).remainder;
    const int g = b.genus();
    // Scan the 3^(2g) neighbouring cells of the reduced difference.
    IVector m = IVector::Constant(g, -1);
    IVector n = IVector::Constant(g, -1);
    double best = std::numeric_limits<double>::infinity();
    for (;;) {
        best = std::min(best, (w - lattice_vector(b, m, n)).norm());
        int i = 0;
        for (; i < 2 * g; ++i) {
            int& digit = i < g ? m[i] : n[i - g];
            if (digit < 1) {
                ++digit;
                break;
            }
            digit = -1;
        }
        if (i == 2 * g) break;
    }
    return best;
}

} // namespace agdo

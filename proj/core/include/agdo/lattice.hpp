#pragma once

#include "agdo/theta.hpp"

namespace agdo {

/// z = remainder + 2*pi*i*m + B*n, with the remainder's real lattice
/// coordinates in [-1/2, 1/2].
struct LatticeReduction {
    IVector m;
    IVector n;
    CVector remainder;
};

/// Real coordinates (s, t) with z = 2*pi*i*s + B*t.
void lattice_coordinates(const PeriodMatrix& b, const CVector& z, Eigen::VectorXd& s, Eigen::VectorXd& t);

LatticeReduction reduce_to_fundamental_domain(const PeriodMatrix& b, const CVector& z);

CVector lattice_vector(const PeriodMatrix& b, const IVector& m, const IVector& n);

/// Euclidean distance in C^g from a to the nearest lattice translate of b.
double cover_distance(const PeriodMatrix& b, const CVector& a, const CVector& c);

/// Point 2*pi*i*s + B*t of the fundamental parallelogram (s, t in [0, 1)^g).
CVector from_lattice_coordinates(const PeriodMatrix& b, const Eigen::VectorXd& s, const Eigen::VectorXd& t);

} // namespace agdo

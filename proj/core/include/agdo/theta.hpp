#pragma once

#include <complex>

#include <Eigen/Dense>

namespace agdo {

using cplx = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using IVector = Eigen::VectorXi;

/// Matrix of b-periods of the normalized holomorphic differentials
/// (a-periods are 2*pi*i). Symmetric, with negative definite real part.
class PeriodMatrix {
public:
    explicit PeriodMatrix(CMatrix b);

    static PeriodMatrix genus_one(cplx b);

    int genus() const { return static_cast<int>(b_.rows()); }
    const CMatrix& matrix() const { return b_; }
    cplx operator()(int j, int k) const { return b_(j, k); }

    const Eigen::MatrixXd& real_part() const { return re_; }
    const Eigen::MatrixXd& real_part_inverse() const { return re_inv_; }

private:
    CMatrix b_;
    Eigen::MatrixXd re_;
    Eigen::MatrixXd re_inv_;
};

inline constexpr double kDefaultThetaEps = 1e-15;
inline constexpr int kMaxThetaRadius = 60;

/// Theta(z) = sum over N in Z^g of exp(<BN,N>/2 + <N,z>), where <x,y> is the
/// bilinear (non-conjugating) pairing.
///
/// The sum runs over cubic shells |N|_inf = R, R = 0, 1, ..., and stops once
/// the last shell adds less than eps * |partial sum| (in absolute term sum)
/// and R is past the peak of the Gaussian envelope. Throws NonConvergent if
/// R = kMaxThetaRadius is reached or the sum overflows, DimensionMismatch if
/// z has the wrong length, InvalidArgument if eps is outside (0, 1e-3].
cplx theta_eval(const PeriodMatrix& b, const CVector& z, double eps = kDefaultThetaEps);
cplx theta_eval(const PeriodMatrix& b, cplx z, double eps = kDefaultThetaEps);

/// Theta(z) stored as mantissa * exp(log_factor). The mantissa is the theta
/// value at the lattice-reduced argument, so |mantissa| measures the distance
/// from the theta divisor independently of how far z is from the origin.
struct ThetaValue {
    cplx mantissa;
    cplx log_factor;

    cplx value() const { return mantissa * std::exp(log_factor); }
};

ThetaValue theta_scaled(const PeriodMatrix& b, const CVector& z, double eps = kDefaultThetaEps);

/// Multiplier with Theta(z + 2*pi*i*m + B*n) = factor * Theta(z).
cplx quasi_period_factor(const PeriodMatrix& b, const CVector& z, const IVector& m, const IVector& n);

/// Odd half-period zero of the genus-one theta function, refined by Newton
/// iteration from i*pi + B/2.
cplx theta_zero_1d(const PeriodMatrix& b);

/// <x, y> = sum_i x_i y_i, no conjugation.
cplx bilinear(const CVector& x, const CVector& y);

} // namespace agdo

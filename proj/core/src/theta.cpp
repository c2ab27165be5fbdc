#include "agdo/theta.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "agdo/errors.hpp"
#include "agdo/lattice.hpp"

namespace agdo {

namespace {

void check_dimension(const PeriodMatrix& b, Eigen::Index n, const char* what)
{
    if (n != b.genus()) {
        throw DimensionMismatch(std::string(what) + ": expected length " + std::to_string(b.genus())
                                + ", got " + std::to_string(n));
    }
}

// Calls fn(N) for every N in Z^g with |N|_inf == radius.
template <typename Fn>
void for_each_in_shell(int genus, int radius, Fn&& fn)
{
    IVector n = IVector::Constant(genus, -radius);
    if (radius == 0) {
        fn(n);
        return;
    }
    for (;;) {
        if (n.cwiseAbs().maxCoeff() == radius) fn(n);
        int i = 0;
        while (i < genus && n[i] == radius) {
            n[i] = -radius;
            ++i;
        }
        if (i == genus) return;
        ++n[i];
    }
}

cplx exponent(const PeriodMatrix& b, const IVector& n, const CVector& z)
{
    const int g = b.genus();
    cplx quad = 0.0;
    cplx lin = 0.0;
    for (int j = 0; j < g; ++j) {
        if (n[j] == 0) continue;
        cplx row = 0.0;
        for (int k = 0; k < g; ++k) row += b(j, k) * static_cast<double>(n[k]);
        quad += row * static_cast<double>(n[j]);
        lin += static_cast<double>(n[j]) * z[j];
    }
    return 0.5 * quad + lin;
}

// Shell index past which the Gaussian envelope is decreasing.
int peak_radius(const PeriodMatrix& b, const CVector& z)
{
    const Eigen::VectorXd peak = -(b.real_part_inverse() * z.real());
    const double r = peak.cwiseAbs().maxCoeff();
    if (!std::isfinite(r) || r > kMaxThetaRadius) return kMaxThetaRadius + 1;
    return static_cast<int>(std::ceil(r)) + 1;
}

struct SumResult {
    cplx value;
    cplx derivative;  // only filled for genus one
};

SumResult lattice_sum(const PeriodMatrix& b, const CVector& z, double eps, bool with_derivative)
{
    if (!(eps > 0.0 && eps <= 1e-3)) {
        throw InvalidArgument("theta_eval: eps must lie in (0, 1e-3], got " + std::to_string(eps));
    }
    check_dimension(b, z.size(), "theta_eval");

    const int g = b.genus();
    const int r_min = peak_radius(b, z);
    if (r_min > kMaxThetaRadius) {
        throw NonConvergent("theta_eval: argument too far from the origin for radius cap "
                            + std::to_string(kMaxThetaRadius));
    }

    cplx sum = 0.0;
    cplx dsum = 0.0;
    for (int radius = 0; radius <= kMaxThetaRadius; ++radius) {
        cplx shell = 0.0;
        double shell_abs = 0.0;
        for_each_in_shell(g, radius, [&](const IVector& n) {
            const cplx term = std::exp(exponent(b, n, z));
            shell += term;
            shell_abs += std::abs(term);
            if (with_derivative) dsum += static_cast<double>(n[0]) * term;
        });
        sum += shell;
        if (!std::isfinite(sum.real()) || !std::isfinite(sum.imag())) {
            throw NonConvergent("theta_eval: lattice sum overflowed");
        }
        if (radius >= 1 && radius >= r_min && shell_abs <= eps * std::abs(sum)) {
            return {sum, dsum};
        }
    }
    throw NonConvergent("theta_eval: tail above tolerance at radius cap "
                        + std::to_string(kMaxThetaRadius));
}

} // namespace

PeriodMatrix::PeriodMatrix(CMatrix b) : b_(std::move(b))
{
    if (b_.rows() == 0 || b_.rows() != b_.cols()) {
        throw InvalidArgument("PeriodMatrix: expected a non-empty square matrix");
    }
    if (!b_.allFinite()) throw InvalidArgument("PeriodMatrix: non-finite entry");

    const double scale = b_.cwiseAbs().maxCoeff();
    if ((b_ - b_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
        throw InvalidArgument("PeriodMatrix: matrix is not symmetric");
    }

    re_ = b_.real();
    const Eigen::MatrixXd sym = 0.5 * (re_ + re_.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym, Eigen::EigenvaluesOnly);
    if (eig.eigenvalues().maxCoeff() >= 0.0) {
        throw InvalidArgument("PeriodMatrix: real part is not negative definite");
    }
    re_inv_ = re_.inverse();
}

PeriodMatrix PeriodMatrix::genus_one(cplx b)
{
    CMatrix m(1, 1);
    m(0, 0) = b;
    return PeriodMatrix(std::move(m));
}

cplx bilinear(const CVector& x, const CVector& y)
{
    return (x.array() * y.array()).sum();
}

cplx theta_eval(const PeriodMatrix& b, const CVector& z, double eps)
{
    return lattice_sum(b, z, eps, false).value;
}

cplx theta_eval(const PeriodMatrix& b, cplx z, double eps)
{
    return theta_eval(b, CVector::Constant(1, z), eps);
}

ThetaValue theta_scaled(const PeriodMatrix& b, const CVector& z, double eps)
{
    check_dimension(b, z.size(), "theta_scaled");
    const LatticeReduction red = reduce_to_fundamental_domain(b, z);
    const cplx mantissa = theta_eval(b, red.remainder, eps);
    // Theta(w + 2 pi i m + B n) = exp(-<Bn,n>/2 - <n,w>) Theta(w)
    const CVector n = red.n.cast<cplx>();
    const cplx log_factor = -0.5 * bilinear(b.matrix() * n, n) - bilinear(n, red.remainder);
    return {mantissa, log_factor};
}

cplx quasi_period_factor(const PeriodMatrix& b, const CVector& z, const IVector& m, const IVector& n)
{
    check_dimension(b, z.size(), "quasi_period_factor(z)");
    check_dimension(b, m.size(), "quasi_period_factor(m)");
    check_dimension(b, n.size(), "quasi_period_factor(n)");
    const CVector nc = n.cast<cplx>();
    return std::exp(-0.5 * bilinear(b.matrix() * nc, nc) - bilinear(nc, z));
}

cplx theta_zero_1d(const PeriodMatrix& b)
{
    if (b.genus() != 1) throw DimensionMismatch("theta_zero_1d: genus must be 1");

    const double scale = std::abs(theta_eval(b, cplx(0.0)));
    cplx z = cplx(0.0, std::numbers::pi) + 0.5 * b(0, 0);
    for (int iter = 0; iter < 50; ++iter) {
        const SumResult s = lattice_sum(b, CVector::Constant(1, z), kDefaultThetaEps, true);
        if (std::abs(s.value) <= 1e-12 * scale) return z;
        if (s.derivative == 0.0) break;
        z -= s.value / s.derivative;
    }
    throw NonConvergent("theta_zero_1d: Newton iteration did not converge in 50 steps");
}

} // namespace agdo

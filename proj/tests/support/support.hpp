#pragma once

// Test-side helpers and oracles. Nothing here calls into the code paths it is
// used to check: theta is summed directly, b-periods are continued on a fixed
// uniform grid with explicit phase unwrapping.

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include "agdo/bafunc.hpp"
#include "agdo/lattice.hpp"
#include "agdo/operators.hpp"

namespace agdo::testing {

inline constexpr double kPi = std::numbers::pi;

inline double uniform(std::mt19937_64& rng, double lo, double hi)
{
    return lo + (hi - lo) * uniform01(rng);
}

/// Symmetric B with Re B = -(A A^T + I) * scale and a random imaginary part.
inline PeriodMatrix random_period_matrix(std::mt19937_64& rng, int g)
{
    Eigen::MatrixXd a(g, g);
    Eigen::MatrixXd im(g, g);
    for (int r = 0; r < g; ++r) {
        for (int c = 0; c < g; ++c) {
            a(r, c) = uniform(rng, -1.0, 1.0);
            im(r, c) = uniform(rng, -1.0, 1.0);
        }
    }
    const Eigen::MatrixXd re = -(a * a.transpose() + Eigen::MatrixXd::Identity(g, g)) * uniform(rng, 2.0, 5.0);
    CMatrix b(g, g);
    b.real() = re;
    b.imag() = 0.5 * (im + im.transpose());
    return PeriodMatrix(b);
}

inline CVector random_vector(std::mt19937_64& rng, int g, double scale)
{
    CVector z(g);
    for (int i = 0; i < g; ++i) z[i] = cplx(uniform(rng, -scale, scale), uniform(rng, -scale, scale));
    return z;
}

/// Direct box sum of the theta series over |N_i| <= radius, in long double.
inline cplx direct_theta(const CMatrix& b, const CVector& z, int radius)
{
    using lcplx = std::complex<long double>;
    const int g = static_cast<int>(b.rows());
    std::vector<int> n(static_cast<std::size_t>(g), -radius);
    lcplx sum = 0.0L;
    while (true) {
        lcplx e = 0.0L;
        for (int j = 0; j < g; ++j) {
            e += static_cast<long double>(n[static_cast<std::size_t>(j)]) * lcplx(z[j]);
            for (int k = 0; k < g; ++k) {
                e += 0.5L * lcplx(b(j, k)) * static_cast<long double>(n[static_cast<std::size_t>(j)])
                     * static_cast<long double>(n[static_cast<std::size_t>(k)]);
            }
        }
        sum += std::exp(e);
        int j = 0;
        while (j < g && n[static_cast<std::size_t>(j)] == radius) n[static_cast<std::size_t>(j++)] = -radius;
        if (j == g) break;
        ++n[static_cast<std::size_t>(j)];
    }
    return {static_cast<double>(sum.real()), static_cast<double>(sum.imag())};
}

/// Integral of dlog E(u - p) - dlog E(u - q) along start -> start + B on a
/// uniform grid of `steps` points, unwrapping the principal log. E is summed
/// directly from the theta series.
inline cplx continued_b_period_oracle(const TorusCurve& curve, cplx start, cplx p, cplx q, int steps = 20000)
{
    const CMatrix& bm = curve.period_matrix().matrix();
    const cplx b = bm(0, 0);
    const cplx z0 = curve.theta_zero();
    const auto e = [&](cplx u) { return direct_theta(bm, CVector::Constant(1, u - z0), 15); };
    const auto f = [&](cplx u) { return std::log(e(u - p)) - std::log(e(u - q)); };
    cplx prev = f(start);
    cplx total = 0.0;
    for (int i = 1; i <= steps; ++i) {
        const cplx cur = f(start + b * (static_cast<double>(i) / steps));
        double dim = cur.imag() - prev.imag();
        dim -= 2.0 * kPi * std::round(dim / (2.0 * kPi));
        total += cplx(cur.real() - prev.real(), dim);
        prev = cur;
    }
    return total;
}

/// |z| after reducing the imaginary part modulo 2*pi into (-pi, pi].
inline double abs_mod_2pi_i(cplx z)
{
    return std::abs(cplx(z.real(), std::remainder(z.imag(), 2.0 * kPi)));
}

/// Least-squares slope of y against x.
inline double fit_slope(const std::vector<double>& x, const std::vector<double>& y)
{
    const double n = static_cast<double>(x.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

inline SurfacePoint random_domain_point(const PeriodMatrix& b, std::mt19937_64& rng)
{
    Eigen::VectorXd s(1);
    Eigen::VectorXd t(1);
    s[0] = uniform01(rng);
    t[0] = uniform01(rng);
    return SurfacePoint(CVector(from_lattice_coordinates(b, s, t)));
}

struct RandomDataOptions {
    bool random_r = true;
    double separation = 0.1;
};

/// Seeded genus-one spectral data: B with Re in [-8, -3], Im in [-1, 1], base
/// lift 0, marked and divisor points pairwise (and from the base) at least
/// `separation` apart.
inline SpectralData random_spectral_data(Model model, std::uint64_t seed, RandomDataOptions opt = RandomDataOptions{})
{
    std::mt19937_64 rng(seed * 0x9e3779b97f4a7c15ULL + 17);
    const PeriodMatrix b = PeriodMatrix::genus_one({uniform(rng, -8.0, -3.0), uniform(rng, -1.0, 1.0)});
    const auto curve = make_torus_curve(b, 0.0);
    std::vector<SurfacePoint> pts;
    while (true) {
        pts.clear();
        for (int i = 0; i < 7; ++i) pts.push_back(random_domain_point(b, rng));
        std::vector<SurfacePoint> all = pts;
        all.push_back(curve->base_point());
        bool ok = true;
        for (std::size_t i = 0; i < all.size() && ok; ++i) {
            for (std::size_t j = i + 1; j < all.size() && ok; ++j) ok = curve->point_distance(all[i], all[j]) >= opt.separation;
        }
        if (ok) break;
    }
    Normalization r = Normalization::constant();
    if (opt.random_r) {
        std::vector<cplx> w(model == Model::cross ? 3 : 6);
        for (cplx& x : w) x = {uniform(rng, -0.5, 0.5), uniform(rng, -0.5, 0.5)};
        r = Normalization::exponential(w, cplx(uniform(rng, 0.5, 2.0), uniform(rng, -1.0, 1.0)));
    }
    std::array<SurfacePoint, 6> marked;
    std::copy(pts.begin(), pts.begin() + 6, marked.begin());
    const std::vector<SurfacePoint> divisor{pts[6]};
    return model == Model::cross ? SpectralData::cross(curve, marked, divisor, r)
                                 : SpectralData::hex(curve, marked, divisor, r);
}

inline Label3 random_label3(std::mt19937_64& rng, int range)
{
    std::uniform_int_distribution<int> d(-range, range);
    return {d(rng), d(rng), d(rng)};
}

inline Label6 random_label6(std::mt19937_64& rng, int range)
{
    std::uniform_int_distribution<int> d(-range, range);
    const int a = d(rng), b = d(rng), r = d(rng), s = d(rng);
    return {{a, b, -a - b, r, s, -r - s}};
}

inline IVector random_ivector(std::mt19937_64& rng, int g, int range)
{
    std::uniform_int_distribution<int> d(-range, range);
    IVector v(g);
    for (int i = 0; i < g; ++i) v[i] = d(rng);
    return v;
}

} // namespace agdo::testing

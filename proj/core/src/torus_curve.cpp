#include <algorithm>
#include <cmath>
#include <numbers>

#include "agdo/errors.hpp"
#include "agdo/lattice.hpp"
#include "agdo/surface.hpp"

namespace agdo {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kMaxArgStep = kPi / 2.0;
constexpr double kMaxStepLength = 0.25;
constexpr double kPoleStepFraction = 0.25;
constexpr int kMaxSteps = 200000;

// Wraps the imaginary part into (-pi, pi].
cplx principal(cplx d)
{
    double im = std::remainder(d.imag(), kTwoPi);
    if (im <= -kPi) im += kTwoPi;
    return {d.real(), im};
}

double torus_distance(const PeriodMatrix& b, cplx a, cplx c)
{
    return cover_distance(b, CVector::Constant(1, a), CVector::Constant(1, c));
}

} // namespace

TorusCurve::TorusCurve(const PeriodMatrix& b, cplx base_lift)
    : SpectralCurve(b, SurfacePoint(base_lift))
{
    if (b.genus() != 1) throw DimensionMismatch("make_torus_curve: genus must be 1");
    z0_ = theta_zero_1d(b);
    riemann_ = CVector::Constant(1, cplx(0.0, kPi) + 0.5 * b(0, 0));
    const RiemannValidation check = validate_riemann_constants(*this, riemann_);
    if (!check.passed) {
        throw ConsistencyFailure("torus curve: Riemann constants failed validation (residual "
                                 + std::to_string(check.vanishing_residual) + ", grid ratio "
                                 + std::to_string(check.grid_min_over_median) + ")");
    }
}

std::shared_ptr<const TorusCurve> make_torus_curve(const PeriodMatrix& b, cplx base_lift)
{
    return std::make_shared<const TorusCurve>(b, base_lift);
}

ThetaValue TorusCurve::prime_form_scaled(cplx u) const
{
    return theta_scaled(period_matrix(), CVector::Constant(1, u - z0_));
}

cplx TorusCurve::prime_form(cplx u) const
{
    return prime_form_scaled(u).value();
}

CVector TorusCurve::abel(const SurfacePoint& p) const
{
    check_point(p, "abel");
    return p.lift - base_point().lift;
}

cplx TorusCurve::integrate_segment(cplx from, cplx to, cplx plus, cplx minus) const
{
    const PeriodMatrix& b = period_matrix();
    const double length = std::abs(to - from);
    if (length == 0.0) return 0.0;

    auto log_e = [&](cplx u) {
        const ThetaValue v = prime_form_scaled(u);
        return std::log(v.mantissa) + v.log_factor;
    };
    auto pole_distance = [&](cplx w) {
        return std::min(torus_distance(b, w, plus), torus_distance(b, w, minus));
    };

    cplx total = 0.0;
    double t = 0.0;
    cplx w = from;
    double dist = pole_distance(w);
    if (dist < kPoleTolerance) throw PoleOnPath("third-kind integral: path starts at a pole");
    cplx lp = log_e(w - plus);
    cplx lm = log_e(w - minus);

    for (int steps = 0; t < 1.0; ++steps) {
        if (steps > kMaxSteps) throw NonConvergent("third-kind integral: too many continuation steps");
        double h = std::min({1.0 - t, kMaxStepLength / length, kPoleStepFraction * dist / length});
        for (;;) {
            const double t1 = (h >= 1.0 - t) ? 1.0 : t + h;
            const cplx w1 = from + t1 * (to - from);
            const double dist1 = pole_distance(w1);
            if (dist1 < kPoleTolerance) {
                throw PoleOnPath("third-kind integral: path passes within 1e-8 of a pole; re-lift the endpoint");
            }
            const cplx lp1 = log_e(w1 - plus);
            const cplx lm1 = log_e(w1 - minus);
            const cplx dp = principal(lp1 - lp);
            const cplx dm = principal(lm1 - lm);
            if (std::abs(dp.imag()) > kMaxArgStep || std::abs(dm.imag()) > kMaxArgStep) {
                h *= 0.5;
                if (h * length < 1e-14) throw NonConvergent("third-kind integral: step size underflow");
                continue;
            }
            total += dp - dm;
            t = t1;
            w = w1;
            dist = dist1;
            lp = lp1;
            lm = lm1;
            break;
        }
    }
    return total;
}

cplx TorusCurve::third_kind_integral(const SurfacePoint& p, const SurfacePoint& plus,
                                     const SurfacePoint& minus) const
{
    check_point(p, "third_kind_integral");
    check_point(plus, "third_kind_integral");
    check_point(minus, "third_kind_integral");
    if (point_distance(plus, minus) < kPoleTolerance) {
        throw InvalidArgument("third_kind_integral: marked points coincide");
    }
    return integrate_segment(base_lift(), p.lift[0], plus.lift[0], minus.lift[0]);
}

cplx TorusCurve::continued_b_period(cplx plus, cplx minus) const
{
    const cplx bb = period_matrix()(0, 0);
    // Try a few b-cycles until one misses both poles comfortably.
    for (int attempt = 0; attempt < 16; ++attempt) {
        const double s = (attempt + 0.5) / 16.0;
        const cplx start = base_lift() + cplx(0.0, kTwoPi * s);
        const double clearance = std::min(torus_distance(period_matrix(), start, plus),
                                          torus_distance(period_matrix(), start, minus));
        if (clearance < 0.05) continue;
        try {
            return integrate_segment(start, start + bb, plus, minus);
        } catch (const PoleOnPath&) {
            continue;
        }
    }
    throw ConsistencyFailure("b-period continuation: no pole-free b-cycle found");
}

CVector TorusCurve::b_period_vector(const SurfacePoint& plus, const SurfacePoint& minus) const
{
    check_point(plus, "b_period_vector");
    check_point(minus, "b_period_vector");
    if (point_distance(plus, minus) < kPoleTolerance) {
        throw InvalidArgument("b_period_vector: marked points coincide");
    }
    const CVector u = abel(plus) - abel(minus);
    const cplx direct = continued_b_period(plus.lift[0], minus.lift[0]);
    const double mismatch = std::abs(principal(direct - u[0]));
    if (mismatch > kBilinearTolerance) {
        throw ConsistencyFailure("b_period_vector: bilinear identity off by " + std::to_string(mismatch));
    }
    return u;
}

} // namespace agdo

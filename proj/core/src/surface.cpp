#include "agdo/surface.hpp"

#include <algorithm>
#include <numbers>
#include <vector>

#include "agdo/errors.hpp"
#include "agdo/lattice.hpp"

namespace agdo {

SurfacePoint SurfacePoint::relifted(const PeriodMatrix& b, const IVector& m, const IVector& n) const
{
    return SurfacePoint(CVector(lift + lattice_vector(b, m, n)));
}

SpectralCurve::SpectralCurve(PeriodMatrix b, SurfacePoint base) : b_(std::move(b)), base_(std::move(base))
{
    check_point(base_, "base point");
}

void SpectralCurve::check_point(const SurfacePoint& p, const char* what) const
{
    if (p.genus() != genus()) {
        throw DimensionMismatch(std::string(what) + ": lift has length " + std::to_string(p.genus())
                                + ", curve genus is " + std::to_string(genus()));
    }
}

double SpectralCurve::point_distance(const SurfacePoint& a, const SurfacePoint& b) const
{
    check_point(a, "point_distance");
    check_point(b, "point_distance");
    return cover_distance(b_, a.lift, b.lift);
}

RiemannValidation validate_riemann_constants(const TorusCurve& curve, const CVector& k)
{
    const PeriodMatrix& b = curve.period_matrix();
    RiemannValidation out;
    const double theta0 = std::abs(theta_eval(b, CVector::Zero(1)));
    const cplx shift = k[0];

    // Probe divisor point P1 = base point, so A(P1) = 0.
    out.vanishing_residual = std::abs(theta_scaled(b, CVector::Constant(1, -shift)).mantissa) / theta0;

    std::vector<double> values;
    values.reserve(100);
    for (int i = 0; i < 10; ++i) {
        for (int j = 0; j < 10; ++j) {
            Eigen::VectorXd s(1);
            Eigen::VectorXd t(1);
            s[0] = (i + 0.5) / 10.0;
            t[0] = (j + 0.5) / 10.0;
            const CVector a = from_lattice_coordinates(b, s, t);
            values.push_back(std::abs(theta_scaled(b, CVector(a.array() - shift)).mantissa));
        }
    }
    std::vector<double> sorted = values;
    std::nth_element(sorted.begin(), sorted.begin() + 50, sorted.end());
    const double median = sorted[50];
    out.grid_min_over_median = *std::min_element(values.begin(), values.end()) / median;
    out.grid_probed = true;
    out.passed = out.vanishing_residual <= kRiemannResidualTolerance && out.grid_min_over_median >= 1e-3;
    return out;
}

RiemannValidation validate_riemann_constants(const PeriodMatrix& b, const CVector& k,
                                             const std::vector<CVector>& divisor_abel)
{
    RiemannValidation out;
    const int g = b.genus();
    const double theta0 = std::abs(theta_eval(b, CVector::Zero(g)));
    CVector sum = CVector::Zero(g);
    for (const CVector& a : divisor_abel) sum += a;

    if (divisor_abel.empty()) {
        if (g != 1) throw SchemaError("Riemann-constant validation needs g divisor points for genus > 1");
        out.vanishing_residual = std::abs(theta_scaled(b, CVector(-k)).mantissa) / theta0;
    }
    for (const CVector& a : divisor_abel) {
        const CVector arg = a - sum - k;
        out.vanishing_residual =
            std::max(out.vanishing_residual, std::abs(theta_scaled(b, arg).mantissa) / theta0);
    }
    out.passed = out.vanishing_residual <= kRiemannResidualTolerance;
    return out;
}

CurveData tabulate_curve(const SpectralCurve& curve,
                         const std::vector<std::pair<std::string, SurfacePoint>>& points,
                         const std::vector<std::pair<std::string, std::string>>& pairs,
                         const std::vector<IntegralQuery>& integrals)
{
    CurveData data;
    data.b = curve.period_matrix().matrix();
    data.base_lift = curve.base_point().lift;
    data.riemann_constants = curve.riemann_constants();

    std::map<std::string, SurfacePoint> by_name;
    for (const auto& [name, p] : points) {
        if (!by_name.emplace(name, p).second) throw InvalidArgument("tabulate_curve: duplicate point " + name);
        data.marked_points.emplace_back(name, p.lift);
    }
    auto lookup = [&](const std::string& name) -> const SurfacePoint& {
        auto it = by_name.find(name);
        if (it == by_name.end()) throw InvalidArgument("tabulate_curve: unknown point " + name);
        return it->second;
    };
    for (const auto& [plus, minus] : pairs) {
        data.b_periods[plus + "/" + minus] = curve.b_period_vector(lookup(plus), lookup(minus));
    }
    for (const IntegralQuery& q : integrals) {
        data.third_kind_integrals[q.endpoint + "|" + q.plus + "/" + q.minus] =
            curve.third_kind_integral(lookup(q.endpoint), lookup(q.plus), lookup(q.minus));
    }
    return data;
}

} // namespace agdo

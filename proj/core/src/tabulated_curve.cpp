#include <set>

#include "agdo/errors.hpp"
#include "agdo/surface.hpp"

namespace agdo {

namespace {

PeriodMatrix checked_period_matrix(const CMatrix& b)
{
    try {
        return PeriodMatrix(b);
    } catch (const InvalidArgument& e) {
        throw SchemaError(std::string("curve data: ") + e.what());
    }
}

} // namespace

TabulatedCurve::TabulatedCurve(CurveData data)
    : SpectralCurve(checked_period_matrix(data.b), SurfacePoint(data.base_lift)), data_(std::move(data))
{
    const int g = genus();
    if (data_.riemann_constants.size() != g) throw SchemaError("curve data: riemann_constants has wrong length");

    std::set<std::string> names;
    for (const auto& [name, lift] : data_.marked_points) {
        if (lift.size() != g) throw SchemaError("curve data: marked point '" + name + "' has wrong length");
        if (!names.insert(name).second) throw SchemaError("curve data: duplicate marked point '" + name + "'");
    }
    for (const auto& [key, u] : data_.b_periods) {
        if (u.size() != g) throw SchemaError("curve data: b-period '" + key + "' has wrong length");
        const auto slash = key.find('/');
        if (slash == std::string::npos) throw SchemaError("curve data: b-period key '" + key + "' is not 'plus/minus'");
        if (!names.contains(key.substr(0, slash)) || !names.contains(key.substr(slash + 1))) {
            throw SchemaError("curve data: b-period '" + key + "' names an unknown point");
        }
    }
    for (const auto& [key, value] : data_.third_kind_integrals) {
        const auto bar = key.find('|');
        const auto slash = key.find('/', bar == std::string::npos ? 0 : bar);
        if (bar == std::string::npos || slash == std::string::npos) {
            throw SchemaError("curve data: integral key '" + key + "' is not 'endpoint|plus/minus'");
        }
        for (const std::string& n : {key.substr(0, bar), key.substr(bar + 1, slash - bar - 1), key.substr(slash + 1)}) {
            if (!names.contains(n)) throw SchemaError("curve data: integral '" + key + "' names unknown point '" + n + "'");
        }
    }
}

std::optional<std::string> TabulatedCurve::name_of(const SurfacePoint& p) const
{
    for (const auto& [name, lift] : data_.marked_points) {
        if (lift.size() == p.lift.size() && lift == p.lift) return name;
    }
    return std::nullopt;
}

SurfacePoint TabulatedCurve::point(const std::string& name) const
{
    for (const auto& [n, lift] : data_.marked_points) {
        if (n == name) return SurfacePoint(lift);
    }
    throw NotTabulated("tabulated curve: no point named '" + name + "'");
}

const std::string& TabulatedCurve::require_name(const SurfacePoint& p, const char* what) const
{
    check_point(p, what);
    for (const auto& [name, lift] : data_.marked_points) {
        if (lift == p.lift) return name;
    }
    throw NotTabulated(std::string(what) + ": point is not stored in the curve table");
}

CVector TabulatedCurve::abel(const SurfacePoint& p) const
{
    check_point(p, "abel");
    if (p == base_point()) return CVector::Zero(genus());
    const std::string& name = require_name(p, "abel");
    return point(name).lift - data_.base_lift;
}

cplx TabulatedCurve::third_kind_integral(const SurfacePoint& p, const SurfacePoint& plus,
                                         const SurfacePoint& minus) const
{
    check_point(p, "third_kind_integral");
    if (p == base_point()) return 0.0;
    const std::string key = require_name(p, "third_kind_integral") + "|" + require_name(plus, "third_kind_integral")
                            + "/" + require_name(minus, "third_kind_integral");
    const auto it = data_.third_kind_integrals.find(key);
    if (it == data_.third_kind_integrals.end()) throw NotTabulated("third_kind_integral: '" + key + "' not stored");
    return it->second;
}

CVector TabulatedCurve::b_period_vector(const SurfacePoint& plus, const SurfacePoint& minus) const
{
    const std::string key = require_name(plus, "b_period_vector") + "/" + require_name(minus, "b_period_vector");
    const auto it = data_.b_periods.find(key);
    if (it == data_.b_periods.end()) throw NotTabulated("b_period_vector: '" + key + "' not stored");
    return it->second;
}

std::shared_ptr<const TabulatedCurve> load_tabulated_curve(CurveData data)
{
    auto curve = std::make_shared<const TabulatedCurve>(std::move(data));
    const CurveData& d = curve->data();

    for (const auto& [key, u] : d.b_periods) {
        const auto slash = key.find('/');
        const CVector expected = curve->abel(curve->point(key.substr(0, slash)))
                                 - curve->abel(curve->point(key.substr(slash + 1)));
        const double err = (u - expected).cwiseAbs().maxCoeff();
        if (err > kBilinearTolerance) {
            throw ConsistencyFailure("curve data: b-period '" + key + "' differs from the Abel difference by "
                                     + std::to_string(err));
        }
    }

    std::vector<CVector> divisor;
    for (const auto& [name, lift] : d.marked_points) {
        if (!name.empty() && name.front() == 'D') divisor.push_back(curve->abel(SurfacePoint(lift)));
    }
    if (!divisor.empty() && static_cast<int>(divisor.size()) != curve->genus()) {
        throw SchemaError("curve data: expected " + std::to_string(curve->genus()) + " divisor points");
    }
    const RiemannValidation check =
        validate_riemann_constants(curve->period_matrix(), curve->riemann_constants(), divisor);
    if (!check.passed) {
        throw ConsistencyFailure("curve data: Riemann constants fail the theta-divisor check (residual "
                                 + std::to_string(check.vanishing_residual) + ")");
    }
    return curve;
}

} // namespace agdo

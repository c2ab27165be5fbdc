#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "agdo/theta.hpp"

namespace agdo {

/// A point of the curve together with a chosen lift to the universal cover.
/// The lift fixes every integration path that ends at the point; two points
/// are the same curve point iff their lifts differ by a lattice vector.
struct SurfacePoint {
    CVector lift;

    SurfacePoint() = default;
    explicit SurfacePoint(CVector l) : lift(std::move(l)) {}
    explicit SurfacePoint(cplx l) : lift(CVector::Constant(1, l)) {}

    int genus() const { return static_cast<int>(lift.size()); }

    /// Same curve point, lift moved by 2*pi*i*m + B*n.
    SurfacePoint relifted(const PeriodMatrix& b, const IVector& m, const IVector& n) const;

    friend bool operator==(const SurfacePoint& a, const SurfacePoint& b)
    {
        return a.lift.size() == b.lift.size() && a.lift == b.lift;
    }
};

enum class CurveBackend { torus, tabulated };

/// Evaluation backend for the quantities the Baker-Akhiezer formulas consume:
/// Abel map based at P0, a-normalized third-kind integrals, their b-period
/// vectors and the Riemann constants. Immutable after construction.
class SpectralCurve {
public:
    virtual ~SpectralCurve() = default;

    virtual CurveBackend backend() const = 0;

    const PeriodMatrix& period_matrix() const { return b_; }
    int genus() const { return b_.genus(); }
    const SurfacePoint& base_point() const { return base_; }

    virtual CVector abel(const SurfacePoint& p) const = 0;

    /// Integral of Omega_{plus,minus} from P0 to p along the lift-determined path.
    virtual cplx third_kind_integral(const SurfacePoint& p, const SurfacePoint& plus,
                                     const SurfacePoint& minus) const = 0;

    /// U_{plus,minus}, the b-periods of Omega_{plus,minus}.
    virtual CVector b_period_vector(const SurfacePoint& plus, const SurfacePoint& minus) const = 0;

    virtual const CVector& riemann_constants() const = 0;

    /// Distance between the curve points underlying two lifts.
    double point_distance(const SurfacePoint& a, const SurfacePoint& b) const;

protected:
    SpectralCurve(PeriodMatrix b, SurfacePoint base);

    void check_point(const SurfacePoint& p, const char* what) const;

private:
    PeriodMatrix b_;
    SurfacePoint base_;
};

using CurvePtr = std::shared_ptr<const SpectralCurve>;

inline constexpr double kPoleTolerance = 1e-8;
inline constexpr double kBilinearTolerance = 1e-8;
inline constexpr double kRiemannResidualTolerance = 1e-10;

/// Genus-one curve C / (2*pi*i Z + B Z). The Abel map is lift - base_lift and
/// third-kind integrals come from the prime-form surrogate E(u) = Theta(u - z0),
/// z0 the odd half-period zero of theta.
class TorusCurve final : public SpectralCurve {
public:
    TorusCurve(const PeriodMatrix& b, cplx base_lift);

    CurveBackend backend() const override { return CurveBackend::torus; }

    CVector abel(const SurfacePoint& p) const override;
    cplx third_kind_integral(const SurfacePoint& p, const SurfacePoint& plus,
                             const SurfacePoint& minus) const override;
    CVector b_period_vector(const SurfacePoint& plus, const SurfacePoint& minus) const override;
    const CVector& riemann_constants() const override { return riemann_; }

    cplx base_lift() const { return base_point().lift[0]; }
    cplx theta_zero() const { return z0_; }
    cplx prime_form(cplx u) const;

    /// Integral of dlog E(w - plus) - dlog E(w - minus) along the straight
    /// segment from -> to, with the log branch continued step by step.
    /// Throws PoleOnPath when the segment comes within kPoleTolerance of a
    /// lattice translate of plus or minus.
    cplx integrate_segment(cplx from, cplx to, cplx plus, cplx minus) const;

    /// b-period of Omega_{plus,minus} by numerical continuation along a
    /// b-cycle, i.e. a segment w -> w + B avoiding both poles. Defined up to
    /// an integer multiple of 2*pi*i.
    cplx continued_b_period(cplx plus, cplx minus) const;

private:
    ThetaValue prime_form_scaled(cplx u) const;

    cplx z0_;
    CVector riemann_;
};

std::shared_ptr<const TorusCurve> make_torus_curve(const PeriodMatrix& b, cplx base_lift);

/// Everything a tabulated curve stores. Keys follow the curve-data document:
/// b_periods are keyed "plus/minus", third-kind integrals "endpoint|plus/minus".
/// Marked points whose name starts with 'D' are treated as the divisor used to
/// validate the Riemann constants.
struct CurveData {
    CMatrix b;
    CVector base_lift;
    std::vector<std::pair<std::string, CVector>> marked_points;
    CVector riemann_constants;
    std::map<std::string, CVector> b_periods;
    std::map<std::string, cplx> third_kind_integrals;
};

class TabulatedCurve final : public SpectralCurve {
public:
    explicit TabulatedCurve(CurveData data);

    CurveBackend backend() const override { return CurveBackend::tabulated; }

    CVector abel(const SurfacePoint& p) const override;
    cplx third_kind_integral(const SurfacePoint& p, const SurfacePoint& plus,
                             const SurfacePoint& minus) const override;
    CVector b_period_vector(const SurfacePoint& plus, const SurfacePoint& minus) const override;
    const CVector& riemann_constants() const override { return data_.riemann_constants; }

    const CurveData& data() const { return data_; }
    std::optional<std::string> name_of(const SurfacePoint& p) const;
    SurfacePoint point(const std::string& name) const;

private:
    const std::string& require_name(const SurfacePoint& p, const char* what) const;

    CurveData data_;
};

/// Re-checks every stored invariant (symmetry and definiteness of B, bilinear
/// identity, Riemann-constant vanishing). Throws SchemaError or
/// ConsistencyFailure.
std::shared_ptr<const TabulatedCurve> load_tabulated_curve(CurveData data);

/// Table of a curve restricted to named points: Abel images, b-periods of
/// every listed pair and third-kind integrals for every listed (endpoint, pair).
struct IntegralQuery {
    std::string endpoint;
    std::string plus;
    std::string minus;
};

CurveData tabulate_curve(const SpectralCurve& curve,
                         const std::vector<std::pair<std::string, SurfacePoint>>& points,
                         const std::vector<std::pair<std::string, std::string>>& pairs,
                         const std::vector<IntegralQuery>& integrals);

struct RiemannValidation {
    double vanishing_residual = 0.0;  // |Theta(A(D_j) - A(D) - K)| / |Theta(0)|, worst over j
    double grid_min_over_median = 0.0;  // torus only; 0 when no grid was probed
    bool grid_probed = false;
    bool passed = false;
};

/// Checks that Theta(A(P) - A(P1) - K) vanishes at P = P1 and nowhere else on a
/// 10 x 10 fundamental-domain grid (genus one, probe P1 = base point).
RiemannValidation validate_riemann_constants(const TorusCurve& curve, const CVector& k);

/// Vanishing of Theta(A(D_j) - sum_i A(D_i) - K) at every divisor point D_j.
RiemannValidation validate_riemann_constants(const PeriodMatrix& b, const CVector& k,
                                             const std::vector<CVector>& divisor_abel);

} // namespace agdo

#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "agdo/labels.hpp"
#include "agdo/surface.hpp"

namespace agdo {

/// Relative floor below which a theta denominator is treated as a hit of the
/// theta divisor (non-generic spectral data).
inline constexpr double kGenericityFloor = 1e-10;
inline constexpr double kMinSeparation = 1e-6;

/// The free constants r_v in front of the Baker-Akhiezer functions.
class Normalization {
public:
    using Fn = std::function<cplx(std::span<const int>)>;

    /// r_v = value for every label.
    static Normalization constant(cplx value = 1.0);
    /// r_v = scale * exp(sum_i weights_i * v_i) over the label components.
    static Normalization exponential(std::vector<cplx> weights, cplx scale = 1.0);

    cplx operator()(const Label3& v) const;
    cplx operator()(const Label6& v) const;

    bool is_constant() const { return weights_.empty(); }
    cplx scale() const { return scale_; }
    const std::vector<cplx>& weights() const { return weights_; }
    std::string description() const;

    /// Multiplies every r_v by lambda.
    Normalization scaled(cplx lambda) const;

private:
    cplx evaluate(std::span<const int> v) const;

    cplx scale_ = 1.0;
    std::vector<cplx> weights_;
};

/// Everything the evaluation of phi at a point needs that does not depend on
/// the label: Abel image, the exponent-pair integrals and Theta(P, 0).
struct PreparedPoint {
    SurfacePoint point;
    CVector abel;
    std::array<cplx, 4> integrals{};
    ThetaValue theta_base{};
};

/// check_separation = false admits colliding points, for diagnostics only.
struct SpectralOptions {
    bool check_separation = true;
};

/// Spectral data of either model: curve, six marked points, a divisor of g
/// points and the normalization r. Marked points are ordered
/// P1+, P1-, P2+, P2-, P3+, P3- (cross) or Q1, Q2, Q3, R1, R2, R3 (hex).
/// Immutable; construction precomputes U vectors, A(D) + K and the marked-point
/// integrals the coefficient formulas consume.
class SpectralData {
public:
    using Options = SpectralOptions;

    static SpectralData cross(CurvePtr curve, std::array<SurfacePoint, 6> marked, std::vector<SurfacePoint> divisor,
                              Normalization r = Normalization::constant(), Options options = Options{});
    static SpectralData cross(CurvePtr curve, std::array<SurfacePoint, 6> marked, std::vector<SurfacePoint> divisor,
                              Options options)
    {
        return cross(std::move(curve), std::move(marked), std::move(divisor), Normalization::constant(), options);
    }
    static SpectralData hex(CurvePtr curve, std::array<SurfacePoint, 6> marked, std::vector<SurfacePoint> divisor,
                            Normalization r = Normalization::constant(), Options options = Options{});

    static const std::array<std::string, 6>& marked_names(Model model);

    Model model() const { return model_; }
    const SpectralCurve& curve() const { return *curve_; }
    const CurvePtr& curve_ptr() const { return curve_; }
    const std::array<SurfacePoint, 6>& marked() const { return marked_; }
    const SurfacePoint& marked(int index) const { return marked_.at(static_cast<std::size_t>(index)); }
    const std::vector<SurfacePoint>& divisor() const { return divisor_; }
    const Normalization& normalization() const { return r_; }
    SpectralData with_normalization(Normalization r) const;

    /// 3 for cross (Omega_1..3), 4 for hex (Q3Q1, Q3Q2, R3R1, R3R2).
    int exponent_count() const { return model_ == Model::cross ? 3 : 4; }
    std::array<int, 2> exponent_pair(int i) const;
    const CVector& b_period(int i) const { return u_.at(static_cast<std::size_t>(i)); }

    /// -A(D) - K
    const CVector& theta_shift() const { return shift_; }
    double theta_zero_magnitude() const { return theta0_; }

    /// Smallest cover distance between two marked points or a marked and a divisor point.
    double min_separation() const { return min_separation_; }

    /// Integral from P0 to marked point `endpoint` of Omega_{plus,minus}
    /// (indices into marked()); only the combinations the coefficient formulas
    /// use are available.
    cplx marked_integral(int endpoint, int plus, int minus) const;

    PreparedPoint prepare(const SurfacePoint& p) const;
    /// Prepared data for a marked point; its integrals are not filled in.
    PreparedPoint prepare_marked(int index) const;

private:
    SpectralData() = default;
    void initialise(Options options);

    Model model_ = Model::cross;
    CurvePtr curve_;
    std::array<SurfacePoint, 6> marked_;
    std::vector<SurfacePoint> divisor_;
    Normalization r_;
    std::vector<CVector> u_;
    CVector shift_;
    double theta0_ = 0.0;
    double min_separation_ = 0.0;
    std::vector<std::pair<std::array<int, 3>, cplx>> marked_integrals_;
};

/// The (endpoint, plus, minus) marked-point integrals used by the
/// coefficient formulas of the given model.
const std::vector<std::array<int, 3>>& required_marked_integrals(Model model);

/// Exponents of the label against the U vectors: (alpha, beta, gamma) for
/// cross, (alpha, beta, rho, sigma) for hex.
std::array<int, 4> exponents(const Label3& v);
std::array<int, 4> exponents(const Label6& v);

/// Theta(A(P) + sum_i c_i U_i - A(D) - K) in scaled form.
ThetaValue theta_component_scaled(const SpectralData& sd, const CVector& abel, const std::array<int, 4>& c);

cplx theta_component(const SpectralData& sd, const SurfacePoint& p, const Label3& v);
cplx theta_component(const SpectralData& sd, const SurfacePoint& p, const Label6& v);

/// phi_v(P) = r_v exp(int_{P0}^{P} sum_i c_i Omega_i) Theta(P, v) / Theta(P, 0).
/// Throws SingularEvaluation if |Theta(P, 0)| is below the genericity floor.
cplx phi(const SpectralData& sd, const Label3& v, const PreparedPoint& p);
cplx phi(const SpectralData& sd, const Label6& v, const PreparedPoint& p);
cplx phi_cross(const SpectralData& sd, const Label3& v, const SurfacePoint& p);
cplx phi_hex(const SpectralData& sd, const Label6& v, const SurfacePoint& p);

cplx psi(const SpectralData& sd, SiteCross site, const PreparedPoint& p);
cplx psi(const SpectralData& sd, SiteHex site, const PreparedPoint& p);
cplx psi(const SpectralData& sd, SiteCross site, const SurfacePoint& p);
cplx psi(const SpectralData& sd, SiteHex site, const SurfacePoint& p);

struct UniquenessReport {
    bool generic = true;
    double min_separation = 0.0;
    double max_relift_discrepancy = 0.0;  // relative, over probe ratios
    double max_reevaluation_discrepancy = 0.0;
    double kernel_gap = 1.0;
    bool kernel_one_dimensional = false;
    bool passed = false;
    std::vector<std::string> issues;
};

/// Numerical surrogate for "phi_v is unique up to a constant": probe ratios
/// are reproducible across re-lifts and re-evaluation, and the functions
/// phi_{v+s} for one stencil's label shifts s span a space with a
/// one-dimensional relation. Never throws on non-generic data; it is reported.
UniquenessReport uniqueness_check(const SpectralData& sd, const Label3& v, const std::vector<SurfacePoint>& probes);
UniquenessReport uniqueness_check(const SpectralData& sd, const Label6& v, const std::vector<SurfacePoint>& probes);

/// Quasi-uniform points of the fundamental domain, rejected within `clearance`
/// of marked, divisor and base points. Genus-one torus backend only.
std::vector<SurfacePoint> sample_probes(const SpectralData& sd, int count, std::uint64_t seed,
                                        double clearance = 0.05);

/// Uniform double in [0, 1) from the top 53 bits of a 64-bit engine draw.
template <typename Engine>
double uniform01(Engine& engine)
{
    return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

} // namespace agdo

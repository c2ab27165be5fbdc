#pragma once

#include <array>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "agdo/bafunc.hpp"
#include "agdo/labels.hpp"

namespace agdo {

/// Which transcription of the coefficient formulas to evaluate. `printed`
/// follows the published formulas literally; `corrected` applies the entries
/// of the errata registry.
enum class FormulaReading { printed, corrected };

std::string to_string(FormulaReading reading);
FormulaReading formula_reading_from_string(const std::string& name);

/// Coefficients a, b, c, d, v of the cross-shaped operator at one site.
struct CrossStencil {
    static constexpr std::size_t arity = 5;
    static constexpr std::array<const char*, 5> names{"a", "b", "c", "d", "v"};

    std::array<cplx, 5> coeffs{};

    cplx a() const { return coeffs[0]; }
    cplx b() const { return coeffs[1]; }
    cplx c() const { return coeffs[2]; }
    cplx d() const { return coeffs[3]; }
    cplx v() const { return coeffs[4]; }
};

/// Coefficients a, b, c, d, f, g of the hexagonal operator at one site.
struct HexStencil {
    static constexpr std::size_t arity = 6;
    static constexpr std::array<const char*, 6> names{"a", "b", "c", "d", "f", "g"};

    std::array<cplx, 6> coeffs{};

    cplx a() const { return coeffs[0]; }
    cplx b() const { return coeffs[1]; }
    cplx c() const { return coeffs[2]; }
    cplx d() const { return coeffs[3]; }
    cplx f() const { return coeffs[4]; }
    cplx g() const { return coeffs[5]; }
};

template <typename Site>
struct ModelTraits;

template <>
struct ModelTraits<SiteCross> {
    using Label = Label3;
    using Stencil = CrossStencil;
    static constexpr Model model = Model::cross;
};

template <>
struct ModelTraits<SiteHex> {
    using Label = Label6;
    using Stencil = HexStencil;
    static constexpr Model model = Model::hex;
};

/// Index of the coefficient fixed to 1: d (even n+m) or c (odd) for cross;
/// b, d, f for k-l = 0, 1, 2 mod 3.
std::size_t unit_index(SiteCross site);
std::size_t unit_index(SiteHex site);

/// Indices of the two coefficients forced to vanish: (c, g), (a, g), (a, c)
/// for k-l = 0, 1, 2 mod 3.
std::array<std::size_t, 2> zero_indices(SiteHex site);

std::vector<int> site_indices(SiteCross site);
std::vector<int> site_indices(SiteHex site);

/// Closed-form coefficient ratios for the site's parity case, with
/// the unit coefficient set to 1. Throws SingularEvaluation when a theta
/// denominator or r value falls below the genericity floor.
CrossStencil cross_coefficients(const SpectralData& sd, SiteCross site,
                                FormulaReading reading = FormulaReading::corrected);

/// Closed-form coefficient ratios for the site's residue class.
/// The two forced zeros are exactly 0.
HexStencil hex_coefficients(const SpectralData& sd, SiteHex site, FormulaReading reading = FormulaReading::corrected);

inline CrossStencil coefficients(const SpectralData& sd, SiteCross site, FormulaReading reading)
{
    return cross_coefficients(sd, site, reading);
}
inline HexStencil coefficients(const SpectralData& sd, SiteHex site, FormulaReading reading)
{
    return hex_coefficients(sd, site, reading);
}

/// sum_i coeffs_i * psi_i with psi ordered as stencil_offsets emits the
/// neighbours. Throws ArityMismatch unless both spans have the model's arity.
cplx apply_stencil(Model model, std::span<const cplx> coeffs, std::span<const cplx> psi);

template <typename Site>
struct StencilField {
    using Stencil = typename ModelTraits<Site>::Stencil;

    Window window;
    std::map<Site, Stencil> sites;

    Model model() const { return ModelTraits<Site>::model; }
};

using CrossField = StencilField<SiteCross>;
using HexField = StencilField<SiteHex>;

template <typename Site>
struct SiteFailure {
    Site site;
    std::string message;
};

template <typename Site>
struct BuildResult {
    StencilField<Site> field;
    std::vector<SiteFailure<Site>> failures;
};

/// Closed-form field over every site of the window. Sites whose evaluation
/// is singular are left out and listed in `failures`.
BuildResult<SiteCross> build_cross_field(const SpectralData& sd, const Window& window,
                                         FormulaReading reading = FormulaReading::corrected);
BuildResult<SiteHex> build_hex_field(const SpectralData& sd, const Window& window,
                                     FormulaReading reading = FormulaReading::corrected);

inline constexpr double kMinGauge = 1e-12;

template <typename Site>
struct GaugeField {
    std::map<Site, cplx> values;
};

/// Each coefficient divided by the gauge value at the neighbour it multiplies.
/// Throws MissingGauge when a neighbour of a window site has no gauge value and
/// InvalidArgument when a gauge value is below kMinGauge in modulus.
template <typename Site>
StencilField<Site> gauge_transform(const StencilField<Site>& field, const GaugeField<Site>& gauge);

template <typename Site>
struct SiteResidual {
    Site site;
    double max_residual = 0.0;
};

template <typename Site>
struct ResidualReport {
    double max_residual = 0.0;
    double tolerance = 0.0;
    std::vector<SiteResidual<Site>> per_site;  // window order
    std::vector<SiteResidual<Site>> failures;  // above tolerance
    std::vector<SiteFailure<Site>> errors;     // sites where psi could not be evaluated

    bool passed() const { return failures.empty() && errors.empty(); }
};

/// |sum_i c_i psi_i(P)| / sum_i |c_i psi_i(P)| over every site of the field and
/// every probe. With a gauge, psi is replaced by gauge_site * psi_site.
template <typename Site>
ResidualReport<Site> residual_report(const SpectralData& sd, const StencilField<Site>& field,
                                     const std::vector<SurfacePoint>& probes, double tolerance = 1e-8,
                                     const GaugeField<Site>* gauge = nullptr);

inline constexpr int kMinOracleProbes = 8;
inline constexpr double kRankTolerance = 1e-6;

template <typename Site>
struct OracleResult {
    typename ModelTraits<Site>::Stencil stencil;
    double gap = 0.0;                 // sigma_min / sigma_second_min
    Eigen::VectorXd singular_values;  // descending
};

/// Kernel of the probes x arity matrix of neighbour psi values, rescaled so the
/// unit coefficient of the site is 1. Throws RankDeficient if the second
/// smallest singular value is below kRankTolerance * sigma_max.
template <typename Site>
OracleResult<Site> nullspace_oracle(const SpectralData& sd, Site site, const std::vector<SurfacePoint>& probes);

/// max_i |x_i - y_i| / max(max_i |x_i|, max_i |y_i|).
double stencil_mismatch(std::span<const cplx> x, std::span<const cplx> y);

/// Component i of x relative to the largest component of x.
double relative_component(std::span<const cplx> x, std::size_t i);

} // namespace agdo

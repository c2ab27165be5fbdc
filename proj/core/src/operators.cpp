#include "agdo/operators.hpp"

#include <algorithm>
#include <cmath>
#include <type_traits>

#include "agdo/errors.hpp"
#include "agdo/linalg.hpp"

namespace agdo {

namespace {

// Product of theta values and exponentials, kept as mantissa * exp(exponent)
// so that large quasi-period factors cancel before exponentiation.
struct Term {
    cplx mantissa = 1.0;
    cplx exponent = 0.0;

    Term& num(const ThetaValue& t)
    {
        mantissa *= t.mantissa;
        exponent += t.log_factor;
        return *this;
    }
    Term& den(const ThetaValue& t)
    {
        mantissa /= t.mantissa;
        exponent -= t.log_factor;
        return *this;
    }
    Term& exp(cplx x)
    {
        exponent += x;
        return *this;
    }
    cplx value() const { return mantissa * std::exp(exponent); }
};

template <typename Label>
class FormulaContext {
public:
    explicit FormulaContext(const SpectralData& sd) : sd_(sd), floor_(kGenericityFloor * sd.theta_zero_magnitude())
    {
        for (int i = 0; i < 6; ++i) abel_[static_cast<std::size_t>(i)] = sd.curve().abel(sd.marked(i));
    }

    ThetaValue theta(int point, const Label& w) const
    {
        return theta_component_scaled(sd_, abel_[static_cast<std::size_t>(point)], exponents(w));
    }

    // Theta used as a denominator: must stay off the theta divisor.
    ThetaValue theta_den(int point, const Label& w) const
    {
        const ThetaValue t = theta(point, w);
        if (std::abs(t.mantissa) < floor_) {
            throw SingularEvaluation("theta denominator at marked point " + SpectralData::marked_names(sd_.model())
                                         [static_cast<std::size_t>(point)] + " is below the genericity floor");
        }
        return t;
    }

    cplx integral(int endpoint, int plus, int minus) const { return sd_.marked_integral(endpoint, plus, minus); }

    // r_{numer} / r_{denom}
    cplx r_ratio(const Label& numer, const Label& denom) const
    {
        const cplx rn = sd_.normalization()(numer);
        const cplx rd = sd_.normalization()(denom);
        if (std::abs(rd) == 0.0 || !std::isfinite(std::abs(rn)) || !std::isfinite(std::abs(rd))) {
            throw SingularEvaluation("normalization constant is zero or not finite");
        }
        return rn / rd;
    }

private:
    const SpectralData& sd_;
    double floor_;
    std::array<CVector, 6> abel_;
};

} // namespace

std::string to_string(FormulaReading reading)
{
    return reading == FormulaReading::printed ? "printed" : "corrected";
}

FormulaReading formula_reading_from_string(const std::string& name)
{
    if (name == "printed") return FormulaReading::printed;
    if (name == "corrected") return FormulaReading::corrected;
    throw InvalidArgument("unknown formula reading '" + name + "' (expected printed or corrected)");
}

std::size_t unit_index(SiteCross site)
{
    return residue_class(site) == 0 ? 3 : 2;
}

std::size_t unit_index(SiteHex site)
{
    static constexpr std::array<std::size_t, 3> unit{1, 3, 4};
    return unit[static_cast<std::size_t>(residue_class(site))];
}

std::array<std::size_t, 2> zero_indices(SiteHex site)
{
    static constexpr std::array<std::array<std::size_t, 2>, 3> zeros{{{2, 5}, {0, 5}, {0, 2}}};
    return zeros[static_cast<std::size_t>(residue_class(site))];
}

std::vector<int> site_indices(SiteCross site)
{
    return {site.n, site.m};
}

std::vector<int> site_indices(SiteHex site)
{
    return {site.k, site.l, site.m};
}

// Marked points: 0 P1+, 1 P1-, 2 P2+, 3 P2-, 4 P3+, 5 P3-.
CrossStencil cross_coefficients(const SpectralData& sd, SiteCross site, FormulaReading)
{
    if (sd.model() != Model::cross) throw InvalidArgument("cross_coefficients: spectral data is not cross");
    const FormulaContext<Label3> ctx(sd);
    const auto i1 = [&](int endpoint) { return ctx.integral(endpoint, 0, 1); };
    const auto i2 = [&](int endpoint) { return ctx.integral(endpoint, 2, 3); };
    const auto i3 = [&](int endpoint) { return ctx.integral(endpoint, 4, 5); };
    const Label3 v = relabel_cross(site);
    const Label3 i = unit::i;
    const Label3 j = unit::j;
    const Label3 k = unit::k;

    CrossStencil s;
    if (residue_class(site) == 0) {
        const Label3 vmj = v - j;
        const Label3 vimj = v + i - j;
        const Label3 vk = v + k;
        const Label3 vik = v + i + k;

        Term a;
        a.num(ctx.theta(2, vmj)).den(ctx.theta_den(2, vimj)).exp(-i1(2));

        Term b;
        b.num(ctx.theta(2, vmj)).num(ctx.theta(1, vimj)).num(ctx.theta(5, vik));
        b.den(ctx.theta_den(2, vimj)).den(ctx.theta_den(1, vik)).den(ctx.theta_den(5, vk));
        b.exp(i1(5) - i1(2) - i2(1) - i3(1));

        Term c;
        c.num(ctx.theta(2, vmj)).num(ctx.theta(1, vimj)).den(ctx.theta_den(2, vimj)).den(ctx.theta_den(1, vik));
        c.exp(-i1(2) - i2(1) - i3(1));

        Term first;
        first.num(ctx.theta(5, vik)).num(ctx.theta(3, vk)).den(ctx.theta_den(5, vk)).den(ctx.theta_den(3, v));
        first.exp(i1(5));
        Term second;
        second.num(ctx.theta(3, vik)).den(ctx.theta_den(3, v)).exp(i1(3));
        Term prefactor = c;
        prefactor.exp(i3(3));

        s.coeffs[0] = -ctx.r_ratio(vmj, vimj) * a.value();
        s.coeffs[1] = -ctx.r_ratio(vmj, vk) * b.value();
        s.coeffs[2] = ctx.r_ratio(vmj, vik) * c.value();
        s.coeffs[3] = 1.0;
        s.coeffs[4] = ctx.r_ratio(vmj, v) * prefactor.value() * (first.value() - second.value());
    } else {
        const Label3 vpj = v + j;
        const Label3 vmipj = v - i + j;
        const Label3 vmimk = v - i - k;
        const Label3 vmk = v - k;

        Term a;
        a.num(ctx.theta(3, vpj)).num(ctx.theta(0, vmipj)).num(ctx.theta(4, vmimk));
        a.den(ctx.theta_den(3, vmipj)).den(ctx.theta_den(0, vmimk)).den(ctx.theta_den(4, vmk));
        a.exp(i1(3) + i2(0) + i3(0) - i1(4));

        Term b;
        b.num(ctx.theta(3, vpj)).den(ctx.theta_den(3, vmipj)).exp(i1(3));

        Term d;
        d.num(ctx.theta(3, vpj)).num(ctx.theta(0, vmipj)).den(ctx.theta_den(3, vmipj)).den(ctx.theta_den(0, vmimk));
        d.exp(i1(3) + i2(0) + i3(0));

        Term first;
        first.num(ctx.theta(4, vmimk)).num(ctx.theta(2, vmk)).den(ctx.theta_den(4, vmk)).den(ctx.theta_den(2, v));
        first.exp(-i1(4));
        Term second;
        second.num(ctx.theta(2, vmimk)).den(ctx.theta_den(2, v)).exp(-i1(2));
        Term prefactor = d;
        prefactor.exp(-i3(2));

        s.coeffs[0] = -ctx.r_ratio(vpj, vmk) * a.value();
        s.coeffs[1] = -ctx.r_ratio(vpj, vmipj) * b.value();
        s.coeffs[2] = 1.0;
        s.coeffs[3] = ctx.r_ratio(vpj, vmimk) * d.value();
        s.coeffs[4] = ctx.r_ratio(vpj, v) * prefactor.value() * (first.value() - second.value());
    }
    return s;
}

// Marked points: 0 Q1, 1 Q2, 2 Q3, 3 R1, 4 R2, 5 R3.
HexStencil hex_coefficients(const SpectralData& sd, SiteHex site, FormulaReading reading)
{
    if (sd.model() != Model::hex) throw InvalidArgument("hex_coefficients: spectral data is not hex");
    const FormulaContext<Label6> ctx(sd);
    const auto in = [&](int endpoint, int plus, int minus) { return ctx.integral(endpoint, plus, minus); };
    const Label6 v = relabel_hex(site);

    HexStencil s;
    switch (residue_class(site)) {
    case 0: {
        const Label6 wb = v + e(4) - e(5);
        const Label6 wa = v + e(2) - e(3);
        const Label6 wd = v - e(1) + e(2);
        const Label6 wf = v + e(2) - e(3) + e(4) - e(6);

        Term a1;
        a1.num(ctx.theta(1, wd)).num(ctx.theta(2, wb)).den(ctx.theta_den(1, wa)).den(ctx.theta_den(2, wd));
        a1.exp(in(2, 4, 3) - in(2, 0, 1) - in(1, 2, 0));
        Term a2;
        a2.num(ctx.theta(1, wf)).num(ctx.theta(3, wb)).den(ctx.theta_den(1, wa)).den(ctx.theta_den(3, wf));
        a2.exp(in(1, 5, 3) - in(3, 2, 1) - in(3, 5, 4));

        Term d;
        d.num(ctx.theta(2, wb)).den(ctx.theta_den(2, wd)).exp(in(2, 4, 3) - in(2, 0, 1));

        // Printed denominator point is Q3; the oracle selects R1.
        const int f_den = reading == FormulaReading::printed ? 2 : 3;
        Term f;
        f.num(ctx.theta(3, wb)).den(ctx.theta_den(f_den, wf)).exp(-in(3, 2, 1) - in(3, 5, 4));

        s.coeffs[0] = ctx.r_ratio(wb, wa) * (a1.value() + a2.value());
        s.coeffs[1] = 1.0;
        s.coeffs[3] = -ctx.r_ratio(wb, wd) * d.value();
        s.coeffs[4] = -ctx.r_ratio(wb, wf) * f.value();
        break;
    }
    case 1: {
        const Label6 wd = v - e(4) + e(6);
        const Label6 wb = v + e(1) - e(2) - e(5) + e(6);
        const Label6 wc = v + e(1) - e(2);
        const Label6 wf = v + e(1) - e(3);

        Term b;
        b.num(ctx.theta(5, wd)).den(ctx.theta_den(5, wb)).exp(in(5, 0, 1) + in(5, 3, 4));

        Term c1;
        c1.num(ctx.theta(3, wb)).num(ctx.theta(5, wd)).den(ctx.theta_den(3, wc)).den(ctx.theta_den(5, wb));
        c1.exp(in(5, 0, 1) + in(5, 3, 4) - in(3, 5, 4));
        Term c2;
        c2.num(ctx.theta(3, wf)).num(ctx.theta(1, wd)).den(ctx.theta_den(3, wc)).den(ctx.theta_den(1, wf));
        c2.exp(in(3, 2, 1) - in(1, 2, 0) - in(1, 5, 3));

        Term f;
        f.num(ctx.theta(1, wd)).den(ctx.theta_den(1, wf)).exp(-in(1, 2, 0) - in(1, 5, 3));

        s.coeffs[1] = -ctx.r_ratio(wd, wb) * b.value();
        s.coeffs[2] = ctx.r_ratio(wd, wc) * (c1.value() + c2.value());
        s.coeffs[3] = 1.0;
        s.coeffs[4] = -ctx.r_ratio(wd, wf) * f.value();
        break;
    }
    default: {
        const Label6 wf = v + e(5) - e(6);
        const Label6 wb = v - e(2) + e(3);
        const Label6 wd = v - e(1) + e(3) - e(4) + e(5);
        const Label6 wg = v - e(1) + e(3);

        Term b;
        b.num(ctx.theta(0, wf)).den(ctx.theta_den(0, wb)).exp(in(0, 2, 1) + in(0, 5, 4));

        Term d;
        d.num(ctx.theta(4, wf)).den(ctx.theta_den(4, wd)).exp(in(4, 2, 0) + in(4, 5, 3));

        Term g1;
        g1.num(ctx.theta(2, wb)).num(ctx.theta(0, wf)).den(ctx.theta_den(2, wg)).den(ctx.theta_den(0, wb));
        g1.exp(in(0, 2, 1) + in(0, 5, 4) - in(2, 0, 1));
        Term g2;
        g2.num(ctx.theta(2, wd)).num(ctx.theta(4, wf)).den(ctx.theta_den(2, wg)).den(ctx.theta_den(4, wd));
        g2.exp(in(4, 2, 0) + in(4, 5, 3) + in(2, 3, 4));

        s.coeffs[1] = -ctx.r_ratio(wf, wb) * b.value();
        s.coeffs[3] = -ctx.r_ratio(wf, wd) * d.value();
        s.coeffs[4] = 1.0;
        s.coeffs[5] = ctx.r_ratio(wf, wg) * (g1.value() + g2.value());
        break;
    }
    }
    return s;
}

cplx apply_stencil(Model model, std::span<const cplx> coeffs, std::span<const cplx> psi)
{
    const std::size_t arity = model == Model::cross ? CrossStencil::arity : HexStencil::arity;
    if (coeffs.size() != arity || psi.size() != arity) {
        throw ArityMismatch("apply_stencil: " + to_string(model) + " stencil needs " + std::to_string(arity)
                            + " coefficients and values, got " + std::to_string(coeffs.size()) + " and "
                            + std::to_string(psi.size()));
    }
    cplx sum = 0.0;
    for (std::size_t i = 0; i < arity; ++i) sum += coeffs[i] * psi[i];
    return sum;
}

namespace {

template <typename Site>
std::vector<Site> window_sites(const Window& w)
{
    if constexpr (std::is_same_v<Site, SiteCross>) {
        return w.cross_sites();
    } else {
        return w.hex_sites();
    }
}

template <typename Site>
BuildResult<Site> build_field(const SpectralData& sd, const Window& window, FormulaReading reading)
{
    if (sd.model() != ModelTraits<Site>::model) throw InvalidArgument("build: spectral data model does not match");
    if (window.model != ModelTraits<Site>::model) throw InvalidArgument("build: window model does not match");
    window.validate();
    BuildResult<Site> out;
    out.field.window = window;
    for (const Site& s : window_sites<Site>(window)) {
        try {
            out.field.sites.emplace(s, coefficients(sd, s, reading));
        } catch (const SingularEvaluation& e) {
            out.failures.push_back({s, e.what()});
        }
    }
    return out;
}

template <typename Site>
std::string describe(Site s)
{
    std::string out = "(";
    const auto idx = site_indices(s);
    for (std::size_t i = 0; i < idx.size(); ++i) out += (i ? ", " : "") + std::to_string(idx[i]);
    return out + ")";
}

} // namespace

BuildResult<SiteCross> build_cross_field(const SpectralData& sd, const Window& window, FormulaReading reading)
{
    return build_field<SiteCross>(sd, window, reading);
}

BuildResult<SiteHex> build_hex_field(const SpectralData& sd, const Window& window, FormulaReading reading)
{
    return build_field<SiteHex>(sd, window, reading);
}

template <typename Site>
StencilField<Site> gauge_transform(const StencilField<Site>& field, const GaugeField<Site>& gauge)
{
    for (const auto& [s, g] : gauge.values) {
        if (std::abs(g) < kMinGauge) throw InvalidArgument("gauge value at " + describe(s) + " is (nearly) zero");
    }
    StencilField<Site> out;
    out.window = field.window;
    for (const auto& [site, stencil] : field.sites) {
        auto transformed = stencil;
        const auto nbs = stencil_offsets(site);
        for (std::size_t i = 0; i < nbs.size(); ++i) {
            const auto it = gauge.values.find(nbs[i].site);
            if (it == gauge.values.end()) {
                throw MissingGauge("gauge_transform: no gauge value at " + describe(nbs[i].site) + ", neighbour of "
                                   + describe(site));
            }
            transformed.coeffs[i] /= it->second;
        }
        out.sites.emplace(site, transformed);
    }
    return out;
}

template StencilField<SiteCross> gauge_transform(const StencilField<SiteCross>&, const GaugeField<SiteCross>&);
template StencilField<SiteHex> gauge_transform(const StencilField<SiteHex>&, const GaugeField<SiteHex>&);

template <typename Site>
ResidualReport<Site> residual_report(const SpectralData& sd, const StencilField<Site>& field,
                                     const std::vector<SurfacePoint>& probes, double tolerance,
                                     const GaugeField<Site>* gauge)
{
    if (sd.model() != ModelTraits<Site>::model) throw InvalidArgument("residual_report: model mismatch");
    ResidualReport<Site> rep;
    rep.tolerance = tolerance;
    std::map<Site, double> worst;
    std::map<Site, std::string> errors;
    for (const auto& [site, stencil] : field.sites) worst[site] = 0.0;

    for (const SurfacePoint& probe : probes) {
        const PreparedPoint p = sd.prepare(probe);
        for (const auto& [site, stencil] : field.sites) {
            if (errors.count(site)) continue;
            try {
                std::array<cplx, ModelTraits<Site>::Stencil::arity> terms{};
                const auto nbs = stencil_offsets(site);
                double denom = 0.0;
                cplx sum = 0.0;
                for (std::size_t i = 0; i < nbs.size(); ++i) {
                    cplx value = psi(sd, nbs[i].site, p);
                    if (gauge) {
                        const auto it = gauge->values.find(nbs[i].site);
                        if (it == gauge->values.end()) {
                            throw MissingGauge("residual_report: no gauge value at " + describe(nbs[i].site));
                        }
                        value *= it->second;
                    }
                    terms[i] = stencil.coeffs[i] * value;
                    sum += terms[i];
                    denom += std::abs(terms[i]);
                }
                const double r = denom > 0.0 ? std::abs(sum) / denom : 0.0;
                worst[site] = std::max(worst[site], r);
            } catch (const SingularEvaluation& e) {
                errors[site] = e.what();
            }
        }
    }

    for (const auto& [site, value] : worst) {
        if (errors.count(site)) {
            rep.errors.push_back({site, errors[site]});
            continue;
        }
        rep.per_site.push_back({site, value});
        rep.max_residual = std::max(rep.max_residual, value);
        if (!(value <= tolerance)) rep.failures.push_back({site, value});
    }
    return rep;
}

template ResidualReport<SiteCross> residual_report(const SpectralData&, const StencilField<SiteCross>&,
                                                   const std::vector<SurfacePoint>&, double,
                                                   const GaugeField<SiteCross>*);
template ResidualReport<SiteHex> residual_report(const SpectralData&, const StencilField<SiteHex>&,
                                                 const std::vector<SurfacePoint>&, double,
                                                 const GaugeField<SiteHex>*);

template <typename Site>
OracleResult<Site> nullspace_oracle(const SpectralData& sd, Site site, const std::vector<SurfacePoint>& probes)
{
    if (sd.model() != ModelTraits<Site>::model) throw InvalidArgument("nullspace_oracle: model mismatch");
    if (static_cast<int>(probes.size()) < kMinOracleProbes) {
        throw InvalidArgument("nullspace_oracle: need at least " + std::to_string(kMinOracleProbes) + " probes");
    }
    using Stencil = typename ModelTraits<Site>::Stencil;
    const auto nbs = stencil_offsets(site);
    CMatrix a(static_cast<Eigen::Index>(probes.size()), static_cast<Eigen::Index>(Stencil::arity));
    for (std::size_t r = 0; r < probes.size(); ++r) {
        const PreparedPoint p = sd.prepare(probes[r]);
        for (std::size_t c = 0; c < nbs.size(); ++c) {
            a(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = psi(sd, nbs[c].site, p);
        }
    }
    const NullVector nv = smallest_singular_vector(a);
    const auto& sv = nv.singular_values;
    if (sv[sv.size() - 2] < kRankTolerance * sv[0]) {
        throw RankDeficient("nullspace_oracle: kernel at " + describe(site)
                            + " is not one-dimensional (degenerate probes or non-generic data)");
    }
    OracleResult<Site> out;
    out.gap = nv.gap;
    out.singular_values = sv;
    const cplx unit = nv.vector[static_cast<Eigen::Index>(unit_index(site))];
    if (std::abs(unit) == 0.0) throw RankDeficient("nullspace_oracle: unit coefficient of the kernel vector vanishes");
    for (std::size_t i = 0; i < Stencil::arity; ++i) out.stencil.coeffs[i] = nv.vector[static_cast<Eigen::Index>(i)] / unit;
    out.stencil.coeffs[unit_index(site)] = 1.0;
    return out;
}

template OracleResult<SiteCross> nullspace_oracle(const SpectralData&, SiteCross, const std::vector<SurfacePoint>&);
template OracleResult<SiteHex> nullspace_oracle(const SpectralData&, SiteHex, const std::vector<SurfacePoint>&);

double stencil_mismatch(std::span<const cplx> x, std::span<const cplx> y)
{
    if (x.size() != y.size()) throw ArityMismatch("stencil_mismatch: sizes differ");
    double scale = 0.0;
    double diff = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        scale = std::max({scale, std::abs(x[i]), std::abs(y[i])});
        diff = std::max(diff, std::abs(x[i] - y[i]));
    }
    return scale > 0.0 ? diff / scale : 0.0;
}

double relative_component(std::span<const cplx> x, std::size_t i)
{
    double scale = 0.0;
    for (const cplx& c : x) scale = std::max(scale, std::abs(c));
    return scale > 0.0 ? std::abs(x[i]) / scale : 0.0;
}

} // namespace agdo

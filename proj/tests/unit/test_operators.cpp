#include <doctest.h>

#include "agdo/errata.hpp"
#include "agdo/errors.hpp"
#include "agdo/operators.hpp"
#include "support.hpp"

using namespace agdo;
using namespace agdo::testing;

namespace {

template <typename Site>
GaugeField<Site> random_gauge(const std::vector<Site>& sites, std::mt19937_64& rng)
{
    GaugeField<Site> gauge;
    for (const Site& s : sites) {
        gauge.values[s] = std::polar(uniform(rng, 0.5, 2.0), uniform(rng, -kPi, kPi));
        for (const auto& nb : stencil_offsets(s)) {
            if (!gauge.values.contains(nb.site)) {
                gauge.values[nb.site] = std::polar(uniform(rng, 0.5, 2.0), uniform(rng, -kPi, kPi));
            }
        }
    }
    return gauge;
}

} // namespace

TEST_CASE("apply_stencil")
{
    const std::array<cplx, 5> c{cplx(1, 2), cplx(-3, 0), cplx(0, 1), cplx(1, 0), cplx(2, -2)};
    std::array<cplx, 5> zero{};
    CHECK(apply_stencil(Model::cross, c, zero) == cplx(0.0));
    for (std::size_t i = 0; i < 5; ++i) {
        std::array<cplx, 5> hot{};
        hot[i] = 1.0;
        CHECK(apply_stencil(Model::cross, c, hot) == c[i]);
    }
    const std::array<cplx, 5> x{cplx(0.5, 1), cplx(2, 0), cplx(-1, 1), cplx(0, 3), cplx(1, 1)};
    const std::array<cplx, 5> y{cplx(1, -1), cplx(0, 2), cplx(1, 1), cplx(4, 0), cplx(-2, 1)};
    std::array<cplx, 5> sum;
    for (std::size_t i = 0; i < 5; ++i) sum[i] = x[i] + y[i];
    CHECK(std::abs(apply_stencil(Model::cross, c, sum) - apply_stencil(Model::cross, c, x)
                   - apply_stencil(Model::cross, c, y))
          < 1e-14);
    CHECK_THROWS_AS(apply_stencil(Model::hex, c, x), ArityMismatch);
    const std::array<cplx, 6> six{};
    CHECK_THROWS_AS(apply_stencil(Model::cross, c, six), ArityMismatch);
}

TEST_CASE("unit and zero indices")
{
    CHECK(unit_index(SiteCross{0, 0}) == 3);
    CHECK(unit_index(SiteCross{1, 0}) == 2);
    CHECK(unit_index(SiteHex{0, 0, 0}) == 1);
    CHECK(unit_index(SiteHex{1, 0, -1}) == 3);
    CHECK(unit_index(SiteHex{2, 0, -2}) == 4);
    CHECK(zero_indices(SiteHex{0, 0, 0}) == std::array<std::size_t, 2>{2, 5});
    CHECK(zero_indices(SiteHex{1, 0, -1}) == std::array<std::size_t, 2>{0, 5});
    CHECK(zero_indices(SiteHex{1, -1, 0}) == std::array<std::size_t, 2>{0, 2});
}

TEST_CASE("metrics")
{
    const std::array<cplx, 3> x{1.0, cplx(0, 2), 0.5};
    const std::array<cplx, 3> y{1.0, cplx(0, 2), 0.52};
    CHECK(stencil_mismatch(x, x) == 0.0);
    CHECK(std::abs(stencil_mismatch(x, y) - 0.01) < 1e-15);
    CHECK(relative_component(x, 2) == 0.25);
    const std::array<cplx, 2> two{};
    CHECK_THROWS_AS(stencil_mismatch(x, two), ArityMismatch);
}

TEST_CASE("cross field annihilates psi and matches the oracle")
{
    const SpectralData sd = random_spectral_data(Model::cross, 21);
    const auto probes = sample_probes(sd, 20, 21);
    const BuildResult<SiteCross> built = build_cross_field(sd, Window::radius(Model::cross, 2));
    REQUIRE(built.failures.empty());
    REQUIRE(built.field.sites.size() == 25);
    for (const auto& [site, st] : built.field.sites) CHECK(st.coeffs[unit_index(site)] == cplx(1.0));

    const auto rep = residual_report(sd, built.field, probes);
    CHECK(rep.passed());
    CHECK(rep.max_residual <= 1e-8);
    CHECK(rep.per_site.size() == 25);

    for (const SiteCross s : {SiteCross{0, 0}, SiteCross{1, 0}, SiteCross{-2, 1}}) {
        const auto oracle = nullspace_oracle(sd, s, probes);
        CHECK(oracle.gap <= 1e-6);
        CHECK(stencil_mismatch(oracle.stencil.coeffs, built.field.sites.at(s).coeffs) <= 1e-6);
    }
}

TEST_CASE("hex field annihilates psi, matches the oracle and has the zero pattern")
{
    const SpectralData sd = random_spectral_data(Model::hex, 22);
    const auto probes = sample_probes(sd, 20, 22);
    const BuildResult<SiteHex> built = build_hex_field(sd, Window::radius(Model::hex, 2));
    REQUIRE(built.failures.empty());
    REQUIRE(built.field.sites.size() == 19);
    for (const auto& [site, st] : built.field.sites) {
        CHECK(st.coeffs[unit_index(site)] == cplx(1.0));
        for (std::size_t z : zero_indices(site)) CHECK(st.coeffs[z] == cplx(0.0));
    }
    CHECK(residual_report(sd, built.field, probes).max_residual <= 1e-8);

    for (const SiteHex s : {SiteHex{0, 0, 0}, SiteHex{1, 0, -1}, SiteHex{2, 0, -2}}) {
        const auto oracle = nullspace_oracle(sd, s, probes);
        CHECK(oracle.gap <= 1e-6);
        CHECK(stencil_mismatch(oracle.stencil.coeffs, built.field.sites.at(s).coeffs) <= 1e-6);
        for (std::size_t z : zero_indices(s)) CHECK(relative_component(oracle.stencil.coeffs, z) <= 1e-8);
    }
}

TEST_CASE("constant normalization collapses the r ratios")
{
    const SpectralData sd = random_spectral_data(Model::cross, 23, RandomDataOptions{false, 0.1});
    CHECK(sd.normalization().is_constant());
    const auto probes = sample_probes(sd, 12, 23);
    const CrossStencil st = cross_coefficients(sd, SiteCross{0, 1});
    CHECK(stencil_mismatch(nullspace_oracle(sd, SiteCross{0, 1}, probes).stencil.coeffs, st.coeffs) <= 1e-6);
}

TEST_CASE("residual report detects a perturbed coefficient")
{
    const SpectralData sd = random_spectral_data(Model::cross, 24);
    const auto probes = sample_probes(sd, 20, 24);
    BuildResult<SiteCross> built = build_cross_field(sd, Window::radius(Model::cross, 1));
    const SiteCross target{1, -1};
    built.field.sites.at(target).coeffs[0] *= 1.0 + 1e-3;
    const auto rep = residual_report(sd, built.field, probes);
    CHECK_FALSE(rep.passed());
    REQUIRE(rep.failures.size() == 1);
    CHECK(rep.failures[0].site == target);
    CHECK(rep.failures[0].max_residual >= 1e-4);

    CrossField empty;
    empty.window = Window::radius(Model::cross, 0);
    const auto none = residual_report(sd, empty, probes);
    CHECK(none.per_site.empty());
    CHECK(none.max_residual == 0.0);
}

TEST_CASE("residual is invariant under per-site rescaling")
{
    const SpectralData sd = random_spectral_data(Model::hex, 25);
    const auto probes = sample_probes(sd, 10, 25);
    const HexField field = build_hex_field(sd, Window::radius(Model::hex, 1)).field;
    HexField scaled = field;
    std::mt19937_64 rng(25);
    for (auto& [site, st] : scaled.sites) {
        const cplx lambda = std::polar(uniform(rng, 0.1, 10.0), uniform(rng, -kPi, kPi));
        for (cplx& c : st.coeffs) c *= lambda;
    }
    const auto a = residual_report(sd, field, probes);
    const auto b = residual_report(sd, scaled, probes);
    for (std::size_t i = 0; i < a.per_site.size(); ++i) {
        CHECK(std::abs(a.per_site[i].max_residual - b.per_site[i].max_residual) <= 1e-10);
    }
}

TEST_CASE("nullspace oracle preconditions")
{
    const SpectralData sd = random_spectral_data(Model::cross, 26);
    const auto probes = sample_probes(sd, 10, 26);
    CHECK_THROWS_AS(nullspace_oracle(sd, SiteCross{0, 0}, std::vector<SurfacePoint>(10, probes[0])), RankDeficient);
    CHECK_THROWS_AS(nullspace_oracle(sd, SiteCross{0, 0}, std::vector<SurfacePoint>(probes.begin(), probes.begin() + 7)),
                    InvalidArgument);
    CHECK_THROWS_AS(nullspace_oracle(sd, SiteHex{0, 0, 0}, probes), InvalidArgument);
}

TEST_CASE("gauge transformations")
{
    const SpectralData sd = random_spectral_data(Model::cross, 27);
    const auto probes = sample_probes(sd, 10, 27);
    const CrossField field = build_cross_field(sd, Window::radius(Model::cross, 1)).field;
    const auto sites = field.window.cross_sites();
    std::mt19937_64 rng(27);
    GaugeField<SiteCross> gauge = random_gauge(sites, rng);

    SUBCASE("identity and constant gauges")
    {
        GaugeField<SiteCross> one = gauge, lambda = gauge;
        for (auto& [s, g] : one.values) g = 1.0;
        for (auto& [s, g] : lambda.values) g = cplx(2.0, 1.0);
        const CrossField same = gauge_transform(field, one);
        const CrossField div = gauge_transform(field, lambda);
        for (const auto& [s, st] : field.sites) {
            CHECK(same.sites.at(s).coeffs == st.coeffs);
            for (std::size_t i = 0; i < 5; ++i) {
                CHECK(std::abs(div.sites.at(s).coeffs[i] - st.coeffs[i] / cplx(2.0, 1.0)) <= 1e-15 * std::abs(st.coeffs[i]));
            }
        }
    }
    SUBCASE("transformed field annihilates the gauge-scaled psi")
    {
        const CrossField transformed = gauge_transform(field, gauge);
        CHECK(residual_report(sd, transformed, probes, 1e-8, &gauge).max_residual <= 1e-8);
        // Without the matching psi scaling the residual is O(1).
        CHECK(residual_report(sd, transformed, probes).max_residual > 1e-3);
    }
    SUBCASE("halo is required")
    {
        GaugeField<SiteCross> partial = gauge;
        partial.values.erase(SiteCross{2, 0});
        CHECK_THROWS_AS(gauge_transform(field, partial), MissingGauge);
        GaugeField<SiteCross> tiny = gauge;
        tiny.values.at(SiteCross{0, 0}) = 1e-13;
        CHECK_THROWS_AS(gauge_transform(field, tiny), InvalidArgument);
    }
}

TEST_CASE("hex gauge transformation")
{
    const SpectralData sd = random_spectral_data(Model::hex, 28);
    const auto probes = sample_probes(sd, 10, 28);
    const HexField field = build_hex_field(sd, Window::radius(Model::hex, 1)).field;
    std::mt19937_64 rng(28);
    const GaugeField<SiteHex> gauge = random_gauge(field.window.hex_sites(), rng);
    CHECK(residual_report(sd, gauge_transform(field, gauge), probes, 1e-8, &gauge).max_residual <= 1e-8);
}

TEST_CASE("formula readings")
{
    CHECK(formula_reading_from_string("printed") == FormulaReading::printed);
    CHECK(to_string(FormulaReading::corrected) == "corrected");
    CHECK_THROWS_AS(formula_reading_from_string("fixed"), InvalidArgument);

    const SpectralData sd = random_spectral_data(Model::hex, 29);
    const SiteHex s{0, 0, 0};
    const HexStencil printed = hex_coefficients(sd, s, FormulaReading::printed);
    const HexStencil corrected = hex_coefficients(sd, s, FormulaReading::corrected);
    for (std::size_t i = 0; i < 6; ++i) {
        if (i == 4) {
            CHECK(printed.coeffs[i] != corrected.coeffs[i]);
        } else {
            CHECK(printed.coeffs[i] == corrected.coeffs[i]);
        }
    }
    const SpectralData sc = random_spectral_data(Model::cross, 29);
    for (const SiteCross c : {SiteCross{0, 0}, SiteCross{0, 1}}) {
        CHECK(cross_coefficients(sc, c, FormulaReading::printed).coeffs
              == cross_coefficients(sc, c, FormulaReading::corrected).coeffs);
    }
    CHECK_THROWS_AS(cross_coefficients(sd, SiteCross{0, 0}), InvalidArgument);
}

TEST_CASE("build rejects mismatched inputs")
{
    const SpectralData sd = random_spectral_data(Model::cross, 30);
    CHECK_THROWS_AS(build_cross_field(sd, Window::radius(Model::hex, 1)), InvalidArgument);
    CHECK_THROWS_AS(build_hex_field(sd, Window::radius(Model::hex, 1)), InvalidArgument);
}

TEST_CASE("errata registry")
{
    CHECK(formula_catalog().size() == 23);
    REQUIRE(errata().size() == 1);
    CHECK(errata()[0].formula == "hex.0.f/b");
    CHECK(find_erratum("hex.0.f/b") != nullptr);
    CHECK(find_erratum("cross.even.a/d") == nullptr);
    for (const auto& e : errata()) {
        bool listed = false;
        for (const auto& f : formula_catalog()) listed = listed || f.id == e.formula;
        CHECK(listed);
    }
    CHECK_FALSE(reading_notes().empty());
}

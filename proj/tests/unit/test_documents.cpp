#include <doctest.h>

#include <cstdlib>
#include <sstream>

#include "agdo/documents.hpp"
#include "agdo/errors.hpp"
#include "support.hpp"

using namespace agdo;
using namespace agdo::testing;

namespace {

std::vector<std::vector<std::string>> parse_csv(const std::string& text)
{
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

} // namespace

TEST_CASE("curve data round trip is exact")
{
    const SpectralData sd = random_spectral_data(Model::hex, 31);
    const CurveData data = tabulate_spectral_curve(sd);
    const CurveData back = curve_data_from_json(curve_data_to_json(data));
    CHECK(back.b == data.b);
    CHECK(back.base_lift == data.base_lift);
    CHECK(back.riemann_constants == data.riemann_constants);
    REQUIRE(back.marked_points.size() == 7);
    CHECK(back.marked_points[6].first == "D1");
    for (std::size_t i = 0; i < data.marked_points.size(); ++i) {
        CHECK(back.marked_points[i].first == data.marked_points[i].first);
        CHECK(back.marked_points[i].second == data.marked_points[i].second);
    }
    CHECK(back.b_periods == data.b_periods);
    CHECK(back.third_kind_integrals == data.third_kind_integrals);
    CHECK(back.third_kind_integrals.size() == required_marked_integrals(Model::hex).size());
    CHECK(curve_data_to_json(back) == curve_data_to_json(data));
}

TEST_CASE("spectral document round trip")
{
    const SpectralData sd = random_spectral_data(Model::cross, 32);
    SpectralDocument doc = describe_spectral_data(sd, 32);
    doc.window = Window::radius(Model::cross, 2);
    const std::string text = spectral_document_to_json(doc);
    const SpectralDocument back = spectral_document_from_json(text);
    CHECK(spectral_document_to_json(back) == text);
    CHECK(back.seed == 32);
    REQUIRE(back.window.has_value());
    CHECK(back.window->ranges == doc.window->ranges);

    const SpectralData rebuilt = make_spectral_data(back);
    const SurfacePoint p = sample_probes(sd, 1, 32)[0];
    for (const SiteCross s : Window::radius(Model::cross, 1).cross_sites()) CHECK(psi(rebuilt, s, p) == psi(sd, s, p));
}

TEST_CASE("tabulated spectral data reproduces the coefficients")
{
    const SpectralData sd = random_spectral_data(Model::hex, 33);
    const auto dir = std::filesystem::temp_directory_path() / "agdo_doc_test";
    std::filesystem::create_directories(dir);
    write_text_file(dir / "curve.json", curve_data_to_json(tabulate_spectral_curve(sd)));
    SpectralDocument doc = describe_spectral_data(sd, 33);
    doc.backend = "tabulated";
    doc.curve_data_ref = "curve.json";
    const SpectralData tab = make_spectral_data(spectral_document_from_json(spectral_document_to_json(doc)), dir);
    CHECK(tab.curve().backend() == CurveBackend::tabulated);
    for (const SiteHex s : Window::radius(Model::hex, 2).hex_sites()) {
        const HexStencil a = hex_coefficients(sd, s);
        const HexStencil b = hex_coefficients(tab, s);
        CHECK(stencil_mismatch(a.coeffs, b.coeffs) <= 1e-10);
    }
    std::filesystem::remove_all(dir);
}

TEST_CASE("spectral document schema errors")
{
    CHECK_THROWS_AS(spectral_document_from_json("{}"), SchemaError);
    CHECK_THROWS_AS(spectral_document_from_json("[1, 2"), SchemaError);
    const SpectralData sd = random_spectral_data(Model::cross, 34);
    std::string text = spectral_document_to_json(describe_spectral_data(sd, 34));
    const auto pos = text.find("agdo-spectral-data");
    REQUIRE(pos != std::string::npos);
    std::string wrong = text;
    wrong.replace(pos, 18, "something-else-xyz");
    CHECK_THROWS_AS(spectral_document_from_json(wrong), SchemaError);
}

TEST_CASE("field document and CSV")
{
    const SpectralData sd = random_spectral_data(Model::hex, 35);
    const HexField field = build_hex_field(sd, Window::radius(Model::hex, 2)).field;
    FieldDocument doc = make_field_document(field);
    doc.normalization = sd.normalization().description();
    doc.seed = 35;
    const std::string text = field_document_to_json(doc);
    const FieldDocument back = field_document_from_json(text);
    CHECK(field_document_to_json(back) == text);
    const HexField again = hex_field_from_document(back);
    CHECK(again.sites.size() == field.sites.size());
    for (const auto& [s, st] : field.sites) CHECK(again.sites.at(s).coeffs == st.coeffs);
    CHECK_THROWS_AS(cross_field_from_document(back), SchemaError);

    const auto rows = parse_csv(field_to_csv(back));
    REQUIRE(rows.size() == back.sites.size() + 1);
    CHECK(rows[0].size() == 3 + 12);
    CHECK(rows[0][3] == "a_re");
    CHECK(rows[0][14] == "g_im");
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const SiteHex s{std::stoi(rows[r][0]), std::stoi(rows[r][1]), std::stoi(rows[r][2])};
        const HexStencil& st = field.sites.at(s);
        for (std::size_t i = 0; i < 6; ++i) {
            CHECK(std::strtod(rows[r][3 + 2 * i].c_str(), nullptr) == st.coeffs[i].real());
            CHECK(std::strtod(rows[r][4 + 2 * i].c_str(), nullptr) == st.coeffs[i].imag());
        }
        if (residue_class(s) == 0) {
            CHECK(rows[r][7] == "0");
            CHECK(rows[r][8] == "0");
            CHECK(rows[r][13] == "0");
            CHECK(rows[r][14] == "0");
        }
        if (r > 1) {
            const std::vector<int> prev{std::stoi(rows[r - 1][0]), std::stoi(rows[r - 1][1]), std::stoi(rows[r - 1][2])};
            CHECK(prev < site_indices(s));
        }
    }

    FieldDocument empty;
    empty.model = Model::cross;
    empty.window = Window::radius(Model::cross, 1);
    CHECK(field_to_csv(empty) == "n,m,a_re,a_im,b_re,b_im,c_re,c_im,d_re,d_im,v_re,v_im\n");
}

TEST_CASE("field document rejects sites outside the window")
{
    const SpectralData sd = random_spectral_data(Model::cross, 36);
    FieldDocument doc = make_field_document(build_cross_field(sd, Window::radius(Model::cross, 1)).field);
    doc.window = Window::radius(Model::cross, 0);
    CHECK_THROWS_AS(cross_field_from_document(doc), SchemaError);
}

TEST_CASE("file helpers")
{
    const auto path = std::filesystem::temp_directory_path() / "agdo_file_helper.txt";
    write_text_file(path, "hello\n");
    CHECK(read_text_file(path) == "hello\n");
    std::filesystem::remove(path);
    CHECK_THROWS_AS(read_text_file(path), IoError);
}

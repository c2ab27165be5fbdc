#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "agdo/bafunc.hpp"
#include "agdo/operators.hpp"

namespace agdo {

// JSON documents exchanged by the command-line tool. Complex numbers are
// [re, im] pairs; lifts and vectors of length one are written as a single
// pair, longer ones as a list of pairs. Parsers throw SchemaError.

std::string read_text_file(const std::filesystem::path& path);
/// Writes through a temporary file and renames it into place.
void write_text_file(const std::filesystem::path& path, const std::string& text);

std::string curve_data_to_json(const CurveData& data);
CurveData curve_data_from_json(const std::string& text);

/// Table of a torus curve with every point, pair and integral the
/// coefficient formulas of `sd` consume. Divisor points are stored as D1..Dg.
CurveData tabulate_spectral_curve(const SpectralData& sd);

struct SpectralDocument {
    Model model = Model::cross;
    std::uint64_t seed = 0;
    std::string backend = "torus";  // torus | tabulated
    CMatrix b;                      // torus backend
    CVector base_lift;              // torus backend
    std::string curve_data_ref;     // tabulated backend; optional companion for torus
    std::vector<CVector> marked;    // six lifts in marked_names(model) order
    std::vector<CVector> divisor;
    Normalization normalization = Normalization::constant();
    std::optional<Window> window;
};

std::string spectral_document_to_json(const SpectralDocument& doc);
SpectralDocument spectral_document_from_json(const std::string& text);

SpectralDocument describe_spectral_data(const SpectralData& sd, std::uint64_t seed);

/// Builds the curve backend and the spectral data. A tabulated curve is loaded
/// from curve_data_ref, resolved against `base_dir` when relative.
SpectralData make_spectral_data(const SpectralDocument& doc, const std::filesystem::path& base_dir = {});

struct FieldSite {
    std::vector<int> site;
    std::vector<cplx> coeffs;
};

struct FieldDocument {
    Model model = Model::cross;
    Window window;
    std::vector<FieldSite> sites;  // lexicographic site order
    std::string normalization;
    std::string formula_reading = "corrected";
    std::string spectral_data_ref;
    std::uint64_t seed = 0;
    std::vector<std::string> failures;
};

std::string field_document_to_json(const FieldDocument& doc);
FieldDocument field_document_from_json(const std::string& text);

template <typename Site>
FieldDocument make_field_document(const StencilField<Site>& field);

CrossField cross_field_from_document(const FieldDocument& doc);
HexField hex_field_from_document(const FieldDocument& doc);

/// One row per site: indices, then Re and Im of every coefficient in stencil
/// order, with a header row. Numbers use 17 significant digits.
std::string field_to_csv(const FieldDocument& doc);

} // namespace agdo

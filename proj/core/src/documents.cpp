#include "agdo/documents.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <type_traits>

#include <json.hpp>

#include "agdo/errors.hpp"

namespace agdo {

using Json = nlohmann::ordered_json;

namespace {

constexpr const char* kSpectralFormat = "agdo-spectral-data";
constexpr const char* kFieldFormat = "agdo-coefficient-field";
constexpr int kVersion = 1;

Json complex_json(cplx z)
{
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) throw InvalidArgument("cannot serialize a non-finite number");
    return Json::array({z.real(), z.imag()});
}

Json vector_json(const CVector& v)
{
    if (v.size() == 1) return complex_json(v[0]);
    Json out = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(complex_json(v[i]));
    return out;
}

Json matrix_json(const CMatrix& m)
{
    Json out = Json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        Json row = Json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(complex_json(m(r, c)));
        out.push_back(row);
    }
    return out;
}

[[noreturn]] void schema(const std::string& what)
{
    throw SchemaError(what);
}

const Json& field(const Json& obj, const char* key, const std::string& where)
{
    if (!obj.is_object()) schema(where + ": expected an object");
    const auto it = obj.find(key);
    if (it == obj.end()) schema(where + ": missing field '" + key + "'");
    return *it;
}

bool is_pair(const Json& j)
{
    return j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number();
}

cplx parse_complex(const Json& j, const std::string& where)
{
    if (!is_pair(j)) schema(where + ": expected a [re, im] pair");
    return {j[0].get<double>(), j[1].get<double>()};
}

CVector parse_vector(const Json& j, const std::string& where)
{
    if (is_pair(j)) return CVector::Constant(1, parse_complex(j, where));
    if (!j.is_array() || j.empty()) schema(where + ": expected a [re, im] pair or a list of pairs");
    CVector out(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) out[static_cast<Eigen::Index>(i)] = parse_complex(j[i], where);
    return out;
}

CMatrix parse_matrix(const Json& j, const std::string& where)
{
    if (!j.is_array() || j.empty()) schema(where + ": expected a non-empty list of rows");
    const std::size_t n = j.size();
    CMatrix out(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t r = 0; r < n; ++r) {
        if (!j[r].is_array() || j[r].size() != n) schema(where + ": matrix must be square");
        for (std::size_t c = 0; c < n; ++c) {
            out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = parse_complex(j[r][c], where);
        }
    }
    return out;
}

Json parse_text(const std::string& text, const std::string& where)
{
    try {
        return Json::parse(text);
    } catch (const Json::exception& e) {
        schema(where + ": not valid JSON (" + e.what() + ")");
    }
}

Json window_json(const Window& w)
{
    Json ranges = Json::array();
    for (const auto& r : w.ranges) ranges.push_back(Json::array({r[0], r[1]}));
    return Json{{"model", to_string(w.model)}, {"ranges", ranges}};
}

Window parse_window(const Json& j, Model model, const std::string& where)
{
    Window w;
    w.model = model;
    if (j.contains("model") && j["model"].get<std::string>() != to_string(model)) {
        schema(where + ": window model differs from document model");
    }
    for (const Json& r : field(j, "ranges", where)) {
        if (!r.is_array() || r.size() != 2 || !r[0].is_number_integer() || !r[1].is_number_integer()) {
            schema(where + ": window range must be [lo, hi]");
        }
        w.ranges.push_back({r[0].get<int>(), r[1].get<int>()});
    }
    try {
        w.validate();
    } catch (const InvalidArgument& e) {
        schema(where + ": " + e.what());
    }
    return w;
}

Json normalization_json(const Normalization& r)
{
    if (r.is_constant()) return Json{{"kind", "constant"}, {"value", complex_json(r.scale())}};
    Json weights = Json::array();
    for (const cplx& w : r.weights()) weights.push_back(complex_json(w));
    return Json{{"kind", "exponential"}, {"scale", complex_json(r.scale())}, {"weights", weights}};
}

Normalization parse_normalization(const Json& j, const std::string& where)
{
    const std::string kind = field(j, "kind", where).get<std::string>();
    try {
        if (kind == "constant") return Normalization::constant(parse_complex(field(j, "value", where), where));
        if (kind == "exponential") {
            std::vector<cplx> weights;
            for (const Json& w : field(j, "weights", where)) weights.push_back(parse_complex(w, where));
            return Normalization::exponential(std::move(weights), parse_complex(field(j, "scale", where), where));
        }
    } catch (const InvalidArgument& e) {
        schema(where + ": " + e.what());
    }
    schema(where + ": unknown normalization kind '" + kind + "'");
}

template <typename Fn>
auto schema_guard(const std::string& where, Fn&& fn)
{
    try {
        return fn();
    } catch (const Json::exception& e) {
        schema(where + ": " + e.what());
    }
}

} // namespace

std::string read_text_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw IoError("error while reading '" + path.string() + "'");
    return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text)
{
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open '" + tmp.string() + "' for writing");
        out << text;
        out.flush();
        if (!out) throw IoError("error while writing '" + tmp.string() + "'");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw IoError("cannot move output into place at '" + path.string() + "'");
    }
}

// ---------------------------------------------------------------- curve data

std::string curve_data_to_json(const CurveData& data)
{
    Json marked = Json::object();
    for (const auto& [name, lift] : data.marked_points) marked[name] = vector_json(lift);
    Json periods = Json::object();
    for (const auto& [key, u] : data.b_periods) periods[key] = vector_json(u);
    Json integrals = Json::object();
    for (const auto& [key, value] : data.third_kind_integrals) integrals[key] = complex_json(value);
    const Json doc{{"genus", data.b.rows()},
                   {"B", matrix_json(data.b)},
                   {"base_lift", vector_json(data.base_lift)},
                   {"marked_points", marked},
                   {"riemann_constants", vector_json(data.riemann_constants)},
                   {"b_periods", periods},
                   {"third_kind_integrals", integrals}};
    return doc.dump(2) + "\n";
}

CurveData curve_data_from_json(const std::string& text)
{
    const std::string where = "curve data";
    const Json doc = parse_text(text, where);
    return schema_guard(where, [&] {
        CurveData data;
        const int genus = field(doc, "genus", where).get<int>();
        data.b = parse_matrix(field(doc, "B", where), where + " B");
        if (genus != data.b.rows()) schema(where + ": genus does not match the size of B");
        data.base_lift = parse_vector(field(doc, "base_lift", where), where + " base_lift");
        for (const auto& [name, lift] : field(doc, "marked_points", where).items()) {
            data.marked_points.emplace_back(name, parse_vector(lift, where + " marked point " + name));
        }
        data.riemann_constants = parse_vector(field(doc, "riemann_constants", where), where + " riemann_constants");
        for (const auto& [key, u] : field(doc, "b_periods", where).items()) {
            data.b_periods[key] = parse_vector(u, where + " b-period " + key);
        }
        for (const auto& [key, value] : field(doc, "third_kind_integrals", where).items()) {
            data.third_kind_integrals[key] = parse_complex(value, where + " integral " + key);
        }
        if (data.base_lift.size() != genus) schema(where + ": base_lift has wrong length");
        return data;
    });
}

CurveData tabulate_spectral_curve(const SpectralData& sd)
{
    const auto& names = SpectralData::marked_names(sd.model());
    std::vector<std::pair<std::string, SurfacePoint>> points;
    for (int i = 0; i < 6; ++i) points.emplace_back(names[static_cast<std::size_t>(i)], sd.marked(i));
    for (std::size_t i = 0; i < sd.divisor().size(); ++i) points.emplace_back("D" + std::to_string(i + 1), sd.divisor()[i]);

    std::vector<std::pair<std::string, std::string>> pairs;
    for (int i = 0; i < sd.exponent_count(); ++i) {
        const auto [plus, minus] = sd.exponent_pair(i);
        pairs.emplace_back(names[static_cast<std::size_t>(plus)], names[static_cast<std::size_t>(minus)]);
    }
    std::vector<IntegralQuery> integrals;
    for (const auto& key : required_marked_integrals(sd.model())) {
        integrals.push_back({names[static_cast<std::size_t>(key[0])], names[static_cast<std::size_t>(key[1])],
                             names[static_cast<std::size_t>(key[2])]});
    }
    return tabulate_curve(sd.curve(), points, pairs, integrals);
}

// ---------------------------------------------------------------- spectral data

std::string spectral_document_to_json(const SpectralDocument& doc)
{
    Json curve;
    if (doc.backend == "torus") {
        curve = Json{{"backend", "torus"}, {"B", matrix_json(doc.b)}, {"base_lift", vector_json(doc.base_lift)}};
    } else if (doc.backend == "tabulated") {
        curve = Json{{"backend", "tabulated"}};
    } else {
        throw InvalidArgument("unknown curve backend '" + doc.backend + "'");
    }
    const auto& names = SpectralData::marked_names(doc.model);
    if (doc.marked.size() != names.size()) throw InvalidArgument("spectral document needs six marked points");
    Json marked = Json::object();
    for (std::size_t i = 0; i < names.size(); ++i) marked[names[i]] = vector_json(doc.marked[i]);
    Json divisor = Json::array();
    for (const CVector& d : doc.divisor) divisor.push_back(vector_json(d));

    Json out{{"format", kSpectralFormat}, {"version", kVersion}, {"model", to_string(doc.model)},
             {"seed", doc.seed},          {"curve", curve}};
    if (!doc.curve_data_ref.empty()) out["curve_data_ref"] = doc.curve_data_ref;
    out["marked_points"] = marked;
    out["divisor"] = divisor;
    out["normalization"] = normalization_json(doc.normalization);
    if (doc.window) out["window"] = window_json(*doc.window);
    return out.dump(2) + "\n";
}

SpectralDocument spectral_document_from_json(const std::string& text)
{
    const std::string where = "spectral data";
    const Json j = parse_text(text, where);
    return schema_guard(where, [&] {
        if (field(j, "format", where).get<std::string>() != kSpectralFormat) schema(where + ": wrong format tag");
        if (field(j, "version", where).get<int>() != kVersion) schema(where + ": unsupported version");
        SpectralDocument doc;
        try {
            doc.model = model_from_string(field(j, "model", where).get<std::string>());
        } catch (const InvalidArgument& e) {
            schema(where + ": " + e.what());
        }
        doc.seed = field(j, "seed", where).get<std::uint64_t>();
        const Json& curve = field(j, "curve", where);
        doc.backend = field(curve, "backend", where).get<std::string>();
        if (j.contains("curve_data_ref")) doc.curve_data_ref = j["curve_data_ref"].get<std::string>();
        if (doc.backend == "torus") {
            doc.b = parse_matrix(field(curve, "B", where), where + " B");
            doc.base_lift = parse_vector(field(curve, "base_lift", where), where + " base_lift");
        } else if (doc.backend == "tabulated") {
            if (doc.curve_data_ref.empty()) schema(where + ": tabulated backend needs curve_data_ref");
        } else {
            schema(where + ": unknown curve backend '" + doc.backend + "'");
        }
        const Json& marked = field(j, "marked_points", where);
        for (const std::string& name : SpectralData::marked_names(doc.model)) {
            doc.marked.push_back(parse_vector(field(marked, name.c_str(), where), where + " marked point " + name));
        }
        if (marked.size() != 6) schema(where + ": unexpected marked point names");
        for (const Json& d : field(j, "divisor", where)) doc.divisor.push_back(parse_vector(d, where + " divisor"));
        doc.normalization = parse_normalization(field(j, "normalization", where), where + " normalization");
        if (j.contains("window")) doc.window = parse_window(j["window"], doc.model, where);
        return doc;
    });
}

SpectralDocument describe_spectral_data(const SpectralData& sd, std::uint64_t seed)
{
    SpectralDocument doc;
    doc.model = sd.model();
    doc.seed = seed;
    if (sd.curve().backend() == CurveBackend::torus) {
        doc.backend = "torus";
        doc.b = sd.curve().period_matrix().matrix();
        doc.base_lift = sd.curve().base_point().lift;
    } else {
        doc.backend = "tabulated";
    }
    for (const SurfacePoint& p : sd.marked()) doc.marked.push_back(p.lift);
    for (const SurfacePoint& p : sd.divisor()) doc.divisor.push_back(p.lift);
    doc.normalization = sd.normalization();
    return doc;
}

SpectralData make_spectral_data(const SpectralDocument& doc, const std::filesystem::path& base_dir)
{
    CurvePtr curve;
    if (doc.backend == "torus") {
        if (doc.b.rows() != 1 || doc.base_lift.size() != 1) {
            throw SchemaError("spectral data: the torus backend is genus one; use a tabulated curve for higher genus");
        }
        try {
            curve = make_torus_curve(PeriodMatrix(doc.b), doc.base_lift[0]);
        } catch (const InvalidArgument& e) {
            throw SchemaError(std::string("spectral data: ") + e.what());
        }
    } else {
        std::filesystem::path ref = doc.curve_data_ref;
        if (ref.is_relative() && !base_dir.empty()) ref = base_dir / ref;
        curve = load_tabulated_curve(curve_data_from_json(read_text_file(ref)));
    }
    std::array<SurfacePoint, 6> marked;
    for (std::size_t i = 0; i < 6; ++i) marked[i] = SurfacePoint(doc.marked.at(i));
    std::vector<SurfacePoint> divisor;
    for (const CVector& d : doc.divisor) divisor.emplace_back(d);
    return doc.model == Model::cross ? SpectralData::cross(curve, marked, divisor, doc.normalization)
                                     : SpectralData::hex(curve, marked, divisor, doc.normalization);
}

// ---------------------------------------------------------------- coefficient fields

std::string field_document_to_json(const FieldDocument& doc)
{
    const auto names = doc.model == Model::cross ? std::vector<const char*>(CrossStencil::names.begin(), CrossStencil::names.end())
                                                 : std::vector<const char*>(HexStencil::names.begin(), HexStencil::names.end());
    Json sites = Json::array();
    for (const FieldSite& s : doc.sites) {
        if (s.coeffs.size() != names.size()) throw ArityMismatch("field document: wrong number of coefficients");
        Json coeffs = Json::object();
        for (std::size_t i = 0; i < names.size(); ++i) coeffs[names[i]] = complex_json(s.coeffs[i]);
        sites.push_back(Json{{"site", s.site}, {"coeffs", coeffs}});
    }
    const Json out{{"format", kFieldFormat},
                   {"version", kVersion},
                   {"model", to_string(doc.model)},
                   {"window", window_json(doc.window)},
                   {"sites", sites},
                   {"normalization", doc.normalization},
                   {"formula_reading", doc.formula_reading},
                   {"spectral_data_ref", doc.spectral_data_ref},
                   {"seed", doc.seed},
                   {"failures", doc.failures}};
    return out.dump(2) + "\n";
}

FieldDocument field_document_from_json(const std::string& text)
{
    const std::string where = "coefficient field";
    const Json j = parse_text(text, where);
    return schema_guard(where, [&] {
        if (field(j, "format", where).get<std::string>() != kFieldFormat) schema(where + ": wrong format tag");
        if (field(j, "version", where).get<int>() != kVersion) schema(where + ": unsupported version");
        FieldDocument doc;
        try {
            doc.model = model_from_string(field(j, "model", where).get<std::string>());
        } catch (const InvalidArgument& e) {
            schema(where + ": " + e.what());
        }
        doc.window = parse_window(field(j, "window", where), doc.model, where);
        const std::size_t arity = doc.model == Model::cross ? CrossStencil::arity : HexStencil::arity;
        const std::size_t dims = doc.model == Model::cross ? 2 : 3;
        for (const Json& s : field(j, "sites", where)) {
            FieldSite fs;
            fs.site = field(s, "site", where).get<std::vector<int>>();
            if (fs.site.size() != dims) schema(where + ": site has wrong number of indices");
            const Json& coeffs = field(s, "coeffs", where);
            if (coeffs.size() != arity) schema(where + ": site has wrong number of coefficients");
            for (std::size_t i = 0; i < arity; ++i) {
                const char* name = doc.model == Model::cross ? CrossStencil::names[i] : HexStencil::names[i];
                fs.coeffs.push_back(parse_complex(field(coeffs, name, where), where + " coefficient " + name));
            }
            doc.sites.push_back(std::move(fs));
        }
        doc.normalization = field(j, "normalization", where).get<std::string>();
        doc.formula_reading = field(j, "formula_reading", where).get<std::string>();
        doc.spectral_data_ref = field(j, "spectral_data_ref", where).get<std::string>();
        doc.seed = field(j, "seed", where).get<std::uint64_t>();
        doc.failures = field(j, "failures", where).get<std::vector<std::string>>();
        return doc;
    });
}

template <typename Site>
FieldDocument make_field_document(const StencilField<Site>& field)
{
    FieldDocument doc;
    doc.model = field.model();
    doc.window = field.window;
    for (const auto& [site, stencil] : field.sites) {
        doc.sites.push_back({site_indices(site), std::vector<cplx>(stencil.coeffs.begin(), stencil.coeffs.end())});
    }
    return doc;
}

template FieldDocument make_field_document(const StencilField<SiteCross>&);
template FieldDocument make_field_document(const StencilField<SiteHex>&);

namespace {

template <typename Site>
StencilField<Site> field_from_document(const FieldDocument& doc)
{
    if (doc.model != ModelTraits<Site>::model) throw SchemaError("coefficient field: model mismatch");
    StencilField<Site> out;
    out.window = doc.window;
    for (const FieldSite& fs : doc.sites) {
        Site site;
        if constexpr (std::is_same_v<Site, SiteCross>) {
            site = {fs.site.at(0), fs.site.at(1)};
        } else {
            site = {fs.site.at(0), fs.site.at(1), fs.site.at(2)};
            if (!site.valid()) throw SchemaError("coefficient field: hex site with k + l + m != 0");
        }
        if (!doc.window.contains(site)) throw SchemaError("coefficient field: site outside the window");
        typename ModelTraits<Site>::Stencil stencil;
        if (fs.coeffs.size() != stencil.coeffs.size()) throw SchemaError("coefficient field: wrong arity");
        std::copy(fs.coeffs.begin(), fs.coeffs.end(), stencil.coeffs.begin());
        if (!out.sites.emplace(site, stencil).second) throw SchemaError("coefficient field: duplicate site");
    }
    return out;
}

void append_number(std::string& out, double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    out += buf;
}

} // namespace

CrossField cross_field_from_document(const FieldDocument& doc)
{
    return field_from_document<SiteCross>(doc);
}

HexField hex_field_from_document(const FieldDocument& doc)
{
    return field_from_document<SiteHex>(doc);
}

std::string field_to_csv(const FieldDocument& doc)
{
    std::string out = doc.model == Model::cross ? "n,m" : "k,l,m";
    const std::size_t arity = doc.model == Model::cross ? CrossStencil::arity : HexStencil::arity;
    for (std::size_t i = 0; i < arity; ++i) {
        const std::string name = doc.model == Model::cross ? CrossStencil::names[i] : HexStencil::names[i];
        out += "," + name + "_re," + name + "_im";
    }
    out += "\n";

    std::vector<const FieldSite*> rows;
    for (const FieldSite& s : doc.sites) rows.push_back(&s);
    std::sort(rows.begin(), rows.end(), [](const FieldSite* a, const FieldSite* b) { return a->site < b->site; });
    for (const FieldSite* s : rows) {
        for (std::size_t i = 0; i < s->site.size(); ++i) out += (i ? "," : "") + std::to_string(s->site[i]);
        for (const cplx& c : s->coeffs) {
            out += ",";
            append_number(out, c.real());
            out += ",";
            append_number(out, c.imag());
        }
        out += "\n";
    }
    return out;
}

} // namespace agdo

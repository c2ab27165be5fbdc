#include "cli.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <type_traits>

#include <CLI11.hpp>
#include <json.hpp>

#include "agdo/documents.hpp"
#include "agdo/errors.hpp"
#include "agdo/lattice.hpp"
#include "agdo/operators.hpp"

namespace agdo::cli {

namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

constexpr double kMinGenSeparation = 0.1;
constexpr int kMaxGenAttempts = 1000;
constexpr int kDefaultWindowRadius = 3;
// Oracle components at or below this fraction of the largest one count as zero.
constexpr double kZeroTolerance = 1e-8;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string format_double(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", x);
    return buf;
}

template <typename Site>
std::string site_text(Site s)
{
    std::string out = "(";
    const auto idx = site_indices(s);
    for (std::size_t i = 0; i < idx.size(); ++i) out += (i ? ", " : "") + std::to_string(idx[i]);
    return out + ")";
}

/// "R" for the radius-R window, or explicit "lo:hi,lo:hi[,lo:hi]" ranges.
Window parse_window(const std::string& text, Model model)
{
    Window w;
    w.model = model;
    if (text.find(':') == std::string::npos) {
        std::size_t used = 0;
        int r = -1;
        try {
            r = std::stoi(text, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != text.size() || r < 0) throw UsageError("--window: expected a radius R >= 0 or lo:hi ranges");
        return Window::radius(model, r);
    }
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto colon = item.find(':');
        if (colon == std::string::npos) throw UsageError("--window: range '" + item + "' is not lo:hi");
        try {
            w.ranges.push_back({std::stoi(item.substr(0, colon)), std::stoi(item.substr(colon + 1))});
        } catch (const std::exception&) {
            throw UsageError("--window: range '" + item + "' is not lo:hi");
        }
    }
    try {
        w.validate();
    } catch (const InvalidArgument& e) {
        throw UsageError(std::string("--window: ") + e.what());
    }
    return w;
}

cplx parse_complex_flag(const std::string& text, const char* flag)
{
    double re = 0.0;
    double im = 0.0;
    char tail = 0;
    if (std::sscanf(text.c_str(), "%lf,%lf%c", &re, &im, &tail) != 2) {
        throw UsageError(std::string(flag) + ": expected 're,im'");
    }
    return {re, im};
}

void require_distinct(const std::string& in, const std::string& out)
{
    if (in.empty() || out.empty()) return;
    std::error_code ec;
    if (fs::weakly_canonical(in, ec) == fs::weakly_canonical(out, ec)) {
        throw UsageError("input and output paths must differ");
    }
}

fs::path resolve_reference(const std::string& ref, const fs::path& document)
{
    const fs::path p(ref);
    if (p.is_absolute()) return p;
    const fs::path beside = document.parent_path() / p;
    if (fs::exists(beside)) return beside;
    return p;
}

std::string reference_from(const fs::path& target, const fs::path& document)
{
    const fs::path dir = fs::absolute(document).parent_path();
    return fs::absolute(target).lexically_proximate(dir).generic_string();
}

// ---------------------------------------------------------------- gen-spectral

struct GenConfig {
    std::string model = "cross";
    std::uint64_t seed = 1;
    std::string window;
    std::string output;
    std::string backend = "torus";
    std::string b;
    bool random_r = false;
};

int cmd_gen_spectral(const GenConfig& cfg, std::ostream& out)
{
    const Model model = model_from_string(cfg.model);
    std::optional<Window> window;
    if (!cfg.window.empty()) window = parse_window(cfg.window, model);
    if (cfg.output.empty()) throw UsageError("gen-spectral: -o PATH is required");

    std::mt19937_64 rng(cfg.seed);
    const cplx b = cfg.b.empty() ? cplx(-8.0 + 5.0 * uniform01(rng), -1.0 + 2.0 * uniform01(rng))
                                 : parse_complex_flag(cfg.b, "--b");
    if (b.real() > -3.0) throw UsageError("--b: the real part must be <= -3");
    const auto curve = make_torus_curve(PeriodMatrix::genus_one(b), 0.0);

    std::vector<SurfacePoint> points;
    for (int attempt = 0;; ++attempt) {
        if (attempt == kMaxGenAttempts) {
            throw SeparationFailure("gen-spectral: no separated configuration after " + std::to_string(kMaxGenAttempts)
                                    + " samples");
        }
        points.clear();
        for (int i = 0; i < 7; ++i) {
            Eigen::VectorXd s(1);
            Eigen::VectorXd t(1);
            s[0] = uniform01(rng);
            t[0] = uniform01(rng);
            points.emplace_back(CVector(from_lattice_coordinates(curve->period_matrix(), s, t)));
        }
        std::vector<SurfacePoint> all = points;
        all.push_back(curve->base_point());
        bool separated = true;
        for (std::size_t i = 0; i < all.size() && separated; ++i) {
            for (std::size_t j = i + 1; j < all.size() && separated; ++j) {
                separated = curve->point_distance(all[i], all[j]) >= kMinGenSeparation;
            }
        }
        if (separated) break;
    }

    Normalization r = Normalization::constant();
    if (cfg.random_r) {
        std::vector<cplx> weights(model == Model::cross ? 3 : 6);
        for (cplx& w : weights) w = {uniform01(rng) - 0.5, uniform01(rng) - 0.5};
        r = Normalization::exponential(weights);
    }
    std::array<SurfacePoint, 6> marked;
    std::copy(points.begin(), points.begin() + 6, marked.begin());
    const std::vector<SurfacePoint> divisor{points[6]};
    const SpectralData sd = model == Model::cross ? SpectralData::cross(curve, marked, divisor, r)
                                                  : SpectralData::hex(curve, marked, divisor, r);

    const fs::path out_path(cfg.output);
    fs::path curve_path = out_path.parent_path() / (out_path.stem().string() + ".curve.json");
    SpectralDocument doc = describe_spectral_data(sd, cfg.seed);
    doc.window = window;
    doc.curve_data_ref = curve_path.filename().generic_string();
    if (cfg.backend == "tabulated") {
        doc.backend = "tabulated";
    } else if (cfg.backend != "torus") {
        throw UsageError("--backend: expected torus or tabulated");
    }

    write_text_file(curve_path, curve_data_to_json(tabulate_spectral_curve(sd)));
    const std::string text = spectral_document_to_json(doc);
    write_text_file(out_path, text);

    // Reload both documents so every load-time consistency check runs.
    const SpectralData reloaded = make_spectral_data(spectral_document_from_json(read_text_file(out_path)),
                                                     out_path.parent_path());
    load_tabulated_curve(curve_data_from_json(read_text_file(curve_path)));

    out << "wrote " << out_path.generic_string() << " and " << curve_path.generic_string() << " (model "
        << to_string(model) << ", B = " << b.real() << (b.imag() < 0 ? " - " : " + ") << std::abs(b.imag())
        << "i, backend " << doc.backend << ")\n";
    return reloaded.model() == model ? kOk : kDataError;
}

// ---------------------------------------------------------------- build

struct BuildConfig {
    std::string input;
    std::string output;
    std::string window;
    std::string reading = "corrected";
};

template <typename Site>
int finish_build(const BuildResult<Site>& result, const SpectralData& sd, const SpectralDocument& doc,
                 const BuildConfig& cfg, std::ostream& out, std::ostream& err)
{
    FieldDocument fd = make_field_document(result.field);
    fd.normalization = sd.normalization().description();
    fd.formula_reading = cfg.reading;
    fd.spectral_data_ref = reference_from(cfg.input, cfg.output);
    fd.seed = doc.seed;
    for (const auto& f : result.failures) fd.failures.push_back(site_text(f.site) + ": " + f.message);
    write_text_file(cfg.output, field_document_to_json(fd));

    out << "built " << result.field.sites.size() << " " << to_string(sd.model()) << " sites into " << cfg.output << "\n";
    if (!result.failures.empty()) {
        err << "build: " << result.failures.size() << " site(s) failed:\n";
        for (const std::string& f : fd.failures) err << "  " << f << "\n";
        return kCheckFailed;
    }
    return kOk;
}

int cmd_build(const BuildConfig& cfg, std::ostream& out, std::ostream& err)
{
    if (cfg.input.empty() || cfg.output.empty()) throw UsageError("build: -i PATH and -o PATH are required");
    require_distinct(cfg.input, cfg.output);
    const FormulaReading reading = formula_reading_from_string(cfg.reading);
    const SpectralDocument doc = spectral_document_from_json(read_text_file(cfg.input));
    const Window window = !cfg.window.empty() ? parse_window(cfg.window, doc.model)
                          : doc.window        ? *doc.window
                                              : Window::radius(doc.model, kDefaultWindowRadius);
    const SpectralData sd = make_spectral_data(doc, fs::path(cfg.input).parent_path());
    if (doc.model == Model::cross) return finish_build(build_cross_field(sd, window, reading), sd, doc, cfg, out, err);
    return finish_build(build_hex_field(sd, window, reading), sd, doc, cfg, out, err);
}

// ---------------------------------------------------------------- verify

struct VerifyConfig {
    std::string input;
    std::string spectral;
    std::string output;
    int probes = 20;
    std::optional<std::uint64_t> seed;
    double tol = 1e-8;
    double gap_tol = 1e-6;
    double match_tol = 1e-6;
};

struct SiteVerdict {
    std::string site;
    double residual = 0.0;
    double gap = 0.0;
    double mismatch = 0.0;
    double zero_component = 0.0;
    std::vector<std::string> problems;
};

template <typename Site>
std::vector<Site> sites_of(const Window& w)
{
    if constexpr (std::is_same_v<Site, SiteCross>) {
        return w.cross_sites();
    } else {
        return w.hex_sites();
    }
}

template <typename Site>
std::vector<SiteVerdict> verify_field(const SpectralData& sd, const StencilField<Site>& field,
                                      const std::vector<SurfacePoint>& probes, const VerifyConfig& cfg)
{
    const ResidualReport<Site> residuals = residual_report(sd, field, probes, cfg.tol);
    std::map<Site, SiteVerdict> verdicts;
    for (const Site& s : sites_of<Site>(field.window)) {
        SiteVerdict& v = verdicts[s];
        v.site = site_text(s);
        if (!field.sites.count(s)) v.problems.push_back("site missing from the field");
    }
    for (const auto& r : residuals.per_site) {
        SiteVerdict& v = verdicts[r.site];
        v.residual = r.max_residual;
        if (!(r.max_residual <= cfg.tol)) v.problems.push_back("residual " + format_double(r.max_residual));
    }
    for (const auto& e : residuals.errors) verdicts[e.site].problems.push_back(e.message);

    for (const auto& [site, stencil] : field.sites) {
        SiteVerdict& v = verdicts[site];
        try {
            const OracleResult<Site> oracle = nullspace_oracle(sd, site, probes);
            v.gap = oracle.gap;
            v.mismatch = stencil_mismatch(oracle.stencil.coeffs, stencil.coeffs);
            if (!(v.gap <= cfg.gap_tol)) v.problems.push_back("oracle gap " + format_double(v.gap));
            if (!(v.mismatch <= cfg.match_tol)) v.problems.push_back("oracle mismatch " + format_double(v.mismatch));
            if constexpr (std::is_same_v<Site, SiteHex>) {
                for (const std::size_t i : zero_indices(site)) {
                    v.zero_component = std::max(v.zero_component, relative_component(oracle.stencil.coeffs, i));
                    if (stencil.coeffs[i] != 0.0) {
                        v.problems.push_back(std::string("forced zero ") + HexStencil::names[i] + " is not 0");
                    }
                }
                if (!(v.zero_component <= kZeroTolerance)) {
                    v.problems.push_back("oracle zero pattern " + format_double(v.zero_component));
                }
            }
        } catch (const Error& e) {
            v.problems.push_back(std::string("oracle: ") + e.what());
        }
    }
    std::vector<SiteVerdict> out;
    for (auto& [site, v] : verdicts) out.push_back(std::move(v));
    return out;
}

int cmd_verify(const VerifyConfig& cfg, std::ostream& out, std::ostream& err)
{
    if (cfg.input.empty()) throw UsageError("verify: -i PATH is required");
    if (cfg.probes < kMinOracleProbes) {
        throw UsageError("--probes: at least " + std::to_string(kMinOracleProbes) + " probes are required");
    }
    if (!(cfg.tol > 0.0) || !(cfg.gap_tol > 0.0) || !(cfg.match_tol > 0.0)) {
        throw UsageError("tolerances must be positive");
    }
    require_distinct(cfg.input, cfg.output);

    const FieldDocument fd = field_document_from_json(read_text_file(cfg.input));
    const fs::path spectral_path =
        !cfg.spectral.empty() ? fs::path(cfg.spectral) : resolve_reference(fd.spectral_data_ref, cfg.input);
    const SpectralDocument doc = spectral_document_from_json(read_text_file(spectral_path));
    if (doc.model != fd.model) throw SchemaError("verify: field and spectral data have different models");
    const SpectralData sd = make_spectral_data(doc, spectral_path.parent_path());
    if (sd.curve().backend() != CurveBackend::torus) {
        throw NotTabulated("verify: random probes need the torus backend; the spectral data is tabulated");
    }
    const std::uint64_t seed = cfg.seed.value_or(fd.seed);
    const auto probes = sample_probes(sd, cfg.probes, seed);

    const std::vector<SiteVerdict> verdicts =
        fd.model == Model::cross ? verify_field(sd, cross_field_from_document(fd), probes, cfg)
                                 : verify_field(sd, hex_field_from_document(fd), probes, cfg);

    double max_residual = 0.0;
    double max_gap = 0.0;
    double max_mismatch = 0.0;
    double max_zero = 0.0;
    std::vector<const SiteVerdict*> failed;
    for (const SiteVerdict& v : verdicts) {
        max_residual = std::max(max_residual, v.residual);
        max_gap = std::max(max_gap, v.gap);
        max_mismatch = std::max(max_mismatch, v.mismatch);
        max_zero = std::max(max_zero, v.zero_component);
        if (!v.problems.empty()) failed.push_back(&v);
    }
    const bool passed = failed.empty() && fd.failures.empty();

    out << (passed ? "PASS" : "FAIL") << "  model " << to_string(fd.model) << ", " << verdicts.size() << " sites, "
        << probes.size() << " probes, seed " << seed << "\n";
    out << "  max normalized residual " << format_double(max_residual) << " (tol " << format_double(cfg.tol) << ")\n";
    out << "  max oracle gap          " << format_double(max_gap) << " (tol " << format_double(cfg.gap_tol) << ")\n";
    out << "  max oracle mismatch     " << format_double(max_mismatch) << " (tol " << format_double(cfg.match_tol)
        << ")\n";
    if (fd.model == Model::hex) out << "  max oracle zero entry   " << format_double(max_zero) << "\n";
    if (!fd.failures.empty()) err << "field document lists " << fd.failures.size() << " build failure(s)\n";
    std::stable_sort(failed.begin(), failed.end(),
                     [](const SiteVerdict* a, const SiteVerdict* b) { return a->residual > b->residual; });
    for (std::size_t i = 0; i < failed.size() && i < 10; ++i) {
        err << "  site " << failed[i]->site << ":";
        for (const std::string& p : failed[i]->problems) err << " " << p << ";";
        err << "\n";
    }

    if (!cfg.output.empty()) {
        Json sites = Json::array();
        for (const SiteVerdict& v : verdicts) {
            sites.push_back(Json{{"site", v.site},
                                 {"residual", v.residual},
                                 {"oracle_gap", v.gap},
                                 {"oracle_mismatch", v.mismatch},
                                 {"oracle_zero_component", v.zero_component},
                                 {"problems", v.problems}});
        }
        const Json report{{"model", to_string(fd.model)},
                          {"passed", passed},
                          {"probes", probes.size()},
                          {"seed", seed},
                          {"tolerances", Json{{"residual", cfg.tol}, {"gap", cfg.gap_tol}, {"match", cfg.match_tol}}},
                          {"max_residual", max_residual},
                          {"max_oracle_gap", max_gap},
                          {"max_oracle_mismatch", max_mismatch},
                          {"max_oracle_zero_component", max_zero},
                          {"sites", sites}};
        write_text_file(cfg.output, report.dump(2) + "\n");
    }
    return passed ? kOk : kCheckFailed;
}

// ---------------------------------------------------------------- export

struct ExportConfig {
    std::string input;
    std::string output;
    std::string format = "csv";
};

int cmd_export(const ExportConfig& cfg, std::ostream& out)
{
    if (cfg.input.empty()) throw UsageError("export: -i PATH is required");
    require_distinct(cfg.input, cfg.output);
    const FieldDocument fd = field_document_from_json(read_text_file(cfg.input));
    const std::string text = cfg.format == "csv" ? field_to_csv(fd) : field_document_to_json(fd);
    if (cfg.output.empty()) {
        out << text;
    } else {
        write_text_file(cfg.output, text);
    }
    return kOk;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Algebro-geometric difference operators on the square and triangular lattices", "agdo"};
    app.require_subcommand(1);

    GenConfig gen;
    auto* g = app.add_subcommand("gen-spectral", "Sample seeded torus spectral data and write its documents");
    g->add_option("--model", gen.model, "cross or hex")->check(CLI::IsMember({"cross", "hex"}));
    g->add_option("--seed", gen.seed, "Random seed");
    g->add_option("--window", gen.window, "Window radius R or lo:hi ranges to store with the data");
    g->add_option("-o,--output", gen.output, "Spectral-data document to write")->required();
    g->add_option("--backend", gen.backend, "torus or tabulated")->check(CLI::IsMember({"torus", "tabulated"}));
    g->add_option("--b", gen.b, "Fixed period 're,im' instead of a sampled one");
    g->add_flag("--random-r", gen.random_r, "Draw exponential normalization weights instead of r = 1");

    BuildConfig build;
    auto* b = app.add_subcommand("build", "Build the coefficient field from spectral data");
    b->add_option("-i,--input", build.input, "Spectral-data document")->required();
    b->add_option("-o,--output", build.output, "Coefficient-field document to write")->required();
    b->add_option("--window", build.window, "Window radius R or lo:hi ranges");
    b->add_option("--reading", build.reading, "printed or corrected formulas")
        ->check(CLI::IsMember({"printed", "corrected"}));

    VerifyConfig verify;
    std::uint64_t verify_seed = 0;
    auto* v = app.add_subcommand("verify", "Check L psi = 0 and compare against the null-space oracle");
    v->add_option("-i,--input", verify.input, "Coefficient-field document")->required();
    v->add_option("--spectral", verify.spectral, "Spectral-data document (default: the field's reference)");
    v->add_option("-o,--output", verify.output, "JSON report to write");
    v->add_option("--probes", verify.probes, "Number of random probe points");
    auto* seed_opt = v->add_option("--seed", verify_seed, "Probe seed (default: the field's seed)");
    v->add_option("--tol", verify.tol, "Residual tolerance");
    v->add_option("--gap-tol", verify.gap_tol, "Oracle singular-value gap tolerance");
    v->add_option("--match-tol", verify.match_tol, "Oracle/builder stencil mismatch tolerance");

    ExportConfig exp;
    auto* x = app.add_subcommand("export", "Export a coefficient field");
    x->add_option("-i,--input", exp.input, "Coefficient-field document")->required();
    x->add_option("-o,--output", exp.output, "Output file (default: standard output)");
    x->add_option("--format", exp.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (g->parsed()) return cmd_gen_spectral(gen, out);
        if (b->parsed()) return cmd_build(build, out, err);
        if (v->parsed()) {
            if (seed_opt->count() > 0) verify.seed = verify_seed;
            return cmd_verify(verify, out, err);
        }
        return cmd_export(exp, out);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const InvalidArgument& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const SeparationFailure& e) {
        err << "error: " << e.what() << "\n";
        return kCheckFailed;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kDataError;
    }
}

} // namespace agdo::cli

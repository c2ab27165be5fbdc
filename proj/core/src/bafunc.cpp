#include "agdo/bafunc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "agdo/errors.hpp"
#include "agdo/lattice.hpp"
#include "agdo/linalg.hpp"

namespace agdo {

namespace {

// Marked-point indices.
// cross: 0 P1+, 1 P1-, 2 P2+, 3 P2-, 4 P3+, 5 P3-
// hex:   0 Q1, 1 Q2, 2 Q3, 3 R1, 4 R2, 5 R3
constexpr std::array<std::array<int, 2>, 3> kCrossPairs{{{0, 1}, {2, 3}, {4, 5}}};
constexpr std::array<std::array<int, 2>, 4> kHexPairs{{{2, 0}, {2, 1}, {5, 3}, {5, 4}}};

template <typename Label>
cplx phi_impl(const SpectralData& sd, const Label& v, const PreparedPoint& p)
{
    const double floor = kGenericityFloor * sd.theta_zero_magnitude();
    if (std::abs(p.theta_base.mantissa) < floor) {
        throw SingularEvaluation("phi: Theta(P, 0) is on the theta divisor (non-generic point or divisor)");
    }
    const std::array<int, 4> c = exponents(v);
    const ThetaValue num = theta_component_scaled(sd, p.abel, c);
    cplx log_part = num.log_factor - p.theta_base.log_factor;
    for (int i = 0; i < sd.exponent_count(); ++i) log_part += static_cast<double>(c[static_cast<std::size_t>(i)]) * p.integrals[static_cast<std::size_t>(i)];
    return sd.normalization()(v) * (num.mantissa / p.theta_base.mantissa) * std::exp(log_part);
}

// Label shifts of one stencil, used by the uniqueness kernel test.
std::vector<Label3> kernel_shifts_cross()
{
    std::vector<Label3> out;
    for (const auto& nb : stencil_offsets(SiteCross{0, 0})) out.push_back(nb.shift);
    return out;
}

std::vector<Label6> kernel_shifts_hex()
{
    std::vector<Label6> out;
    for (const auto& nb : stencil_offsets(SiteHex{0, 0, 0})) out.push_back(nb.shift);
    return out;
}

template <typename Label>
UniquenessReport uniqueness_impl(const SpectralData& sd, const Label& v, const std::vector<SurfacePoint>& probes,
                                 const std::vector<Label>& shifts)
{
    if (probes.size() < 3) throw InvalidArgument("uniqueness_check: need at least 3 probes");

    UniquenessReport rep;
    rep.min_separation = sd.min_separation();
    if (rep.min_separation < kMinSeparation) {
        rep.generic = false;
        rep.issues.push_back("divisor or marked points collide (separation " + std::to_string(rep.min_separation) + ")");
    }

    const PeriodMatrix& b = sd.curve().period_matrix();
    const int g = sd.curve().genus();
    const IVector m = IVector::Ones(g);
    const IVector n = -IVector::Ones(g);

    try {
        std::vector<cplx> values;
        std::vector<cplx> relifted;
        for (const SurfacePoint& p : probes) {
            const PreparedPoint prep = sd.prepare(p);
            const cplx first = phi(sd, v, prep);
            const cplx again = phi(sd, v, sd.prepare(p));
            rep.max_reevaluation_discrepancy =
                std::max(rep.max_reevaluation_discrepancy, std::abs(first - again) / std::abs(first));
            values.push_back(first);
            relifted.push_back(phi(sd, v, sd.prepare(p.relifted(b, m, n))));
        }
        for (std::size_t i = 1; i < values.size(); ++i) {
            const cplx r0 = values[i] / values[0];
            const cplx r1 = relifted[i] / relifted[0];
            rep.max_relift_discrepancy = std::max(rep.max_relift_discrepancy, std::abs(r0 - r1) / std::abs(r0));
        }

        std::vector<SurfacePoint> kernel_probes = probes;
        if (kernel_probes.size() < shifts.size() + 3) {
            const auto extra = sample_probes(sd, static_cast<int>(shifts.size() + 3 - kernel_probes.size()), 0x5eed);
            kernel_probes.insert(kernel_probes.end(), extra.begin(), extra.end());
        }
        CMatrix a(static_cast<Eigen::Index>(kernel_probes.size()), static_cast<Eigen::Index>(shifts.size()));
        for (std::size_t r = 0; r < kernel_probes.size(); ++r) {
            const PreparedPoint prep = sd.prepare(kernel_probes[r]);
            for (std::size_t c = 0; c < shifts.size(); ++c) {
                a(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = phi(sd, v + shifts[c], prep);
            }
        }
        const NullVector nv = smallest_singular_vector(a);
        const auto& sv = nv.singular_values;
        rep.kernel_gap = nv.gap;
        rep.kernel_one_dimensional = nv.gap <= 1e-6 && sv[sv.size() - 2] >= 1e-6 * sv[0];
        if (!rep.kernel_one_dimensional) {
            rep.issues.push_back("stencil kernel is not one-dimensional (gap " + std::to_string(nv.gap) + ")");
        }
    } catch (const SingularEvaluation& e) {
        rep.generic = false;
        rep.issues.push_back(e.what());
    } catch (const PoleOnPath& e) {
        rep.generic = false;
        rep.issues.push_back(e.what());
    }

    if (rep.max_relift_discrepancy > 1e-8) rep.issues.push_back("probe ratios change under re-lift");
    if (rep.max_reevaluation_discrepancy > 1e-8) rep.issues.push_back("probe values change under re-evaluation");
    rep.passed = rep.generic && rep.issues.empty();
    return rep;
}

} // namespace

// ---------------------------------------------------------------- Normalization

Normalization Normalization::constant(cplx value)
{
    if (value == 0.0) throw InvalidArgument("Normalization: r must be nonzero");
    Normalization r;
    r.scale_ = value;
    return r;
}

Normalization Normalization::exponential(std::vector<cplx> weights, cplx scale)
{
    if (scale == 0.0) throw InvalidArgument("Normalization: r must be nonzero");
    if (weights.empty()) return constant(scale);
    Normalization r;
    r.scale_ = scale;
    r.weights_ = std::move(weights);
    return r;
}

cplx Normalization::evaluate(std::span<const int> v) const
{
    if (weights_.empty()) return scale_;
    if (weights_.size() != v.size()) {
        throw DimensionMismatch("Normalization: " + std::to_string(weights_.size()) + " weights for a label of length "
                                + std::to_string(v.size()));
    }
    cplx e = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) e += weights_[i] * static_cast<double>(v[i]);
    return scale_ * std::exp(e);
}

cplx Normalization::operator()(const Label3& v) const
{
    const std::array<int, 3> a{v.alpha, v.beta, v.gamma};
    return evaluate(a);
}

cplx Normalization::operator()(const Label6& v) const
{
    return evaluate(v.v);
}

Normalization Normalization::scaled(cplx lambda) const
{
    Normalization r = *this;
    r.scale_ *= lambda;
    return r;
}

std::string Normalization::description() const
{
    std::ostringstream os;
    os.precision(17);
    if (weights_.empty()) {
        os << "r = constant " << scale_;
    } else {
        os << "r_v = " << scale_ << " * exp(<w, v>), w = (";
        for (std::size_t i = 0; i < weights_.size(); ++i) os << (i ? ", " : "") << weights_[i];
        os << ")";
    }
    return os.str();
}

// ---------------------------------------------------------------- SpectralData

const std::array<std::string, 6>& SpectralData::marked_names(Model model)
{
    static const std::array<std::string, 6> cross{"P1+", "P1-", "P2+", "P2-", "P3+", "P3-"};
    static const std::array<std::string, 6> hex{"Q1", "Q2", "Q3", "R1", "R2", "R3"};
    return model == Model::cross ? cross : hex;
}

const std::vector<std::array<int, 3>>& required_marked_integrals(Model model)
{
    static const std::vector<std::array<int, 3>> cross{
        // even sites
        {2, 0, 1}, {5, 0, 1}, {1, 2, 3}, {1, 4, 5}, {3, 4, 5}, {3, 0, 1},
        // odd sites
        {0, 2, 3}, {0, 4, 5}, {4, 0, 1}, {2, 4, 5}};
    static const std::vector<std::array<int, 3>> hex{
        // k - l = 0 mod 3
        {2, 4, 3}, {2, 0, 1}, {1, 2, 0}, {1, 5, 3}, {3, 2, 1}, {3, 5, 4},
        // k - l = 1 mod 3
        {5, 0, 1}, {5, 3, 4},
        // k - l = 2 mod 3
        {0, 2, 1}, {0, 5, 4}, {4, 2, 0}, {4, 5, 3}, {2, 3, 4}};
    return model == Model::cross ? cross : hex;
}

SpectralData SpectralData::cross(CurvePtr curve, std::array<SurfacePoint, 6> marked, std::vector<SurfacePoint> divisor,
                                 Normalization r, Options options)
{
    SpectralData sd;
    sd.model_ = Model::cross;
    sd.curve_ = std::move(curve);
    sd.marked_ = std::move(marked);
    sd.divisor_ = std::move(divisor);
    sd.r_ = std::move(r);
    sd.initialise(options);
    return sd;
}

SpectralData SpectralData::hex(CurvePtr curve, std::array<SurfacePoint, 6> marked, std::vector<SurfacePoint> divisor,
                               Normalization r, Options options)
{
    SpectralData sd;
    sd.model_ = Model::hex;
    sd.curve_ = std::move(curve);
    sd.marked_ = std::move(marked);
    sd.divisor_ = std::move(divisor);
    sd.r_ = std::move(r);
    sd.initialise(options);
    return sd;
}

SpectralData SpectralData::with_normalization(Normalization r) const
{
    SpectralData copy = *this;
    copy.r_ = std::move(r);
    return copy;
}

std::array<int, 2> SpectralData::exponent_pair(int i) const
{
    if (i < 0 || i >= exponent_count()) throw InvalidArgument("exponent_pair: index out of range");
    return model_ == Model::cross ? kCrossPairs[static_cast<std::size_t>(i)] : kHexPairs[static_cast<std::size_t>(i)];
}

void SpectralData::initialise(Options options)
{
    if (!curve_) throw InvalidArgument("SpectralData: null curve");
    const SpectralCurve& c = *curve_;
    const int g = c.genus();
    if (static_cast<int>(divisor_.size()) != g) {
        throw DimensionMismatch("SpectralData: divisor needs " + std::to_string(g) + " points, got "
                                + std::to_string(divisor_.size()));
    }

    min_separation_ = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < marked_.size(); ++i) {
        for (std::size_t j = i + 1; j < marked_.size(); ++j) {
            min_separation_ = std::min(min_separation_, c.point_distance(marked_[i], marked_[j]));
        }
        for (const SurfacePoint& d : divisor_) min_separation_ = std::min(min_separation_, c.point_distance(marked_[i], d));
    }
    if (options.check_separation && min_separation_ < kMinSeparation) {
        throw InvalidArgument("SpectralData: marked/divisor points are not distinct (separation "
                              + std::to_string(min_separation_) + ")");
    }

    u_.clear();
    for (int i = 0; i < exponent_count(); ++i) {
        const auto [plus, minus] = exponent_pair(i);
        u_.push_back(c.b_period_vector(marked_[static_cast<std::size_t>(plus)], marked_[static_cast<std::size_t>(minus)]));
    }

    CVector abel_divisor = CVector::Zero(g);
    for (const SurfacePoint& d : divisor_) abel_divisor += c.abel(d);
    shift_ = -abel_divisor - c.riemann_constants();
    theta0_ = std::abs(theta_eval(c.period_matrix(), CVector::Zero(g)));

    marked_integrals_.clear();
    if (options.check_separation || min_separation_ >= kMinSeparation) {
        for (const auto& key : required_marked_integrals(model_)) {
            const cplx value = c.third_kind_integral(marked_[static_cast<std::size_t>(key[0])],
                                                     marked_[static_cast<std::size_t>(key[1])],
                                                     marked_[static_cast<std::size_t>(key[2])]);
            marked_integrals_.emplace_back(key, value);
        }
    }
}

cplx SpectralData::marked_integral(int endpoint, int plus, int minus) const
{
    const std::array<int, 3> key{endpoint, plus, minus};
    for (const auto& [k, value] : marked_integrals_) {
        if (k == key) return value;
    }
    throw InvalidArgument("marked_integral: combination (" + std::to_string(endpoint) + ", " + std::to_string(plus)
                          + ", " + std::to_string(minus) + ") was not precomputed");
}

PreparedPoint SpectralData::prepare(const SurfacePoint& p) const
{
    PreparedPoint out;
    out.point = p;
    out.abel = curve_->abel(p);
    for (int i = 0; i < exponent_count(); ++i) {
        const auto [plus, minus] = exponent_pair(i);
        out.integrals[static_cast<std::size_t>(i)] = curve_->third_kind_integral(
            p, marked_[static_cast<std::size_t>(plus)], marked_[static_cast<std::size_t>(minus)]);
    }
    out.theta_base = theta_scaled(curve_->period_matrix(), CVector(out.abel + shift_));
    return out;
}

PreparedPoint SpectralData::prepare_marked(int index) const
{
    PreparedPoint out;
    out.point = marked(index);
    out.abel = curve_->abel(out.point);
    out.theta_base = theta_scaled(curve_->period_matrix(), CVector(out.abel + shift_));
    return out;
}

// ---------------------------------------------------------------- evaluation

std::array<int, 4> exponents(const Label3& v)
{
    return {v.alpha, v.beta, v.gamma, 0};
}

std::array<int, 4> exponents(const Label6& v)
{
    if (!v.balanced()) throw InvalidArgument("hex label must satisfy alpha+beta+gamma = 0 and rho+sigma+tau = 0");
    return {v[0], v[1], v[3], v[4]};
}

ThetaValue theta_component_scaled(const SpectralData& sd, const CVector& abel, const std::array<int, 4>& c)
{
    CVector arg = abel + sd.theta_shift();
    for (int i = 0; i < sd.exponent_count(); ++i) {
        const int ci = c[static_cast<std::size_t>(i)];
        if (ci != 0) arg += static_cast<double>(ci) * sd.b_period(i);
    }
    return theta_scaled(sd.curve().period_matrix(), arg);
}

cplx theta_component(const SpectralData& sd, const SurfacePoint& p, const Label3& v)
{
    if (sd.model() != Model::cross) throw InvalidArgument("theta_component: cross label on hex data");
    return theta_component_scaled(sd, sd.curve().abel(p), exponents(v)).value();
}

cplx theta_component(const SpectralData& sd, const SurfacePoint& p, const Label6& v)
{
    if (sd.model() != Model::hex) throw InvalidArgument("theta_component: hex label on cross data");
    return theta_component_scaled(sd, sd.curve().abel(p), exponents(v)).value();
}

cplx phi(const SpectralData& sd, const Label3& v, const PreparedPoint& p)
{
    if (sd.model() != Model::cross) throw InvalidArgument("phi: cross label on hex data");
    return phi_impl(sd, v, p);
}

cplx phi(const SpectralData& sd, const Label6& v, const PreparedPoint& p)
{
    if (sd.model() != Model::hex) throw InvalidArgument("phi: hex label on cross data");
    return phi_impl(sd, v, p);
}

cplx phi_cross(const SpectralData& sd, const Label3& v, const SurfacePoint& p)
{
    return phi(sd, v, sd.prepare(p));
}

cplx phi_hex(const SpectralData& sd, const Label6& v, const SurfacePoint& p)
{
    return phi(sd, v, sd.prepare(p));
}

cplx psi(const SpectralData& sd, SiteCross site, const PreparedPoint& p)
{
    return phi(sd, relabel_cross(site), p);
}

cplx psi(const SpectralData& sd, SiteHex site, const PreparedPoint& p)
{
    return phi(sd, relabel_hex(site), p);
}

cplx psi(const SpectralData& sd, SiteCross site, const SurfacePoint& p)
{
    return psi(sd, site, sd.prepare(p));
}

cplx psi(const SpectralData& sd, SiteHex site, const SurfacePoint& p)
{
    return psi(sd, site, sd.prepare(p));
}

UniquenessReport uniqueness_check(const SpectralData& sd, const Label3& v, const std::vector<SurfacePoint>& probes)
{
    if (sd.model() != Model::cross) throw InvalidArgument("uniqueness_check: cross label on hex data");
    return uniqueness_impl(sd, v, probes, kernel_shifts_cross());
}

UniquenessReport uniqueness_check(const SpectralData& sd, const Label6& v, const std::vector<SurfacePoint>& probes)
{
    if (sd.model() != Model::hex) throw InvalidArgument("uniqueness_check: hex label on cross data");
    if (!v.balanced()) throw InvalidArgument("uniqueness_check: unbalanced hex label");
    return uniqueness_impl(sd, v, probes, kernel_shifts_hex());
}

std::vector<SurfacePoint> sample_probes(const SpectralData& sd, int count, std::uint64_t seed, double clearance)
{
    const SpectralCurve& c = sd.curve();
    if (c.backend() != CurveBackend::torus) {
        throw NotTabulated("sample_probes: random probes need the analytic torus backend");
    }
    if (count < 0) throw InvalidArgument("sample_probes: negative count");

    std::vector<SurfacePoint> avoid(sd.marked().begin(), sd.marked().end());
    avoid.insert(avoid.end(), sd.divisor().begin(), sd.divisor().end());
    avoid.push_back(c.base_point());

    std::mt19937_64 rng(seed);
    std::vector<SurfacePoint> out;
    const PeriodMatrix& b = c.period_matrix();
    for (int attempt = 0; static_cast<int>(out.size()) < count; ++attempt) {
        if (attempt > 1000 * (count + 1)) throw SeparationFailure("sample_probes: could not place probes");
        Eigen::VectorXd s(1);
        Eigen::VectorXd t(1);
        s[0] = uniform01(rng);
        t[0] = uniform01(rng);
        const SurfacePoint p(CVector(c.base_point().lift + from_lattice_coordinates(b, s, t)));
        const bool clear = std::all_of(avoid.begin(), avoid.end(),
                                       [&](const SurfacePoint& q) { return c.point_distance(p, q) >= clearance; });
        if (clear) out.push_back(p);
    }
    return out;
}

} // namespace agdo

#include <doctest.h>

#include "agdo/errors.hpp"
#include "agdo/lattice.hpp"
#include "agdo/theta.hpp"
#include "support.hpp"

using namespace agdo;
using namespace agdo::testing;

namespace {

// Independent direct summation of sum_N exp(-pi N^2) to |N| <= 30, frozen.
constexpr double kThetaZeroTwoPi = 1.0864348112133080;

double rel(cplx a, cplx b)
{
    return std::abs(a - b) / std::max(std::abs(b), 1e-300);
}

} // namespace

TEST_CASE("period matrix validation")
{
    CHECK_NOTHROW(PeriodMatrix::genus_one(-2.0 * kPi));
    CHECK_THROWS_AS(PeriodMatrix::genus_one(1.0), InvalidArgument);
    CHECK_THROWS_AS(PeriodMatrix::genus_one(cplx(0.0, 1.0)), InvalidArgument);
    CMatrix asym(2, 2);
    asym << -3.0, 0.5, 0.4, -3.0;
    CHECK_THROWS_AS(PeriodMatrix{asym}, InvalidArgument);
    CMatrix indefinite(2, 2);
    indefinite << -1.0, 2.0, 2.0, -1.0;
    CHECK_THROWS_AS(PeriodMatrix{indefinite}, InvalidArgument);
    CHECK_THROWS_AS(PeriodMatrix{CMatrix(0, 0)}, InvalidArgument);
}

TEST_CASE("theta at the origin for B = -2 pi")
{
    const PeriodMatrix b = PeriodMatrix::genus_one(-2.0 * kPi);
    CHECK(std::abs(direct_theta(b.matrix(), CVector::Zero(1), 30) - kThetaZeroTwoPi) < 1e-15);
    CHECK(std::abs(theta_eval(b, 0.0) - kThetaZeroTwoPi) < 1e-12);
}

TEST_CASE("theta agrees with direct box summation")
{
    std::mt19937_64 rng(3);
    for (int g = 1; g <= 2; ++g) {
        for (int trial = 0; trial < 10; ++trial) {
            const PeriodMatrix b = random_period_matrix(rng, g);
            const CVector z = random_vector(rng, g, 2.0);
            CHECK(rel(theta_eval(b, z), direct_theta(b.matrix(), z, g == 1 ? 30 : 14)) < 1e-12);
        }
    }
}

TEST_CASE("theta parity and 2 pi i periodicity")
{
    std::mt19937_64 rng(5);
    for (int g = 1; g <= 2; ++g) {
        for (int trial = 0; trial < 20; ++trial) {
            const PeriodMatrix b = random_period_matrix(rng, g);
            const CVector z = random_vector(rng, g, 3.0);
            const cplx t = theta_eval(b, z);
            CHECK(rel(theta_eval(b, CVector(-z)), t) < 1e-12);
            for (int k = 0; k < g; ++k) {
                CVector shifted = z;
                shifted[k] += cplx(0.0, 2.0 * kPi);
                CHECK(rel(theta_eval(b, shifted), t) < 1e-12);
            }
        }
    }
}

TEST_CASE("quasi-period factor")
{
    SUBCASE("n = 0 gives 1")
    {
        const PeriodMatrix b = PeriodMatrix::genus_one(cplx(-4.0, 0.3));
        IVector m(1), n(1);
        m << 3;
        n << 0;
        CHECK(quasi_period_factor(b, CVector::Constant(1, cplx(0.2, 0.7)), m, n) == cplx(1.0, 0.0));
    }
    SUBCASE("B = -4, z = 0, n = 1")
    {
        const PeriodMatrix b = PeriodMatrix::genus_one(-4.0);
        IVector m(1), n(1);
        m << 0;
        n << 1;
        CHECK(std::abs(quasi_period_factor(b, CVector::Zero(1), m, n) - std::exp(2.0)) < 1e-14);
    }
    SUBCASE("matches the ratio of direct evaluations")
    {
        std::mt19937_64 rng(11);
        for (int g = 1; g <= 2; ++g) {
            for (int trial = 0; trial < 20; ++trial) {
                const PeriodMatrix b = random_period_matrix(rng, g);
                const CVector z = random_vector(rng, g, 1.0);
                const IVector m = random_ivector(rng, g, 2);
                const IVector n = random_ivector(rng, g, 2);
                const cplx ratio = theta_eval(b, CVector(z + lattice_vector(b, m, n))) / theta_eval(b, z);
                CHECK(rel(ratio, quasi_period_factor(b, z, m, n)) < 1e-9);
            }
        }
    }
    SUBCASE("dimension mismatch")
    {
        const PeriodMatrix b = PeriodMatrix::genus_one(-4.0);
        CHECK_THROWS_AS(quasi_period_factor(b, CVector::Zero(2), IVector::Zero(1), IVector::Zero(1)),
                        DimensionMismatch);
        CHECK_THROWS_AS(quasi_period_factor(b, CVector::Zero(1), IVector::Zero(2), IVector::Zero(1)),
                        DimensionMismatch);
    }
}

TEST_CASE("theta errors")
{
    const PeriodMatrix b = PeriodMatrix::genus_one(-2.0 * kPi);
    CHECK_THROWS_AS(theta_eval(b, CVector::Zero(2)), DimensionMismatch);
    CHECK_THROWS_AS(theta_eval(b, CVector::Zero(1), 0.0), InvalidArgument);
    CHECK_THROWS_AS(theta_eval(b, CVector::Zero(1), 1e-2), InvalidArgument);
    // Nearly singular real part: the series needs far more than 60 shells.
    const PeriodMatrix flat = PeriodMatrix::genus_one(cplx(-1e-4, 0.0));
    CHECK_THROWS_AS(theta_eval(flat, CVector::Zero(1)), NonConvergent);
}

TEST_CASE("theta is deterministic")
{
    std::mt19937_64 rng(1);
    const PeriodMatrix b = random_period_matrix(rng, 2);
    const CVector z = random_vector(rng, 2, 2.0);
    CHECK(theta_eval(b, z) == theta_eval(b, z));
}

TEST_CASE("scaled theta equals direct theta")
{
    std::mt19937_64 rng(17);
    for (int g = 1; g <= 2; ++g) {
        for (int trial = 0; trial < 10; ++trial) {
            const PeriodMatrix b = random_period_matrix(rng, g);
            const CVector z = random_vector(rng, g, 6.0);
            CHECK(rel(theta_scaled(b, z).value(), theta_eval(b, z)) < 1e-10);
        }
    }
}

TEST_CASE("genus-one theta zero")
{
    const PeriodMatrix b = PeriodMatrix::genus_one(-2.0 * kPi);
    const cplx z0 = theta_zero_1d(b);
    CHECK(std::abs(z0 - cplx(-kPi, kPi)) <= 1e-10);
    CHECK(std::abs(theta_eval(b, z0)) <= 1e-12 * std::abs(theta_eval(b, 0.0)));

    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 10; ++trial) {
        const PeriodMatrix bb = random_period_matrix(rng, 1);
        const cplx z = theta_zero_1d(bb);
        CHECK(std::abs(theta_eval(bb, z)) <= 1e-12 * std::abs(theta_eval(bb, 0.0)));
    }
    CMatrix two = CMatrix::Identity(2, 2) * -3.0;
    CHECK_THROWS_AS(theta_zero_1d(PeriodMatrix(two)), DimensionMismatch);
}

TEST_CASE("lattice reduction")
{
    std::mt19937_64 rng(29);
    for (int g = 1; g <= 2; ++g) {
        const PeriodMatrix b = random_period_matrix(rng, g);
        for (int trial = 0; trial < 10; ++trial) {
            const CVector z = random_vector(rng, g, 20.0);
            const LatticeReduction red = reduce_to_fundamental_domain(b, z);
            CHECK((red.remainder + lattice_vector(b, red.m, red.n) - z).norm() < 1e-10 * (1.0 + z.norm()));
            Eigen::VectorXd s, t;
            lattice_coordinates(b, red.remainder, s, t);
            CHECK(s.cwiseAbs().maxCoeff() <= 0.5 + 1e-12);
            CHECK(t.cwiseAbs().maxCoeff() <= 0.5 + 1e-12);
        }
        const CVector a = random_vector(rng, g, 1.0);
        const IVector m = random_ivector(rng, g, 3);
        const IVector n = random_ivector(rng, g, 3);
        CHECK(cover_distance(b, a, CVector(a + lattice_vector(b, m, n))) < 1e-9);
    }
}

TEST_CASE("bilinear pairing does not conjugate")
{
    CVector x(2), y(2);
    x << cplx(0, 1), cplx(2, 0);
    y << cplx(0, 1), cplx(1, 1);
    CHECK(bilinear(x, y) == cplx(-1.0, 0.0) + cplx(2.0, 2.0));
}

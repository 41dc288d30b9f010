#include "oracles.hpp"

#include "marc/errors.hpp"
#include "marc/joint.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace marc;

namespace {

ChannelRealization
scalar_ones(Complex hd)
{
    ChannelRealization c;
    c.user_to_relay = {ComplexVector{1.0}};
    c.direct = {hd};
    c.relay_to_rx = ComplexVector{1.0};
    c.power = {1.0};
    c.relay_power = 1.0;
    return c;
}

ComplexMatrix
scalar_matrix(Complex value)
{
    ComplexMatrix m(1, 1);
    m(0, 0) = value;
    return m;
}

// Frobenius norm of the second compound matrix (all 2x2 minors). Zero iff rank <= 1,
// and sigma_2 / sigma_1 <= minors * M / ||F||_F^2.
double
second_compound_norm(const ComplexMatrix& f)
{
    double sum = 0.0;
    for (std::size_t i = 0; i < f.rows(); ++i)
    {
        for (std::size_t k = i + 1; k < f.rows(); ++k)
        {
            for (std::size_t j = 0; j < f.cols(); ++j)
            {
                for (std::size_t l = j + 1; l < f.cols(); ++l)
                {
                    sum += std::norm(f(i, j) * f(k, l) - f(i, l) * f(k, j));
                }
            }
        }
    }
    return std::sqrt(sum);
}

double
relative_gap(double a, double b)
{
    return std::abs(a - b) / std::max(1.0, std::abs(b));
}

} // namespace

TEST_CASE("log-det rate with zero powers is zero")
{
    RandomStream rng(31, 0);
    ChannelRealization c = oracle::random_realization(rng, 3, 2, 1.0, 10.0, 5.0);
    for (double& p : c.power)
    {
        p = 0.0;
    }
    const RelayMatrix f(oracle::random_matrix(rng, 2, 2), c);
    CHECK(sum_rate_logdet(f, c) == 0.0);
    CHECK(sum_rate_closed(f, c) == 0.0);
}

TEST_CASE("relay switched off leaves the direct-link capacity")
{
    ChannelRealization c = scalar_ones(Complex(0.6, 0.8));
    c.power = {3.0};
    c.noise = 2.0;
    const double expected = std::log2(1.0 + 1.0 * 3.0 / 2.0);
    CHECK(sum_rate_logdet(RelayMatrix::zero(c), c) == doctest::Approx(expected).epsilon(1e-14));
    CHECK(sum_rate_closed(RelayMatrix::zero(c), c) == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("log-det and closed-form sum rates agree with the hand-expanded determinant")
{
    RandomStream rng(32, 0);
    for (int trial = 0; trial < 300; ++trial)
    {
        const std::size_t users = 1 + static_cast<std::size_t>(trial % 6);
        const std::size_t m = 1 + static_cast<std::size_t>(trial % 4);
        ChannelRealization c = oracle::random_realization(rng, users, m, 1.0, 10.0, 10.0);
        c.noise = trial % 3 == 0 ? 0.7 : 1.0;
        const RelayMatrix f(oracle::random_matrix(rng, m, m), c);
        const double naive = oracle::naive_logdet_rate(f.F, c);
        CAPTURE(trial);
        CHECK(std::abs(sum_rate_logdet(f, c) - naive) <= 1e-10 * std::max(1.0, naive));
        CHECK(std::abs(sum_rate_closed(f, c) - naive) <= 1e-10 * std::max(1.0, naive));
    }
}

TEST_CASE("upper-bound-1 relay matrix")
{
    const ChannelRealization ones = scalar_ones(0.0);
    const RelayMatrix f = relay_matrix_ub1(ones);
    CHECK(std::abs(f.F(0, 0) - 1.0 / std::sqrt(2.0)) <= 1e-12);

    ChannelRealization off = ones;
    off.relay_power = 0.0;
    CHECK(relay_matrix_ub1(off).F.frobenius_norm() == 0.0);

    ChannelRealization dead = ones;
    dead.relay_to_rx = ComplexVector{0.0};
    CHECK_THROWS_AS(relay_matrix_ub1(dead), DegenerateChannelError);

    RandomStream rng(33, 0);
    for (int trial = 0; trial < 200; ++trial)
    {
        const std::size_t m = 1 + static_cast<std::size_t>(trial % 5);
        ChannelRealization c = oracle::random_realization(rng, 4, m, 1.0, 10.0, 100.0);
        const RelayMatrix r = relay_matrix_ub1(c);
        CHECK(relative_gap(r.tx_power, c.relay_power) <= 1e-8);
        const double fro2 = r.F.frobenius_norm() * r.F.frobenius_norm();
        CHECK(second_compound_norm(r.F) * static_cast<double>(m) <= 1e-10 * fro2);
        CHECK(upper_bound_1(c) >= sum_rate_logdet(r, c) - 1e-9);
    }
}

TEST_CASE("upper bound 1 closed form")
{
    const ChannelRealization ones = scalar_ones(0.0);
    CHECK(upper_bound_1(ones) == doctest::Approx(std::log2(4.0 / 3.0)).epsilon(1e-14));

    // No feasible scalar F does better: |f|^2 (N0 + P) <= P_r means |f|^2 <= 1/2.
    double best = 0.0;
    for (int i = 0; i <= 2000; ++i)
    {
        const double mag = std::sqrt(0.5) * i / 2000.0;
        for (double phase : {0.0, 1.0, 2.5})
        {
            const RelayMatrix f(scalar_matrix(std::polar(mag, phase)), ones);
            REQUIRE(f.feasible);
            best = std::max(best, sum_rate_logdet(f, ones));
        }
    }
    CHECK(best <= upper_bound_1(ones) + 1e-12);
    CHECK(best == doctest::Approx(std::log2(4.0 / 3.0)).epsilon(1e-12));

    RandomStream rng(34, 0);
    ChannelRealization c = oracle::random_realization(rng, 3, 2, 1.0, 10.0, 0.0);
    const double s = compute_aggregates(c).s;
    CHECK(upper_bound_1(c) == doctest::Approx(std::log2(1.0 + s)).epsilon(1e-14));
}

TEST_CASE("upper bound 2 closed form")
{
    RandomStream rng(35, 0);
    const ChannelRealization c = oracle::random_realization(rng, 1, 3, 1.0, 10.0, 5.0);
    const double s = std::norm(c.direct[0]) * c.power[0];
    const double expected = std::log2(1.0 + s + c.user_to_relay[0].squared_norm() * c.power[0]);
    CHECK(std::abs(upper_bound_2(c) - expected) <= 1e-12 * expected);

    ChannelRealization zero = c;
    zero.user_to_relay[0] = ComplexVector(3);
    zero.direct[0] = 0.0;
    zero.relay_to_rx = ComplexVector(3);
    CHECK(upper_bound_2(zero) == 0.0);
}

TEST_CASE("upper bound 2 is tight at very high relay power")
{
    // The gap closes like 1 / P_r. At 60 dB a weak relay-to-receiver channel
    // can still leave slightly more than 1e-4 bits; at 80 dB no draw does.
    RandomStream rng(36, 0);
    int above = 0;
    for (int trial = 0; trial < 1000; ++trial)
    {
        ChannelRealization c = oracle::random_realization(rng, 3, 4, 1.0, 10.0, 1e6);
        const JointRateBounds b6 = lower_bound(c);
        c.relay_power = 1e8;
        const JointRateBounds b8 = lower_bound(c);
        const double gap6 = b6.r_up2 - b6.r_lower;
        const double gap8 = b8.r_up2 - b8.r_lower;
        CAPTURE(trial);
        CHECK(gap6 >= -1e-9);
        CHECK(gap8 <= 1e-4);
        CHECK(gap6 / gap8 == doctest::Approx(100.0).epsilon(0.05));
        above += gap6 > 1e-4 ? 1 : 0;
    }
    CHECK(above <= 10);
}

TEST_CASE("lower-bound relay matrix")
{
    RandomStream rng(37, 0);
    for (int trial = 0; trial < 200; ++trial)
    {
        const std::size_t m = 1 + static_cast<std::size_t>(trial % 4);
        const ChannelRealization c = oracle::random_realization(rng, 3, m, 1.0, 10.0, 50.0);
        const LowerBoundMatrix l = relay_matrix_lower(c);
        CHECK(relative_gap(relay_tx_power(l.f.F, c), c.relay_power) <= 1e-8);
        CHECK(l.f.feasible);
    }

    // K = 1: W vanishes, so the bound matrices coincide.
    for (int trial = 0; trial < 50; ++trial)
    {
        const ChannelRealization c = oracle::random_realization(rng, 1, 3, 1.0, 10.0, 10.0);
        const ComplexMatrix a = relay_matrix_lower(c).f.F;
        const ComplexMatrix b = relay_matrix_ub1(c).F;
        Complex dot{};
        for (std::size_t i = 0; i < 3; ++i)
        {
            for (std::size_t j = 0; j < 3; ++j)
            {
                dot += std::conj(a(i, j)) * b(i, j);
            }
        }
        CHECK(std::abs(dot) == doctest::Approx(a.frobenius_norm() * b.frobenius_norm()).epsilon(1e-9));
    }

    ChannelRealization off = oracle::random_realization(rng, 2, 2, 1.0, 10.0, 0.0);
    const LowerBoundMatrix z = relay_matrix_lower(off);
    CHECK(z.gamma == 0.0);
    CHECK(z.f.F.frobenius_norm() == 0.0);

    off.relay_to_rx = ComplexVector(2);
    CHECK_THROWS_AS(relay_matrix_lower(off), DegenerateChannelError);
}

TEST_CASE("lower bound for the all-ones scalar channel")
{
    const ChannelRealization c = scalar_ones(1.0);
    const JointRateBounds b = lower_bound(c);
    CHECK(b.r_lower == doctest::Approx(std::log2(7.0 / 3.0)).epsilon(1e-14));
    CHECK(b.gamma * b.gamma == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(oracle::naive_logdet_rate(b.f_lower.F, c) ==
          doctest::Approx(std::log2(7.0 / 3.0)).epsilon(1e-14));
}

TEST_CASE("lower bound with relay power zero or no forward channel")
{
    RandomStream rng(38, 0);
    ChannelRealization c = oracle::random_realization(rng, 3, 2, 1.0, 10.0, 0.0);
    const double s = compute_aggregates(c).s;
    CHECK(lower_bound(c).r_lower == doctest::Approx(std::log2(1.0 + s)).epsilon(1e-14));

    c.relay_power = 10.0;
    c.relay_to_rx = ComplexVector(2);
    const JointRateBounds b = lower_bound(c);
    CHECK(b.r_lower == doctest::Approx(std::log2(1.0 + s)).epsilon(1e-14));
    CHECK(b.f_lower.F.frobenius_norm() == 0.0);
}

TEST_CASE("bound ordering and lower-bound rate identity on random draws")
{
    RandomStream rng(39, 0);
    for (int trial = 0; trial < 1000; ++trial)
    {
        const std::size_t users = 1 + static_cast<std::size_t>(trial % 10);
        const std::size_t m = 1 + static_cast<std::size_t>(trial % 4);
        const double pr = std::pow(10.0, (trial % 9) / 2.0);
        const double alpha = (trial % 3) * 0.5;
        const ChannelRealization c = oracle::random_realization(rng, users, m, alpha, 10.0, pr);
        const JointRateBounds b = lower_bound(c);
        CAPTURE(trial);
        CHECK(b.r_lower >= 0.0);
        CHECK(b.r_lower <= b.r_up_min() + 1e-9);
        CHECK(std::abs(sum_rate_logdet(b.f_lower, c) - b.r_lower) <= 1e-9);
    }
}

TEST_CASE("lower bound and upper bound 1 grow with relay power")
{
    RandomStream rng(40, 0);
    for (int trial = 0; trial < 50; ++trial)
    {
        ChannelRealization c = oracle::random_realization(rng, 4, 3, 0.5, 10.0, 0.0);
        double last_lower = -1.0;
        double last_up1 = -1.0;
        for (int i = 0; i < 10; ++i)
        {
            c.relay_power = db_to_linear(-10.0 + 6.0 * i);
            const JointRateBounds b = lower_bound(c);
            CHECK(b.r_lower >= last_lower - 1e-12);
            CHECK(b.r_up1 >= last_up1 - 1e-12);
            last_lower = b.r_lower;
            last_up1 = b.r_up1;
        }
    }
}

TEST_CASE("eigenvector phase does not change the rates")
{
    RandomStream rng(41, 0);
    for (int trial = 0; trial < 50; ++trial)
    {
        const ChannelRealization c = oracle::random_realization(rng, 3, 3, 1.0, 10.0, 20.0);
        const JointRateBounds b = lower_bound(c);
        const double theta = 2.0 * std::numbers::pi * rng.uniform();
        // F = gamma h v^H / ||h||, so v -> e^{i theta} v multiplies F by e^{-i theta}.
        const RelayMatrix rotated(std::polar(1.0, -theta) * b.f_lower.F, c);
        CHECK(std::abs(sum_rate_logdet(rotated, c) - b.r_lower) <= 1e-10);
        CHECK(std::abs(sum_rate_closed(rotated, c) - b.r_lower) <= 1e-10);
    }
}

TEST_CASE("diagnostic rate of the upper-bound-1 matrix stays below both upper bounds")
{
    RandomStream rng(42, 0);
    for (int trial = 0; trial < 200; ++trial)
    {
        const ChannelRealization c = oracle::random_realization(rng, 5, 4, 1.0, 10.0, 100.0);
        const JointRateBounds b = lower_bound(c);
        const double r = ub1_matrix_rate(c);
        CHECK(r >= 0.0);
        CHECK(r <= b.r_up_min() + 1e-9);
    }
}

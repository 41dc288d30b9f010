#include "oracles.hpp"

#include "marc/channel.hpp"
#include "marc/channel_json.hpp"
#include "marc/errors.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>

using namespace marc;

namespace {

double
max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b)
{
    double out = 0.0;
    for (std::size_t r = 0; r < a.rows(); ++r)
    {
        for (std::size_t col = 0; col < a.cols(); ++col)
        {
            out = std::max(out, std::abs(a(r, col) - b(r, col)));
        }
    }
    return out;
}

// s R - T written out entrywise.
ComplexMatrix
naive_s_r_minus_t(const ChannelRealization& c)
{
    const std::size_t m = c.antennas();
    double s = 0.0;
    std::vector<Complex> u(m, 0.0);
    for (std::size_t k = 0; k < c.users(); ++k)
    {
        s += std::norm(c.direct[k]) * c.power[k];
        for (std::size_t i = 0; i < m; ++i)
        {
            u[i] += c.power[k] * std::conj(c.direct[k]) * c.user_to_relay[k][i];
        }
    }
    ComplexMatrix out(m, m);
    for (std::size_t i = 0; i < m; ++i)
    {
        for (std::size_t j = 0; j < m; ++j)
        {
            Complex r{};
            for (std::size_t k = 0; k < c.users(); ++k)
            {
                r += c.power[k] * c.user_to_relay[k][i] * std::conj(c.user_to_relay[k][j]);
            }
            out(i, j) = s * r - u[i] * std::conj(u[j]);
        }
    }
    return out;
}

ComplexMatrix
scalar_matrix(Complex value)
{
    ComplexMatrix m(1, 1);
    m(0, 0) = value;
    return m;
}

ChannelRealization
scalar_ones(Complex hd = 0.0)
{
    ChannelRealization c;
    c.user_to_relay = {ComplexVector{1.0}};
    c.direct = {hd};
    c.relay_to_rx = ComplexVector{1.0};
    c.power = {1.0};
    c.relay_power = 1.0;
    return c;
}

} // namespace

TEST_CASE("sampling with alpha = 0 gives exactly zero direct links")
{
    ScenarioConfig cfg;
    cfg.alpha = 0.0;
    RandomStream rng(3, 0);
    const ChannelRealization c = sample_channel(cfg, rng);
    for (const Complex& d : c.direct)
    {
        CHECK(d == Complex(0.0, 0.0));
    }
}

TEST_CASE("sampling is deterministic per (seed, trial)")
{
    ScenarioConfig cfg;
    cfg.users = 3;
    cfg.relay_antennas = 2;
    RandomStream a(42, 7);
    RandomStream b(42, 7);
    RandomStream other(42, 8);
    const ChannelRealization ca = sample_channel(cfg, a);
    const ChannelRealization cb = sample_channel(cfg, b);
    const ChannelRealization cother = sample_channel(cfg, other);
    CHECK(dump_realization(ca) == dump_realization(cb));
    CHECK(dump_realization(ca) != dump_realization(cother));
}

TEST_CASE("sample moments match the fading model")
{
    ScenarioConfig cfg;
    cfg.users = 1;
    cfg.relay_antennas = 1;
    cfg.alpha = 0.5;
    cfg.p_max = 4.0;
    const int n = 100000;
    double h_sq = 0.0;
    double h_re_sq = 0.0;
    double hd_sq = 0.0;
    double hd_sq2 = 0.0;
    double p_sum = 0.0;
    double p_max_seen = 0.0;
    for (int t = 0; t < n; ++t)
    {
        RandomStream rng(1, static_cast<std::uint64_t>(t));
        const ChannelRealization c = sample_channel(cfg, rng);
        h_sq += std::norm(c.relay_to_rx[0]);
        h_re_sq += c.relay_to_rx[0].real() * c.relay_to_rx[0].real();
        const double d = std::norm(c.direct[0]);
        hd_sq += d;
        hd_sq2 += d * d;
        p_sum += c.power[0];
        p_max_seen = std::max(p_max_seen, c.power[0]);
    }
    CHECK(std::abs(h_sq / n - 1.0) <= 0.02);
    CHECK(std::abs(h_re_sq / n - 0.5) <= 0.01);
    const double mean_hd = hd_sq / n;
    const double se_hd = std::sqrt((hd_sq2 / n - mean_hd * mean_hd) / n);
    CHECK(std::abs(mean_hd - 0.25) <= 3.0 * se_hd);
    CHECK(std::abs(p_sum / n - 2.0) <= 3.0 * 4.0 / std::sqrt(12.0 * n));
    CHECK(p_max_seen <= 4.0);
}

TEST_CASE("scenario validation")
{
    ScenarioConfig cfg;
    cfg.users = 0;
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
    cfg = {};
    cfg.noise = 0.0;
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
    cfg = {};
    cfg.alpha = -1.0;
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
    cfg = {};
    cfg.relay_power = std::nan("");
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
    CHECK_NOTHROW(ScenarioConfig{}.validate());
}

TEST_CASE("relay transmit power")
{
    RandomStream rng(21, 0);
    ChannelRealization c = oracle::random_realization(rng, 3, 4, 1.0, 10.0, 5.0);
    CHECK(relay_tx_power(ComplexMatrix(4, 4), c) == 0.0);

    ChannelRealization silent = c;
    for (auto& h : silent.user_to_relay)
    {
        h = ComplexVector(4);
    }
    CHECK(relay_tx_power(ComplexMatrix::identity(4), silent) == doctest::Approx(4.0));

    CHECK_THROWS_AS(relay_tx_power(ComplexMatrix(3, 3), c), ValidationError);

    for (int trial = 0; trial < 100; ++trial)
    {
        const std::size_t m = 1 + static_cast<std::size_t>(trial % 4);
        c = oracle::random_realization(rng, 1 + trial % 5, m, 0.7, 10.0, 3.0);
        c.noise = 0.5 + rng.uniform();
        const ComplexMatrix f = oracle::random_matrix(rng, m, m);
        const double expected = oracle::naive_relay_power(f, c);
        const double got = relay_tx_power(f, c);
        CHECK(std::abs(got - expected) <= 1e-10 * std::max(1.0, expected));
        const double g = 0.1 + 3.0 * rng.uniform();
        ComplexMatrix scaled = f;
        scaled *= Complex(g);
        CHECK(std::abs(relay_tx_power(scaled, c) - g * g * got) <= 1e-10 * std::max(1.0, g * g * got));
    }
}

TEST_CASE("relay matrix feasibility flag")
{
    const ChannelRealization c = scalar_ones();
    // power of F = 1/sqrt(2): (1/2)(1 + 1) = 1 = P_r
    const RelayMatrix ok(scalar_matrix(1.0 / std::sqrt(2.0)), c);
    CHECK(ok.tx_power == doctest::Approx(1.0));
    CHECK(ok.feasible);
    const RelayMatrix too_much(scalar_matrix(1.0), c);
    CHECK_FALSE(too_much.feasible);
    CHECK(RelayMatrix::zero(c).feasible);
}

TEST_CASE("aggregates for a single user")
{
    RandomStream rng(22, 0);
    for (int trial = 0; trial < 20; ++trial)
    {
        const ChannelRealization c = oracle::random_realization(rng, 1, 3, 1.0, 10.0, 1.0);
        const ChannelAggregates a = compute_aggregates(c);
        CHECK(a.W.frobenius_norm() <= 1e-12);
        CHECK(max_abs_diff((a.s * a.R).matrix(), a.T.matrix()) <= 1e-12 * std::max(1.0, a.T.frobenius_norm()));
    }
}

TEST_CASE("aggregates without direct links")
{
    RandomStream rng(23, 0);
    const ChannelRealization c = oracle::random_realization(rng, 4, 3, 0.0, 10.0, 1.0);
    const ChannelAggregates a = compute_aggregates(c);
    CHECK(a.s == 0.0);
    CHECK(a.T.frobenius_norm() == 0.0);
    CHECK(a.W.frobenius_norm() == 0.0);
}

TEST_CASE("s R - T equals W and all aggregates are PSD")
{
    RandomStream rng(24, 0);
    for (std::size_t users : {1, 2, 3, 5})
    {
        for (std::size_t m : {1, 2, 4})
        {
            for (int trial = 0; trial < 25; ++trial)
            {
                ChannelRealization c = oracle::random_realization(rng, users, m, 1.0, 10.0, 1.0);
                const ChannelAggregates a = compute_aggregates(c);
                const ComplexMatrix expected = naive_s_r_minus_t(c);
                double scale = 1.0;
                for (std::size_t i = 0; i < m; ++i)
                {
                    scale = std::max(scale, std::abs(a.W(i, i)));
                }
                CAPTURE(users);
                CAPTURE(m);
                CHECK(max_abs_diff(a.W.matrix(), expected) <= 1e-10 * scale);
                for (const HermitianMatrix* x : {&a.R, &a.T, &a.W})
                {
                    const ComplexVector probe = oracle::random_vector(rng, m);
                    CHECK(quadratic_form(probe, *x) >= -1e-10 * std::max(1.0, x->frobenius_norm()));
                }
            }
        }
    }
}

TEST_CASE("W: the conjugated cross-indexed form breaks the identity for complex gains")
{
    // K = 2, M_r = 1 with complex direct gains separates the candidates.
    ChannelRealization c;
    c.user_to_relay = {ComplexVector{Complex(1.0, 0.5)}, ComplexVector{Complex(-0.3, 2.0)}};
    c.direct = {Complex(0.4, -1.1), Complex(0.9, 0.7)};
    c.relay_to_rx = ComplexVector{1.0};
    c.power = {1.5, 0.8};
    const ChannelAggregates a = compute_aggregates(c);
    const Complex target = naive_s_r_minus_t(c)(0, 0);

    const auto& h1 = c.user_to_relay[0][0];
    const auto& h2 = c.user_to_relay[1][0];
    const auto& d1 = c.direct[0];
    const auto& d2 = c.direct[1];
    const double pp = c.power[0] * c.power[1];
    const double plain = pp * std::norm(d2 * h1 - d1 * h2);
    const double conjugated = pp * std::norm(std::conj(d2) * h1 - std::conj(d1) * h2);

    CHECK(std::abs(a.W(0, 0) - target) <= 1e-12);
    CHECK(std::abs(plain - target) <= 1e-12);
    CHECK(std::abs(conjugated - target) > 1e-3);
}

TEST_CASE("effective channel")
{
    ChannelRealization c = scalar_ones(Complex(0.3, -0.2));
    const RelayMatrix f(scalar_matrix(1.0), c);
    const ComplexVector e = effective_channel(f, c, 0);
    CHECK(std::abs(e[0] - 1.0 / std::sqrt(2.0)) <= 1e-15);
    CHECK(e[1] == c.direct[0]);

    const ComplexVector zero = effective_channel(RelayMatrix::zero(c), c, 0);
    CHECK(zero[0] == Complex(0.0));
    CHECK(zero[1] == c.direct[0]);

    CHECK_THROWS_AS(effective_channel(f, c, 1), ValidationError);

    RandomStream rng(25, 0);
    for (int trial = 0; trial < 200; ++trial)
    {
        const std::size_t m = 1 + static_cast<std::size_t>(trial % 4);
        c = oracle::random_realization(rng, 3, m, 1.0, 10.0, 1.0);
        const ComplexMatrix fm = oracle::random_matrix(rng, m, m);
        const RelayMatrix rf(fm, c);
        const ComplexVector fh = adjoint_times(fm, c.relay_to_rx);
        const double r = 1.0 + fh.squared_norm();
        for (std::size_t k = 0; k < 3; ++k)
        {
            const ComplexVector ek = effective_channel(rf, c, k);
            CHECK(std::abs(ek[0]) <= fh.norm() * c.user_to_relay[k].norm() / std::sqrt(r) * (1 + 1e-12));
        }
    }
}

TEST_CASE("noise normalization")
{
    RandomStream rng(26, 0);
    ChannelRealization c = oracle::random_realization(rng, 2, 2, 1.0, 10.0, 4.0);
    c.noise = 2.0;
    const ChannelRealization u = c.unit_noise();
    CHECK(u.noise == 1.0);
    CHECK(u.relay_power == doctest::Approx(2.0));
    CHECK(u.power[1] == doctest::Approx(c.power[1] / 2.0));
}

TEST_CASE("dB conversion")
{
    CHECK(db_to_linear(0.0) == 1.0);
    CHECK(db_to_linear(10.0) == doctest::Approx(10.0));
    CHECK(db_to_linear(-20.0) == doctest::Approx(0.01));
}

TEST_CASE("realization JSON round trip")
{
    RandomStream rng(27, 0);
    ChannelRealization c = oracle::random_realization(rng, 3, 2, 0.4, 10.0, 7.0);
    c.noise = 0.5;
    const ChannelRealization back = realization_from_json(nlohmann::json::parse(dump_realization(c)));
    CHECK(dump_realization(back) == dump_realization(c));
    CHECK(back.direct[2] == c.direct[2]);
    CHECK(back.user_to_relay[1][1] == c.user_to_relay[1][1]);

    const auto path = std::filesystem::temp_directory_path() / "marc_roundtrip.json";
    write_realization_file(c, path.string());
    CHECK(dump_realization(read_realization_file(path.string())) == dump_realization(c));
    std::filesystem::remove(path);
}

TEST_CASE("realization JSON errors")
{
    nlohmann::json j = to_json(scalar_ones());
    j.erase("N0");
    CHECK(realization_from_json(j).noise == 1.0);

    nlohmann::json missing = to_json(scalar_ones());
    missing.erase("h");
    CHECK_THROWS_AS(realization_from_json(missing), ValidationError);

    nlohmann::json shape = to_json(scalar_ones());
    shape["P"] = {1.0, 2.0};
    CHECK_THROWS_AS(realization_from_json(shape), ValidationError);

    nlohmann::json negative = to_json(scalar_ones());
    negative["P_r"] = -1.0;
    CHECK_THROWS_AS(realization_from_json(negative), ValidationError);

    nlohmann::json bad_complex = to_json(scalar_ones());
    bad_complex["h_d"] = {"x"};
    CHECK_THROWS_AS(realization_from_json(bad_complex), ValidationError);

    CHECK_THROWS_AS(read_realization_file("/nonexistent/dir/c.json"), IoError);
}

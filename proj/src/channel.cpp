#include "marc/channel.hpp"

#include "marc/errors.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace marc {

namespace {

bool
finite(double x)
{
    return std::isfinite(x);
}

} // namespace

void
ScenarioConfig::validate() const
{
    if (users < 1)
    {
        throw ValidationError("users must be at least 1");
    }
    if (relay_antennas < 1)
    {
        throw ValidationError("relay antennas must be at least 1");
    }
    if (!finite(p_max) || !(p_max > 0.0))
    {
        throw ValidationError("p_max must be a positive finite number");
    }
    if (!finite(relay_power) || relay_power < 0.0)
    {
        throw ValidationError("relay power must be a non-negative finite number");
    }
    if (!finite(noise) || !(noise > 0.0))
    {
        throw ValidationError("noise variance must be positive and finite");
    }
    if (!finite(alpha) || alpha < 0.0)
    {
        throw ValidationError("alpha must be non-negative and finite");
    }
}

// ---------------------------------------------------------------------------

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t trial, std::uint64_t attempt)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed),
                      static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(trial),
                      static_cast<std::uint32_t>(trial >> 32),
                      static_cast<std::uint32_t>(attempt),
                      static_cast<std::uint32_t>(attempt >> 32)};
    m_engine.seed(seq);
}

double
RandomStream::uniform()
{
    return static_cast<double>(m_engine() >> 11) * 0x1.0p-53;
}

double
RandomStream::gaussian()
{
    if (m_has_spare)
    {
        m_has_spare = false;
        return m_spare;
    }
    // Box-Muller; 1 - u keeps the log argument in (0, 1].
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    m_spare = radius * std::sin(angle);
    m_has_spare = true;
    return radius * std::cos(angle);
}

Complex
RandomStream::complex_gaussian(double variance)
{
    const double sigma = std::sqrt(variance / 2.0);
    const double re = gaussian();
    const double im = gaussian();
    return {sigma * re, sigma * im};
}

// ---------------------------------------------------------------------------

void
ChannelRealization::validate() const
{
    const std::size_t k = power.size();
    const std::size_t m = relay_to_rx.size();
    if (k == 0)
    {
        throw ValidationError("realization has no users");
    }
    if (m == 0)
    {
        throw ValidationError("relay needs at least one antenna");
    }
    if (user_to_relay.size() != k || direct.size() != k)
    {
        throw ValidationError("realization: h_r, h_d and P must have one entry per user");
    }
    for (std::size_t i = 0; i < k; ++i)
    {
        if (user_to_relay[i].size() != m)
        {
            throw ValidationError("realization: h_r[" + std::to_string(i) +
                                  "] length differs from h");
        }
        if (!user_to_relay[i].is_finite() || !finite(direct[i].real()) ||
            !finite(direct[i].imag()))
        {
            throw ValidationError("realization: non-finite channel gain");
        }
        if (!finite(power[i]) || power[i] < 0.0)
        {
            throw ValidationError("realization: powers must be finite and non-negative");
        }
    }
    if (!relay_to_rx.is_finite())
    {
        throw ValidationError("realization: non-finite relay-to-receiver channel");
    }
    if (!finite(relay_power) || relay_power < 0.0)
    {
        throw ValidationError("realization: relay power must be finite and non-negative");
    }
    if (!finite(noise) || !(noise > 0.0))
    {
        throw ValidationError("realization: noise variance must be positive");
    }
}

ChannelRealization
ChannelRealization::unit_noise() const
{
    ChannelRealization out = *this;
    if (noise != 1.0)
    {
        for (auto& p : out.power)
        {
            p /= noise;
        }
        out.relay_power /= noise;
        out.noise = 1.0;
    }
    return out;
}

ChannelRealization
ChannelRealization::single_user(std::size_t k) const
{
    if (k >= users())
    {
        throw ValidationError("user index out of range");
    }
    ChannelRealization out;
    out.user_to_relay = {user_to_relay[k]};
    out.direct = {direct[k]};
    out.relay_to_rx = relay_to_rx;
    out.power = {power[k]};
    out.relay_power = relay_power;
    out.noise = noise;
    return out;
}

// ---------------------------------------------------------------------------

RelayMatrix::RelayMatrix(ComplexMatrix f, const ChannelRealization& c)
    : F(std::move(f)),
      tx_power(relay_tx_power(F, c)),
      feasible(tx_power <= c.relay_power * (1.0 + 1e-9))
{
}

RelayMatrix
RelayMatrix::zero(const ChannelRealization& c)
{
    return RelayMatrix(ComplexMatrix(c.antennas(), c.antennas()), c);
}

ChannelRealization
sample_channel(const ScenarioConfig& cfg, RandomStream& stream)
{
    cfg.validate();
    const auto k = static_cast<std::size_t>(cfg.users);
    const auto m = static_cast<std::size_t>(cfg.relay_antennas);

    ChannelRealization c;
    c.user_to_relay.reserve(k);
    c.direct.reserve(k);
    c.power.reserve(k);
    for (std::size_t user = 0; user < k; ++user)
    {
        ComplexVector hr(m);
        for (std::size_t a = 0; a < m; ++a)
        {
            hr[a] = stream.complex_gaussian();
        }
        c.user_to_relay.push_back(std::move(hr));
        // Drawn at unit variance and scaled so alpha = 0 gives exact zeros and
        // different alphas share the same underlying draw.
        c.direct.push_back(cfg.alpha * stream.complex_gaussian());
        c.power.push_back(cfg.p_max * stream.uniform());
    }
    c.relay_to_rx = ComplexVector(m);
    for (std::size_t a = 0; a < m; ++a)
    {
        c.relay_to_rx[a] = stream.complex_gaussian();
    }
    c.relay_power = cfg.relay_power;
    c.noise = cfg.noise;
    return c;
}

double
relay_tx_power(const ComplexMatrix& f, const ChannelRealization& c)
{
    const std::size_t m = c.antennas();
    if (f.rows() != m || f.cols() != m)
    {
        throw ValidationError("relay matrix must be M_r x M_r");
    }
    const double fro = f.frobenius_norm();
    double total = c.noise * fro * fro;
    for (std::size_t k = 0; k < c.users(); ++k)
    {
        total += c.power[k] * (f * c.user_to_relay[k]).squared_norm();
    }
    return total;
}

double
relay_tx_power(const RelayMatrix& f, const ChannelRealization& c)
{
    return relay_tx_power(f.F, c);
}

ChannelAggregates
compute_aggregates(const ChannelRealization& raw)
{
    raw.validate();
    const ChannelRealization c = raw.unit_noise();
    const std::size_t k = c.users();
    const std::size_t m = c.antennas();

    ChannelAggregates agg;
    agg.R = HermitianMatrix::zero(m);
    agg.W = HermitianMatrix::zero(m);

    ComplexVector u(m);
    for (std::size_t i = 0; i < k; ++i)
    {
        agg.s += std::norm(c.direct[i]) * c.power[i];
        agg.R.add_rank_one(c.user_to_relay[i], c.power[i]);
        u += (c.power[i] * std::conj(c.direct[i])) * c.user_to_relay[i];
    }
    agg.T = rank_one(u, 1.0);

    // W = 1/2 sum_{j,k} P_j P_k w_jk w_jk^H with w_jk = d_k h_j - d_j h_k.
    // Terms are symmetric in (j, k) and vanish on the diagonal, so sum j < k once.
    for (std::size_t j = 0; j < k; ++j)
    {
        for (std::size_t l = j + 1; l < k; ++l)
        {
            ComplexVector w = c.direct[l] * c.user_to_relay[j];
            w += (-c.direct[j]) * c.user_to_relay[l];
            agg.W.add_rank_one(w, c.power[j] * c.power[l]);
        }
    }
    return agg;
}

ComplexVector
effective_channel(const RelayMatrix& f, const ChannelRealization& c, std::size_t k)
{
    if (k >= c.users())
    {
        throw ValidationError("user index out of range");
    }
    if (f.F.rows() != c.antennas() || f.F.cols() != c.antennas())
    {
        throw ValidationError("relay matrix must be M_r x M_r");
    }
    // h^H F = (F^H h)^H
    const ComplexVector g = adjoint_times(f.F, c.relay_to_rx);
    const double r = 1.0 + g.squared_norm();
    const Complex relayed = inner(g, c.user_to_relay[k]) / std::sqrt(r);
    return ComplexVector{relayed, c.direct[k]};
}

double
db_to_linear(double db)
{
    return std::pow(10.0, db / 10.0);
}

} // namespace marc

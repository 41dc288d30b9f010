#pragma once

#include "marc/numerics.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace marc {

/// Parameters of one multiple-access relay scenario and its fading draw.
struct ScenarioConfig
{
    int users = 10;
    int relay_antennas = 4;
    double p_max = 10.0;      ///< per-user powers are drawn uniformly on [0, p_max]
    double relay_power = 1.0; ///< P_r
    double noise = 1.0;       ///< N0
    double alpha = 1.0;       ///< direct-link amplitude multiplier
    std::uint64_t seed = 0;

    void validate() const;
};

/**
 * Deterministic random source for one Monte Carlo trial.
 *
 * Each (seed, trial, attempt) triple seeds its own engine, so trials can be
 * evaluated in any order or on any number of threads and still see the same
 * numbers. Uniform and Gaussian variates are derived from raw 64-bit engine
 * output here rather than through <random> distributions, whose algorithms are
 * left to the standard library vendor.
 */
class RandomStream
{
  public:
    RandomStream(std::uint64_t seed, std::uint64_t trial, std::uint64_t attempt = 0);

    /// Uniform on [0, 1).
    double uniform();
    /// Standard normal.
    double gaussian();
    /// Circularly symmetric complex Gaussian with E|z|^2 = variance.
    Complex complex_gaussian(double variance = 1.0);

  private:
    std::mt19937_64 m_engine;
    bool m_has_spare = false;
    double m_spare = 0.0;
};

/**
 * One realization of the relay channel, with powers.
 *
 * The relay-to-receiver channel is stored unconjugated: the receiver sees
 * h^H x_r.
 */
struct ChannelRealization
{
    std::vector<ComplexVector> user_to_relay; ///< h_r^(k), one per user, length M_r
    std::vector<Complex> direct;              ///< h_d^(k)
    ComplexVector relay_to_rx;                ///< h
    std::vector<double> power;                ///< P^(k)
    double relay_power = 0.0;                 ///< P_r
    double noise = 1.0;                       ///< N0

    std::size_t users() const noexcept { return power.size(); }
    std::size_t antennas() const noexcept { return relay_to_rx.size(); }

    void validate() const;

    /// Same channel with N0 folded into the powers: P/N0, P_r/N0, N0 = 1.
    ChannelRealization unit_noise() const;

    /// Single-user channel made of user k alone.
    ChannelRealization single_user(std::size_t k) const;
};

/// Sums over users that the joint sum-rate is expressed in.
struct ChannelAggregates
{
    double s = 0.0;    ///< sum_k |h_d|^2 P
    HermitianMatrix R; ///< sum_k P h_r h_r^H
    HermitianMatrix T; ///< u u^H, u = sum_k P conj(h_d) h_r
    HermitianMatrix W; ///< direct-link cross term, s R - T
};

/// Amplification matrix applied at the relay, with its transmit power.
struct RelayMatrix
{
    ComplexMatrix F;
    double tx_power = 0.0;
    bool feasible = false; ///< tx_power <= P_r (1 + 1e-9)

    RelayMatrix() = default;
    RelayMatrix(ComplexMatrix f, const ChannelRealization& c);

    static RelayMatrix zero(const ChannelRealization& c);
};

ChannelRealization sample_channel(const ScenarioConfig& cfg, RandomStream& stream);

/// tr(F (N0 I + sum_k P h_r h_r^H) F^H)
double relay_tx_power(const ComplexMatrix& f, const ChannelRealization& c);
double relay_tx_power(const RelayMatrix& f, const ChannelRealization& c);

/// Aggregates of the noise-normalized channel.
ChannelAggregates compute_aggregates(const ChannelRealization& c);

/// [r^{-1/2} h^H F h_r^(k), h_d^(k)] with r = 1 + h^H F F^H h.
ComplexVector effective_channel(const RelayMatrix& f, const ChannelRealization& c, std::size_t k);

double db_to_linear(double db);

} // namespace marc

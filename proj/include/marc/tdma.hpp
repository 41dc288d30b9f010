#pragma once

#include "marc/channel.hpp"

#include <vector>

namespace marc {

/**
 * Gains that determine one user's slotted rate, after noise normalization:
 * direct = |h_d|^2 P, relay = ||h_r||^2 P, forward = ||h||^2 P_r.
 *
 * With these the slotted rate reads
 *   R(tau) = tau log2(1 + direct/tau + forward relay / ((forward + 1) tau + relay)).
 */
struct UserLink
{
    double direct = 0.0;
    double relay = 0.0;
    double forward = 0.0;

    static UserLink of(const ChannelRealization& c, std::size_t k);

    /// Rate is zero for every slot length.
    bool degenerate() const noexcept { return direct == 0.0 && relay * forward == 0.0; }

    double rate(double tau) const;
    double rate_derivative(double tau) const;
    /// Right limit of the derivative at tau = 0 (+inf with a direct link).
    double derivative_at_zero() const;
};

struct TdmaAllocation
{
    std::vector<double> tau;
    std::vector<double> per_user_rate;
    double sum_rate = 0.0;
    double kkt_spread = 0.0; ///< highest minus lowest marginal rate, see optimize_slots
    int iterations = 0;
};

struct AsymptoticResult
{
    std::vector<double> tau_inf;
    double rate_inf = 0.0;       ///< TDMA sum-rate as P_r -> inf
    double joint_rate_inf = 0.0; ///< joint sum-rate as P_r -> inf
    bool joint_wins = false;
};

/// Rates closer than this (bits) or a predicate margin below this relative
/// size count as a tie, which TDMA keeps.
inline constexpr double kTieTolerance = 1e-12;

inline constexpr double kDefaultSlotEpsilon = 1e-8;
inline constexpr int kMaxSlotIterations = 100000;

/// Optimal relay matrix for user k transmitting alone with its own power.
/// Zero if either the relay or forward channel vanishes. tx_power counts user k only.
RelayMatrix single_user_relay_matrix(const ChannelRealization& c, std::size_t k);

/// Closed-form rate of user k alone with the optimal relay matrix.
double single_user_rate(const ChannelRealization& c, std::size_t k);

/// Rate of user k in a slot of length tau at boosted power P/tau; 0 at tau = 0.
double user_rate(const ChannelRealization& c, std::size_t k, double tau);

/// d user_rate / d tau, analytic. Defined for any tau > 0, including tau > 1.
double user_rate_derivative(const ChannelRealization& c, std::size_t k, double tau);

/**
 * Slot durations maximizing the TDMA sum-rate.
 *
 * Starts from equal slots among non-degenerate users and repeatedly moves
 * time from the user with the smallest marginal rate to the one with the
 * largest, choosing the amount by bisection so both marginal rates are equal
 * afterwards. A user whose marginal rate at zero stays below the others
 * ends up with tau = 0; this can only happen without a direct link.
 *
 * kkt_spread is max over non-degenerate users of dR/dtau minus min over users
 * with tau > 0, i.e. the KKT gap including the tau >= 0 boundary. Degenerate
 * users get tau = 0. If every user is degenerate the slots stay equal and all
 * rates are 0.
 *
 * Throws ValidationError for epsilon <= 0 and NumericalError if the spread is
 * still above epsilon after max_iterations exchanges.
 */
TdmaAllocation optimize_slots(const ChannelRealization& c, double epsilon = kDefaultSlotEpsilon,
                              int max_iterations = kMaxSlotIterations);

/// High-relay-power limit: closed-form slots and both schemes' rates.
AsymptoticResult asymptotic_allocation(const ChannelRealization& c);
AsymptoticResult asymptotic_allocation(const ChannelRealization& c, double lambda_rw);

/// lmax(R + W) > sum_k ||h_r||^2 P, the condition for joint relaying to win as P_r -> inf.
bool joint_beats_tdma_asymptotic(const ChannelRealization& c);
bool joint_beats_tdma_asymptotic(const ChannelRealization& c, double lambda_rw);

} // namespace marc

#pragma once

#include "marc/channel.hpp"

namespace marc {

/// Bounds on the sum-rate when all users transmit at once through one relay matrix.
struct JointRateBounds
{
    double r_up1 = 0.0;   ///< relay-power-aware bound, bits per channel use
    double r_up2 = 0.0;   ///< unlimited-relay-power bound
    double r_lower = 0.0; ///< rate achieved by f_lower
    RelayMatrix f_lower;
    double gamma = 0.0;   ///< amplitude of f_lower

    double r_up_min() const noexcept { return r_up1 < r_up2 ? r_up1 : r_up2; }
};

/// log2 det(I + sum_k P h_eff h_eff^H) via the 2x2 determinant.
double sum_rate_logdet(const RelayMatrix& f, const ChannelRealization& c);

/// log2(1 + s + h^H F (R + W) F^H h / r), r = 1 + h^H F F^H h.
double sum_rate_closed(const RelayMatrix& f, const ChannelRealization& c);
double sum_rate_closed(const RelayMatrix& f, const ChannelRealization& c,
                       const ChannelAggregates& agg);

/// Rank-one matrix sqrt(P_r / (1 + lmax(R))) h/||h|| vmax(R)^H.
/// Throws DegenerateChannelError when h = 0.
RelayMatrix relay_matrix_ub1(const ChannelRealization& c);

double upper_bound_1(const ChannelRealization& c);
double upper_bound_1(const ChannelRealization& c, const ChannelAggregates& agg,
                     double lambda_r);

double upper_bound_2(const ChannelRealization& c);
double upper_bound_2(const ChannelAggregates& agg, double lambda_rw);

struct LowerBoundMatrix
{
    RelayMatrix f;
    double gamma = 0.0;
};

/// gamma h/||h|| vmax(R + W)^H with gamma set so the relay power is exactly P_r.
/// Throws DegenerateChannelError when h = 0.
LowerBoundMatrix relay_matrix_lower(const ChannelRealization& c);

/**
 * Achievable rate of relay_matrix_lower together with both upper bounds.
 *
 * A vanishing relay-to-receiver channel is not an error here: the relay is
 * switched off (F = 0) and the lower bound falls back to the direct links.
 */
JointRateBounds lower_bound(const ChannelRealization& c);

/// Rate achieved when the upper-bound-1 matrix is used for transmission.
/// Not part of JointRateBounds; neither matrix dominates per instance.
double ub1_matrix_rate(const ChannelRealization& c);

} // namespace marc

#include "marc/tdma.hpp"

#include "marc/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace marc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kBisectionToleranceG = 1e-10;
constexpr int kMaxBisectionSteps = 200;

} // namespace

UserLink
UserLink::of(const ChannelRealization& raw, std::size_t k)
{
    if (k >= raw.users())
    {
        throw ValidationError("user index out of range");
    }
    const double p = raw.power[k] / raw.noise;
    UserLink link;
    link.direct = std::norm(raw.direct[k]) * p;
    link.relay = raw.user_to_relay[k].squared_norm() * p;
    link.forward = raw.relay_to_rx.squared_norm() * raw.relay_power / raw.noise;
    return link;
}

double
UserLink::rate(double tau) const
{
    if (tau <= 0.0)
    {
        return 0.0;
    }
    const double x = direct / tau + forward * relay / ((forward + 1.0) * tau + relay);
    return tau * std::log1p(x) / std::numbers::ln2;
}

double
UserLink::rate_derivative(double tau) const
{
    const double denom = (forward + 1.0) * tau + relay;
    const double x = direct / tau + forward * relay / denom;
    // tau * dx/dtau
    const double tau_dx = -direct / tau - forward * relay * (forward + 1.0) * tau / (denom * denom);
    return (std::log1p(x) + tau_dx / (1.0 + x)) / std::numbers::ln2;
}

double
UserLink::derivative_at_zero() const
{
    if (direct > 0.0)
    {
        return kInf;
    }
    if (relay == 0.0)
    {
        return 0.0;
    }
    return std::log1p(forward) / std::numbers::ln2;
}

// ---------------------------------------------------------------------------

RelayMatrix
single_user_relay_matrix(const ChannelRealization& c, std::size_t k)
{
    c.validate();
    if (k >= c.users())
    {
        throw ValidationError("user index out of range");
    }
    const ComplexVector& hr = c.user_to_relay[k];
    const ComplexVector& h = c.relay_to_rx;
    if (hr.is_zero() || h.is_zero())
    {
        return RelayMatrix::zero(c);
    }
    const UserLink link = UserLink::of(c, k);
    const double pr = c.relay_power / c.noise;
    const double gain = std::sqrt(pr / (1.0 + link.relay)) / (h.norm() * hr.norm());
    return RelayMatrix(ComplexMatrix::outer(Complex(gain) * h, hr), c.single_user(k));
}

double
single_user_rate(const ChannelRealization& c, std::size_t k)
{
    c.validate();
    const UserLink l = UserLink::of(c, k);
    return std::log2(1.0 + l.direct + l.forward * l.relay / (1.0 + l.forward + l.relay));
}

double
user_rate(const ChannelRealization& c, std::size_t k, double tau)
{
    if (!(tau >= 0.0 && tau <= 1.0))
    {
        throw ValidationError("slot length must lie in [0, 1]");
    }
    c.validate();
    return UserLink::of(c, k).rate(tau);
}

double
user_rate_derivative(const ChannelRealization& c, std::size_t k, double tau)
{
    if (!(tau > 0.0) || !std::isfinite(tau))
    {
        throw ValidationError("slot length must be positive for the derivative");
    }
    c.validate();
    return UserLink::of(c, k).rate_derivative(tau);
}

// ---------------------------------------------------------------------------

namespace {

double
marginal(const UserLink& link, double tau)
{
    return tau > 0.0 ? link.rate_derivative(tau) : link.derivative_at_zero();
}

// Amount of slot time to move from `giver` to `taker` so that their marginal
// rates meet. g(delta) = D_taker(tau_t + delta) - D_giver(tau_g - delta) is
// strictly decreasing with g(0) > 0.
double
exchange_amount(const UserLink& giver, double tau_giver, const UserLink& taker, double tau_taker)
{
    const double upper = std::min(tau_giver, 1.0 - tau_taker);
    auto g = [&](double delta) {
        const double left = tau_giver - delta;
        return marginal(taker, tau_taker + delta) - marginal(giver, left > 0.0 ? left : 0.0);
    };

    if (g(upper) >= 0.0)
    {
        // The giver's marginal rate at zero is still below the taker's.
        return upper;
    }

    double lo = 0.0;
    double hi = upper;
    double mid = 0.5 * (lo + hi);
    for (int step = 0; step < kMaxBisectionSteps; ++step)
    {
        mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi)
        {
            break;
        }
        const double gm = g(mid);
        if (std::abs(gm) <= kBisectionToleranceG)
        {
            break;
        }
        (gm > 0.0 ? lo : hi) = mid;
    }
    return mid;
}

} // namespace

TdmaAllocation
optimize_slots(const ChannelRealization& c, double epsilon, int max_iterations)
{
    if (!(epsilon > 0.0))
    {
        throw ValidationError("optimize_slots: epsilon must be positive");
    }
    c.validate();
    const std::size_t n = c.users();

    std::vector<UserLink> links;
    links.reserve(n);
    std::vector<std::size_t> live;
    for (std::size_t k = 0; k < n; ++k)
    {
        links.push_back(UserLink::of(c, k));
        if (!links.back().degenerate())
        {
            live.push_back(k);
        }
    }

    TdmaAllocation out;
    out.tau.assign(n, 0.0);
    out.per_user_rate.assign(n, 0.0);

    if (live.empty())
    {
        std::fill(out.tau.begin(), out.tau.end(), 1.0 / static_cast<double>(n));
        return out;
    }

    for (std::size_t k : live)
    {
        out.tau[k] = 1.0 / static_cast<double>(live.size());
    }

    std::vector<double> deriv(n, 0.0);
    for (std::size_t k : live)
    {
        deriv[k] = marginal(links[k], out.tau[k]);
    }

    auto spread_and_pair = [&](std::size_t& lowest, std::size_t& highest) {
        double dmin = kInf;
        double dmax = -kInf;
        for (std::size_t k : live)
        {
            if (out.tau[k] > 0.0 && deriv[k] < dmin)
            {
                dmin = deriv[k];
                lowest = k;
            }
            if (deriv[k] > dmax)
            {
                dmax = deriv[k];
                highest = k;
            }
        }
        return dmax - dmin;
    };

    std::size_t i = live.front();
    std::size_t j = live.front();
    double spread = spread_and_pair(i, j);
    int it = 0;
    while (live.size() > 1 && spread > epsilon)
    {
        if (it >= max_iterations)
        {
            throw NumericalError("optimize_slots: marginal rates did not equalize", spread);
        }
        ++it;

        const double delta = exchange_amount(links[i], out.tau[i], links[j], out.tau[j]);
        out.tau[j] += delta;
        out.tau[i] = delta >= out.tau[i] ? 0.0 : out.tau[i] - delta;
        deriv[i] = marginal(links[i], out.tau[i]);
        deriv[j] = marginal(links[j], out.tau[j]);
        spread = spread_and_pair(i, j);
    }

    out.iterations = it;
    out.kkt_spread = live.size() > 1 ? spread : 0.0;
    for (std::size_t k : live)
    {
        out.per_user_rate[k] = links[k].rate(out.tau[k]);
        out.sum_rate += out.per_user_rate[k];
    }
    return out;
}

// ---------------------------------------------------------------------------

AsymptoticResult
asymptotic_allocation(const ChannelRealization& c, double lambda_rw)
{
    c.validate();
    const std::size_t n = c.users();
    AsymptoticResult out;
    out.tau_inf.assign(n, 0.0);

    double total = 0.0;
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k)
    {
        const UserLink l = UserLink::of(c, k);
        out.tau_inf[k] = l.direct + l.relay;
        total += out.tau_inf[k];
        s += l.direct;
    }
    if (total > 0.0)
    {
        for (auto& t : out.tau_inf)
        {
            t /= total;
        }
    }
    else
    {
        std::fill(out.tau_inf.begin(), out.tau_inf.end(), 1.0 / static_cast<double>(n));
    }
    out.rate_inf = std::log2(1.0 + total);
    out.joint_rate_inf = std::log2(1.0 + s + lambda_rw);
    out.joint_wins = out.joint_rate_inf > out.rate_inf + kTieTolerance;
    return out;
}

AsymptoticResult
asymptotic_allocation(const ChannelRealization& c)
{
    const ChannelAggregates agg = compute_aggregates(c);
    return asymptotic_allocation(c, dominant_eigenpair(agg.R + agg.W).value);
}

bool
joint_beats_tdma_asymptotic(const ChannelRealization& c, double lambda_rw)
{
    c.validate();
    double relay_sum = 0.0;
    for (std::size_t k = 0; k < c.users(); ++k)
    {
        relay_sum += UserLink::of(c, k).relay;
    }
    return lambda_rw - relay_sum > kTieTolerance * relay_sum;
}

bool
joint_beats_tdma_asymptotic(const ChannelRealization& c)
{
    const ChannelAggregates agg = compute_aggregates(c);
    return joint_beats_tdma_asymptotic(c, dominant_eigenpair(agg.R + agg.W).value);
}

} // namespace marc

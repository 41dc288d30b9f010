#include "marc/joint.hpp"

#include "marc/errors.hpp"

#include <algorithm>
#include <cmath>

namespace marc {

namespace {

void
require_square(const RelayMatrix& f, const ChannelRealization& c)
{
    if (f.F.rows() != c.antennas() || f.F.cols() != c.antennas())
    {
        throw ValidationError("relay matrix must be M_r x M_r");
    }
}

void
require_relay_channel(const ChannelRealization& c, const char* who)
{
    if (c.relay_to_rx.is_zero())
    {
        throw DegenerateChannelError(std::string(who) +
                                     ": relay-to-receiver channel is zero");
    }
}

// gain * h/||h|| v^H
ComplexMatrix
beam_towards_receiver(const ChannelRealization& c, const ComplexVector& v, double gain)
{
    const double hn = c.relay_to_rx.norm();
    return ComplexMatrix::outer(Complex(gain / hn) * c.relay_to_rx, v);
}

} // namespace

double
sum_rate_logdet(const RelayMatrix& f, const ChannelRealization& raw)
{
    raw.validate();
    require_square(f, raw);
    const ChannelRealization c = raw.unit_noise();

    // I + sum_k P h_eff h_eff^H = [[1 + a, x], [conj(x), 1 + b]]
    double a = 0.0;
    double b = 0.0;
    Complex x{};
    for (std::size_t k = 0; k < c.users(); ++k)
    {
        const ComplexVector e = effective_channel(f, c, k);
        a += c.power[k] * std::norm(e[0]);
        b += c.power[k] * std::norm(e[1]);
        x += c.power[k] * e[0] * std::conj(e[1]);
    }
    const double det = (1.0 + a) * (1.0 + b) - std::norm(x);
    return std::max(0.0, std::log2(det));
}

double
sum_rate_closed(const RelayMatrix& f, const ChannelRealization& c, const ChannelAggregates& agg)
{
    require_square(f, c);
    const ComplexVector g = adjoint_times(f.F, c.relay_to_rx);
    const double r = 1.0 + g.squared_norm();
    const double q = quadratic_form(g, agg.R + agg.W);
    return std::log2(1.0 + agg.s + q / r);
}

double
sum_rate_closed(const RelayMatrix& f, const ChannelRealization& c)
{
    return sum_rate_closed(f, c, compute_aggregates(c));
}

RelayMatrix
relay_matrix_ub1(const ChannelRealization& c)
{
    require_relay_channel(c, "relay_matrix_ub1");
    const ChannelAggregates agg = compute_aggregates(c);
    const EigenPair top = dominant_eigenpair(agg.R);
    const double pr = c.unit_noise().relay_power;
    const double gain = std::sqrt(pr / (1.0 + top.value));
    return RelayMatrix(beam_towards_receiver(c, top.vector, gain), c);
}

double
upper_bound_1(const ChannelRealization& c, const ChannelAggregates& agg, double lambda_r)
{
    const ChannelRealization cn = c.unit_noise();
    const double hh = cn.relay_to_rx.squared_norm();
    const double pr = cn.relay_power;
    return std::log2((1.0 + agg.s) * (1.0 + lambda_r * hh * pr / (1.0 + hh * pr + lambda_r)));
}

double
upper_bound_1(const ChannelRealization& c)
{
    const ChannelAggregates agg = compute_aggregates(c);
    return upper_bound_1(c, agg, dominant_eigenpair(agg.R).value);
}

double
upper_bound_2(const ChannelAggregates& agg, double lambda_rw)
{
    return std::log2(1.0 + agg.s + lambda_rw);
}

double
upper_bound_2(const ChannelRealization& c)
{
    const ChannelAggregates agg = compute_aggregates(c);
    return upper_bound_2(agg, dominant_eigenpair(agg.R + agg.W).value);
}

namespace {

LowerBoundMatrix
lower_matrix_from(const ChannelRealization& c, const ChannelAggregates& agg, const EigenPair& top)
{
    const double pr = c.unit_noise().relay_power;
    // tr(F (I + R) F^H) = gamma^2 v^H (I + R) v for the rank-one F
    const double load = 1.0 + quadratic_form(top.vector, agg.R);
    LowerBoundMatrix out;
    out.gamma = std::sqrt(pr / load);
    out.f = RelayMatrix(beam_towards_receiver(c, top.vector, out.gamma), c);
    return out;
}

} // namespace

LowerBoundMatrix
relay_matrix_lower(const ChannelRealization& c)
{
    require_relay_channel(c, "relay_matrix_lower");
    const ChannelAggregates agg = compute_aggregates(c);
    return lower_matrix_from(c, agg, dominant_eigenpair(agg.R + agg.W));
}

JointRateBounds
lower_bound(const ChannelRealization& c)
{
    const ChannelAggregates agg = compute_aggregates(c);
    const double lambda_r = dominant_eigenpair(agg.R).value;
    const EigenPair top = dominant_eigenpair(agg.R + agg.W);

    JointRateBounds out;
    out.r_up1 = upper_bound_1(c, agg, lambda_r);
    out.r_up2 = upper_bound_2(agg, top.value);

    if (c.relay_to_rx.is_zero())
    {
        out.f_lower = RelayMatrix::zero(c);
        out.gamma = 0.0;
        out.r_lower = std::log2(1.0 + agg.s);
        return out;
    }

    LowerBoundMatrix lm = lower_matrix_from(c, agg, top);
    const double hg = c.relay_to_rx.squared_norm() * lm.gamma * lm.gamma;
    out.f_lower = std::move(lm.f);
    out.gamma = lm.gamma;
    out.r_lower = std::log2(1.0 + agg.s + top.value * hg / (1.0 + hg));
    return out;
}

double
ub1_matrix_rate(const ChannelRealization& c)
{
    if (c.relay_to_rx.is_zero())
    {
        return sum_rate_closed(RelayMatrix::zero(c), c);
    }
    return sum_rate_closed(relay_matrix_ub1(c), c);
}

} // namespace marc

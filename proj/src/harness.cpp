#include "marc/harness.hpp"

#include "marc/errors.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <exception>
#include <mutex>
#include <ostream>
#include <thread>
#include <tuple>

namespace marc {

namespace {

constexpr int kMaxAttempts = 8;

double
mean_of(const std::vector<double>& xs)
{
    double acc = 0.0;
    for (double x : xs)
    {
        acc += x;
    }
    return acc / static_cast<double>(xs.size());
}

double
std_error_of(const std::vector<double>& xs, double mean)
{
    if (xs.size() < 2)
    {
        return 0.0;
    }
    double acc = 0.0;
    for (double x : xs)
    {
        acc += (x - mean) * (x - mean);
    }
    const double n = static_cast<double>(xs.size());
    return std::sqrt(acc / (n - 1.0) / n);
}

// Runs body(t) for t in [0, n) on `workers` threads. The first exception is
// rethrown on the calling thread after all workers stop.
template <typename Body>
void
parallel_for(int n, int workers, Body&& body)
{
    if (workers <= 0)
    {
        workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    }
    workers = std::min(workers, std::max(n, 1));
    if (workers == 1)
    {
        for (int t = 0; t < n; ++t)
        {
            body(t);
        }
        return;
    }

    std::atomic<int> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w)
    {
        pool.emplace_back([&] {
            for (;;)
            {
                const int t = next.fetch_add(1);
                if (t >= n || failed.load())
                {
                    return;
                }
                try
                {
                    body(t);
                }
                catch (...)
                {
                    std::lock_guard lock(error_mutex);
                    if (!error)
                    {
                        error = std::current_exception();
                    }
                    failed = true;
                }
            }
        });
    }
    for (auto& th : pool)
    {
        th.join();
    }
    if (error)
    {
        std::rethrow_exception(error);
    }
}

double
metric_value(const RealizationMetrics& m, Metric which)
{
    switch (which)
    {
    case Metric::joint_lower:
        return m.joint.r_lower;
    case Metric::joint_up1:
        return m.joint.r_up1;
    case Metric::joint_up2:
        return m.joint.r_up2;
    case Metric::joint_up_min:
        return m.joint.r_up_min();
    case Metric::tdma_sum_rate:
        return m.tdma.sum_rate;
    }
    return 0.0;
}

double
max_abs_difference(const HermitianMatrix& a, const HermitianMatrix& b)
{
    double worst = 0.0;
    for (std::size_t r = 0; r < a.size(); ++r)
    {
        for (std::size_t c = 0; c < a.size(); ++c)
        {
            worst = std::max(worst, std::abs(a(r, c) - b(r, c)));
        }
    }
    return worst;
}

} // namespace

// ---------------------------------------------------------------------------

RealizationMetrics
evaluate_realization(const ChannelRealization& c, double epsilon)
{
    c.validate();
    const ChannelAggregates agg = compute_aggregates(c);

    RealizationMetrics m;
    m.lambda_r = dominant_eigenpair(agg.R).value;
    m.lambda_rw = dominant_eigenpair(agg.R + agg.W).value;
    m.joint = lower_bound(c);
    m.joint_ub1_rate = ub1_matrix_rate(c);
    m.tdma = optimize_slots(c, epsilon);
    m.asymptotic = asymptotic_allocation(c, m.lambda_rw);
    m.joint_beats_tdma = joint_beats_tdma_asymptotic(c, m.lambda_rw);
    return m;
}

std::vector<std::string>
check_invariants(const ChannelRealization& c, const RealizationMetrics& m, double epsilon)
{
    std::vector<std::string> bad;
    auto expect = [&](bool ok, const std::string& what) {
        if (!ok)
        {
            bad.push_back(what);
        }
    };

    const JointRateBounds& j = m.joint;
    expect(j.r_lower >= 0.0 && j.r_up1 >= 0.0 && j.r_up2 >= 0.0, "negative joint rate");
    expect(j.r_lower <= j.r_up_min() + 1e-9, "joint lower bound exceeds an upper bound");
    expect(j.f_lower.feasible, "lower-bound relay matrix violates the relay power constraint");
    expect(std::abs(sum_rate_logdet(j.f_lower, c) - j.r_lower) <= 1e-9,
           "closed-form lower bound differs from the log-det rate of its matrix");
    expect(std::abs(sum_rate_logdet(j.f_lower, c) - sum_rate_closed(j.f_lower, c)) <= 1e-10,
           "log-det and aggregate sum-rate formulas disagree");

    const ChannelAggregates agg = compute_aggregates(c);
    const HermitianMatrix srt = agg.s * agg.R - agg.T;
    const double scale = std::max(1.0, agg.W.matrix().max_abs());
    expect(max_abs_difference(srt, agg.W) <= 1e-10 * scale, "s R - T differs from W");

    const TdmaAllocation& t = m.tdma;
    double tau_sum = 0.0;
    double rate_sum = 0.0;
    bool nonneg = true;
    for (std::size_t k = 0; k < t.tau.size(); ++k)
    {
        tau_sum += t.tau[k];
        rate_sum += t.per_user_rate[k];
        nonneg = nonneg && t.tau[k] >= 0.0 && t.per_user_rate[k] >= 0.0;
    }
    expect(nonneg, "negative slot length or user rate");
    expect(std::abs(tau_sum - 1.0) <= 1e-9, "slot lengths do not sum to one");
    expect(std::abs(rate_sum - t.sum_rate) <= 1e-9, "TDMA sum-rate differs from per-user sum");
    expect(t.kkt_spread <= epsilon, "TDMA marginal rates not equalized");

    expect(m.joint_beats_tdma == m.asymptotic.joint_wins,
           "asymptotic predicate disagrees with asymptotic rate comparison");
    return bad;
}

nlohmann::json
to_json(const RealizationMetrics& m)
{
    nlohmann::json j;
    j["joint"] = {{"r_lower", m.joint.r_lower},
                  {"r_up1", m.joint.r_up1},
                  {"r_up2", m.joint.r_up2},
                  {"r_up_min", m.joint.r_up_min()},
                  {"gamma", m.joint.gamma},
                  {"relay_tx_power", m.joint.f_lower.tx_power},
                  {"ub1_matrix_rate", m.joint_ub1_rate}};
    j["tdma"] = {{"tau", m.tdma.tau},
                 {"per_user_rate", m.tdma.per_user_rate},
                 {"sum_rate", m.tdma.sum_rate},
                 {"kkt_spread", m.tdma.kkt_spread},
                 {"iterations", m.tdma.iterations}};
    j["asymptotic"] = {{"tau_inf", m.asymptotic.tau_inf},
                       {"rate_inf", m.asymptotic.rate_inf},
                       {"joint_rate_inf", m.asymptotic.joint_rate_inf},
                       {"joint_wins", m.asymptotic.joint_wins}};
    j["joint_beats_tdma_asymptotic"] = m.joint_beats_tdma;
    j["lambda_max_R"] = m.lambda_r;
    j["lambda_max_R_plus_W"] = m.lambda_rw;
    return j;
}

// ---------------------------------------------------------------------------

void
SweepConfig::validate() const
{
    base.validate();
    if (n_trials < 1)
    {
        throw ValidationError("number of trials must be at least 1");
    }
    if (alpha_values.empty())
    {
        throw ValidationError("alpha grid is empty");
    }
    if (pr_grid_db.empty())
    {
        throw ValidationError("relay power grid is empty");
    }
    if (!(epsilon > 0.0))
    {
        throw ValidationError("epsilon must be positive");
    }
    for (double a : alpha_values)
    {
        if (!std::isfinite(a) || a < 0.0)
        {
            throw ValidationError("alpha values must be non-negative and finite");
        }
    }
    for (double p : pr_grid_db)
    {
        if (!std::isfinite(p))
        {
            throw ValidationError("relay power grid values must be finite");
        }
    }
    for (double p : pmax_grid_db)
    {
        if (!std::isfinite(p))
        {
            throw ValidationError("P_max grid values must be finite");
        }
    }
}

const char*
metric_name(Metric m)
{
    switch (m)
    {
    case Metric::joint_lower:
        return "joint_lower";
    case Metric::joint_up1:
        return "joint_up1";
    case Metric::joint_up2:
        return "joint_up2";
    case Metric::joint_up_min:
        return "joint_up_min";
    case Metric::tdma_sum_rate:
        return "tdma_sum_rate";
    }
    return "?";
}

SweepResult
run_sweep(const SweepConfig& cfg)
{
    cfg.validate();
    const std::size_t n_alpha = cfg.alpha_values.size();
    const std::size_t n_pr = cfg.pr_grid_db.size();
    constexpr std::size_t n_metric = std::size(kAllMetrics);
    const auto n_trials = static_cast<std::size_t>(cfg.n_trials);

    struct TrialOutcome
    {
        std::vector<double> values; // [alpha][pr][metric]
        int resampled = 0;
        int degenerate = 0;
    };
    std::vector<TrialOutcome> outcomes(n_trials);

    parallel_for(cfg.n_trials, cfg.workers, [&](int t) {
        TrialOutcome& out = outcomes[static_cast<std::size_t>(t)];
        out.values.assign(n_alpha * n_pr * n_metric, 0.0);
        for (std::size_t a = 0; a < n_alpha; ++a)
        {
            ScenarioConfig sc = cfg.base;
            sc.alpha = cfg.alpha_values[a];
            for (int attempt = 0;; ++attempt)
            {
                RandomStream stream(cfg.base.seed, static_cast<std::uint64_t>(t),
                                    static_cast<std::uint64_t>(attempt));
                ChannelRealization c = sample_channel(sc, stream);
                try
                {
                    for (std::size_t p = 0; p < n_pr; ++p)
                    {
                        c.relay_power = cfg.base.noise * db_to_linear(cfg.pr_grid_db[p]);
                        const RealizationMetrics m = evaluate_realization(c, cfg.epsilon);
                        for (std::size_t q = 0; q < n_metric; ++q)
                        {
                            out.values[(a * n_pr + p) * n_metric + q] =
                                metric_value(m, kAllMetrics[q]);
                        }
                    }
                    if (c.relay_to_rx.is_zero())
                    {
                        ++out.degenerate;
                    }
                    break;
                }
                catch (const NumericalError&)
                {
                    if (attempt + 1 >= kMaxAttempts)
                    {
                        throw;
                    }
                    ++out.resampled;
                }
            }
        }
    });

    SweepResult result;
    std::vector<double> column(n_trials);
    for (std::size_t a = 0; a < n_alpha; ++a)
    {
        for (std::size_t p = 0; p < n_pr; ++p)
        {
            for (std::size_t q = 0; q < n_metric; ++q)
            {
                for (std::size_t t = 0; t < n_trials; ++t)
                {
                    column[t] = outcomes[t].values[(a * n_pr + p) * n_metric + q];
                }
                SweepRow row;
                row.alpha = cfg.alpha_values[a];
                row.pr_db = cfg.pr_grid_db[p];
                row.metric = kAllMetrics[q];
                row.mean = mean_of(column);
                row.std_error = std_error_of(column, row.mean);
                row.n_trials = cfg.n_trials;
                row.seed = cfg.base.seed;
                result.rows.push_back(row);
            }
        }
    }
    for (const auto& o : outcomes)
    {
        result.resampled_trials += o.resampled;
        result.degenerate_draws += o.degenerate;
    }

    std::stable_sort(result.rows.begin(), result.rows.end(),
                     [](const SweepRow& x, const SweepRow& y) {
                         if (x.alpha != y.alpha)
                         {
                             return x.alpha < y.alpha;
                         }
                         if (x.pr_db != y.pr_db)
                         {
                             return x.pr_db < y.pr_db;
                         }
                         return std::strcmp(metric_name(x.metric), metric_name(y.metric)) < 0;
                     });
    return result;
}

std::vector<ProbabilityRow>
estimate_superiority_probability(const SweepConfig& cfg)
{
    cfg.validate();
    if (cfg.pmax_grid_db.empty())
    {
        throw ValidationError("P_max grid is empty");
    }
    const std::size_t n_alpha = cfg.alpha_values.size();
    const std::size_t n_pmax = cfg.pmax_grid_db.size();
    const auto n_trials = static_cast<std::size_t>(cfg.n_trials);

    // wins[t][alpha][pmax]
    std::vector<std::vector<char>> wins(n_trials);
    parallel_for(cfg.n_trials, cfg.workers, [&](int t) {
        auto& row = wins[static_cast<std::size_t>(t)];
        row.assign(n_alpha * n_pmax, 0);
        for (std::size_t a = 0; a < n_alpha; ++a)
        {
            for (std::size_t p = 0; p < n_pmax; ++p)
            {
                ScenarioConfig sc = cfg.base;
                sc.alpha = cfg.alpha_values[a];
                sc.p_max = cfg.base.noise * db_to_linear(cfg.pmax_grid_db[p]);
                for (int attempt = 0;; ++attempt)
                {
                    RandomStream stream(cfg.base.seed, static_cast<std::uint64_t>(t),
                                        static_cast<std::uint64_t>(attempt));
                    const ChannelRealization c = sample_channel(sc, stream);
                    try
                    {
                        row[a * n_pmax + p] = joint_beats_tdma_asymptotic(c) ? 1 : 0;
                        break;
                    }
                    catch (const NumericalError&)
                    {
                        if (attempt + 1 >= kMaxAttempts)
                        {
                            throw;
                        }
                    }
                }
            }
        }
    });

    std::vector<ProbabilityRow> out;
    for (std::size_t a = 0; a < n_alpha; ++a)
    {
        for (std::size_t p = 0; p < n_pmax; ++p)
        {
            int count = 0;
            for (std::size_t t = 0; t < n_trials; ++t)
            {
                count += wins[t][a * n_pmax + p];
            }
            ProbabilityRow r;
            r.alpha = cfg.alpha_values[a];
            r.pmax_db = cfg.pmax_grid_db[p];
            r.n_trials = cfg.n_trials;
            r.probability = static_cast<double>(count) / static_cast<double>(cfg.n_trials);
            r.std_error = std::sqrt(r.probability * (1.0 - r.probability) /
                                    static_cast<double>(cfg.n_trials));
            r.seed = cfg.base.seed;
            out.push_back(r);
        }
    }
    std::stable_sort(out.begin(), out.end(), [](const ProbabilityRow& x, const ProbabilityRow& y) {
        return std::tie(x.alpha, x.pmax_db) < std::tie(y.alpha, y.pmax_db);
    });
    return out;
}

// ---------------------------------------------------------------------------

std::string
format_number(double x)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", x);
    return buf;
}

void
write_sweep_csv(const SweepResult& result, std::ostream& out)
{
    out << "alpha,pr_db,metric,mean,stderr,n_trials,seed\n";
    for (const auto& r : result.rows)
    {
        out << format_number(r.alpha) << ',' << format_number(r.pr_db) << ','
            << metric_name(r.metric) << ',' << format_number(r.mean) << ','
            << format_number(r.std_error) << ',' << r.n_trials << ',' << r.seed << '\n';
    }
}

void
write_probability_csv(const std::vector<ProbabilityRow>& rows, std::ostream& out)
{
    out << "alpha,pmax_db,probability,stderr,n_trials,seed\n";
    for (const auto& r : rows)
    {
        out << format_number(r.alpha) << ',' << format_number(r.pmax_db) << ','
            << format_number(r.probability) << ',' << format_number(r.std_error) << ','
            << r.n_trials << ',' << r.seed << '\n';
    }
}

namespace {

double
parse_number(const std::string& text, const std::string& spec)
{
    std::size_t used = 0;
    double value = 0.0;
    try
    {
        value = std::stod(text, &used);
    }
    catch (const std::exception&)
    {
        used = 0;
    }
    if (used == 0 || used != text.size() || !std::isfinite(value))
    {
        throw ValidationError("bad range spec '" + spec + "'");
    }
    return value;
}

} // namespace

std::vector<double>
parse_range(const std::string& spec)
{
    const auto first = spec.find(':');
    if (first == std::string::npos)
    {
        return {parse_number(spec, spec)};
    }
    const auto second = spec.find(':', first + 1);
    if (second == std::string::npos || spec.find(':', second + 1) != std::string::npos)
    {
        throw ValidationError("range spec must be lo:hi:step, got '" + spec + "'");
    }
    const double lo = parse_number(spec.substr(0, first), spec);
    const double hi = parse_number(spec.substr(first + 1, second - first - 1), spec);
    const double step = parse_number(spec.substr(second + 1), spec);
    if (!(step > 0.0) || hi < lo)
    {
        throw ValidationError("range spec needs step > 0 and hi >= lo, got '" + spec + "'");
    }
    const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
    std::vector<double> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i)
    {
        out.push_back(lo + static_cast<double>(i) * step);
    }
    return out;
}

} // namespace marc

#pragma once

#include "marc/channel.hpp"
#include "marc/joint.hpp"
#include "marc/tdma.hpp"

#include <json.hpp>

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace marc {

/// Everything computed for one realization.
struct RealizationMetrics
{
    JointRateBounds joint;
    double joint_ub1_rate = 0.0; ///< rate of the upper-bound-1 matrix, diagnostic only
    TdmaAllocation tdma;
    AsymptoticResult asymptotic;
    bool joint_beats_tdma = false;
    double lambda_r = 0.0;
    double lambda_rw = 0.0;
};

RealizationMetrics evaluate_realization(const ChannelRealization& c,
                                        double epsilon = kDefaultSlotEpsilon);

/// Cross-checks between the metrics of one realization. Returns one message
/// per violated invariant, empty when everything holds.
std::vector<std::string> check_invariants(const ChannelRealization& c,
                                          const RealizationMetrics& m, double epsilon);

nlohmann::json to_json(const RealizationMetrics& m);

struct SweepConfig
{
    ScenarioConfig base;
    std::vector<double> alpha_values{0.1, 0.3, 1.0};
    std::vector<double> pr_grid_db{0.0, 10.0, 20.0, 30.0, 40.0};
    std::vector<double> pmax_grid_db{0.0, 10.0, 20.0}; ///< used by the probability table
    int n_trials = 1000;
    double epsilon = kDefaultSlotEpsilon;
    int workers = 1;
    std::string output_path;

    void validate() const;
};

enum class Metric
{
    joint_lower,
    joint_up1,
    joint_up2,
    joint_up_min,
    tdma_sum_rate,
};

const char* metric_name(Metric m);
inline constexpr Metric kAllMetrics[] = {Metric::joint_lower, Metric::joint_up1,
                                         Metric::joint_up2, Metric::joint_up_min,
                                         Metric::tdma_sum_rate};

struct SweepRow
{
    double alpha = 0.0;
    double pr_db = 0.0;
    Metric metric = Metric::joint_lower;
    double mean = 0.0;
    double std_error = 0.0;
    int n_trials = 0;
    std::uint64_t seed = 0;
};

struct SweepResult
{
    std::vector<SweepRow> rows; ///< sorted by (alpha, pr_db, metric name)
    int resampled_trials = 0;   ///< trials redrawn after a numerical failure
    int degenerate_draws = 0;   ///< draws with a zero relay-to-receiver channel
};

/**
 * Monte Carlo averages over the (alpha, P_r) grid.
 *
 * Trial t uses the random stream (seed, t), shared by every grid cell, so all
 * cells see the same underlying fading and power draws. A trial whose
 * evaluation throws NumericalError is redrawn from (seed, t, attempt) and
 * counted in resampled_trials. Output does not depend on cfg.workers.
 */
SweepResult run_sweep(const SweepConfig& cfg);

struct ProbabilityRow
{
    double alpha = 0.0;
    double pmax_db = 0.0;
    double probability = 0.0;
    double std_error = 0.0; ///< binomial
    int n_trials = 0;
    std::uint64_t seed = 0;
};

/// Fraction of draws where joint relaying wins as P_r -> inf, over (alpha, P_max).
std::vector<ProbabilityRow> estimate_superiority_probability(const SweepConfig& cfg);

void write_sweep_csv(const SweepResult& result, std::ostream& out);
void write_probability_csv(const std::vector<ProbabilityRow>& rows, std::ostream& out);

/// printf-style %.10g
std::string format_number(double x);

/// "lo:hi:step" (inclusive) or a single number.
std::vector<double> parse_range(const std::string& spec);

} // namespace marc

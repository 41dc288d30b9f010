// marc-sim: sum-rate simulator for the multiple-access channel with a
// multi-antenna amplify-and-forward relay and direct links.
//
//   marc-sim sample --users 3 --antennas 2 --alpha 0.3 --seed 7 --out c.json
//   marc-sim eval c.json
//   marc-sim sweep --alpha 0.1 --alpha 1 --pr-db 0:40:10 --trials 1000 --out fig2.csv
//   marc-sim prob --alpha 0.1 --alpha 0.3 --alpha 1 --pmax-db 0:20:10 --out fig3.csv
//   marc-sim check --trials 500
//
// Exit codes: 0 success, 1 validation error, 2 numerical failure, 3 I/O failure.

#include "marc/channel_json.hpp"
#include "marc/errors.hpp"
#include "marc/harness.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

enum ExitCode
{
    kOk = 0,
    kValidation = 1,
    kNumerical = 2,
    kIo = 3,
};

struct Options
{
    int users = 10;
    int antennas = 4;
    std::vector<double> alpha;
    std::vector<std::string> pr_db;
    std::vector<std::string> pmax_db;
    int trials = 1000;
    std::uint64_t seed = 1;
    std::uint64_t trial = 0;
    double epsilon = marc::kDefaultSlotEpsilon;
    int workers = 1;
    std::string out;
    std::string input;
};

void
add_scenario_flags(CLI::App* cmd, Options& o)
{
    cmd->add_option("--users", o.users, "number of users K")->check(CLI::PositiveNumber);
    cmd->add_option("--antennas", o.antennas, "relay antennas M_r")->check(CLI::PositiveNumber);
    cmd->add_option("--alpha", o.alpha, "direct-link strength (repeatable)");
    cmd->add_option("--pmax-db", o.pmax_db, "P_max/N0 in dB, value or lo:hi:step");
    cmd->add_option("--seed", o.seed, "base random seed");
    cmd->add_option("--out", o.out, "output path (default: stdout)");
}

std::vector<double>
expand(const std::vector<std::string>& specs, std::vector<double> fallback)
{
    if (specs.empty())
    {
        return fallback;
    }
    std::vector<double> out;
    for (const auto& s : specs)
    {
        for (double v : marc::parse_range(s))
        {
            out.push_back(v);
        }
    }
    return out;
}

double
single(const std::vector<double>& values, const char* flag)
{
    if (values.size() != 1)
    {
        throw marc::ValidationError(std::string(flag) + " takes a single value here");
    }
    return values.front();
}

// Writes to --out when given, otherwise stdout.
template <typename Writer>
void
emit(const std::string& path, Writer&& write)
{
    if (path.empty() || path == "-")
    {
        write(std::cout);
        std::cout.flush();
        if (!std::cout)
        {
            throw marc::IoError("failed writing to stdout");
        }
        return;
    }
    std::ofstream file(path, std::ios::binary);
    if (!file)
    {
        throw marc::IoError("cannot open '" + path + "' for writing");
    }
    write(file);
    file.close();
    if (!file)
    {
        throw marc::IoError("failed writing '" + path + "'");
    }
}

marc::SweepConfig
sweep_config(const Options& o)
{
    marc::SweepConfig cfg;
    cfg.base.users = o.users;
    cfg.base.relay_antennas = o.antennas;
    cfg.base.seed = o.seed;
    cfg.base.noise = 1.0;
    if (!o.alpha.empty())
    {
        cfg.alpha_values = o.alpha;
    }
    cfg.pr_grid_db = expand(o.pr_db, cfg.pr_grid_db);
    cfg.pmax_grid_db = expand(o.pmax_db, cfg.pmax_grid_db);
    cfg.n_trials = o.trials;
    cfg.epsilon = o.epsilon;
    cfg.workers = o.workers;
    cfg.output_path = o.out;
    return cfg;
}

int
run_sample(const Options& o)
{
    marc::ScenarioConfig sc;
    sc.users = o.users;
    sc.relay_antennas = o.antennas;
    sc.seed = o.seed;
    sc.alpha = o.alpha.empty() ? 1.0 : single(o.alpha, "--alpha");
    sc.p_max = marc::db_to_linear(single(expand(o.pmax_db, {10.0}), "--pmax-db"));
    sc.relay_power = marc::db_to_linear(single(expand(o.pr_db, {20.0}), "--pr-db"));
    marc::RandomStream stream(sc.seed, o.trial);
    const marc::ChannelRealization c = marc::sample_channel(sc, stream);
    emit(o.out, [&](std::ostream& os) { os << marc::dump_realization(c) << '\n'; });
    return kOk;
}

int
run_eval(const Options& o)
{
    marc::ChannelRealization c;
    if (o.input == "-")
    {
        nlohmann::json j;
        try
        {
            std::cin >> j;
        }
        catch (const nlohmann::json::parse_error& e)
        {
            throw marc::ValidationError(std::string("stdin is not valid JSON: ") + e.what());
        }
        c = marc::realization_from_json(j);
    }
    else
    {
        c = marc::read_realization_file(o.input);
    }
    const marc::RealizationMetrics m = marc::evaluate_realization(c, o.epsilon);
    emit(o.out, [&](std::ostream& os) { os << marc::to_json(m).dump(2) << '\n'; });
    return kOk;
}

int
run_sweep(const Options& o)
{
    marc::SweepConfig cfg = sweep_config(o);
    cfg.base.p_max = marc::db_to_linear(single(expand(o.pmax_db, {10.0}), "--pmax-db"));
    const marc::SweepResult result = marc::run_sweep(cfg);
    emit(o.out, [&](std::ostream& os) { marc::write_sweep_csv(result, os); });
    std::cerr << "sweep: " << result.rows.size() << " rows, resampled_trials="
              << result.resampled_trials << ", degenerate_draws=" << result.degenerate_draws
              << '\n';
    return kOk;
}

int
run_prob(const Options& o)
{
    const marc::SweepConfig cfg = sweep_config(o);
    const auto rows = marc::estimate_superiority_probability(cfg);
    emit(o.out, [&](std::ostream& os) { marc::write_probability_csv(rows, os); });
    return kOk;
}

int
run_check(const Options& o)
{
    marc::ScenarioConfig sc;
    sc.users = o.users;
    sc.relay_antennas = o.antennas;
    sc.seed = o.seed;
    const std::vector<double> alphas = o.alpha.empty() ? std::vector<double>{0.0, 0.3, 1.0}
                                                       : o.alpha;
    const std::vector<double> prs = expand(o.pr_db, {0.0, 20.0, 40.0});
    sc.p_max = marc::db_to_linear(single(expand(o.pmax_db, {10.0}), "--pmax-db"));

    int checked = 0;
    int failures = 0;
    for (int t = 0; t < o.trials; ++t)
    {
        sc.alpha = alphas[static_cast<std::size_t>(t) % alphas.size()];
        sc.relay_power = marc::db_to_linear(prs[static_cast<std::size_t>(t / alphas.size()) %
                                                prs.size()]);
        marc::RandomStream stream(sc.seed, static_cast<std::uint64_t>(t));
        const marc::ChannelRealization c = marc::sample_channel(sc, stream);
        const marc::RealizationMetrics m = marc::evaluate_realization(c, o.epsilon);
        const auto bad = marc::check_invariants(c, m, o.epsilon);
        ++checked;
        if (!bad.empty())
        {
            ++failures;
            for (const auto& msg : bad)
            {
                std::cerr << "trial " << t << ": " << msg << '\n';
            }
        }
    }
    std::ostringstream summary;
    summary << "checked " << checked << " instances, " << failures << " with violations\n";
    emit(o.out, [&](std::ostream& os) { os << summary.str(); });
    return failures == 0 ? kOk : kNumerical;
}

} // namespace

int
main(int argc, char** argv)
{
    CLI::App app{"Sum-rate simulator for the multiple-access relay channel"};
    app.require_subcommand(1);
    Options o;

    auto* sample = app.add_subcommand("sample", "emit one channel realization as JSON");
    add_scenario_flags(sample, o);
    sample->add_option("--pr-db", o.pr_db, "P_r/N0 in dB");
    sample->add_option("--trial", o.trial, "trial index of the random substream");

    auto* eval = app.add_subcommand("eval", "metrics for a JSON realization");
    eval->add_option("realization", o.input, "realization JSON file, '-' for stdin")->required();
    eval->add_option("--epsilon", o.epsilon, "KKT tolerance for slot optimization");
    eval->add_option("--out", o.out, "output path (default: stdout)");

    auto* sweep = app.add_subcommand("sweep", "average sum-rates over an (alpha, P_r) grid, CSV");
    add_scenario_flags(sweep, o);
    sweep->add_option("--pr-db", o.pr_db, "P_r/N0 grid in dB, lo:hi:step (repeatable)");
    sweep->add_option("--trials", o.trials, "realizations per cell")->check(CLI::PositiveNumber);
    sweep->add_option("--epsilon", o.epsilon, "KKT tolerance for slot optimization");
    sweep->add_option("--workers", o.workers, "threads (0 = all cores)");

    auto* prob = app.add_subcommand("prob", "probability that joint relaying wins as P_r -> inf");
    add_scenario_flags(prob, o);
    prob->add_option("--trials", o.trials, "realizations per cell")->check(CLI::PositiveNumber);
    prob->add_option("--workers", o.workers, "threads (0 = all cores)");

    auto* check = app.add_subcommand("check", "run the invariant suite on random instances");
    add_scenario_flags(check, o);
    check->add_option("--pr-db", o.pr_db, "P_r/N0 values in dB cycled over instances");
    check->add_option("--trials", o.trials, "number of instances")->check(CLI::PositiveNumber);
    check->add_option("--epsilon", o.epsilon, "KKT tolerance for slot optimization");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::Success& e)
    {
        return app.exit(e);
    }
    catch (const CLI::ParseError& e)
    {
        app.exit(e);
        return kValidation;
    }

    try
    {
        if (*sample)
        {
            return run_sample(o);
        }
        if (*eval)
        {
            return run_eval(o);
        }
        if (*sweep)
        {
            return run_sweep(o);
        }
        if (*prob)
        {
            return run_prob(o);
        }
        if (*check)
        {
            return run_check(o);
        }
    }
    catch (const marc::ValidationError& e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return kValidation;
    }
    catch (const marc::NumericalError& e)
    {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kNumerical;
    }
    catch (const marc::IoError& e)
    {
        std::cerr << "I/O error: " << e.what() << '\n';
        return kIo;
    }
    return kOk;
}

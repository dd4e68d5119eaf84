// Command-line front end: closed-form analysis, simulation, routing
// optimization and the reproduction presets.
//
// Exit codes: 0 success, 2 invalid input, 3 numerical failure.

#include "aoi/analytic.hpp"
#include "aoi/errors.hpp"
#include "aoi/optimize.hpp"
#include "aoi/report.hpp"
#include "aoi/simulate.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace {

constexpr int kExitInvalid = 2;
constexpr int kExitNumerical = 3;

struct CommonArgs
{
    std::vector<double> mus;
    std::vector<double> alphas;
    double lambda = 0.0;
    std::uint64_t seed = 1;
    std::optional<std::uint64_t> packets;
    bool json = false;
    std::string out;
    std::string config;
};

void add_output_flags(CLI::App* cmd, CommonArgs& a)
{
    cmd->add_flag("--json", a.json, "Emit JSON instead of CSV");
    cmd->add_option("--out", a.out, "Write output to this path instead of stdout");
    cmd->add_option("--config", a.config, "key=value file supplying defaults for unset flags");
}

void add_system_flags(CLI::App* cmd, CommonArgs& a)
{
    cmd->add_option("--mus", a.mus, "Service rates, comma separated")->delimiter(',');
    cmd->add_option("--alphas", a.alphas, "Routing probabilities, comma separated")->delimiter(',');
    cmd->add_option("--lambda", a.lambda, "Total arrival rate");
}

std::map<std::string, std::string> read_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw aoi::InvalidInput("cannot open config file " + path);
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            continue;
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
        };
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return kv;
}

/// Flags given on the command line win; config entries fill only unset options.
void apply_config(CLI::App* cmd, const std::string& path)
{
    if (path.empty())
        return;
    const auto kv = read_config(path);
    for (CLI::Option* opt : cmd->get_options()) {
        const std::string name = opt->get_lnames().empty() ? "" : opt->get_lnames().front();
        if (name.empty() || name == "config" || opt->count() > 0)
            continue;
        if (auto it = kv.find(name); it != kv.end()) {
            opt->add_result(it->second);
            opt->run_callback();
        }
    }
}

void emit(const aoi::report::Table& table, const CommonArgs& a)
{
    const std::string text = a.json ? aoi::report::to_json(table) : aoi::report::to_csv(table);
    if (a.out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream os(a.out);
    if (!os)
        throw aoi::InvalidInput("cannot open output file " + a.out);
    os << text;
}

aoi::SystemConfig system_from(const CommonArgs& a)
{
    aoi::SystemConfig c{a.lambda, a.alphas, a.mus};
    if (c.alphas.empty() && c.mus.size() == 1)
        c.alphas = {1.0};
    return c;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Average age of information for parallel FCFS servers with random routing"};
    app.require_subcommand(1);

    CommonArgs args;

    auto* analyze = app.add_subcommand("analyze", "Exact and gamma-approximate average age");
    add_system_flags(analyze, args);
    add_output_flags(analyze, args);

    auto* simulate = app.add_subcommand("simulate", "Discrete-event simulation of the system");
    std::optional<double> horizon;
    double warmup = 0.1;
    int reps = 1;
    unsigned threads = 0;
    std::string trace_path;
    add_system_flags(simulate, args);
    simulate->add_option("--seed", args.seed, "Base seed");
    simulate->add_option("--packets", args.packets, "Stop after this many departures");
    simulate->add_option("--horizon", horizon, "Stop at this simulated time");
    simulate->add_option("--warmup", warmup, "Fraction of the run excluded from statistics");
    simulate->add_option("--reps", reps, "Independent replicates");
    simulate->add_option("--threads", threads, "Worker threads for replicates (0 = all cores)");
    simulate->add_option("--trace", trace_path, "Write one CSV record per departure to this path");
    add_output_flags(simulate, args);

    auto* optimize = app.add_subcommand("optimize", "Optimal arrival rate and routing");
    std::string mode = "approx";
    std::optional<double> budget;
    optimize->add_option("--mus", args.mus, "Service rates, comma separated")->delimiter(',');
    optimize->add_option("--mode", mode, "approx (every server at rho*) or exact (numerical)")
        ->check(CLI::IsMember({"approx", "exact"}));
    optimize->add_option("--budget", budget, "Upper bound on the total arrival rate (exact mode)");
    add_output_flags(optimize, args);

    auto* table1 = app.add_subcommand("table1", "Symmetric mu=20 pair: simulated vs approximate age");
    table1->add_option("--seed", args.seed, "Base seed");
    table1->add_option("--packets", args.packets, "Departures per simulated row (default 1000000)");
    table1->add_option("--threads", threads, "Worker threads (0 = all cores)");
    add_output_flags(table1, args);

    auto* table2 = app.add_subcommand("table2", "mu=(25,15) split sweep: exact vs approximate age");
    table2->add_option("--seed", args.seed, "Base seed");
    table2->add_option("--packets", args.packets, "Add a simulated column with this many departures");
    table2->add_option("--threads", threads, "Worker threads (0 = all cores)");
    add_output_flags(table2, args);

    auto* fig3 = app.add_subcommand("fig3", "Minimum exact age versus number of unit-rate servers");
    std::size_t n_max = 7;
    fig3->add_option("--n-max", n_max, "Largest server count (1..10)");
    add_output_flags(fig3, args);

    auto* dist = app.add_subcommand("dist-compare", "Exact, gamma and simulated age densities");
    double dist_mu = 0.0;
    aoi::report::DistCompareOptions dist_opts;
    dist->add_option("--lambda", args.lambda, "Arrival rate")->required();
    dist->add_option("--mu", dist_mu, "Service rate")->required();
    dist->add_option("--seed", dist_opts.seed, "Seed");
    dist->add_option("--samples", dist_opts.samples, "Simulated departures / histogram samples");
    dist->add_option("--grid-points", dist_opts.grid_points, "Points on the output grid");
    dist->add_option("--bins", dist_opts.bins, "Histogram bins");
    add_output_flags(dist, args);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitInvalid;
    }

    try {
        for (CLI::App* sub : app.get_subcommands())
            apply_config(sub, args.config);

        namespace rp = aoi::report;
        if (analyze->parsed()) {
            emit(rp::analyze_table(system_from(args)), args);
        } else if (simulate->parsed()) {
            aoi::SimConfig sim;
            sim.system = system_from(args);
            sim.seed = args.seed;
            sim.warmup_fraction = warmup;
            sim.horizon = horizon;
            if (!horizon)
                sim.departures = args.packets.value_or(1'000'000);
            else if (args.packets)
                throw aoi::InvalidInput("give either --packets or --horizon, not both");
            if (sim.system.unstable())
                std::cerr << "warning: unstable server; results describe a transient\n";
            if (reps > 1) {
                if (!trace_path.empty())
                    throw aoi::InvalidInput("--trace requires a single replicate");
                emit(rp::replicate_table(aoi::replicate(sim, reps, threads)), args);
            } else {
                if (reps < 1)
                    throw aoi::InvalidInput("replicate count must be at least 1");
                std::ofstream trace;
                aoi::DepartureObserver observer;
                if (!trace_path.empty()) {
                    trace.open(trace_path);
                    if (!trace)
                        throw aoi::InvalidInput("cannot open trace file " + trace_path);
                    aoi::write_trace_header(trace);
                    observer = [&](const aoi::DepartureRecord& r) { aoi::write_trace_record(trace, r); };
                }
                emit(rp::simulate_table(aoi::run(sim, observer)), args);
            }
        } else if (optimize->parsed()) {
            aoi::RoutingSolution sol;
            if (mode == "approx") {
                if (budget)
                    throw aoi::InvalidInput("--budget applies to exact mode only");
                sol = aoi::optimal_routing_approx(args.mus);
            } else {
                aoi::MinimizeOptions opts;
                opts.budget = budget;
                sol = aoi::minimize_exact(args.mus, opts);
            }
            emit(rp::optimize_table(sol, mode), args);
        } else if (table1->parsed()) {
            const auto rows = rp::symmetric_sweep_rows(args.seed, args.packets.value_or(1'000'000), threads);
            emit(rp::symmetric_sweep_table(rows), args);
        } else if (table2->parsed()) {
            const auto rows = rp::split_sweep_rows(args.seed, args.packets.value_or(0), threads);
            emit(rp::split_sweep_table(rows), args);
        } else if (fig3->parsed()) {
            emit(rp::server_count_table(rp::server_count_sweep(n_max)), args);
        } else if (dist->parsed()) {
            emit(rp::dist_compare_table(rp::dist_compare(args.lambda, dist_mu, dist_opts)), args);
        }
    } catch (const aoi::InvalidInput& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInvalid;
    } catch (const aoi::NumericalFailure& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumerical;
    }
    return 0;
}

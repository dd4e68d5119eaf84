#include "aoi/report.hpp"

#include "aoi/errors.hpp"

#include "json.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <thread>

namespace aoi::report {

namespace {

std::string format(const char* spec, int digits, double v)
{
    if (std::isnan(v))
        return "nan";
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, digits, v);
    return buf;
}

/// Runs body(i) for i in [0, count) on up to `threads` workers.
template <typename Body>
void parallel_for(std::size_t count, unsigned threads, Body body)
{
    if (threads == 0)
        threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(count, 1)));
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < count; i = next++)
            body(i);
    };
    std::vector<std::jthread> pool;
    for (unsigned t = 1; t < threads; ++t)
        pool.emplace_back(worker);
    worker();
}

ReportRow make_row(std::vector<double> inputs, double reference, double approximate)
{
    ReportRow row;
    row.inputs = std::move(inputs);
    row.reference = rounded(reference, kTableDecimals);
    row.approximate = rounded(approximate, kTableDecimals);
    row.percent_error = rounded(percent_error(row.reference, row.approximate), kPercentDecimals);
    return row;
}

SystemConfig split_config(double lambda1, double lambda2)
{
    const double total = lambda1 + lambda2;
    return SystemConfig{total, {lambda1 / total, lambda2 / total},
                        {kSplitSweepMus[0], kSplitSweepMus[1]}};
}

}  // namespace

Cell Cell::number(double v, int significant) { return {format("%.*g", significant, v), true}; }
Cell Cell::fixed(double v, int decimals) { return {format("%.*f", decimals, v), true}; }
Cell Cell::integer(std::uint64_t v) { return {std::to_string(v), true}; }
Cell Cell::label(std::string s) { return {std::move(s), false}; }

double Cell::value() const
{
    if (text == "nan")
        return std::numeric_limits<double>::quiet_NaN();
    return std::stod(text);
}

void Table::add(std::string metric, Cell value)
{
    rows.push_back({Cell::label(std::move(metric)), std::move(value)});
}

std::string to_csv(const Table& table)
{
    std::ostringstream os;
    for (std::size_t c = 0; c < table.columns.size(); ++c)
        os << (c ? "," : "") << table.columns[c];
    os << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t c = 0; c < row.size(); ++c)
            os << (c ? "," : "") << row[c].text;
        os << '\n';
    }
    return os.str();
}

std::string to_json(const Table& table)
{
    auto cell_json = [](const Cell& cell) -> nlohmann::json {
        if (!cell.numeric)
            return cell.text;
        const double v = cell.value();
        if (std::isnan(v))
            return nullptr;
        if (cell.text.find_first_of(".eEn") == std::string::npos)
            return std::stoll(cell.text);
        return v;
    };
    nlohmann::json out;
    if (table.key_value) {
        out = nlohmann::json::object();
        for (const auto& row : table.rows)
            out[row.at(0).text] = cell_json(row.at(1));
    } else {
        out = nlohmann::json::array();
        for (const auto& row : table.rows) {
            nlohmann::json obj = nlohmann::json::object();
            for (std::size_t c = 0; c < row.size(); ++c)
                obj[table.columns.at(c)] = cell_json(row[c]);
            out.push_back(std::move(obj));
        }
    }
    return out.dump(2) + "\n";
}

double percent_error(double reference, double approximate)
{
    return 100.0 * std::abs(reference - approximate) / approximate;
}

double rounded(double v, int decimals) { return std::stod(format("%.*f", decimals, v)); }

std::vector<ReportRow> symmetric_sweep_rows(std::uint64_t seed, std::uint64_t packets, unsigned threads)
{
    std::vector<ReportRow> rows(kSymmetricSweepLambdas.size());
    parallel_for(rows.size(), threads, [&](std::size_t i) {
        const double lambda = kSymmetricSweepLambdas[i];
        SimConfig sim;
        sim.system = SystemConfig{lambda, {0.5, 0.5}, {kSymmetricSweepMu, kSymmetricSweepMu}};
        sim.departures = packets;
        sim.seed = seed;
        const double empirical = run(sim).mean_aoi;
        const auto theta = theta_of(ServerLoad::from_rates(lambda / 2.0, kSymmetricSweepMu));
        rows[i] = make_row({lambda}, empirical, approx_mean_two(theta, theta));
    });
    return rows;
}

Table symmetric_sweep_table(const std::vector<ReportRow>& rows)
{
    Table t;
    t.columns = {"lambda", "empirical_aoi", "approximate_aoi", "percent_error"};
    for (const auto& r : rows)
        t.rows.push_back({Cell::number(r.inputs.at(0)), Cell::fixed(r.reference, kTableDecimals),
                          Cell::fixed(r.approximate, kTableDecimals),
                          Cell::fixed(r.percent_error, kPercentDecimals)});
    return t;
}

std::vector<ReportRow> split_sweep_rows(std::uint64_t seed, std::uint64_t packets, unsigned threads)
{
    std::vector<ReportRow> rows(kSplitSweepRates.size());
    parallel_for(rows.size(), threads, [&](std::size_t i) {
        const auto [l1, l2] = kSplitSweepRates[i];
        const std::array<ServerLoad, 2> loads{ServerLoad::from_rates(l1, kSplitSweepMus[0]),
                                              ServerLoad::from_rates(l2, kSplitSweepMus[1])};
        ReportRow row = make_row({l1, l2}, exact_mean(loads),
                                 approx_mean_two(theta_of(loads[0]), theta_of(loads[1])));
        if (packets > 0) {
            SimConfig sim;
            sim.system = split_config(l1, l2);
            sim.departures = packets;
            sim.seed = seed;
            row.simulated = rounded(run(sim).mean_aoi, kTableDecimals);
        }
        rows[i] = std::move(row);
    });
    return rows;
}

Table split_sweep_table(const std::vector<ReportRow>& rows)
{
    Table t;
    t.columns = {"lambda1", "lambda2", "actual_aoi", "approximate_aoi", "percent_error"};
    const bool simulated = !rows.empty() && rows.front().simulated.has_value();
    if (simulated)
        t.columns.push_back("simulated_aoi");
    for (const auto& r : rows) {
        std::vector<Cell> cells{Cell::number(r.inputs.at(0)), Cell::number(r.inputs.at(1)),
                                Cell::fixed(r.reference, kTableDecimals),
                                Cell::fixed(r.approximate, kTableDecimals),
                                Cell::fixed(r.percent_error, kPercentDecimals)};
        if (simulated)
            cells.push_back(Cell::fixed(r.simulated.value_or(std::nan("")), kTableDecimals));
        t.rows.push_back(std::move(cells));
    }
    return t;
}

std::vector<ServerCountPoint> server_count_sweep(std::size_t n_max)
{
    if (n_max < 1 || n_max > 10)
        throw InvalidInput("server count must lie in [1, 10], got " + std::to_string(n_max));
    std::vector<ServerCountPoint> points;
    for (std::size_t n = 1; n <= n_max; ++n) {
        const auto opt = minimize_symmetric(n, 1.0);
        points.push_back({n, opt.rho, opt.aoi});
    }
    return points;
}

Table server_count_table(const std::vector<ServerCountPoint>& points)
{
    Table t;
    t.columns = {"servers", "rho", "aoi"};
    for (const auto& p : points)
        t.rows.push_back({Cell::integer(p.servers), Cell::number(p.rho), Cell::number(p.aoi)});
    return t;
}

std::vector<DensityPoint> dist_compare(double lambda, double mu, const DistCompareOptions& options)
{
    if (!(lambda > 0.0 && lambda < mu))
        throw InvalidInput("unstable server: need 0 < lambda < mu");
    if (options.grid_points < 2)
        throw InvalidInput("grid needs at least two points");
    const ServerLoad load = ServerLoad::from_rates(lambda, mu);
    const ExpSum exact_tail = single_server_tail(load);
    const ExpSum approx_tail = gamma_tail(theta_of(load));
    const ExpSum exact_pdf = -1.0 * differentiate(exact_tail);
    const ExpSum approx_pdf = -1.0 * differentiate(approx_tail);

    // Both tails are survival functions, hence monotone; walk out until both are negligible.
    const double unit = 1.0 / mu;
    double x_max = unit;
    while (exact_tail(x_max) > options.tail_cutoff || approx_tail(x_max) > options.tail_cutoff)
        x_max += unit;

    SimConfig sim;
    sim.system = SystemConfig{lambda, {1.0}, {mu}};
    sim.departures = options.samples;
    sim.histogram_samples = options.samples;
    sim.histogram_bins = options.bins;
    sim.histogram_range = x_max;
    sim.seed = options.seed;
    const auto density = empirical_density(run(sim));
    const double bin_width = x_max / static_cast<double>(options.bins);

    std::vector<DensityPoint> points;
    points.reserve(options.grid_points);
    const double step = x_max / static_cast<double>(options.grid_points - 1);
    for (std::size_t k = 0; k < options.grid_points; ++k) {
        const double x = static_cast<double>(k) * step;
        const auto bin = std::min(static_cast<std::size_t>(x / bin_width), density.size() - 1);
        points.push_back({x, exact_pdf(x), approx_pdf(x), density[bin].second});
    }
    return points;
}

Table dist_compare_table(const std::vector<DensityPoint>& points)
{
    Table t;
    t.columns = {"x", "exact_pdf", "gamma_pdf", "empirical_pdf"};
    for (const auto& p : points)
        t.rows.push_back({Cell::number(p.x), Cell::number(p.exact_pdf), Cell::number(p.gamma_pdf),
                          Cell::number(p.empirical_pdf)});
    return t;
}

Table analyze_table(const SystemConfig& config)
{
    config.validate();
    Table t;
    t.columns = {"metric", "value"};
    t.key_value = true;
    const auto loads = config.active_loads();
    t.add("exact_mean_aoi", Cell::number(exact_mean(loads)));
    t.add("approx_mean_aoi", Cell::number(approx_mean_n(loads)));
    t.add("lambda", Cell::number(config.lambda));
    for (std::size_t i = 0; i < config.servers(); ++i) {
        const auto id = std::to_string(i + 1);
        const double rate = config.alphas[i] * config.lambda;
        t.add("alpha_" + id, Cell::number(config.alphas[i]));
        t.add("mu_" + id, Cell::number(config.mus[i]));
        t.add("rho_" + id, Cell::number(rate / config.mus[i]));
        t.add("single_mean_aoi_" + id,
              Cell::number(rate > 0.0 ? single_server_mean(ServerLoad::from_rates(rate, config.mus[i]))
                                      : std::nan("")));
    }
    return t;
}

Table simulate_table(const SimResult& result)
{
    Table t;
    t.columns = {"metric", "value"};
    t.key_value = true;
    t.add("mean_aoi", Cell::number(result.mean_aoi));
    for (std::size_t i = 0; i < result.per_server_mean_aoi.size(); ++i)
        t.add("server_mean_aoi_" + std::to_string(i + 1), Cell::number(result.per_server_mean_aoi[i]));
    for (std::size_t i = 0; i < result.arrivals_per_server.size(); ++i)
        t.add("arrivals_" + std::to_string(i + 1), Cell::integer(result.arrivals_per_server[i]));
    t.add("packets_served", Cell::integer(result.packets_served));
    t.add("sim_time", Cell::number(result.sim_time));
    t.add("measured_time", Cell::number(result.measured_time));
    t.add("unstable", Cell::integer(result.unstable ? 1 : 0));
    return t;
}

Table replicate_table(const ReplicateSummary& summary)
{
    Table t;
    t.columns = {"metric", "value"};
    t.key_value = true;
    t.add("replicates", Cell::integer(summary.values.size()));
    t.add("mean_aoi", Cell::number(summary.mean));
    t.add("std_error", Cell::number(summary.std_error));
    return t;
}

Table optimize_table(const RoutingSolution& solution, const std::string& mode)
{
    Table t;
    t.columns = {"metric", "value"};
    t.key_value = true;
    t.add("mode", Cell::label(mode));
    t.add("lambda", Cell::number(solution.lambda));
    for (std::size_t i = 0; i < solution.alphas.size(); ++i) {
        t.add("alpha_" + std::to_string(i + 1), Cell::number(solution.alphas[i]));
        t.add("rho_" + std::to_string(i + 1), Cell::number(solution.per_server_rho[i]));
    }
    t.add("predicted_aoi", Cell::number(solution.predicted_aoi));
    return t;
}

}  // namespace aoi::report

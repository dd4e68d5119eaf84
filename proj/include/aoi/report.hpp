#pragma once

#include "aoi/analytic.hpp"
#include "aoi/optimize.hpp"
#include "aoi/simulate.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace aoi::report {

/// A formatted cell. Numeric cells keep the exact text that is printed so
/// CSV and JSON carry identical values.
struct Cell
{
    std::string text;
    bool numeric = true;

    static Cell number(double v, int significant = 6);
    static Cell fixed(double v, int decimals);
    static Cell integer(std::uint64_t v);
    static Cell label(std::string s);

    /// Parsed value of a numeric cell (NaN for "nan").
    double value() const;
};

/// Ordered rows under fixed column names. Key/value tables (columns
/// "metric,value") render as a JSON object, others as an array of objects.
struct Table
{
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
    bool key_value = false;

    void add(std::string metric, Cell value);
};

std::string to_csv(const Table& table);
std::string to_json(const Table& table);

/// 100·|reference − approximate| / approximate (error relative to the
/// approximation).
double percent_error(double reference, double approximate);

/// Value of `v` after printing it with `decimals` fixed decimals.
double rounded(double v, int decimals);

/// One line of a reproduction table. `reference` is the empirical (or exact)
/// average age, `approximate` the gamma approximation; both are rounded to
/// the table's printed precision and `percent_error` is computed from them.
struct ReportRow
{
    std::vector<double> inputs;
    double reference = 0.0;
    double approximate = 0.0;
    double percent_error = 0.0;
    std::optional<double> simulated;
};

inline constexpr int kTableDecimals = 4;
inline constexpr int kPercentDecimals = 2;

inline constexpr double kSymmetricSweepMu = 20.0;
inline constexpr std::array<double, 8> kSymmetricSweepLambdas{8, 10, 12, 16, 20, 24, 28, 32};

inline constexpr std::array<double, 2> kSplitSweepMus{25.0, 15.0};
inline constexpr std::array<std::pair<double, double>, 10> kSplitSweepRates{{
    {20.735, 0.465},
    {19.235, 1.965},
    {17.735, 3.465},
    {16.235, 4.965},
    {14.735, 6.465},
    {13.235, 7.965},
    {11.735, 9.465},
    {10.235, 10.965},
    {8.735, 12.465},
    {7.235, 13.965},
}};

/// Symmetric pair of μ = 20 servers, λ split evenly: empirical age from a
/// simulation of `packets` departures against the gamma approximation.
std::vector<ReportRow> symmetric_sweep_rows(std::uint64_t seed, std::uint64_t packets, unsigned threads = 0);
Table symmetric_sweep_table(const std::vector<ReportRow>& rows);

/// μ = (25, 15) with per-server arrival rates swept at fixed total: exact age
/// against the gamma approximation. A simulated column is added when
/// `packets` > 0.
std::vector<ReportRow> split_sweep_rows(std::uint64_t seed, std::uint64_t packets, unsigned threads = 0);
Table split_sweep_table(const std::vector<ReportRow>& rows);

struct ServerCountPoint
{
    std::size_t servers;
    double rho;
    double aoi;
};

/// Minimum exact age of n unit-rate servers at a common utilization,
/// n = 1..n_max (n_max in [1, 10]).
std::vector<ServerCountPoint> server_count_sweep(std::size_t n_max);
Table server_count_table(const std::vector<ServerCountPoint>& points);

struct DensityPoint
{
    double x;
    double exact_pdf;
    double gamma_pdf;
    double empirical_pdf;
};

struct DistCompareOptions
{
    std::uint64_t seed = 1;
    std::uint64_t samples = 1'000'000;
    std::size_t grid_points = 10001;
    std::size_t bins = 100;
    /// Both tails fall below this at the right end of the grid.
    double tail_cutoff = 1e-8;
};

/// Single M/M/1 queue: exact age density, gamma density and a simulated
/// histogram on a common uniform grid starting at 0.
std::vector<DensityPoint> dist_compare(double lambda, double mu, const DistCompareOptions& options = {});
Table dist_compare_table(const std::vector<DensityPoint>& points);

Table analyze_table(const SystemConfig& config);
Table simulate_table(const SimResult& result);
Table replicate_table(const ReplicateSummary& summary);
Table optimize_table(const RoutingSolution& solution, const std::string& mode);

}  // namespace aoi::report

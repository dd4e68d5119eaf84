#pragma once

#include "aoi/analytic.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <utility>
#include <vector>

namespace aoi {

/// Run-length, seeding and statistics settings for one simulation.
///
/// Exactly one of `horizon` (simulated time) and `departures` (total
/// departures) ends the run. The first `warmup_fraction` of the run, measured
/// in time for a horizon and in departures for a departure target, is
/// excluded from every statistic.
struct SimConfig
{
    SystemConfig system;
    std::optional<double> horizon;
    std::optional<std::uint64_t> departures;
    std::uint64_t seed = 1;
    double warmup_fraction = 0.1;
    std::size_t histogram_bins = 200;
    /// Upper edge of the histogram; 0 picks 10·(1/λ + max 1/μᵢ).
    double histogram_range = 0.0;
    /// Number of uniform-time age samples that feed the histogram.
    std::size_t histogram_samples = 10000;

    void validate() const;
    double resolved_histogram_range() const;
};

/// One departure as seen by the collector. `aoi` is the combined age right
/// after the departure.
struct DepartureRecord
{
    double arrival_time;
    std::size_t server;
    double departure_time;
    double aoi;
};

struct SimResult
{
    /// Time average of the combined age over the measurement window.
    double mean_aoi = 0.0;
    /// Time average of each server's own age; NaN for servers that never served.
    std::vector<double> per_server_mean_aoi;

    std::vector<std::uint64_t> histogram;
    std::uint64_t histogram_overflow = 0;
    double histogram_bin_width = 0.0;

    std::uint64_t packets_served = 0;
    std::vector<std::uint64_t> arrivals_per_server;
    std::vector<std::uint64_t> departures_per_server;

    /// Simulated time at which the run ended.
    double sim_time = 0.0;
    /// Start and length of the window the averages cover.
    double measure_start = 0.0;
    double measured_time = 0.0;

    /// Some active server has αᵢλ ≥ μᵢ; statistics describe a transient.
    bool unstable = false;

    bool operator==(const SimResult&) const = default;
};

using DepartureObserver = std::function<void(const DepartureRecord&)>;

/// Event-driven simulation of parallel FCFS exponential servers fed by a
/// Bernoulli-routed Poisson stream. Same config (including seed) gives a
/// bit-identical result.
SimResult run(const SimConfig& config, const DepartureObserver& on_departure = {});

/// Normalized complementary cumulative histogram: pairs (x, P(Δ ≥ x)) at
/// every bin edge. Throws InvalidInput if the histogram is empty.
std::vector<std::pair<double, double>> empirical_tail(const SimResult& result);

/// Empirical density per bin: pairs (bin centre, density).
std::vector<std::pair<double, double>> empirical_density(const SimResult& result);

struct ReplicateSummary
{
    double mean = 0.0;
    /// Zero when only one replicate ran.
    double std_error = 0.0;
    std::vector<double> values;
};

/// Seed of replicate `index` derived from the base seed.
std::uint64_t replicate_seed(std::uint64_t base, std::uint64_t index);

/// Runs `reps` independent replicates (concurrently when `threads` > 1) and
/// summarizes mean_aoi. Results do not depend on scheduling.
ReplicateSummary replicate(const SimConfig& config, int reps, unsigned threads = 0);

/// CSV header and row formatting for departure traces.
void write_trace_header(std::ostream& os);
void write_trace_record(std::ostream& os, const DepartureRecord& rec);

}  // namespace aoi

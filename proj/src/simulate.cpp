#include "aoi/simulate.hpp"

#include "aoi/errors.hpp"
#include "aoi/random.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numeric>
#include <ostream>
#include <queue>
#include <thread>

namespace aoi {

namespace {

constexpr std::uint64_t kArrivalStream = 0;
constexpr std::uint64_t kRoutingStream = 1;
constexpr std::uint64_t kFirstServiceStream = 2;

struct Departure
{
    double time;
    std::size_t server;
    std::uint64_t seq;
    double arrival_time;

    // min-heap ordering on (time, server, seq)
    bool operator>(const Departure& o) const
    {
        if (time != o.time)
            return time > o.time;
        if (server != o.server)
            return server > o.server;
        return seq > o.seq;
    }
};

/// Integrates the sawtooth ages over the measurement window and samples the
/// combined age on a uniform time grid.
class Collector
{
public:
    Collector(std::size_t servers, std::size_t bins, double range, double sample_dt)
        : freshest_server_(servers, 0.0), area_server_(servers, 0.0), bins_(bins, 0),
          bin_width_(range / static_cast<double>(bins)), sample_dt_(sample_dt)
    {
    }

    void start_measuring(double t)
    {
        if (measuring_)
            return;
        measuring_ = true;
        start_ = t;
        last_ = t;
        next_sample_ = t + sample_dt_;
    }

    bool measuring() const { return measuring_; }

    /// Accumulates area on [last, t]; no departure happens inside.
    void advance(double t)
    {
        if (!measuring_ || t <= last_)
            return;
        area_ += ramp_area(last_, t, freshest_);
        for (std::size_t i = 0; i < freshest_server_.size(); ++i)
            area_server_[i] += ramp_area(last_, t, freshest_server_[i]);
        while (next_sample_ <= t) {
            record_sample(next_sample_ - freshest_);
            next_sample_ += sample_dt_;
        }
        last_ = t;
    }

    /// Returns the combined age right after the departure.
    double depart(double t, std::size_t server, double arrival_time)
    {
        advance(t);
        freshest_ = std::max(freshest_, arrival_time);
        freshest_server_[server] = std::max(freshest_server_[server], arrival_time);
        return t - freshest_;
    }

    void finish(SimResult& r, double end, const std::vector<std::uint64_t>& departures_per_server)
    {
        advance(end);
        r.measure_start = start_;
        r.measured_time = measuring_ ? end - start_ : 0.0;
        const double len = r.measured_time;
        r.mean_aoi = len > 0.0 ? area_ / len : std::numeric_limits<double>::quiet_NaN();
        r.per_server_mean_aoi.resize(area_server_.size());
        for (std::size_t i = 0; i < area_server_.size(); ++i)
            r.per_server_mean_aoi[i] = (len > 0.0 && departures_per_server[i] > 0)
                                           ? area_server_[i] / len
                                           : std::numeric_limits<double>::quiet_NaN();
        r.histogram = std::move(bins_);
        r.histogram_overflow = overflow_;
        r.histogram_bin_width = bin_width_;
    }

private:
    // ∫_a^b (s − m) ds
    static double ramp_area(double a, double b, double m)
    {
        return (b - a) * (0.5 * (a + b) - m);
    }

    void record_sample(double age)
    {
        const auto k = static_cast<std::size_t>(age / bin_width_);
        if (age >= 0.0 && k < bins_.size())
            ++bins_[k];
        else
            ++overflow_;
    }

    double freshest_ = 0.0;
    std::vector<double> freshest_server_;
    double area_ = 0.0;
    std::vector<double> area_server_;
    std::vector<std::uint64_t> bins_;
    std::uint64_t overflow_ = 0;
    double bin_width_;
    double sample_dt_;
    double next_sample_ = 0.0;
    bool measuring_ = false;
    double start_ = 0.0;
    double last_ = 0.0;
};

}  // namespace

void SimConfig::validate() const
{
    system.validate(false);
    if (system.active_servers().empty())
        throw InvalidInput("no active servers");
    if (horizon.has_value() == departures.has_value())
        throw InvalidInput("exactly one of horizon and departure target must be set");
    if (horizon && !(*horizon > 0.0 && std::isfinite(*horizon)))
        throw InvalidInput("horizon must be positive");
    if (departures && *departures == 0)
        throw InvalidInput("departure target must be positive");
    if (!(warmup_fraction >= 0.0 && warmup_fraction < 1.0))
        throw InvalidInput("warmup fraction must lie in [0, 1)");
    if (histogram_bins == 0)
        throw InvalidInput("histogram needs at least one bin");
    if (!(histogram_range >= 0.0))
        throw InvalidInput("histogram range must be non-negative");
    if (histogram_samples == 0)
        throw InvalidInput("histogram needs at least one sample");
}

double SimConfig::resolved_histogram_range() const
{
    if (histogram_range > 0.0)
        return histogram_range;
    double slowest_service = 0.0;
    for (auto i : system.active_servers())
        slowest_service = std::max(slowest_service, 1.0 / system.mus[i]);
    return 10.0 * (1.0 / system.lambda + slowest_service);
}

SimResult run(const SimConfig& config, const DepartureObserver& on_departure)
{
    config.validate();
    const auto& sys = config.system;
    const std::size_t n = sys.servers();

    RandomStream arrivals(stream_seed(config.seed, kArrivalStream));
    RandomStream routing(stream_seed(config.seed, kRoutingStream));
    std::vector<RandomStream> service;
    service.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        service.emplace_back(stream_seed(config.seed, kFirstServiceStream + i));

    std::vector<double> cumulative(n);
    std::partial_sum(sys.alphas.begin(), sys.alphas.end(), cumulative.begin());
    const auto active = sys.active_servers();
    const std::size_t last_active = active.back();

    // Warmup boundary: a time for horizon runs, a departure count otherwise.
    const double warmup_time = config.horizon ? config.warmup_fraction * *config.horizon : 0.0;
    const std::uint64_t warmup_departures =
        config.departures
            ? static_cast<std::uint64_t>(std::floor(config.warmup_fraction *
                                                    static_cast<double>(*config.departures)))
            : 0;
    const double expected_window =
        config.horizon ? *config.horizon - warmup_time
                       : static_cast<double>(*config.departures - warmup_departures) / sys.lambda;
    const double sample_dt = expected_window / static_cast<double>(config.histogram_samples);

    Collector collector(n, config.histogram_bins, config.resolved_histogram_range(), sample_dt);

    SimResult result;
    result.unstable = sys.unstable();
    result.arrivals_per_server.assign(n, 0);
    result.departures_per_server.assign(n, 0);

    std::priority_queue<Departure, std::vector<Departure>, std::greater<>> pending;
    std::vector<double> server_free(n, 0.0);
    std::uint64_t seq = 0;
    double next_arrival = arrivals.exponential(sys.lambda);
    double end_time = 0.0;

    // Horizon runs measure from max(warmup time, first departure); departure
    // targets measure from the departure that completes the warmup count.
    auto maybe_start_before = [&](double t) {
        if (config.horizon && !collector.measuring() && result.packets_served > 0 &&
            t >= warmup_time)
            collector.start_measuring(warmup_time);
    };

    // Returns true when the run's stopping rule fires at this departure.
    auto serve = [&](const Departure& d) {
        maybe_start_before(d.time);
        const double age = collector.depart(d.time, d.server, d.arrival_time);
        ++result.packets_served;
        ++result.departures_per_server[d.server];
        if (!collector.measuring()) {
            const bool past_warmup =
                config.horizon ? d.time >= warmup_time
                               : result.packets_served >= std::max<std::uint64_t>(warmup_departures, 1);
            if (past_warmup)
                collector.start_measuring(d.time);
        }
        if (on_departure)
            on_departure({d.arrival_time, d.server, d.time, age});
        return config.departures && result.packets_served >= *config.departures;
    };

    bool done = false;
    while (!done) {
        // Arrivals precede departures at equal times.
        while (!pending.empty() && pending.top().time < next_arrival) {
            const Departure d = pending.top();
            if (config.horizon && d.time > *config.horizon)
                break;
            pending.pop();
            if (serve(d)) {
                end_time = d.time;
                done = true;
                break;
            }
        }
        if (done)
            break;
        if (config.horizon && next_arrival > *config.horizon) {
            end_time = *config.horizon;
            break;
        }
        const double u = routing.uniform();
        std::size_t server = last_active;
        for (auto i : active) {
            if (u < cumulative[i]) {
                server = i;
                break;
            }
        }
        ++result.arrivals_per_server[server];
        const double begin = std::max(next_arrival, server_free[server]);
        const double leave = begin + service[server].exponential(sys.mus[server]);
        server_free[server] = leave;
        pending.push({leave, server, seq++, next_arrival});

        next_arrival += arrivals.exponential(sys.lambda);
    }

    maybe_start_before(end_time);
    result.sim_time = end_time;
    collector.finish(result, end_time, result.departures_per_server);
    return result;
}

std::vector<std::pair<double, double>> empirical_tail(const SimResult& result)
{
    const std::uint64_t total =
        std::accumulate(result.histogram.begin(), result.histogram.end(), result.histogram_overflow);
    if (total == 0)
        throw InvalidInput("empty histogram");
    std::vector<std::pair<double, double>> tail(result.histogram.size() + 1);
    std::uint64_t above = result.histogram_overflow;
    for (std::size_t k = result.histogram.size() + 1; k-- > 0;) {
        if (k < result.histogram.size())
            above += result.histogram[k];
        tail[k] = {static_cast<double>(k) * result.histogram_bin_width,
                   static_cast<double>(above) / static_cast<double>(total)};
    }
    return tail;
}

std::vector<std::pair<double, double>> empirical_density(const SimResult& result)
{
    const std::uint64_t total =
        std::accumulate(result.histogram.begin(), result.histogram.end(), result.histogram_overflow);
    if (total == 0)
        throw InvalidInput("empty histogram");
    std::vector<std::pair<double, double>> out;
    out.reserve(result.histogram.size());
    const double w = result.histogram_bin_width;
    for (std::size_t k = 0; k < result.histogram.size(); ++k)
        out.emplace_back((static_cast<double>(k) + 0.5) * w,
                         static_cast<double>(result.histogram[k]) / (static_cast<double>(total) * w));
    return out;
}

std::uint64_t replicate_seed(std::uint64_t base, std::uint64_t index) { return splitmix64(base + index); }

ReplicateSummary replicate(const SimConfig& config, int reps, unsigned threads)
{
    if (reps < 1)
        throw InvalidInput("replicate count must be at least 1");
    config.validate();

    ReplicateSummary summary;
    summary.values.assign(static_cast<std::size_t>(reps), 0.0);
    if (threads == 0)
        threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, static_cast<unsigned>(reps));

    std::atomic<int> next{0};
    auto worker = [&] {
        for (int k = next++; k < reps; k = next++) {
            SimConfig c = config;
            c.seed = replicate_seed(config.seed, static_cast<std::uint64_t>(k));
            summary.values[static_cast<std::size_t>(k)] = run(c).mean_aoi;
        }
    };
    {
        std::vector<std::jthread> pool;
        for (unsigned t = 1; t < threads; ++t)
            pool.emplace_back(worker);
        worker();
    }

    // Aggregation in replicate order keeps the result schedule-independent.
    const double count = static_cast<double>(reps);
    double sum = 0.0;
    for (double v : summary.values)
        sum += v;
    summary.mean = sum / count;
    if (reps > 1) {
        double ss = 0.0;
        for (double v : summary.values)
            ss += (v - summary.mean) * (v - summary.mean);
        summary.std_error = std::sqrt(ss / (count - 1.0) / count);
    }
    return summary;
}

void write_trace_header(std::ostream& os) { os << "arrival_time,server,departure_time,aoi\n"; }

void write_trace_record(std::ostream& os, const DepartureRecord& rec)
{
    os << std::setprecision(17) << rec.arrival_time << ',' << rec.server + 1 << ','
       << rec.departure_time << ',' << rec.aoi << '\n';
}

}  // namespace aoi

#include "aoi/optimize.hpp"

#include "aoi/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace aoi {

namespace {

void validate_mus(std::span<const double> mus)
{
    if (mus.empty())
        throw InvalidInput("no servers configured");
    for (std::size_t i = 0; i < mus.size(); ++i)
        if (!(mus[i] > 0.0) || !std::isfinite(mus[i]))
            throw InvalidInput("service rate of server " + std::to_string(i + 1) + " must be positive");
}

std::vector<ServerLoad> loads_at(std::span<const double> rhos, std::span<const double> mus)
{
    std::vector<ServerLoad> loads;
    loads.reserve(mus.size());
    for (std::size_t i = 0; i < mus.size(); ++i)
        loads.emplace_back(rhos[i], mus[i]);
    return loads;
}

RoutingSolution solution_from_rhos(std::vector<double> rhos, std::span<const double> mus, double aoi)
{
    RoutingSolution s;
    double lambda = 0.0;
    for (std::size_t i = 0; i < mus.size(); ++i)
        lambda += rhos[i] * mus[i];
    s.lambda = lambda;
    s.alphas.resize(mus.size());
    for (std::size_t i = 0; i < mus.size(); ++i)
        s.alphas[i] = rhos[i] * mus[i] / lambda;
    s.per_server_rho = std::move(rhos);
    s.predicted_aoi = aoi;
    return s;
}

struct Candidate
{
    std::vector<double> rho;
    double value;

    bool better_than(const Candidate& other) const
    {
        if (value != other.value)
            return value < other.value;
        return std::lexicographical_compare(rho.begin(), rho.end(), other.rho.begin(),
                                            other.rho.end());
    }
};

class CoordinateDescent
{
public:
    CoordinateDescent(std::span<const double> mus, const MinimizeOptions& opt) : mus_(mus), opt_(opt)
    {
    }

    double objective(std::span<const double> rho) const { return exact_mean(loads_at(rho, mus_)); }

    bool feasible(std::span<const double> rho) const
    {
        if (!opt_.budget)
            return true;
        double total = 0.0;
        for (std::size_t i = 0; i < rho.size(); ++i)
            total += rho[i] * mus_[i];
        return total <= *opt_.budget * (1.0 + 1e-12);
    }

    Candidate descend(std::vector<double> rho) const
    {
        for (int iter = 0; iter < opt_.max_iterations; ++iter) {
            double largest_step = 0.0;
            for (std::size_t i = 0; i < rho.size(); ++i) {
                const auto [lo, hi] = axis_bounds(rho, i);
                auto along = [&](double r) {
                    auto trial = rho;
                    trial[i] = r;
                    return objective(trial);
                };
                const double before = rho[i];
                const double x = golden_section(along, lo, hi, 1e-9);
                if (along(x) <= along(before)) {
                    rho[i] = x;
                    largest_step = std::max(largest_step, std::abs(x - before));
                }
            }
            if (largest_step < opt_.step_tolerance)
                break;
        }
        const double v = objective(rho);
        return {std::move(rho), v};
    }

private:
    std::pair<double, double> axis_bounds(std::span<const double> rho, std::size_t i) const
    {
        double hi = opt_.rho_ceiling;
        if (opt_.budget) {
            double others = 0.0;
            for (std::size_t j = 0; j < rho.size(); ++j)
                if (j != i)
                    others += rho[j] * mus_[j];
            hi = std::min(hi, (*opt_.budget - others) / mus_[i]);
        }
        hi = std::max(hi, opt_.rho_floor);
        return {opt_.rho_floor, hi};
    }

    std::span<const double> mus_;
    const MinimizeOptions& opt_;
};

// Full Cartesian grids beyond this many points are pre-screened and only the
// best few are refined.
constexpr std::size_t kFullGridLimit = 32;
constexpr std::size_t kScreenedStarts = 8;

}  // namespace

SystemConfig RoutingSolution::config(std::span<const double> mus) const
{
    return SystemConfig{lambda, alphas, std::vector<double>(mus.begin(), mus.end())};
}

double rho_star() { return 0.5 * (std::sqrt(2.0) + 1.0 - std::sqrt(2.0 * std::sqrt(2.0) - 1.0)); }

double rho_star_residual(double rho)
{
    const double bar = 1.0 - rho;
    return (1.0 + rho * rho) * bar * bar - rho * rho;
}

double DerivativeRational::numerator(double x)
{
    double acc = 0.0;
    for (double c : numerator_coeffs)
        acc = acc * x + c;
    return acc;
}

double DerivativeRational::denominator(double x)
{
    return 2.0 * x * x * std::pow(x - 2.0, 3) * std::pow(x - 1.0, 2) * std::pow(x + 1.0, 3);
}

double symmetric_exact_optimum()
{
    double lo = 0.4;
    double hi = 0.7;
    auto sign_change = [&] {
        return std::signbit(DerivativeRational::numerator(lo)) !=
               std::signbit(DerivativeRational::numerator(hi));
    };
    for (int widen = 0; !sign_change() && widen < 8; ++widen) {
        lo = lo / 2.0;
        hi = 1.0 - (1.0 - hi) / 2.0;
    }
    if (!sign_change())
        throw NumericalFailure("derivative numerator has no sign change in (0,1)");

    const bool lo_negative = std::signbit(DerivativeRational::numerator(lo));
    while (hi - lo > 1e-10) {
        const double mid = 0.5 * (lo + hi);
        if (std::signbit(DerivativeRational::numerator(mid)) == lo_negative)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

RoutingSolution optimal_routing_approx(std::span<const double> mus)
{
    validate_mus(mus);
    const double total = std::accumulate(mus.begin(), mus.end(), 0.0);
    const double rs = rho_star();
    RoutingSolution s;
    s.lambda = rs * total;
    for (double mu : mus) {
        s.alphas.push_back(mu / total);
        s.per_server_rho.push_back(rs);
    }
    s.predicted_aoi = approx_mean_n(loads_at(s.per_server_rho, mus));
    return s;
}

double golden_section(const std::function<double(double)>& f, double lo, double hi, double tol)
{
    static const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo;
    double b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c);
    double fd = f(d);
    while (b - a > tol) {
        if (fc <= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

RoutingSolution minimize_exact(std::span<const double> mus, const MinimizeOptions& options)
{
    validate_mus(mus);
    const std::size_t n = mus.size();
    const double mu_total = std::accumulate(mus.begin(), mus.end(), 0.0);
    if (options.budget) {
        if (!(*options.budget > 0.0))
            throw InvalidInput("arrival-rate budget must be positive");
        if (*options.budget < options.rho_floor * mu_total)
            throw InvalidInput("infeasible budget: cannot keep every server above the minimum utilization");
    }

    CoordinateDescent cd(mus, options);

    std::vector<std::vector<double>> starts;
    {
        std::vector<double> axis;
        for (int k = 0; k < options.grid_points; ++k)
            axis.push_back((2.0 * k + 1.0) / (2.0 * options.grid_points));
        std::vector<std::size_t> digit(n, 0);
        while (true) {
            std::vector<double> p(n);
            for (std::size_t i = 0; i < n; ++i)
                p[i] = axis[digit[i]];
            if (cd.feasible(p))
                starts.push_back(std::move(p));
            std::size_t i = 0;
            while (i < n && ++digit[i] == axis.size())
                digit[i++] = 0;
            if (i == n)
                break;
        }
    }
    if (starts.size() > kFullGridLimit) {
        std::vector<Candidate> screened;
        screened.reserve(starts.size());
        for (auto& s : starts) {
            const double v = cd.objective(s);
            screened.push_back({std::move(s), v});
        }
        const auto keep = std::min(kScreenedStarts, screened.size());
        std::partial_sort(screened.begin(), screened.begin() + static_cast<std::ptrdiff_t>(keep),
                          screened.end(),
                          [](const Candidate& a, const Candidate& b) { return a.better_than(b); });
        starts.clear();
        for (std::size_t k = 0; k < keep; ++k)
            starts.push_back(std::move(screened[k].rho));
    }

    std::vector<double> star(n, rho_star());
    if (cd.feasible(star))
        starts.push_back(star);
    else
        starts.emplace_back(n, std::clamp(*options.budget / mu_total, options.rho_floor,
                                          options.rho_ceiling));

    std::optional<Candidate> best;
    for (auto& s : starts) {
        Candidate c = cd.descend(std::move(s));
        if (!best || c.better_than(*best))
            best = std::move(c);
    }
    return solution_from_rhos(std::move(best->rho), mus, best->value);
}

SymmetricOptimum minimize_symmetric(std::size_t n, double mu)
{
    if (n == 0)
        throw InvalidInput("server count must be at least 1");
    if (!(mu > 0.0))
        throw InvalidInput("service rate must be positive");
    auto f = [&](double rho) {
        std::vector<ServerLoad> loads(n, ServerLoad(rho, mu));
        return exact_mean(loads);
    };
    const double rho = golden_section(f, 1e-3, 1.0 - 1e-3, 1e-9);
    return {rho, f(rho)};
}

double approx_mean_two_at(double rho1, double rho2, double mu1, double mu2)
{
    return approx_mean_two(theta_of(ServerLoad(rho1, mu1)), theta_of(ServerLoad(rho2, mu2)));
}

double approx_gradient_norm_at_rho_star(double mu1, double mu2)
{
    const std::array<double, 2> mus{mu1, mu2};
    validate_mus(mus);
    const double r = rho_star();
    const double h = finite_difference_step;
    const double d1 =
        (approx_mean_two_at(r + h, r, mu1, mu2) - approx_mean_two_at(r - h, r, mu1, mu2)) / (2 * h);
    const double d2 =
        (approx_mean_two_at(r, r + h, mu1, mu2) - approx_mean_two_at(r, r - h, mu1, mu2)) / (2 * h);
    return std::hypot(d1, d2);
}

}  // namespace aoi

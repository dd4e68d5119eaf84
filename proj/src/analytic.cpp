#include "aoi/analytic.hpp"

#include "aoi/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace aoi {

ServerLoad::ServerLoad(double rho, double mu) : rho_(rho), mu_(mu)
{
    if (!(mu > 0.0) || !std::isfinite(mu))
        throw InvalidInput("service rate must be positive, got " + std::to_string(mu));
    if (!(rho < 1.0))
        throw InvalidInput("unstable server: utilization " + std::to_string(rho) + " >= 1");
    if (!(rho > 0.0))
        throw InvalidInput("server utilization must be positive, got " + std::to_string(rho));
}

ServerLoad ServerLoad::from_rates(double arrival_rate, double mu)
{
    if (!(mu > 0.0))
        throw InvalidInput("service rate must be positive, got " + std::to_string(mu));
    return ServerLoad(arrival_rate / mu, mu);
}

void SystemConfig::validate(bool require_stability) const
{
    if (!(lambda > 0.0) || !std::isfinite(lambda))
        throw InvalidInput("arrival rate lambda must be positive");
    if (mus.empty())
        throw InvalidInput("no servers configured");
    if (alphas.size() != mus.size())
        throw InvalidInput("alphas and mus differ in length (" + std::to_string(alphas.size()) +
                           " vs " + std::to_string(mus.size()) + ")");
    double sum = 0.0;
    for (std::size_t i = 0; i < mus.size(); ++i) {
        if (!(mus[i] > 0.0) || !std::isfinite(mus[i]))
            throw InvalidInput("service rate of server " + std::to_string(i + 1) + " must be positive");
        if (!(alphas[i] >= 0.0 && alphas[i] <= 1.0))
            throw InvalidInput("routing probability of server " + std::to_string(i + 1) +
                               " outside [0,1]");
        sum += alphas[i];
    }
    if (std::abs(sum - 1.0) > alpha_sum_tolerance)
        throw InvalidInput("routing probabilities sum to " + std::to_string(sum) + ", not 1");
    if (!require_stability)
        return;
    for (std::size_t i = 0; i < mus.size(); ++i)
        if (alphas[i] > 0.0 && !(alphas[i] * lambda < mus[i]))
            throw InvalidInput("unstable server " + std::to_string(i + 1) + ": alpha*lambda = " +
                               std::to_string(alphas[i] * lambda) + " >= mu = " +
                               std::to_string(mus[i]));
}

bool SystemConfig::unstable() const
{
    for (std::size_t i = 0; i < std::min(alphas.size(), mus.size()); ++i)
        if (alphas[i] > 0.0 && !(alphas[i] * lambda < mus[i]))
            return true;
    return false;
}

std::vector<std::size_t> SystemConfig::active_servers() const
{
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < alphas.size(); ++i)
        if (alphas[i] > 0.0)
            idx.push_back(i);
    return idx;
}

std::vector<ServerLoad> SystemConfig::active_loads() const
{
    validate();
    std::vector<ServerLoad> loads;
    for (auto i : active_servers())
        loads.push_back(ServerLoad::from_rates(alphas[i] * lambda, mus[i]));
    return loads;
}

GammaParam::GammaParam(double theta) : theta_(theta)
{
    if (!(theta > 0.0) || !std::isfinite(theta))
        throw InvalidInput("gamma scale theta must be positive, got " + std::to_string(theta));
}

double single_server_mean(const ServerLoad& load)
{
    const double rho = load.rho();
    return (1.0 + 1.0 / rho + rho * rho / load.rho_bar()) / load.mu();
}

ExpSum single_server_tail(const ServerLoad& load)
{
    const double rho = load.rho();
    const double mu = load.mu();
    const double inv_bar = 1.0 / load.rho_bar();
    return canonicalize(ExpSum({
        ExpTerm{{1.0}, load.rho_bar() * mu},
        ExpTerm{{-inv_bar, -rho * mu}, mu},
        ExpTerm{{inv_bar}, rho * mu},
    }));
}

ExpSum combined_tail(std::span<const ServerLoad> loads)
{
    if (loads.empty())
        throw InvalidInput("no active servers");
    std::vector<ExpSum> tails;
    tails.reserve(loads.size());
    for (const auto& l : loads)
        tails.push_back(single_server_tail(l));
    return multiply_all(tails);
}

double exact_mean(std::span<const ServerLoad> loads)
{
    if (loads.empty())
        throw InvalidInput("no active servers");
    if (loads.size() == 1)
        return single_server_mean(loads.front());
    return integrate(combined_tail(loads));
}

ExpSum gamma_tail(const GammaParam& theta)
{
    const double inv = 1.0 / theta.theta();
    return ExpSum({ExpTerm{{1.0, inv}, inv}});
}

GammaParam theta_of(const ServerLoad& load) { return GammaParam(single_server_mean(load) / 2.0); }

double combined_theta(std::span<const GammaParam> thetas)
{
    if (thetas.empty())
        throw InvalidInput("no active servers");
    double inv = 0.0;
    for (const auto& t : thetas)
        inv += 1.0 / t.theta();
    return 1.0 / inv;
}

double approx_mean_two(const GammaParam& theta1, const GammaParam& theta2)
{
    const double t1 = theta1.theta();
    const double t2 = theta2.theta();
    const double t0 = t1 * t2 / (t1 + t2);
    return 2.0 * t0 * (1.0 + t0 * t0 / (t1 * t2));
}

double approx_mean_n(std::span<const GammaParam> thetas)
{
    if (thetas.empty())
        throw InvalidInput("no active servers");
    std::vector<ExpSum> tails;
    tails.reserve(thetas.size());
    for (const auto& t : thetas)
        tails.push_back(gamma_tail(t));
    return integrate(multiply_all(tails));
}

double approx_mean_n(std::span<const ServerLoad> loads)
{
    std::vector<GammaParam> thetas;
    thetas.reserve(loads.size());
    for (const auto& l : loads)
        thetas.push_back(theta_of(l));
    return approx_mean_n(thetas);
}

TailGrid gamma_error_grid(const ServerLoad& load)
{
    const double slowest = std::min(load.rho(), load.rho_bar()) * load.mu();
    return {0.01 / load.mu(), 20.0 / slowest};
}

double gamma_approx_error(const ServerLoad& load)
{
    const ExpSum exact = single_server_tail(load);
    const ExpSum approx = gamma_tail(theta_of(load));
    const TailGrid grid = gamma_error_grid(load);
    const auto points = static_cast<std::size_t>(std::floor(grid.x_max / grid.step)) + 1;
    double worst = 0.0;
    for (std::size_t k = 0; k < points; ++k) {
        const double x = static_cast<double>(k) * grid.step;
        worst = std::max(worst, std::abs(exact(x) - approx(x)));
    }
    return worst;
}

}  // namespace aoi

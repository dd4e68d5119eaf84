#pragma once

#include "aoi/exp_poly.hpp"

#include <span>
#include <vector>

namespace aoi {

/// Operating point of one FCFS exponential server: utilization ρ ∈ (0,1)
/// and service rate μ > 0.
class ServerLoad
{
public:
    /// Throws InvalidInput("unstable server ...") for ρ ≥ 1, and for ρ ≤ 0 or μ ≤ 0.
    ServerLoad(double rho, double mu);

    /// Load implied by an arrival rate λᵢ on a server of rate μ.
    static ServerLoad from_rates(double arrival_rate, double mu);

    double rho() const { return rho_; }
    double mu() const { return mu_; }
    double rho_bar() const { return 1.0 - rho_; }
    double arrival_rate() const { return rho_ * mu_; }

private:
    double rho_;
    double mu_;
};

/// Common Poisson stream of rate λ split over n servers with probabilities αᵢ.
struct SystemConfig
{
    double lambda = 0.0;
    std::vector<double> alphas;
    std::vector<double> mus;

    static constexpr double alpha_sum_tolerance = 1e-12;

    std::size_t servers() const { return mus.size(); }

    /// Throws InvalidInput naming the first violated invariant. Stability
    /// (αᵢλ < μᵢ on every active server) is checked only when requested.
    void validate(bool require_stability = true) const;

    /// Some server with αᵢ > 0 has αᵢλ ≥ μᵢ.
    bool unstable() const;

    /// Loads of the servers with αᵢ > 0, in server order. Validates first.
    std::vector<ServerLoad> active_loads() const;

    /// Indices (into mus) of the servers with αᵢ > 0.
    std::vector<std::size_t> active_servers() const;
};

/// Shape-2 gamma scale Θ; the matching mean is 2Θ.
class GammaParam
{
public:
    explicit GammaParam(double theta);
    double theta() const { return theta_; }

private:
    double theta_;
};

/// Average age of a single M/M/1 FCFS queue: (1/μ)(1 + 1/ρ + ρ²/(1−ρ)).
double single_server_mean(const ServerLoad& load);

/// P(Δ > x) = e^{−ρ̄μx} − (1/ρ̄ + ρμx)e^{−μx} + (1/ρ̄)e^{−ρμx}.
ExpSum single_server_tail(const ServerLoad& load);

/// Average age of the combined departure stream of independent servers.
///
/// The combined age is the minimum of the per-server ages, so its tail is the
/// product of the per-server tails; the product is integrated in closed form.
/// Servers with zero arrival rate must be removed by the caller.
/// Throws InvalidInput("no active servers") on an empty list.
double exact_mean(std::span<const ServerLoad> loads);

/// The combined tail ∏ᵢ P(Δᵢ > x) as an exponential polynomial.
ExpSum combined_tail(std::span<const ServerLoad> loads);

/// (1 + x/Θ)e^{−x/Θ}
ExpSum gamma_tail(const GammaParam& theta);

/// Θ = single_server_mean / 2
GammaParam theta_of(const ServerLoad& load);

/// Θ₀ = (Σᵢ 1/Θᵢ)⁻¹
double combined_theta(std::span<const GammaParam> thetas);

/// Gamma-approximate age of two servers: 2Θ₀(1 + Θ₀²/(Θ₁Θ₂)).
double approx_mean_two(const GammaParam& theta1, const GammaParam& theta2);

/// Gamma-approximate age of n servers, ∫ ∏ᵢ (1 + x/Θᵢ)e^{−x/Θᵢ} dx, exact.
double approx_mean_n(std::span<const GammaParam> thetas);

/// Convenience overload mapping each load through theta_of.
double approx_mean_n(std::span<const ServerLoad> loads);

/// Uniform evaluation grid used to compare the exact and gamma tails.
struct TailGrid
{
    double step;
    double x_max;
};

/// h = 0.01/μ, x_max = 20/(min(ρ, ρ̄)·μ).
TailGrid gamma_error_grid(const ServerLoad& load);

/// sup over gamma_error_grid(load) of |exact tail − gamma tail|.
double gamma_approx_error(const ServerLoad& load);

}  // namespace aoi

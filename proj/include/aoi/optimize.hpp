#pragma once

#include "aoi/analytic.hpp"

#include <array>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace aoi {

/// Arrival rate and routing that a solver recommends for a set of servers.
struct RoutingSolution
{
    double lambda = 0.0;
    std::vector<double> alphas;
    double predicted_aoi = 0.0;
    std::vector<double> per_server_rho;

    SystemConfig config(std::span<const double> mus) const;
};

/// Utilization minimizing the single-server age, ½(√2 + 1 − √(2√2 − 1)).
double rho_star();

/// Residual of the stationarity condition (1+ρ²)(1−ρ)² − ρ².
double rho_star_residual(double rho);

/// d/dρ of the symmetric two-server exact age at μ = 1, as the closed-form
/// rational function N(x) / (2x²(x−2)³(x−1)²(x+1)³) with N of degree 11.
class DerivativeRational
{
public:
    /// N's coefficients, highest degree first.
    static constexpr std::array<double, 12> numerator_coeffs{
        1.0, -5.0, 4.0, 24.0, -27.0, 30.0, -123.0, 169.0, -71.0, -14.0, -4.0, 8.0};

    static double numerator(double x);
    static double denominator(double x);
    static double value(double x) { return numerator(x) / denominator(x); }
};

/// Unique root in (0,1) of DerivativeRational's numerator, by bisection to 1e-10.
/// The bracket starts at [0.4, 0.7] and widens toward (0,1) if it does not change sign.
double symmetric_exact_optimum();

/// Optimal routing for the gamma approximation: every server at ρ*.
/// αᵢ = μᵢ/Σμ, λ = ρ*·Σμ, predicted_aoi = approx_mean_n at those loads.
RoutingSolution optimal_routing_approx(std::span<const double> mus);

struct MinimizeOptions
{
    double rho_floor = 1e-3;
    double rho_ceiling = 1.0 - 1e-3;
    double step_tolerance = 1e-6;
    int max_iterations = 200;
    int grid_points = 5;
    /// Upper bound on Σᵢ ρᵢμᵢ (total arrival rate), if any.
    std::optional<double> budget;
};

/// Multi-start coordinate descent with golden-section line searches over the
/// per-server utilizations of exact_mean. predicted_aoi is the exact age.
RoutingSolution minimize_exact(std::span<const double> mus, const MinimizeOptions& options = {});

/// Golden-section minimum of f on [lo, hi]; returns the abscissa.
double golden_section(const std::function<double(double)>& f, double lo, double hi, double tol);

struct SymmetricOptimum
{
    double rho;
    double aoi;
};

/// n identical servers of rate μ sharing a common utilization ρ;
/// golden-section over ρ of the exact age.
SymmetricOptimum minimize_symmetric(std::size_t n, double mu = 1.0);

/// Approximate age as a function of the two utilizations, through Θᵢ(ρᵢ, μᵢ).
double approx_mean_two_at(double rho1, double rho2, double mu1, double mu2);

/// Norm of the central-difference gradient (step 1e-5) of approx_mean_two_at
/// at (ρ*, ρ*).
double approx_gradient_norm_at_rho_star(double mu1, double mu2);

inline constexpr double finite_difference_step = 1e-5;

}  // namespace aoi

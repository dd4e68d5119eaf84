#pragma once

// Reference formulas written directly from the queueing model, independent of
// the exp_poly machinery. Test-only.

#include <cmath>

namespace aoi::testing {

/// P(Δ > x) for an M/M/1 FCFS queue with utilization rho and service rate mu.
inline double mm1_age_tail(double rho, double mu, double x)
{
    const double bar = 1.0 - rho;
    return std::exp(-bar * mu * x) - (1.0 / bar + rho * mu * x) * std::exp(-mu * x) +
           std::exp(-rho * mu * x) / bar;
}

/// Average age of an M/M/1 FCFS queue.
inline double mm1_mean_age(double rho, double mu)
{
    return (1.0 + 1.0 / rho + rho * rho / (1.0 - rho)) / mu;
}

/// Literal term-by-term transcription of the expanded two-server rational
/// expression as it is usually printed. Its sign pattern is inconsistent with
/// the tail product: it overestimates, even above the single-server age.
/// Kept only to demonstrate the discrepancy.
inline double printed_two_server_formula(double r1, double r2, double m1, double m2)
{
    const double b1 = 1.0 - r1;
    const double b2 = 1.0 - r2;
    double v = 1.0 / (b1 * m1 + b2 * m2) + 1.0 / (b1 * b2 * (r1 * m1 + r2 * m2)) +
               1.0 / (b1 * b2 * (m1 + m2));
    v += 2.0 * r1 * r2 * m1 * m2 / std::pow(m1 + m2, 3) +
         (r2 * m2 / b1 + r1 * m1 / b2) / std::pow(m1 + m2, 2);
    v -= 1.0 / (b2 * (m2 + b1 * m1)) + r2 * m2 / std::pow(b1 * m1 + m2, 2) +
         1.0 / (b1 * (m1 + b2 * m2)) + r1 * m1 / std::pow(b2 * m2 + m1, 2);
    v += 1.0 / (b2 * (r2 * m2 + b1 * m1)) + 1.0 / (b1 * (r1 * m1 + b2 * m2)) +
         r1 * m1 / (b2 * std::pow(r2 * m2 + m1, 2)) + r2 * m2 / (b1 * std::pow(r1 * m1 + m2, 2));
    v -= (1.0 / (m1 + m2 * r2) + 1.0 / (m2 + m1 * r1)) / (b1 * b2);
    return v;
}

}  // namespace aoi::testing

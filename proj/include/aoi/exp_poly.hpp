#pragma once

#include <span>
#include <vector>

namespace aoi {

/// One summand p(x)·exp(−rate·x) of an exponential polynomial, with
/// p(x) = coeffs[0] + coeffs[1]·x + … + coeffs[d]·x^d.
struct ExpTerm
{
    std::vector<double> coeffs;
    double rate = 1.0;

    double operator()(double x) const;
    std::size_t degree() const { return coeffs.empty() ? 0 : coeffs.size() - 1; }

    bool operator==(const ExpTerm&) const = default;
};

/// Finite sum of ExpTerms on [0, ∞).
///
/// Tail distributions of the per-server age processes, and all products of
/// them, live in this class. Values are immutable once built; every algebraic
/// operation returns a new canonical sum.
class ExpSum
{
public:
    /// Relative tolerance under which two rates are treated as equal.
    static constexpr double rate_tolerance = 1e-12;

    ExpSum() = default;

    /// Throws InvalidInput when a term has no coefficients or a non-finite
    /// rate or coefficient. Terms are stored as given; call canonicalize()
    /// to merge equal rates.
    explicit ExpSum(std::vector<ExpTerm> terms);

    /// c·exp(−rate·x)
    static ExpSum exponential(double coeff, double rate);

    std::span<const ExpTerm> terms() const { return terms_; }
    std::size_t size() const { return terms_.size(); }
    bool empty() const { return terms_.empty(); }

    double operator()(double x) const;

    ExpSum& operator+=(const ExpSum& other);
    ExpSum& operator*=(double scale);

    friend ExpSum operator+(ExpSum a, const ExpSum& b) { return a += b; }
    friend ExpSum operator*(ExpSum a, double s) { return a *= s; }
    friend ExpSum operator*(double s, ExpSum a) { return a *= s; }

    bool operator==(const ExpSum&) const = default;

private:
    std::vector<ExpTerm> terms_;
};

double evaluate(const ExpSum& f, double x);

/// Merges terms whose rates agree within ExpSum::rate_tolerance (relative),
/// drops trailing zero coefficients and all-zero terms. Output terms are
/// sorted by increasing rate.
ExpSum canonicalize(const ExpSum& f);

/// Pointwise product; rates add, polynomial degrees add. Result is canonical.
ExpSum multiply(const ExpSum& f, const ExpSum& g);

/// Product of all factors; the empty product is the constant 1, which is not
/// representable, so an empty span throws InvalidInput.
ExpSum multiply_all(std::span<const ExpSum> factors);

/// d/dx, term by term: (p′ − c·p)·exp(−c·x).
ExpSum differentiate(const ExpSum& f);

/// Exact ∫₀^∞ f(x) dx = Σⱼ Σₖ aⱼₖ · k! / cⱼ^{k+1}.
/// Throws NumericalFailure if any term has rate ≤ 0.
double integrate(const ExpSum& f);

}  // namespace aoi

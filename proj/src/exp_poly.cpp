#include "aoi/exp_poly.hpp"

#include "aoi/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace aoi {

namespace {

/// Neumaier-compensated running sum.
class CompensatedSum
{
public:
    void add(double v)
    {
        const double t = sum_ + v;
        if (std::abs(sum_) >= std::abs(v))
            comp_ += (sum_ - t) + v;
        else
            comp_ += (v - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

bool same_rate(double a, double b)
{
    return std::abs(a - b) <= ExpSum::rate_tolerance * std::max(std::abs(a), std::abs(b));
}

void validate(const ExpTerm& t)
{
    if (t.coeffs.empty())
        throw InvalidInput("exp term has no coefficients");
    if (!std::isfinite(t.rate))
        throw InvalidInput("exp term rate is not finite");
    for (double c : t.coeffs)
        if (!std::isfinite(c))
            throw InvalidInput("exp term coefficient is not finite");
}

}  // namespace

double ExpTerm::operator()(double x) const
{
    double p = 0.0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it)
        p = p * x + *it;
    return p * std::exp(-rate * x);
}

ExpSum::ExpSum(std::vector<ExpTerm> terms) : terms_(std::move(terms))
{
    for (const auto& t : terms_)
        validate(t);
}

ExpSum ExpSum::exponential(double coeff, double rate)
{
    return ExpSum({ExpTerm{{coeff}, rate}});
}

double ExpSum::operator()(double x) const
{
    CompensatedSum s;
    for (const auto& t : terms_)
        s.add(t(x));
    return s.value();
}

ExpSum& ExpSum::operator+=(const ExpSum& other)
{
    terms_.insert(terms_.end(), other.terms_.begin(), other.terms_.end());
    *this = canonicalize(*this);
    return *this;
}

ExpSum& ExpSum::operator*=(double scale)
{
    for (auto& t : terms_)
        for (auto& c : t.coeffs)
            c *= scale;
    *this = canonicalize(*this);
    return *this;
}

double evaluate(const ExpSum& f, double x) { return f(x); }

ExpSum canonicalize(const ExpSum& f)
{
    std::vector<ExpTerm> sorted(f.terms().begin(), f.terms().end());
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const ExpTerm& a, const ExpTerm& b) { return a.rate < b.rate; });

    std::vector<ExpTerm> merged;
    for (auto& t : sorted) {
        // Groups are anchored at their smallest rate so merging is not transitive
        // across a long chain of near-equal rates.
        if (!merged.empty() && same_rate(merged.back().rate, t.rate)) {
            auto& acc = merged.back().coeffs;
            if (acc.size() < t.coeffs.size())
                acc.resize(t.coeffs.size(), 0.0);
            for (std::size_t k = 0; k < t.coeffs.size(); ++k)
                acc[k] += t.coeffs[k];
        } else {
            merged.push_back(std::move(t));
        }
    }

    std::vector<ExpTerm> out;
    out.reserve(merged.size());
    for (auto& t : merged) {
        while (!t.coeffs.empty() && t.coeffs.back() == 0.0)
            t.coeffs.pop_back();
        if (!t.coeffs.empty())
            out.push_back(std::move(t));
    }
    return ExpSum(std::move(out));
}

ExpSum multiply(const ExpSum& f, const ExpSum& g)
{
    std::vector<ExpTerm> terms;
    terms.reserve(f.size() * g.size());
    for (const auto& a : f.terms()) {
        for (const auto& b : g.terms()) {
            ExpTerm t;
            t.rate = a.rate + b.rate;
            t.coeffs.assign(a.coeffs.size() + b.coeffs.size() - 1, 0.0);
            for (std::size_t i = 0; i < a.coeffs.size(); ++i)
                for (std::size_t j = 0; j < b.coeffs.size(); ++j)
                    t.coeffs[i + j] += a.coeffs[i] * b.coeffs[j];
            terms.push_back(std::move(t));
        }
    }
    return canonicalize(ExpSum(std::move(terms)));
}

ExpSum multiply_all(std::span<const ExpSum> factors)
{
    if (factors.empty())
        throw InvalidInput("empty product of exp sums");
    ExpSum acc = canonicalize(factors.front());
    for (const auto& f : factors.subspan(1))
        acc = multiply(acc, f);
    return acc;
}

ExpSum differentiate(const ExpSum& f)
{
    std::vector<ExpTerm> terms;
    terms.reserve(f.size());
    for (const auto& t : f.terms()) {
        ExpTerm d;
        d.rate = t.rate;
        d.coeffs.resize(t.coeffs.size());
        for (std::size_t k = 0; k < t.coeffs.size(); ++k) {
            d.coeffs[k] = -t.rate * t.coeffs[k];
            if (k + 1 < t.coeffs.size())
                d.coeffs[k] += static_cast<double>(k + 1) * t.coeffs[k + 1];
        }
        terms.push_back(std::move(d));
    }
    return canonicalize(ExpSum(std::move(terms)));
}

double integrate(const ExpSum& f)
{
    CompensatedSum s;
    for (const auto& t : f.terms()) {
        if (!(t.rate > 0.0))
            throw NumericalFailure("divergent integral: term with rate " + std::to_string(t.rate));
        // moment = k! / c^{k+1}, built up iteratively
        double moment = 1.0 / t.rate;
        for (std::size_t k = 0; k < t.coeffs.size(); ++k) {
            if (k > 0)
                moment *= static_cast<double>(k) / t.rate;
            s.add(t.coeffs[k] * moment);
        }
    }
    return s.value();
}

}  // namespace aoi

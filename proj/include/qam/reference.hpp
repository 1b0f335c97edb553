#pragma once

#include <stdexcept>

namespace qam {

/// European call. Times are in years here, unlike the market model's days.
struct VanillaCall {
    double spot = 0.0;
    double strike = 0.0;
    double rate = 0.0;
    double sigma = 0.0;
    double t = 0.0;         // valuation time
    double maturity = 0.0;  // T
};

class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// N(d) = (1/2)[1 + erf(d / sqrt 2)], evaluated as erfc(-d / sqrt 2) / 2.
double std_normal_cdf(double d);

/// Closed-form Black-Scholes call price. Throws DomainError unless
/// spot > 0, strike > 0, sigma > 0 and maturity > t.
double call_price(const VanillaCall& opt);

}  // namespace qam

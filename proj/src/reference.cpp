#include "qam/reference.hpp"

#include <cmath>
#include <numbers>

namespace qam {

double std_normal_cdf(double d) { return 0.5 * std::erfc(-d / std::numbers::sqrt2); }

double call_price(const VanillaCall& opt) {
    if (!(opt.spot > 0.0) || !(opt.strike > 0.0) || !(opt.sigma > 0.0) ||
        !(opt.maturity > opt.t) || !std::isfinite(opt.rate)) {
        throw DomainError("call_price: need spot > 0, strike > 0, sigma > 0, T > t");
    }
    const double tau = opt.maturity - opt.t;
    const double vol = opt.sigma * std::sqrt(tau);
    const double log_moneyness = std::log(opt.spot / opt.strike);
    const double d1 = (log_moneyness + (opt.rate + 0.5 * opt.sigma * opt.sigma) * tau) / vol;
    const double d2 = (log_moneyness + (opt.rate - 0.5 * opt.sigma * opt.sigma) * tau) / vol;
    return opt.spot * std_normal_cdf(d1) -
           opt.strike * std::exp(-opt.rate * tau) * std_normal_cdf(d2);
}

}  // namespace qam

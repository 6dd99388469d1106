#pragma once

namespace copt {

// Lognormal (Black-Scholes) European option prices. `vol` and `rate` are
// annualised, `t_years` is the time to expiry. vol = 0 degenerates to the
// discounted forward intrinsic value.
double black_scholes_call(double spot, double strike, double vol, double t_years, double rate);
double black_scholes_put(double spot, double strike, double vol, double t_years, double rate);

}  // namespace copt

#pragma once

// Independent numeric solution of the RLC driver stage: a voltage step V
// through series L into R parallel C. State (i_L, v_C); returns v_C / R.

#include <array>
#include <vector>

#include <boost/numeric/odeint.hpp>

#include "gainswitch/driver_circuits.hpp"

namespace gainswitch::testing {

inline std::vector<double> rlc_resistor_current_odeint(const RlcParams& p,
                                                       const std::vector<double>& times) {
  namespace odeint = boost::numeric::odeint;
  using state = std::array<double, 2>;
  auto rhs = [&p](const state& x, state& dxdt, double) {
    dxdt[0] = (p.V - x[1]) / p.L;
    dxdt[1] = (x[0] - x[1] / p.R) / p.C;
  };
  std::vector<double> out;
  out.reserve(times.size());
  auto obs = [&](const state& x, double) { out.push_back(x[1] / p.R); };
  state x{0.0, 0.0};
  std::vector<double> ts{0.0};
  ts.insert(ts.end(), times.begin(), times.end());
  auto stepper = odeint::make_dense_output(1e-15, 1e-13, odeint::runge_kutta_dopri5<state>());
  odeint::integrate_times(stepper, rhs, x, ts.begin(), ts.end(), p.L / p.R * 1e-3, obs);
  out.erase(out.begin());  // drop t = 0
  return out;
}

}  // namespace gainswitch::testing

// Prints the pulsed Kapitza-Dirac order populations for a few pulse
// durations and field strengths, the quickest way to see the
// populated-order growth without running any propagation.

#include <cstdio>

#include "kdsim/volkov.hpp"

int main() {
  using namespace kdsim;
  const double lambda = 300.0; // nm
  for (double e0 : {10.0, 15.0, 20.0}) {
    std::printf("E0 = %4.1f GV/m\n", e0);
    for (double tau : {2.0, 4.0, 6.0, 10.0}) {
      auto d = pulsed_orders(e0, lambda, tau, 256);
      int n = populated_order_count(d, 1e-3);
      std::printf("  tau = %4.1f fs  eta = %8.3f  populated orders: %d\n", tau,
                  d.bessel_argument, n);
    }
  }
  return 0;
}

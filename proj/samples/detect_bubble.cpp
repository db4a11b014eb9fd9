// Simulates a price path with a mildly explosive episode that collapses back
// to its pre-bubble level, then runs PWY and RVPWY and date-stamps the RVDF
// detector.

#include <cstdio>

#include "rvbubble/rvbubble.hpp"

int main() {
  using namespace rvbubble;

  const GridSpec grid(252, 78);
  const auto schedule = MildBubbleCrash::with_effective_kappa(0.4, 0.7, 0.05, 0.6, grid.n());
  const auto path = simulate_heston(HestonParams{}, schedule, grid, 7);

  const double tau0 = 0.1;
  const auto rv_trace = rvdf_trace(path, tau0);
  const double pwy = pwy_stat(path, tau0);
  const double rvpwy = sup_stat(rv_trace);
  const double cv5 = builtin_cv(CvKind::PwySup, 0.05);

  std::printf("PWY   = %7.3f  %s at 5%%\n", pwy, pwy > cv5 ? "reject" : "accept");
  std::printf("RVPWY = %7.3f  %s at 5%%\n", rvpwy, rvpwy > cv5 ? "reject" : "accept");

  const auto episodes = date_stamp(rv_trace, 1.0);
  std::printf("true episode: [%.3f, %.3f)\n", 0.4, 0.7);
  for (const auto& e : episodes.episodes) {
    if (e.open()) {
      std::printf("detected: [%.3f, open)\n", e.start);
    } else {
      std::printf("detected: [%.3f, %.3f)\n", e.start, *e.end);
    }
  }
}

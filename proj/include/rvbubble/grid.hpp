#pragma once

#include <cmath>
#include <cstddef>
#include <limits>

#include "rvbubble/error.hpp"

namespace rvbubble {

/// Two-level sampling grid: `n` low-frequency intervals of length `H`, each
/// split into `M` fine steps of length h = H / M.
class GridSpec {
 public:
  GridSpec(std::size_t n, std::size_t M, double H = 1.0) : n_(n), M_(M), H_(H) {
    detail::require(n >= 2, "GridSpec: n must be >= 2");
    detail::require(M >= 1, "GridSpec: M must be >= 1");
    detail::require(std::isfinite(H) && H > 0.0, "GridSpec: H must be positive");
    detail::require(n <= (std::numeric_limits<std::size_t>::max() - 1) / M,
                    "GridSpec: n*M overflows the index type");
  }

  std::size_t n() const noexcept { return n_; }
  std::size_t M() const noexcept { return M_; }
  double H() const noexcept { return H_; }
  double h() const noexcept { return H_ / static_cast<double>(M_); }

  std::size_t fine_steps() const noexcept { return n_ * M_; }

  /// Low-frequency time t_i = iH.
  double coarse_time(std::size_t i) const noexcept {
    return static_cast<double>(i) * H_;
  }

  /// Coarse index floor(fraction * n), the snap point of a regime boundary.
  std::size_t snap(double fraction) const noexcept {
    return static_cast<std::size_t>(
        std::floor(fraction * static_cast<double>(n_) + 1e-9));
  }

  friend bool operator==(const GridSpec&, const GridSpec&) = default;

 private:
  std::size_t n_;
  std::size_t M_;
  double H_;
};

}  // namespace rvbubble

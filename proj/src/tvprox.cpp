#include <cmath>
#include <vector>

#include "specrec/errors.hpp"
#include "specrec/solvers.hpp"

namespace specrec {

double tv_norm(const std::vector<double>& x) {
  double tv = 0.0;
  for (std::size_t j = 1; j < x.size(); ++j) tv += std::abs(x[j] - x[j - 1]);
  return tv;
}

// Direct taut-string sweep after Condat's 1D TV algorithm: walk the signal
// keeping the dual excursions (umin, umax) inside the +-w tube around the
// running segment bounds (vmin, vmax), emitting a flat segment whenever the
// string is forced to jump.
std::vector<double> tv_prox_1d(const std::vector<double>& z, double w) {
  if (!(w >= 0.0)) throw InvalidArgument("tv weight must be >= 0");
  const std::size_t n = z.size();
  std::vector<double> u(n);
  if (n == 0) return u;
  if (w == 0.0 || n == 1) {
    u = z;
    return u;
  }

  std::size_t k = 0, k0 = 0, kminus = 0, kplus = 0;
  double umin = w, umax = -w;
  double vmin = z[0] - w, vmax = z[0] + w;
  const double two_w = 2.0 * w;

  for (;;) {
    while (k == n - 1) {
      if (umin < 0.0) {  // vmin too high: negative jump
        do u[k0++] = vmin;
        while (k0 <= kminus);
        kminus = k = k0;
        vmin = z[k];
        umin = w;
        umax = vmin + umin - vmax;
      } else if (umax > 0.0) {  // vmax too low: positive jump
        do u[k0++] = vmax;
        while (k0 <= kplus);
        kplus = k = k0;
        vmax = z[k];
        umax = -w;
        umin = vmax + umax - vmin;
      } else {  // tail segment is balanced
        vmin += umin / static_cast<double>(k - k0 + 1);
        do u[k0++] = vmin;
        while (k0 <= k);
        return u;
      }
    }
    if ((umin += z[k + 1] - vmin) < -w) {  // negative jump mid-signal
      do u[k0++] = vmin;
      while (k0 <= kminus);
      kplus = kminus = k = k0;
      vmin = z[k];
      vmax = vmin + two_w;
      umin = w;
      umax = -w;
    } else if ((umax += z[k + 1] - vmax) > w) {  // positive jump mid-signal
      do u[k0++] = vmax;
      while (k0 <= kplus);
      kplus = kminus = k = k0;
      vmax = z[k];
      vmin = vmax - two_w;
      umin = w;
      umax = -w;
    } else {
      ++k;
      if (umin >= w) {
        kminus = k;
        vmin += (umin - w) / static_cast<double>(kminus - k0 + 1);
        umin = w;
      }
      if (umax <= -w) {
        kplus = k;
        vmax += (umax + w) / static_cast<double>(kplus - k0 + 1);
        umax = -w;
      }
    }
  }
}

}  // namespace specrec

#include "kernclust/thresholds.hpp"

#include <algorithm>
#include <cmath>

#include "kernclust/common.hpp"

namespace kernclust {

ThresholdSet thresholds(int k, double alpha, double c) {
  if (k < 2) throw InvalidParameter("thresholds: k must be at least 2");
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw InvalidParameter("thresholds: alpha must be positive");
  if (!(c > 0.0) || !std::isfinite(c)) throw InvalidParameter("thresholds: c must be positive");
  const double kd = k;
  ThresholdSet t;
  t.k = k;
  t.alpha = alpha;
  t.c = c;
  t.rho_upper_kernel_np = 2.0 * std::sqrt(kd * std::log(kd) / alpha) + 2.0 * std::log(kd);
  t.rho_lower_np = k == 2 ? std::sqrt(1.0 / alpha) : std::sqrt(2.0 * (kd - 1.0) * std::log(kd - 1.0) / alpha);
  t.rho_lower_p = (kd - 1.0) / std::sqrt(alpha);
  t.rho_upper_kernel_p = c * kd * std::max(1.0, 1.0 / std::sqrt(alpha));
  return t;
}

}  // namespace kernclust

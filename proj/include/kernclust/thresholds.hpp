#pragma once

namespace kernclust {

// Phase-transition boundaries on rho for partial recovery (natural logs).
struct ThresholdSet {
  double rho_upper_kernel_np = 0.0;  // 2 sqrt(k log k / alpha) + 2 log k
  double rho_lower_np = 0.0;         // sqrt(1/alpha) (k = 2), sqrt(2 (k-1) log(k-1) / alpha) (k >= 3)
  double rho_lower_p = 0.0;          // (k - 1) / sqrt(alpha)
  double rho_upper_kernel_p = 0.0;   // c k max(1, 1/sqrt(alpha))
  int k = 2;
  double alpha = 1.0;
  double c = 1.0;
};

ThresholdSet thresholds(int k, double alpha, double c = 1.0);

}  // namespace kernclust

#pragma once

namespace panelcluster {

/// Standard normal distribution function.
double normal_cdf(double x);

/// Inverse standard normal distribution function on (0, 1); rational
/// approximation refined by one Halley step, accurate well below 1e-9.
/// Throws DomainError outside the open interval.
double normal_quantile(double u);

}  // namespace panelcluster

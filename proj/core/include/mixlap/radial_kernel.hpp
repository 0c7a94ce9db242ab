#pragma once

// Sphere averages of the kernel |x - y|^(-N-2s) for |x| = r, |y| = rho.
// Multiplying by |S^(N-1)| rho^(N-1) gives the radial kernel of the
// fractional Laplacian restricted to radial functions.

namespace mixlap {

// a^q - b^q for a = b - 2m, m >= 0, without cancellation when m << b.
double power_gap(double b, double m, double q);

// Average over |y| = rho of 1{|x-y| > delta} |x-y|^(-N-2s).
// delta = 0 gives the untruncated average (requires r != rho).
// N = 1 and N = 3 are closed forms; other N use composite Gauss-Legendre
// panels in the polar angle, graded towards the kernel peak.
double shell_average_kernel(int N, double s, double r, double rho, double delta = 0.0);

// Same, always through the angular quadrature (used to cross-check N = 3).
double shell_average_kernel_angular(int N, double s, double r, double rho, double delta = 0.0);

// |S^(N-1)| * integral over rho > R of the untruncated shell average times
// rho^(N-1); the coupling of a point at radius r < R to the exterior of B_R.
double exterior_integral(int N, double s, double r, double R);

// Second-order coefficient of the shell average for rho >> r:
// average ~ rho^(-N-2s) (1 + far_curvature * r^2 / rho^2).
double far_curvature(int N, double s);

}  // namespace mixlap

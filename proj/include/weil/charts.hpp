#pragma once

#include "weil/ift.hpp"

namespace weil::ift {

// A chart map together with the constraint it parametrizes:
// psi(phi(x)) = 0 on the whole domain ball.
struct ChartPair {
  DifferentiableMap phi;
  DifferentiableMap psi;
};

// phi(x) = (s x, s^2 x^2) on the parabola fiber of psi(y) = y2 - y1^2.
ChartPair parabola_chart(double scale = 1.0);

// phi(x) = (sin x, cos x - 1) on the unit circle through the origin,
// psi(y) = y1^2 + (y2 + 1)^2 - 1.
ChartPair circle_chart();

// Rank-n truncation of the shrinking-radius family: a zero-dimensional
// source, phi = 0, psi(v) = ||v|| v + A v with A = diag(-1/k).
ChartPair truncation_chart(int n);

}  // namespace weil::ift

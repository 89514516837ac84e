#pragma once

#include <array>
#include <functional>

#include "fermigns/field.hpp"

namespace fermigns {

/// Applies a radial Fourier multiplier m(|xi|^2) to u. The Nyquist plane gets
/// the same real multiplier as every other mode.
Field apply_radial_multiplier(const Field& u, const std::function<double(double)>& of_xi2);

/// Sum over the lattice of m(|xi|^2) |F_k|^2 scaled to h^3 sum conj(u) (m u).
double radial_multiplier_form(const Field& u, const std::function<double(double)>& of_xi2);

/// Band-limited translation x -> u(x - shift).
Field translate(const Field& u, const std::array<double, 3>& shift);

/// Fourier interpolation onto a grid with the same box and `points` samples
/// per axis (zero padding or truncation of the spectrum).
Field resample(const Field& u, int points);

/// Band-limited dilation x -> lambda^{-3/2} u(c + (x - c) / lambda) about the
/// grid center c; lambda > 1 spreads the function. Applied axis by axis with
/// the trigonometric interpolation matrix, so it costs O(n^4).
Field dilate(const Field& u, double lambda);

/// Spectral partial derivative along `axis`; the Nyquist mode is dropped so
/// that real input yields real output.
Field partial_derivative(const Field& u, int axis);

/// x . grad f with x measured from the grid center.
Field radial_derivative(const Field& f);

}  // namespace fermigns

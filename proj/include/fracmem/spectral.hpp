#pragma once

#include <random>

#include "fracmem/field.hpp"

namespace fracmem {

/// Copy of f with the spectral representation materialized.
Field to_spectral(Field f);
/// Copy of f with the physical representation materialized.
Field to_physical(Field f);

/// Multiplies the spectral coefficients by a real per-mode symbol.
Field apply_symbol(const Field& f, const std::vector<double>& symbol);

/// (-Laplacian)^order: symbol |xi|^(2*order). The zero mode maps to zero.
Field fractional_laplacian(const Field& f, double order);
/// (-Laplacian)^(order/2): symbol |xi|^order.
Field half_power_laplacian(const Field& f, double order);

/// Two-thirds-rule spectral truncation.
Field dealias(Field f);

/// |f|^power pointwise, then dealiased. Requires power > 1.
Field pointwise_power_abs(const Field& f, double power);

/// Discrete L^2 norm sqrt(sum |f|^2 (L/N)^n). Computed on whichever
/// representation is current; both sides agree by Parseval.
double l2_norm(const Field& f);
/// Parseval (spectral) side of the L^2 norm, sqrt(L^n sum |c_k|^2).
double spectral_l2_norm(const Field& f);
/// Discrete L^q norm (sum |f|^q (L/N)^n)^(1/q) for q >= 1.
double lq_norm(const Field& f, double q);
/// Bessel-potential Sobolev norm sqrt(L^n sum (1+|xi|^2)^index |c_k|^2).
double sobolev_norm(const Field& f, double index);

/// a*x + b*y on the spectral side.
Field axpby(double a, const Field& x, double b, const Field& y);

/// exp(-|x|^2 / (2 width^2)) centred in the box.
Field gaussian_bump(std::shared_ptr<const TorusGrid> grid, double width = 1.0);

/// Real random field supported on modes |k_axis| <= max_mode, unit-scale
/// coefficients. Deterministic for a given engine state.
Field random_band_limited(std::shared_ptr<const TorusGrid> grid, int max_mode,
                          std::mt19937_64& rng);

/// Re-injects the spectral content of f onto a finer grid with the same box.
Field inject_modes(const Field& f, std::shared_ptr<const TorusGrid> finer);

}  // namespace fracmem

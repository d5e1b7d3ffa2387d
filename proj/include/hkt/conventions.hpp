#pragma once

#include "hkt/rational.hpp"

// Sign and normalization ledger for the flat model.  Every constant here was
// fixed by symbolic computation with the standard left-multiplication blocks
// and is asserted by the test suite.
//
//   F_A = g(A., .)              matrix A^T g
//   g   = -F(I., .)             matrix -I^T F
//   A w = (-1)^k w(A., ..., A.) signed action; A dx0 = dx_A
//   d_A w = (-1)^k A d A w
namespace hkt::conventions {

/// g = w (H + I^T H I + J^T H J + K^T H K) for an HKT potential mu with
/// coordinate Hessian H, where F_I = (dd_I + d_J d_K) mu / 2.
inline const Rational kPotentialHessianWeight{1, 2};

/// Trace of the coordinate Hessian of an HKT potential of g = phi * delta on
/// R^4, divided by phi, for the potential-formula normalization.
inline const Rational kPotentialTrace{2};

/// Right-hand side of g^{ij} d_i d_j mu = 4 solved by the 4D elliptic
/// equation Delta mu + omega#(mu) + 4 = 0.
inline const Rational kSolverTrace{4};

/// Solver potential = kSolverPotentialScale * potential-formula potential.
inline const Rational kSolverPotentialScale{2};

/// Global sign s in F_I = s (a ^ Ia + Ja ^ Ka) for a unit coframe 1-form a.
inline constexpr int kCoframeSign = 1;

}  // namespace hkt::conventions

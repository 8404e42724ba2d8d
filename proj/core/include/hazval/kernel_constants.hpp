#pragma once

#include "hazval/kernel.hpp"

namespace hazval {

enum class EstimatorFamily { LL, MBC };

enum class PsiMethod { BO, DO, CV, MISE };

// Bandwidth rescaling factor between one-sided and symmetric cross-validation
// for the local linear estimator:
//   rho^LL = { R(K)/R(Kbar*_L) * mu2(Kbar*_L)^2 / mu2(K)^2 }^(1/5),
// where Kbar*_L is the equivalent local linear kernel of the left one-sided K.
double rho_ll(const Kernel& kernel);

// MBC analogue with twicing kernels and exponent 1/9:
//   rho^MBC = { R(Gamma_K)/R(Gamma_{Kbar*_L}) * mu2(Kbar*_L)^4 / mu2(K)^4 }^(1/9).
double rho_mbc(const Kernel& kernel);

// Convenience dispatch on the estimator family.
double rho_factor(EstimatorFamily family, const Kernel& kernel);

// Asymptotic variance factor Psi of the bandwidth-selector CLTs. With
// M = equivalent kernel (LL family) or its twicing (MBC family),
// M1(u) = -M(u) - u M'(u), G_M(w) = 2 M1(w), and
// H_M(w) = int M(u) {M1(u+w) + M1(u-w)} du:
//   Psi_CV   = int G_{M_K}(u)^2 du
//   Psi_MISE = int H_{M_K}(u)^2 du
//   Psi_BO = Psi_DO
//        = int { c * avg_sides[(H - G)_{M_side}](rho u) - H_{M_K}(u) }^2 du,
// where c = R(M_K)/R(M_L), the side average runs over the left and right
// one-sided constructions (H is even, so only the G part differs between
// sides), and rho is the family rescaling factor. Quadrature error <= 1e-4.
double psi_factor(PsiMethod method, EstimatorFamily family, const Kernel& kernel);

}  // namespace hazval

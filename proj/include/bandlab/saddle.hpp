#pragma once

#include <cstdint>
#include <vector>

#include "bandlab/graph_profile.hpp"
#include "bandlab/types.hpp"

namespace bandlab {

struct SaddleContext {
  double E = 0;
  Complex aPlus, aMinus;  // (iE +- sqrt(4 - E^2)) / 2
  Eigen::Matrix2cd Dpm, Dmp, Dp, Dm;
  ComplexMatrix Aplus, Aminus;  // (1 + a^2) I + a^2 S
  RealMatrix S;
  double c0 = 0;
  double maxMinorInverse = 0;

  int blocks() const { return int(S.rows()); }
};

SaddleContext makeContext(double E, const VarianceProfile& p, double kappa = 0.3);

// a^2/2 - iEa - log a (principal branch)
Complex kk(Complex a, double E);
Complex kkPrime(Complex a, double E);

// -(1/4) sum_{jk} s_jk (a_j - a_k)^2 + sum_j kk(a_j)
Complex ell(const ComplexVector& a, const RealMatrix& S, double E);
ComplexVector ellGradient(const ComplexVector& a, const RealMatrix& S, double E);

// Point of the integration domain. The parameter vectors have length W and
// their first entry is zero (T_1 = V_1 = I):
//   T_j = [[s, t e^{i sigma}], [t e^{-i sigma}, s]],  s = sqrt(1 + t^2)
//   V_j = [[u, v e^{i theta}], [-v e^{-i theta}, u]], u = sqrt(1 - v^2)
struct ContourPoint {
  ComplexVector b1, b2;  // B_j = diag(b_j1, -b_j2)
  ComplexVector x1, x2;  // X_j = diag(x_j1, x_j2)
  RealVector t, sigma;
  RealVector v, theta;
};

enum class SaddleType { Dpm, Dp, Dm };

// (B, T) = (D_pm, I) on the B side; X_j = D_pm, D_p or D_m with V = I.
ContourPoint saddlePoint(const SaddleContext& ctx, SaddleType type = SaddleType::Dpm);

// (T_k T_j^{-1})_12 and (V_k V_j^*)_12
Complex tCross(const ContourPoint& pt, int j, int k);
Complex vCross(const ContourPoint& pt, int j, int k);

Complex ellSB(const ContourPoint& pt, const RealMatrix& S);
Complex ellSX(const ContourPoint& pt, const RealMatrix& S);
Complex lFunctional(const ContourPoint& pt, const SaddleContext& ctx);
Complex kFunctional(const ContourPoint& pt, const SaddleContext& ctx);
// Values at (D_pm, I).
Complex lSaddle(const SaddleContext& ctx);
Complex kSaddle(const SaddleContext& ctx);

// S^v_jk = s_jk |(V_k V_j^*)_12|^2 and the 2W x 2W Laplacian
// [[S - S^v, S^v], [S^v, S - S^v]].
RealMatrix svMatrix(const RealMatrix& S, const ContourPoint& pt);

struct MarginReport {
  int samples = 0;
  double minValue = 0;   // min of the asserted quantity
  double minRatio = 0;   // min fitted ratio (the empirical constant c)
  double minFarRatio = 0;
  int violations = 0;
  double tolerance = 0;
  bool pass = false;
};

// Re L - Re L(D_pm, I) >= 0 over b1 in (a_+ R_+)^W, b2 in (-a_- R_+)^W, random
// T; the ratio is taken against sum (r - 1)^2.
MarginReport verifyLLowerBound(const SaddleContext& ctx, int samples, std::uint64_t seed);

struct KBoundReport {
  MarginReport bound;     // Re K - quadratic - c0 sum (sin - E/2)^2
  MarginReport positive;  // Re K - Re K(D_pm, I)
  double saddleMaxAbs = 0;  // max |Re K - Re K(D_pm, I)| over saddle manifolds
  bool saddlePass = false;
};

KBoundReport verifyKLowerBound(const SaddleContext& ctx, int samples, std::uint64_t seed);

struct SvReport {
  int samples = 0;
  double minEigen = 0;  // min lambda_min(I + S^v) over samples
  double c0 = 0;
  double maxRowSum = 0;
  bool pass = false;
};

SvReport svPositivityCheck(const SaddleContext& ctx, int samples, std::uint64_t seed);

struct MeasureBoundReport {
  int samples = 0;
  double minLogMargin = 0;   // log RHS - log M(t)
  double minPointwiseFirst = 0;   // |cross|^2 - (t_k - t_j)^2 (...)/4
  double minPointwiseSecond = 0;  // (t_k - t_j)^2 (...)/4 - (t_k - t_j)^2/6
  double minSector = 0;     // min of frakA / min r^2 seen
  bool pass = false;
};

// The sector constant: min_{j,k} Re (b_j1 + b_j2)(b_k1 + b_k2).
double sectorConstant(const ContourPoint& pt);
// log of exp{-(M/12) A sum s_jk (t_k - t_j)^2} minus log M(t) = -M Re ell_S.
double measureLogMargin(const ContourPoint& pt, const RealMatrix& S, int M);
MeasureBoundReport measureBoundCheck(const SaddleContext& ctx, int M, int samples,
                                     std::uint64_t seed);

struct DetRatioReport {
  int trials = 0;
  double maxAplusRatio = 0;      // |det A+^(I|J)| / |det A+|
  double maxAminusRatio = 0;
  double maxSRatioMargin = 0;    // max of ratio / bound
  double minSingularValue = 0;   // of A+
  double maxSignError = 0;       // |det S^(i|j) - (-1)^{j-i} det S^(i)| / |det S^(i)|
  bool pass = false;
};

DetRatioReport submatrixDetRatioCheck(const SaddleContext& ctx, int trials, std::uint64_t seed);

}  // namespace bandlab

#pragma once

#include <vector>

#include "cvscramble/rng.hpp"
#include "cvscramble/types.hpp"

namespace cvscramble {

// Block-diagonal form with blocks [[0,1],[-1,0]].
Mat omega(int modes);

// Apply omega / omega^T to a vector without materializing the matrix.
Vec omega_times(const Vec& x);
Vec omega_t_times(const Vec& x);

double symplectic_defect(const Mat& S);  // max |S Omega S^T - Omega|
bool is_symplectic(const Mat& S, double tol = kSymplecticTol);

// Inverse via S^{-1} = Omega S^T Omega^T.
Mat symplectic_inverse(const Mat& S);

// One first-order polar step pulling a drifted S back onto the group.
Mat reproject_symplectic(const Mat& S);

class SymplecticMatrix {
 public:
  SymplecticMatrix() = default;
  // Validates S Omega S^T = Omega and det S = 1 within tol.
  explicit SymplecticMatrix(Mat S, double tol = kSymplecticTol);
  static SymplecticMatrix identity(int modes);
  // Caller guarantees the invariant (products of validated matrices).
  static SymplecticMatrix trusted(Mat S);

  const Mat& mat() const { return S_; }
  int modes() const { return static_cast<int>(S_.rows() / 2); }
  SymplecticMatrix inverse() const;

 private:
  Mat S_;
};

// Heisenberg action U^dag x U = S x + d. Quadratures obey [q,p] = i (vacuum
// covariance I/2); the displacement D(xi) is the standard D(alpha) with
// alpha = xi_q + i xi_p, so D(xi) shifts x by sqrt(2) xi.
struct GaussianUnitary {
  SymplecticMatrix S;
  DisplacementVector d;  // quadrature shift

  GaussianUnitary() = default;
  GaussianUnitary(SymplecticMatrix s, DisplacementVector disp);
  explicit GaussianUnitary(SymplecticMatrix s);

  static GaussianUnitary identity(int modes);
  // the unitary D(delta); its quadrature shift is sqrt(2) delta
  static GaussianUnitary displacement(const DisplacementVector& delta);
  static GaussianUnitary shift(const DisplacementVector& d);
  int modes() const { return S.modes(); }
  GaussianUnitary inverse() const;
};

// Applies inner first, then outer.
GaussianUnitary compose(const GaussianUnitary& outer, const GaussianUnitary& inner);

struct PhasedDisplacement {
  cplx phase;
  DisplacementVector xi;
};

// U^dagger D(xi) U = phase * D(xi_out), phase = exp(i sqrt(2) d^T Omega xi)
PhasedDisplacement evolve_displacement(const GaussianUnitary& U, const DisplacementVector& xi);
// D(xi1) D(xi2) = phase * D(xi1 + xi2)
PhasedDisplacement displacement_product(const DisplacementVector& xi1, const DisplacementVector& xi2);

// Gate set (single- or two-mode, d = 0).
GaussianUnitary rotation(double theta);
GaussianUnitary squeeze(double r);
GaussianUnitary beamsplitter(double eta);
GaussianUnitary two_mode_squeeze(double r);
// Place a k-mode gate on the listed modes of an N-mode register.
GaussianUnitary embed(const GaussianUnitary& gate, const std::vector<int>& modes, int total_modes);

struct EulerFactors {
  Mat K;
  Mat L;
  Vec r;
};

// S = K diag(e^{r_1}, e^{-r_1}, ...) L with K, L orthogonal symplectic.
EulerFactors euler_decompose(const SymplecticMatrix& S);
Mat recompose(const EulerFactors& f);
// ln of the largest singular value
double total_squeezing(const Mat& S);

GaussianUnitary haar_passive(int modes, Rng& rng);
// Haar N x N unitary (Ginibre + QR with phase fix)
CMat haar_unitary(int n, Rng& rng);
// (X + iY) -> [[X, -Y], [Y, X]] blocks in (q,p) ordering
Mat passive_from_unitary(const CMat& U);

// Product of `depth` random gates from the set above (rotation, squeezer,
// beamsplitter, two-mode squeezer) on random modes; squeezing ~ uniform[-max_r, max_r].
// With max_shift > 0 each gate also carries a uniform quadrature shift.
GaussianUnitary random_gaussian_circuit(int modes, int depth, Rng& rng, double max_r = 0.5, double max_shift = 0.0);

// Momentum-sign conjugation Z S Z: the symplectic matrix of U*.
Mat conjugate_symplectic(const Mat& S);

}  // namespace cvscramble

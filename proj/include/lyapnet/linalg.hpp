#pragma once

#include <Eigen/Dense>
#include <utility>

#include "lyapnet/rng.hpp"

namespace lyapnet {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

bool all_finite(const Mat& m);
bool all_finite(const Vec& v);

// Throws NumericalBlowup naming `what` if any entry is non-finite.
void require_finite(const Mat& m, const char* what);
void require_finite(const Vec& v, const char* what);

struct GramSchmidtResult {
    Mat q;      // columns orthonormal
    Vec norms;  // norm of each column before normalization
};

// One step of the tangent-frame update: orthonormalizes the columns of
// j * frame by classical Gram-Schmidt with a second orthogonalization pass
// (CGS2). norms[i] is the length of the i-th vector after orthogonalization
// against the previous ones and before normalization, i.e. the local
// principal stretch along the i-th direction.
//
// Throws DegenerateBasis when a direction collapses (norm < 1e-300).
GramSchmidtResult gram_schmidt_step(const Mat& j, const Mat& frame);

// W_out = u * h^T * (h * h^T + epsilon * I)^{-1}, solved through a Cholesky
// factorization of the symmetric positive-definite system rather than an
// explicit inverse. h is d x T (one column per time step), u is k x T.
// Throws SingularSystem when the factorization fails.
Mat ridge_solve(const Mat& h, const Mat& u, double epsilon);

// |lambda_max| by power iteration from an all-ones start vector. Intended
// for entrywise-nonnegative matrices, where the dominant eigenvalue is real
// and positive; throws NoConvergence when the quotient fails to settle
// within max_iter iterations.
double spectral_radius(const Mat& w, double tol = 1e-12, int max_iter = 10000);

// Random orthonormal d x m frame (entries from rng, then CGS2).
Mat random_orthonormal_frame(int d, int m, RngStream& rng);

}  // namespace lyapnet

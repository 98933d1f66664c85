#include "lyapnet/linalg.hpp"

#include <cmath>
#include <sstream>

#include "lyapnet/errors.hpp"

namespace lyapnet {

bool all_finite(const Mat& m) { return m.allFinite(); }
bool all_finite(const Vec& v) { return v.allFinite(); }

void require_finite(const Mat& m, const char* what) {
    if (!m.allFinite())
        throw NumericalBlowup(std::string(what) + ": non-finite entries");
}

void require_finite(const Vec& v, const char* what) {
    if (!v.allFinite())
        throw NumericalBlowup(std::string(what) + ": non-finite entries");
}

// In-place classical Gram-Schmidt with one re-orthogonalization pass (CGS2).
// Returns the column norms measured after orthogonalization, before
// normalization.
static Vec cgs2_orthonormalize(Mat& v) {
    const Eigen::Index m = v.cols();
    Vec norms(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        auto qi = v.col(i);
        for (int pass = 0; pass < 2; ++pass) {
            for (Eigen::Index j = 0; j < i; ++j) {
                const double proj = qi.dot(v.col(j));
                qi -= proj * v.col(j);
            }
        }
        const double norm = qi.norm();
        if (!(norm >= 1e-300)) {
            std::ostringstream msg;
            msg << "gram_schmidt: direction " << i << " collapsed (norm=" << norm
                << ")";
            throw DegenerateBasis(msg.str());
        }
        norms[i] = norm;
        qi /= norm;
    }
    return norms;
}

GramSchmidtResult gram_schmidt_step(const Mat& j, const Mat& frame) {
    if (j.rows() != frame.rows() || j.rows() != j.cols())
        throw InvalidArgument("gram_schmidt_step: map/frame dimension mismatch");
    GramSchmidtResult out;
    out.q = j * frame;
    out.norms = cgs2_orthonormalize(out.q);
    return out;
}

Mat ridge_solve(const Mat& h, const Mat& u, double epsilon) {
    if (h.cols() != u.cols())
        throw InvalidArgument("ridge_solve: h and u need equal column counts");
    if (h.cols() < 1) throw InvalidArgument("ridge_solve: empty system");
    if (epsilon < 0.0) throw InvalidArgument("ridge_solve: negative epsilon");

    Mat gram = h * h.transpose();
    gram.diagonal().array() += epsilon;

    Eigen::LLT<Mat> llt(gram);
    if (llt.info() != Eigen::Success)
        throw SingularSystem("ridge_solve: h*h^T + eps*I is not positive definite");

    Mat rhs = h * u.transpose();             // d x k
    Mat w_out = llt.solve(rhs).transpose();  // k x d
    require_finite(w_out, "ridge_solve");
    return w_out;
}

double spectral_radius(const Mat& w, double tol, int max_iter) {
    if (w.rows() != w.cols())
        throw InvalidArgument("spectral_radius: matrix must be square");
    if (w.rows() == 0) throw InvalidArgument("spectral_radius: empty matrix");

    Vec x = Vec::Ones(w.rows());
    x /= x.norm();
    double lambda = 0.0;
    for (int it = 0; it < max_iter; ++it) {
        Vec y = w * x;
        require_finite(y, "spectral_radius");
        const double norm = y.norm();
        if (norm == 0.0) return 0.0;  // annihilated the start vector: radius 0
        x = y / norm;
        if (it > 0 && std::abs(norm - lambda) <= tol * std::abs(norm))
            return norm;
        lambda = norm;
    }
    throw NoConvergence("spectral_radius: power iteration did not converge");
}

Mat random_orthonormal_frame(int d, int m, RngStream& rng) {
    if (m > d || m < 1)
        throw InvalidArgument("random_orthonormal_frame: need 1 <= m <= d");
    Mat raw(d, m);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < m; ++j) raw(i, j) = rng.uniform(-1.0, 1.0);
    cgs2_orthonormalize(raw);
    return raw;
}

}  // namespace lyapnet

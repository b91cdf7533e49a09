#include <gdbn/linalg.hpp>

#include <cmath>

namespace gdbn {

Eigen::LLT<Matrix> checked_cholesky(const Matrix& a, const char* what) {
    if (a.rows() != a.cols()) throw std::invalid_argument(std::string(what) + " is not square");
    if (a.rows() == 0) return Eigen::LLT<Matrix>(a);
    if (!a.allFinite()) throw DegenerateMatrixError(std::string(what) + " has non-finite entries");
    const double scale = a.diagonal().cwiseAbs().maxCoeff();
    Eigen::LLT<Matrix> llt(a);
    if (llt.info() != Eigen::Success || scale <= 0.0)
        throw DegenerateMatrixError(std::string(what) + " is not positive definite");
    const auto diag = llt.matrixLLT().diagonal();
    for (Eigen::Index i = 0; i < diag.size(); ++i)
        if (!(diag[i] * diag[i] > kPivotTolerance * scale))
            throw DegenerateMatrixError(std::string(what) + " is numerically singular");
    return llt;
}

double log_det_spd(const Matrix& a, const char* what) {
    const auto llt = checked_cholesky(a, what);
    return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

Matrix principal_submatrix(const Matrix& a, const std::vector<int>& idx) {
    const auto k = static_cast<Eigen::Index>(idx.size());
    Matrix out(k, k);
    for (Eigen::Index r = 0; r < k; ++r)
        for (Eigen::Index c = 0; c < k; ++c) out(r, c) = a(idx[r], idx[c]);
    return out;
}

}  // namespace gdbn

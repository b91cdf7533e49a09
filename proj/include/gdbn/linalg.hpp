#ifndef GDBN_LINALG_HPP
#define GDBN_LINALG_HPP

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <vector>

namespace gdbn {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Raised when a matrix that must be positive definite is not, or is so
/// close to singular that its log-determinant would be meaningless.
class DegenerateMatrixError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Relative pivot threshold used by every factorization in the library.
inline constexpr double kPivotTolerance = 1e-12;

/// Cholesky factor L (lower) of a symmetric positive definite matrix.
/// Throws DegenerateMatrixError when a squared pivot falls below
/// kPivotTolerance times the largest diagonal entry.
Eigen::LLT<Matrix> checked_cholesky(const Matrix& a, const char* what = "matrix");

/// log det(a) for symmetric positive definite a.
double log_det_spd(const Matrix& a, const char* what = "matrix");

/// Principal submatrix a[idx, idx].
Matrix principal_submatrix(const Matrix& a, const std::vector<int>& idx);

}  // namespace gdbn

#endif  // GDBN_LINALG_HPP

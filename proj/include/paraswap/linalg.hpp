#pragma once

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <vector>

namespace paraswap {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;
using RMatrix = Eigen::MatrixXd;

// Two-qubit operators and 16x16 Pauli-basis process matrices.
using Mat2 = Eigen::Matrix2cd;
using Mat4 = Eigen::Matrix4cd;
using Mat16 = Eigen::Matrix<cplx, 16, 16>;
using Vec16 = Eigen::Matrix<cplx, 16, 1>;

inline constexpr cplx kI{0.0, 1.0};

CMatrix kron(const CMatrix& a, const CMatrix& b);
CMatrix kron(const std::vector<CMatrix>& factors);

/// Truncated bosonic lowering operator on `levels` states.
CMatrix lowering(int levels);

/// Embeds a single-mode operator at position `mode` of a tensor product with
/// the given per-mode dimensions (first mode is the most significant index).
CMatrix embed(const CMatrix& op, int mode, const std::vector<int>& dims);

/// ‖A − A†‖ ≤ rel_tol · max(‖A‖, 1)
bool is_hermitian(const CMatrix& a, double rel_tol = 1e-12);
bool is_unitary(const CMatrix& u, double tol = 1e-10);

double min_eigenvalue_hermitian(const CMatrix& a);

namespace pauli {
Mat2 I();
Mat2 X();
Mat2 Y();
Mat2 Z();
}  // namespace pauli

/// Mixed-radix digits of basis index `index` for the given per-mode dims.
std::vector<int> basis_digits(int index, const std::vector<int>& dims);
int basis_index(const std::vector<int>& digits, const std::vector<int>& dims);

}  // namespace paraswap

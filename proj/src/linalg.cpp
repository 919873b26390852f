#include "paraswap/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "paraswap/errors.hpp"

namespace paraswap {

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

CMatrix kron(const std::vector<CMatrix>& factors) {
  if (factors.empty()) return CMatrix::Identity(1, 1);
  CMatrix out = factors.front();
  for (std::size_t k = 1; k < factors.size(); ++k) out = kron(out, factors[k]);
  return out;
}

CMatrix lowering(int levels) {
  if (levels < 1) throw InvalidArgument("lowering operator needs at least one level");
  CMatrix a = CMatrix::Zero(levels, levels);
  for (int n = 1; n < levels; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

CMatrix embed(const CMatrix& op, int mode, const std::vector<int>& dims) {
  std::vector<CMatrix> factors;
  factors.reserve(dims.size());
  for (std::size_t k = 0; k < dims.size(); ++k) {
    if (static_cast<int>(k) == mode) {
      if (op.rows() != dims[k]) throw InvalidArgument("embed: operator dimension mismatch");
      factors.push_back(op);
    } else {
      factors.push_back(CMatrix::Identity(dims[k], dims[k]));
    }
  }
  return kron(factors);
}

bool is_hermitian(const CMatrix& a, double rel_tol) {
  if (a.rows() != a.cols()) return false;
  const double scale = std::max(a.norm(), 1.0);
  return (a - a.adjoint()).norm() <= rel_tol * scale;
}

bool is_unitary(const CMatrix& u, double tol) {
  if (u.rows() != u.cols()) return false;
  return (u * u.adjoint() - CMatrix::Identity(u.rows(), u.cols())).norm() <= tol;
}

double min_eigenvalue_hermitian(const CMatrix& a) {
  const CMatrix h = 0.5 * (a + a.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(h, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

namespace pauli {
Mat2 I() { return Mat2::Identity(); }
Mat2 X() {
  Mat2 m;
  m << 0, 1, 1, 0;
  return m;
}
Mat2 Y() {
  Mat2 m;
  m << 0, -kI, kI, 0;
  return m;
}
Mat2 Z() {
  Mat2 m;
  m << 1, 0, 0, -1;
  return m;
}
}  // namespace pauli

std::vector<int> basis_digits(int index, const std::vector<int>& dims) {
  std::vector<int> digits(dims.size());
  for (int k = static_cast<int>(dims.size()) - 1; k >= 0; --k) {
    digits[k] = index % dims[k];
    index /= dims[k];
  }
  return digits;
}

int basis_index(const std::vector<int>& digits, const std::vector<int>& dims) {
  int index = 0;
  for (std::size_t k = 0; k < dims.size(); ++k) index = index * dims[k] + digits[k];
  return index;
}

}  // namespace paraswap

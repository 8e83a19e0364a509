#include "qmem/numerics.hpp"

#include <cmath>
#include <limits>

#include <unsupported/Eigen/MatrixFunctions>

namespace qmem {

double min_eigenvalue(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) {
    throw DimensionError("min_eigenvalue: non-square matrix " + shape_string(m));
  }
  const ComplexMatrix herm = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(herm, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

ComplexMatrix matrix_exp(const ComplexMatrix& a) {
  if (a.rows() != a.cols()) {
    throw DimensionError("matrix_exp: non-square matrix " + shape_string(a));
  }
  if (a.size() == 0) return a;
  return a.exp();
}

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    return std::numeric_limits<double>::infinity();
  }
  if (a.size() == 0) return 0.0;
  return (a - b).cwiseAbs().maxCoeff();
}

namespace gates {

ComplexMatrix identity(Index d) { return ComplexMatrix::Identity(d, d); }

ComplexMatrix hadamard() {
  const double s = 1.0 / std::sqrt(2.0);
  ComplexMatrix h(2, 2);
  h << s, s, s, -s;
  return h;
}

ComplexMatrix pauli_x() {
  ComplexMatrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

ComplexMatrix pauli_y() {
  ComplexMatrix m(2, 2);
  m << 0, Complex(0, -1), Complex(0, 1), 0;
  return m;
}

ComplexMatrix pauli_z() {
  ComplexMatrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

ComplexMatrix swap() {
  ComplexMatrix m = ComplexMatrix::Zero(4, 4);
  m(0, 0) = 1;
  m(1, 2) = 1;
  m(2, 1) = 1;
  m(3, 3) = 1;
  return m;
}

ComplexMatrix cnot_system_control() {
  return kron(projector(2, 0), identity(2)) + kron(projector(2, 1), pauli_x());
}

ComplexMatrix cnot_environment_control() {
  return kron(identity(2), projector(2, 0)) + kron(pauli_x(), projector(2, 1));
}

ComplexVector ket(Index d, Index i) {
  ComplexVector v = ComplexVector::Zero(d);
  v(i) = 1;
  return v;
}

ComplexVector ket_plus() { return hadamard() * ket(2, 0); }

ComplexVector ket_minus() { return hadamard() * ket(2, 1); }

ComplexMatrix ketbra(const ComplexVector& a, const ComplexVector& b) { return a * b.adjoint(); }

ComplexMatrix projector(Index d, Index i) { return ketbra(ket(d, i), ket(d, i)); }

}  // namespace gates

}  // namespace qmem

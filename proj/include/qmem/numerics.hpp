#pragma once

// Dense complex linear algebra used throughout the library. Everything here is
// a thin layer of free functions over Eigen dense types; dimensions in scope
// never exceed 16, so nothing is sparse or blocked.

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace qmem {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Absolute tolerance for operator-level comparisons.
inline constexpr double kNumericTol = 1e-12;
/// Absolute tolerance for probability-level comparisons.
inline constexpr double kStatsTol = 1e-9;
/// Tolerance used when validating states and channels on construction.
inline constexpr double kValidationTol = 1e-10;

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

template <typename Derived>
std::string shape_string(const Eigen::EigenBase<Derived>& m) {
  return "(" + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) + ")";
}

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& m) {
  return m.derived().array().isFinite().all();
}

template <typename DerivedA, typename DerivedB>
typename DerivedA::PlainObject matmul(const Eigen::MatrixBase<DerivedA>& a,
                                      const Eigen::MatrixBase<DerivedB>& b) {
  if (a.cols() != b.rows()) {
    throw DimensionError("matmul: cannot multiply " + shape_string(a) + " by " +
                         shape_string(b));
  }
  return a * b;
}

template <typename Derived>
typename Derived::PlainObject dagger(const Eigen::MatrixBase<Derived>& m) {
  return m.adjoint();
}

/// Kronecker product; `a` is the slow (left, system) factor, so the composite
/// index is i_a * b.rows() + i_b.
template <typename DerivedA, typename DerivedB>
typename DerivedA::PlainObject kron(const Eigen::MatrixBase<DerivedA>& a,
                                    const Eigen::MatrixBase<DerivedB>& b) {
  typename DerivedA::PlainObject out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

/// Trace out one tensor factor of a square matrix on C^{d1} (x) C^{d2}.
/// With keep_first the input is read as (kept (x) traced), otherwise as
/// (traced (x) kept).
template <typename Derived>
typename Derived::PlainObject partial_trace(const Eigen::MatrixBase<Derived>& m, Index dim_keep,
                                            Index dim_traced, bool keep_first) {
  if (m.rows() != m.cols() || m.rows() != dim_keep * dim_traced) {
    throw DimensionError("partial_trace: matrix " + shape_string(m) +
                         " does not factor as " + std::to_string(dim_keep) + " x " +
                         std::to_string(dim_traced));
  }
  typename Derived::PlainObject out =
      Derived::PlainObject::Zero(dim_keep, dim_keep);
  for (Index k = 0; k < dim_keep; ++k) {
    for (Index l = 0; l < dim_keep; ++l) {
      for (Index t = 0; t < dim_traced; ++t) {
        if (keep_first) {
          out(k, l) += m(k * dim_traced + t, l * dim_traced + t);
        } else {
          out(k, l) += m(t * dim_keep + k, t * dim_keep + l);
        }
      }
    }
  }
  return out;
}

template <typename Derived>
bool is_hermitian(const Eigen::MatrixBase<Derived>& m, double tol = kValidationTol) {
  if (m.rows() != m.cols()) return false;
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

/// Smallest eigenvalue of the Hermitian part of `m`.
double min_eigenvalue(const ComplexMatrix& m);

/// Matrix exponential (scaling and squaring with a Pade core).
ComplexMatrix matrix_exp(const ComplexMatrix& a);

/// Max-abs entrywise distance; infinity on shape mismatch.
double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b);

// Standard gates and basis states, all in the computational basis.
namespace gates {
ComplexMatrix identity(Index d);
ComplexMatrix hadamard();
ComplexMatrix pauli_x();
ComplexMatrix pauli_y();
ComplexMatrix pauli_z();
/// SWAP on two qubits.
ComplexMatrix swap();
/// CNOT on (system (x) environment) with the system qubit as control.
ComplexMatrix cnot_system_control();
/// CNOT on (system (x) environment) with the environment qubit as control.
ComplexMatrix cnot_environment_control();
ComplexVector ket(Index d, Index i);
ComplexVector ket_plus();
ComplexVector ket_minus();
ComplexMatrix ketbra(const ComplexVector& a, const ComplexVector& b);
ComplexMatrix projector(Index d, Index i);
}  // namespace gates

}  // namespace qmem

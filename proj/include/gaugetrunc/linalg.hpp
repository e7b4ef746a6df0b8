#pragma once

#include <complex>

#include <Eigen/Dense>

namespace gaugetrunc {

using cplx = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

inline constexpr cplx kI{0.0, 1.0};

// Largest elementwise magnitude; 0 for an empty matrix.
double max_abs(const CMat& m);
double hermiticity_error(const CMat& m);

// Kronecker product with the left operand as the major index.
CMat kron(const CMat& a, const CMat& b);

struct HermitianEigen {
  RVec values;   // ascending
  CMat vectors;  // columns, orthonormal
};

// Dense Hermitian diagonalization. When `photon_dim` > 0 the matrix is
// treated as living on a matter-major (matter x photon) product space and
// the similarity I (x) diag(i^n) is tried first: if it renders the matrix
// real, the cheaper real symmetric solver is used and the vectors are
// rotated back. Eigenvector phases are fixed so the largest-magnitude
// component is real and positive.
HermitianEigen hermitian_eigen(const CMat& h, long photon_dim = 0,
                               bool compute_vectors = true);

// exp(i * c * G) for Hermitian G via its eigendecomposition.
CMat unitary_exp(const CMat& generator, double c);

// Fix the phase of every column so its largest-magnitude entry is real > 0.
void fix_phases(CMat& vectors);

}  // namespace gaugetrunc

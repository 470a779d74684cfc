#pragma once

#include <Eigen/Dense>
#include <complex>
#include <map>
#include <string>
#include <vector>

#include "qcc/program.hpp"

namespace qcc {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

constexpr double kUnitarityTolerance = 1e-9;
constexpr double kMatrixTolerance = 1e-8;

// DEFGATE table used when evaluating non-builtin gates.
using GateDefinitions = std::map<std::string, GateDefinition>;

// Matrix of a gate application. The first qubit argument is the most
// significant bit of the matrix index.
Matrix gate_matrix(const GateApplication& g, const GateDefinitions& defs = {});
Matrix gate_matrix(const std::string& name, const std::vector<double>& params, const GateDefinitions& defs = {});

bool is_unitary(const Matrix& m, double tol = kUnitarityTolerance);
bool equiv_up_to_phase(const Matrix& a, const Matrix& b, double tol = kMatrixTolerance);
bool collinear(const Vector& a, const Vector& b, double tol = 1e-9);

Matrix kron(const Matrix& a, const Matrix& b);

// Product of a gate sequence acting on `qubits` (qubits[0] is the most
// significant bit of the result). Gates are applied in sequence order.
Matrix sequence_matrix(const std::vector<GateApplication>& seq, const std::vector<int>& qubits,
                       const GateDefinitions& defs = {});

// Applies a k-qubit matrix to the columns of `state` (dimension 2^n). Local
// index bit (k-1-j) of `m` corresponds to position `positions[j]`, counted
// from the most significant bit of the 2^n index.
void apply_matrix(Matrix& state, const Matrix& m, const std::vector<int>& positions, int n);

// Rotation matrices used throughout synthesis.
Matrix rx(double theta);
Matrix ry(double theta);
Matrix rz(double theta);

}  // namespace qcc

#include "qcc/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "qcc/errors.hpp"

namespace qcc {

namespace {

constexpr Complex kI(0.0, 1.0);

Matrix from_rows(int dim, std::initializer_list<Complex> entries) {
  Matrix m(dim, dim);
  auto it = entries.begin();
  for (int r = 0; r < dim; ++r) {
    for (int c = 0; c < dim; ++c) m(r, c) = *it++;
  }
  return m;
}

}  // namespace

Matrix rx(double t) {
  const double c = std::cos(t / 2), s = std::sin(t / 2);
  return from_rows(2, {c, -kI * s, -kI * s, c});
}

Matrix ry(double t) {
  const double c = std::cos(t / 2), s = std::sin(t / 2);
  return from_rows(2, {c, -s, s, c});
}

Matrix rz(double t) {
  return from_rows(2, {std::exp(-kI * (t / 2)), 0.0, 0.0, std::exp(kI * (t / 2))});
}

Matrix gate_matrix(const std::string& name, const std::vector<double>& p, const GateDefinitions& defs) {
  const double r2 = 1.0 / std::sqrt(2.0);
  auto need = [&](size_t n) {
    if (p.size() != n) throw Error("gate " + name + " expects " + std::to_string(n) + " parameter(s)");
  };
  if (name == "I") return Matrix::Identity(2, 2);
  if (name == "X") return from_rows(2, {0.0, 1.0, 1.0, 0.0});
  if (name == "Y") return from_rows(2, {0.0, -kI, kI, 0.0});
  if (name == "Z") return from_rows(2, {1.0, 0.0, 0.0, -1.0});
  if (name == "H") return from_rows(2, {r2, r2, r2, -r2});
  if (name == "S") return from_rows(2, {1.0, 0.0, 0.0, kI});
  if (name == "T") return from_rows(2, {1.0, 0.0, 0.0, std::exp(kI * (std::numbers::pi / 4))});
  if (name == "RX") return need(1), rx(p[0]);
  if (name == "RY") return need(1), ry(p[0]);
  if (name == "RZ") return need(1), rz(p[0]);
  if (name == "CNOT") {
    return from_rows(4, {1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 1.0, 0.0});
  }
  if (name == "CZ") {
    Matrix m = Matrix::Identity(4, 4);
    m(3, 3) = -1.0;
    return m;
  }
  if (name == "SWAP") {
    return from_rows(4, {1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0});
  }
  if (name == "ISWAP") {
    return from_rows(4, {1.0, 0.0, 0.0, 0.0, 0.0, 0.0, kI, 0.0, 0.0, kI, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0});
  }
  if (name == "CPHASE") {
    need(1);
    Matrix m = Matrix::Identity(4, 4);
    m(3, 3) = std::exp(kI * p[0]);
    return m;
  }
  if (name == "CCNOT") {
    Matrix m = Matrix::Identity(8, 8);
    m(6, 6) = m(7, 7) = 0.0;
    m(6, 7) = m(7, 6) = 1.0;
    return m;
  }
  auto it = defs.find(name);
  if (it == defs.end()) throw Error("no matrix known for gate '" + name + "'");
  const GateDefinition& def = it->second;
  if (p.size() != def.params.size()) throw Error("gate " + name + " parameter count mismatch");
  std::map<std::string, Complex> env;
  for (size_t i = 0; i < p.size(); ++i) env[def.params[i]] = p[i];
  Matrix m(def.dimension, def.dimension);
  for (int r = 0; r < def.dimension; ++r) {
    for (int c = 0; c < def.dimension; ++c) {
      m(r, c) = evaluate(*def.entries[static_cast<size_t>(r * def.dimension + c)], env);
    }
  }
  if (!is_unitary(m)) throw Error("gate '" + name + "' is not unitary");
  return m;
}

Matrix gate_matrix(const GateApplication& g, const GateDefinitions& defs) {
  std::vector<double> values;
  for (const auto& e : g.params) {
    if (!e.is_concrete()) throw Error("gate " + g.name + " has a symbolic parameter");
    values.push_back(e.value());
  }
  return gate_matrix(g.name, values, defs);
}

bool is_unitary(const Matrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  return (m * m.adjoint() - Matrix::Identity(m.rows(), m.cols())).norm() <= tol;
}

bool equiv_up_to_phase(const Matrix& a, const Matrix& b, double tol) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw std::invalid_argument("dimension mismatch");
  Eigen::Index r = 0, c = 0;
  b.cwiseAbs().maxCoeff(&r, &c);
  if (std::abs(b(r, c)) < 1e-14) return a.cwiseAbs().maxCoeff() <= tol;
  Complex ratio = a(r, c) / b(r, c);
  if (std::abs(std::abs(ratio) - 1.0) > tol) return false;
  ratio /= std::abs(ratio);
  return (a - ratio * b).cwiseAbs().maxCoeff() <= tol;
}

bool collinear(const Vector& a, const Vector& b, double tol) {
  return std::abs(std::abs(a.dot(b)) - a.norm() * b.norm()) <= tol;
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

void apply_matrix(Matrix& state, const Matrix& m, const std::vector<int>& positions, int n) {
  const int k = static_cast<int>(positions.size());
  const long dim = 1L << n;
  const long sub = 1L << k;
  std::vector<long> masks(static_cast<size_t>(k));
  long all = 0;
  for (int j = 0; j < k; ++j) {
    masks[static_cast<size_t>(j)] = 1L << (n - 1 - positions[static_cast<size_t>(j)]);
    all |= masks[static_cast<size_t>(j)];
  }
  std::vector<long> offsets(static_cast<size_t>(sub), 0);
  for (long l = 0; l < sub; ++l) {
    for (int j = 0; j < k; ++j) {
      if (l & (1L << (k - 1 - j))) offsets[static_cast<size_t>(l)] |= masks[static_cast<size_t>(j)];
    }
  }
  Vector buf(sub);
  for (Eigen::Index col = 0; col < state.cols(); ++col) {
    for (long base = 0; base < dim; ++base) {
      if (base & all) continue;
      for (long l = 0; l < sub; ++l) buf(l) = state(base | offsets[static_cast<size_t>(l)], col);
      Vector out = m * buf;
      for (long l = 0; l < sub; ++l) state(base | offsets[static_cast<size_t>(l)], col) = out(l);
    }
  }
}

Matrix sequence_matrix(const std::vector<GateApplication>& seq, const std::vector<int>& qubits,
                       const GateDefinitions& defs) {
  const int n = static_cast<int>(qubits.size());
  Matrix u = Matrix::Identity(1L << n, 1L << n);
  for (const auto& g : seq) {
    std::vector<int> pos;
    for (int q : g.qubits) {
      auto it = std::find(qubits.begin(), qubits.end(), q);
      if (it == qubits.end()) throw std::invalid_argument("gate acts outside the given qubits");
      pos.push_back(static_cast<int>(it - qubits.begin()));
    }
    apply_matrix(u, gate_matrix(g, defs), pos, n);
  }
  return u;
}

}  // namespace qcc

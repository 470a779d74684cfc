#include "qcc/verify.hpp"

#include <algorithm>
#include <set>

#include "qcc/errors.hpp"

namespace qcc {

namespace {

std::vector<GateApplication> gates_of(const std::vector<Instruction>& seq, const VerifyOptions& o) {
  std::vector<GateApplication> out;
  for (const auto& i : seq) {
    const auto* g = std::get_if<GateApplication>(&i);
    if (!g) throw Error("verification needs straight-line gate programs");
    GateApplication bound = *g;
    for (auto& p : bound.params) {
      if (!p.is_concrete()) {
        try {
          p = ParamExpr(p.evaluate(o.bindings));
        } catch (const std::exception&) {
          throw Error("verification needs values for every symbolic parameter");
        }
      }
    }
    out.push_back(std::move(bound));
  }
  return out;
}

// Max entrywise distance after the best global phase.
double phase_distance(const Matrix& a, const Matrix& b) {
  const Complex overlap = (b.adjoint() * a).trace();
  const Complex phase = std::abs(overlap) < 1e-14 ? Complex(1.0) : overlap / std::abs(overlap);
  return (a - phase * b).cwiseAbs().maxCoeff();
}

VerifyResult compare(const Matrix& a, const Matrix& b, int n, const VerifyOptions& o) {
  VerifyResult r;
  r.qubits = n;
  r.deviation = o.state_only ? phase_distance(a.col(0), b.col(0)) : phase_distance(a, b);
  r.equivalent = r.deviation <= o.tolerance;
  return r;
}

void check_size(size_t n, const VerifyOptions& o) {
  if (static_cast<int>(n) > o.max_qubits) {
    throw Error("verification is limited to " + std::to_string(o.max_qubits) + " qubits (program uses " +
                std::to_string(n) + ")");
  }
}

}  // namespace

VerifyResult verify_compiled(const std::vector<Instruction>& input, const std::vector<Instruction>& output,
                             const Rewiring& entry, const std::map<int, int>& permutation,
                             const VerifyOptions& options) {
  std::vector<GateApplication> in = gates_of(input, options);
  const std::vector<GateApplication> out = gates_of(output, options);
  std::set<int> wires;
  for (auto& g : in) {
    for (int& q : g.qubits) {
      const auto p = entry.physical(q);
      if (!p) throw Error("logical qubit " + std::to_string(q) + " has no entry placement");
      q = *p;
      wires.insert(q);
    }
  }
  for (const auto& g : out) wires.insert(g.qubits.begin(), g.qubits.end());
  // Close the wire set under the permutation so P is a permutation of it.
  for (bool grew = true; grew;) {
    grew = false;
    for (int p : std::vector<int>(wires.begin(), wires.end())) {
      auto it = permutation.find(p);
      if (it != permutation.end() && wires.insert(it->second).second) grew = true;
    }
  }
  check_size(wires.size(), options);
  const std::vector<int> qs(wires.begin(), wires.end());
  const int n = static_cast<int>(qs.size());
  const GateDefinitions none;
  const GateDefinitions& defs = options.defs ? *options.defs : none;
  const Matrix u_in = sequence_matrix(in, qs, defs);
  const Matrix u_out = sequence_matrix(out, qs, defs);
  const long dim = 1L << n;
  Matrix perm = Matrix::Zero(dim, dim);
  for (long x = 0; x < dim; ++x) {
    long y = 0;
    for (int i = 0; i < n; ++i) {
      if (!((x >> (n - 1 - i)) & 1L)) continue;
      auto it = permutation.find(qs[static_cast<size_t>(i)]);
      const int to = it == permutation.end() ? qs[static_cast<size_t>(i)] : it->second;
      const long j = std::find(qs.begin(), qs.end(), to) - qs.begin();
      y |= 1L << (n - 1 - j);
    }
    perm(y, x) = 1.0;
  }
  return compare(u_out, perm * u_in, n, options);
}

VerifyResult verify_same(const std::vector<GateApplication>& a, const std::vector<GateApplication>& b,
                         const VerifyOptions& options) {
  const std::vector<Instruction> ia(a.begin(), a.end());
  const std::vector<Instruction> ib(b.begin(), b.end());
  const auto ga = gates_of(ia, options);
  const auto gb = gates_of(ib, options);
  std::set<int> wires;
  for (const auto* s : {&ga, &gb}) {
    for (const auto& g : *s) wires.insert(g.qubits.begin(), g.qubits.end());
  }
  check_size(wires.size(), options);
  const std::vector<int> qs(wires.begin(), wires.end());
  const GateDefinitions none;
  const GateDefinitions& defs = options.defs ? *options.defs : none;
  if (qs.empty()) return {true, 0.0, 0};
  return compare(sequence_matrix(gb, qs, defs), sequence_matrix(ga, qs, defs), static_cast<int>(qs.size()), options);
}

}  // namespace qcc

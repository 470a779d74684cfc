#include "qcc/rules.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <set>

#include "qcc/errors.hpp"
#include "qcc/parser.hpp"
#include "qcc/statesim.hpp"

namespace qcc {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kZeroAngle = 1e-10;

using Window = std::span<const GateApplication>;

GateApplication g1(const char* name, int q) { return {name, {}, {q}}; }
GateApplication g2(const char* name, int a, int b) { return {name, {}, {a, b}}; }
GateApplication rot(const char* name, ParamExpr theta, int q) { return {name, {std::move(theta)}, {q}}; }

bool shares_qubit(const GateApplication& a, const GateApplication& b) {
  for (int q : a.qubits) {
    if (std::find(b.qubits.begin(), b.qubits.end(), q) != b.qubits.end()) return true;
  }
  return false;
}

bool is_1q_diagonal(const GateApplication& g) {
  static const std::set<std::string> names{"RZ", "Z", "S", "T", "I"};
  return g.qubits.size() == 1 && names.count(g.name) > 0;
}

const GateDefinitions& defs_of(const RuleContext& ctx) {
  static const GateDefinitions empty;
  return ctx.options.defs ? *ctx.options.defs : empty;
}

bool all_concrete(Window w) {
  return std::all_of(w.begin(), w.end(), [](const GateApplication& g) { return g.is_concrete(); });
}

std::vector<int> window_qubits(Window w) {
  std::vector<int> qs;
  for (const auto& g : w) {
    for (int q : g.qubits) {
      if (std::find(qs.begin(), qs.end(), q) == qs.end()) qs.push_back(q);
    }
  }
  return qs;
}

// Maps gates on local indices 0..n-1 onto `qubits`.
GateSeq relabel(GateSeq seq, const std::vector<int>& qubits) {
  for (auto& g : seq) {
    for (int& q : g.qubits) q = qubits[static_cast<size_t>(q)];
  }
  return seq;
}

std::optional<GateSeq> agglutinate_rz(Window w, const RuleContext&) {
  if (w[0].name != "RZ" || w[1].name != "RZ" || w[0].qubits != w[1].qubits) return std::nullopt;
  return GateSeq{rot("RZ", simplify_param(w[0].params[0] + w[1].params[0]), w[0].qubits[0])};
}

std::optional<GateSeq> agglutinate_rx(Window w, const RuleContext&) {
  if (w[0].name != "RX" || w[1].name != "RX" || w[0].qubits != w[1].qubits) return std::nullopt;
  ParamExpr sum = simplify_param(w[0].params[0] + w[1].params[0]);
  if (sum.is_concrete()) {
    if (std::abs(std::remainder(sum.value(), 2 * kPi)) < kZeroAngle) return GateSeq{};
    sum = ParamExpr(wrap_pi(sum.value()));
  }
  return GateSeq{rot("RX", sum, w[0].qubits[0])};
}

std::optional<GateSeq> eliminate_zero_rotation(Window w, const RuleContext&) {
  const auto& g = w[0];
  if (g.name != "RX" && g.name != "RY" && g.name != "RZ") return std::nullopt;
  if (!is_zero_angle(g.params[0])) return std::nullopt;
  return GateSeq{};
}

std::optional<GateSeq> eliminate_full_cphase(Window w, const RuleContext&) {
  const auto& g = w[0];
  if (g.name != "CPHASE" || !is_zero_angle(g.params[0])) return std::nullopt;
  return GateSeq{};
}

std::optional<GateSeq> commute_rz_cz(Window w, const RuleContext&) {
  if (w[0].name != "RZ" || w[1].name != "CZ" || !shares_qubit(w[0], w[1])) return std::nullopt;
  return GateSeq{w[1], w[0]};
}

std::optional<GateSeq> commute_diagonal_cphase(Window w, const RuleContext&) {
  if (!is_1q_diagonal(w[0]) || w[1].name != "CPHASE" || !shares_qubit(w[0], w[1])) return std::nullopt;
  return GateSeq{w[1], w[0]};
}

std::optional<GateSeq> rule_cnot_to_cz(Window w, const RuleContext&) {
  if (w[0].name != "CNOT") return std::nullopt;
  return cnot_to_cz(w[0].qubits[0], w[0].qubits[1]);
}

std::optional<GateSeq> rule_cz_to_cnot(Window w, const RuleContext&) {
  if (w[0].name != "CZ") return std::nullopt;
  return cz_to_cnot(w[0].qubits[0], w[0].qubits[1]);
}

std::optional<GateSeq> rule_swap(Window w, const RuleContext&) {
  if (w[0].name != "SWAP") return std::nullopt;
  return swap_to_cnots(w[0].qubits[0], w[0].qubits[1]);
}

std::optional<GateSeq> rule_cphase_template(Window w, const RuleContext&) {
  if (w[0].name != "CPHASE") return std::nullopt;
  return cphase_template(w[0].params[0], w[0].qubits[0], w[0].qubits[1]);
}

std::optional<GateSeq> rule_ccnot(Window w, const RuleContext&) {
  if (w[0].name != "CCNOT") return std::nullopt;
  return ccnot_template(w[0].qubits[0], w[0].qubits[1], w[0].qubits[2]);
}

std::optional<GateSeq> euler_zyz(Window w, const RuleContext& ctx) {
  const auto& g = w[0];
  if (g.qubits.size() != 1 || !g.is_concrete()) return std::nullopt;
  const Matrix u = gate_matrix(g, defs_of(ctx));
  if (ctx.chip) return synthesize_1q_native(u, g.qubits[0], *ctx.chip, ctx.options);
  const ZyzAngles z = zyz_decompose(u);
  const int q = g.qubits[0];
  return GateSeq{rot("RZ", z.alpha, q), rot("RY", z.beta, q), rot("RZ", z.gamma, q)};
}

std::optional<GateSeq> two_qubit_block(const Matrix& u, int a, int b, const RuleContext& ctx) {
  if (ctx.chip && ctx.chip->adjacent(a, b)) return synthesize_2q_native(u, a, b, *ctx.chip, ctx.options);
  return relabel(kak_synthesize(u, "CNOT"), {a, b});
}

std::optional<GateSeq> kak(Window w, const RuleContext& ctx) {
  const auto& g = w[0];
  if (g.qubits.size() != 2 || !g.is_concrete()) return std::nullopt;
  return two_qubit_block(gate_matrix(g, defs_of(ctx)), g.qubits[0], g.qubits[1], ctx);
}

std::optional<GateSeq> generic(Window w, const RuleContext& ctx) {
  const auto& g = w[0];
  if (g.qubits.size() < 3 || g.qubits.size() > 4 || !g.is_concrete()) return std::nullopt;
  return relabel(generic_synthesize(gate_matrix(g, defs_of(ctx))), g.qubits);
}

std::optional<GateSeq> fuse_2q(Window w, const RuleContext& ctx) {
  if (w.empty() || !all_concrete(w)) return std::nullopt;
  const auto qs = window_qubits(w);
  if (qs.size() != 2) return std::nullopt;
  const Matrix u = sequence_matrix(GateSeq(w.begin(), w.end()), qs, defs_of(ctx));
  return two_qubit_block(u, qs[0], qs[1], ctx);
}

std::optional<GateSeq> elide_eigen(Window w, const RuleContext& ctx) {
  if (!ctx.state || !w[0].is_concrete()) return std::nullopt;
  const auto& s = *ctx.state;
  std::vector<int> pos;
  for (int q : w[0].qubits) {
    auto it = std::find(s.qubits.begin(), s.qubits.end(), q);
    if (it == s.qubits.end()) return std::nullopt;
    pos.push_back(static_cast<int>(it - s.qubits.begin()));
  }
  Matrix v = s.amplitudes;
  apply_matrix(v, gate_matrix(w[0], defs_of(ctx)), pos, static_cast<int>(s.qubits.size()));
  if (!collinear(s.amplitudes, v.col(0))) return std::nullopt;
  return GateSeq{};
}

std::optional<GateSeq> state_prep(Window w, const RuleContext& ctx) {
  if (!ctx.state_prep || !ctx.state || !ctx.chip || ctx.state->qubits.size() > 2) return std::nullopt;
  for (int q : window_qubits(w)) {
    if (std::find(ctx.state->qubits.begin(), ctx.state->qubits.end(), q) == ctx.state->qubits.end()) {
      return std::nullopt;
    }
  }
  return state_prep_resynthesize(ctx.state->amplitudes, ctx.state->qubits, *ctx.chip, ctx.options);
}

std::vector<RewriteRule> build_catalog() {
  const GateShape n1{kNative1Q, std::nullopt};
  const GateShape n2{kNative2Q, std::nullopt};
  auto shape = [](const char* op, std::optional<double> p = std::nullopt) { return GateShape{op, p}; };
  std::vector<RewriteRule> c;
  c.push_back({"agglutinate-RZs", "RZ(a) q; RZ(b) q => RZ(a+b) q", 2, {"RZ", "RZ"}, 0, {shape("RZ")}, false, true,
               agglutinate_rz});
  c.push_back({"agglutinate-RXs", "RX(a) q; RX(b) q => RX(a+b) q", 2, {"RX", "RX"}, 0, {shape("RX")}, false, true,
               agglutinate_rx});
  c.push_back({"eliminate-zero-rotation", "RX/RY/RZ by a multiple of 2pi => nothing", 1, {""}, 1, {}, false, true,
               eliminate_zero_rotation});
  c.push_back({"eliminate-full-CPHASE", "CPHASE by a multiple of 2pi => nothing", 1, {"CPHASE"}, 0, {}, false, true,
               eliminate_full_cphase});
  c.push_back({"commute-RZ-through-CZ", "RZ(a) p; CZ p q => CZ p q; RZ(a) p", 2, {"RZ", "CZ"}, 0,
               {shape("CZ"), shape("RZ")}, false, true, commute_rz_cz});
  c.push_back({"commute-diagonal-through-CPHASE", "diagonal p; CPHASE(t) p q => CPHASE(t) p q; diagonal p", 2,
               {"", "CPHASE"}, 1, {shape("CPHASE"), n1}, false, true, commute_diagonal_cphase});
  c.push_back({"CNOT-to-CZ", "CNOT c t => H t; CZ c t; H t", 1, {"CNOT"}, 0, {shape("H"), shape("CZ")}, false, false,
               rule_cnot_to_cz});
  c.push_back({"CZ-to-CNOT", "CZ a b => H b; CNOT a b; H b", 1, {"CZ"}, 0, {shape("H"), shape("CNOT")}, false, false,
               rule_cz_to_cnot});
  c.push_back({"SWAP-to-3-entanglers", "SWAP a b => CNOT a b; CNOT b a; CNOT a b", 1, {"SWAP"}, 0, {shape("CNOT")},
               false, false, rule_swap});
  c.push_back({"CPHASE-template", "CPHASE(t) a b => CZ-based template keeping t symbolic", 1, {"CPHASE"}, 0,
               {shape("RZ"), shape("RX", kPi / 2), shape("RX", -kPi / 2), shape("CZ")}, false, false,
               rule_cphase_template});
  c.push_back({"CCNOT-to-CNOT", "CCNOT a b c => 6 CNOTs, H and RZ(+-pi/4)", 1, {"CCNOT"}, 0,
               {shape("H"), shape("CNOT"), shape("RZ", kPi / 4), shape("RZ", -kPi / 4)}, false, false, rule_ccnot});
  c.push_back({"euler-zyz-compiler", "concrete one-qubit gate => native Euler rotations", 1, {""}, 1, {n1}, false,
               false, euler_zyz});
  c.push_back({"kak-compiler", "concrete two-qubit gate => at most 3 native entanglers", 1, {""}, 2, {n1, n2}, false,
               false, kak});
  c.push_back({"generic-synthesizer", "concrete 3-4 qubit gate => CNOT and rotations", 1, {""}, 3,
               {shape("CNOT"), shape("RZ"), shape("RY")}, false, false, generic});
  c.push_back({"fuse-2q-block", "block on two qubits => resynthesized composite", 0, {}, 0, {n1, n2}, false, false,
               fuse_2q});
  c.push_back({"elide-applications-on-eigenvectors", "gate with the tracked state as eigenvector => nothing", 1,
               {""}, 0, {}, true, true, elide_eigen});
  c.push_back({"state-prep", "leading segment => shortest preparation of its output state", 0, {}, 0, {n1, n2}, true,
               false, state_prep});
  return c;
}

int op_qubits(const std::string& op) { return builtin_signature(op).second; }

bool shape_native(const GateShape& s, const ChipSpecification& chip) {
  if (s.op == kNative1Q) return !chip.qubits.empty();
  if (s.op == kNative2Q) return !chip.links.empty();
  auto check = [&](const std::vector<NativeGateRecord>& recs) {
    for (const auto& r : recs) {
      if (r.op != s.op) continue;
      if (r.params.empty()) return true;
      if (!r.params[0]) return true;
      if (s.param && std::abs(std::remainder(*r.params[0] - *s.param, 2 * kPi)) < kZeroAngle) return true;
    }
    return false;
  };
  for (const auto& [_, q] : chip.qubits) {
    if (check(q.gates)) return true;
  }
  for (const auto& [_, l] : chip.links) {
    if (check(l.gates)) return true;
  }
  return false;
}

}  // namespace

bool GateShape::operator<(const GateShape& o) const {
  if (op != o.op) return op < o.op;
  return param < o.param;
}

bool GateShape::operator==(const GateShape& o) const { return op == o.op && param == o.param; }

std::string to_string(RuleClass c) {
  switch (c) {
    case RuleClass::Nativizer: return "nativizer";
    case RuleClass::Optimizer: return "optimizer";
    case RuleClass::Neither: return "neither";
  }
  return "neither";
}

double wrap_pi(double theta) {
  double r = std::remainder(theta, 2 * kPi);
  if (r <= -kPi + 1e-15) r += 2 * kPi;
  return r;
}

bool is_zero_angle(const ParamExpr& e) {
  return e.is_concrete() && std::abs(std::remainder(e.value(), 2 * kPi)) < kZeroAngle;
}

bool is_diagonal_gate(const GateApplication& g) {
  static const std::set<std::string> names{"RZ", "Z", "S", "T", "I", "CZ", "CPHASE"};
  return names.count(g.name) > 0;
}

GateSeq ccnot_template(int q0, int q1, int q2) {
  const double p4 = kPi / 4;
  return {g1("H", q2),           g2("CNOT", q1, q2), rot("RZ", -p4, q2), g2("CNOT", q0, q2), rot("RZ", p4, q2),
          g2("CNOT", q1, q2),    rot("RZ", -p4, q2), g2("CNOT", q0, q2), rot("RZ", p4, q1),  rot("RZ", p4, q2),
          g2("CNOT", q0, q1),    g1("H", q2),        rot("RZ", p4, q0),  rot("RZ", -p4, q1), g2("CNOT", q0, q1)};
}

GateSeq cphase_template(const ParamExpr& theta, int a, int b) {
  const ParamExpr half = simplify_param(theta * 0.5);
  return {rot("RZ", -kPi / 2, b),
          rot("RX", kPi / 2, b),
          g2("CZ", b, a),
          rot("RX", -kPi / 2, b),
          rot("RZ", simplify_param(-half), b),
          rot("RX", kPi / 2, b),
          g2("CZ", b, a),
          rot("RZ", half, a),
          rot("RX", -kPi / 2, b),
          rot("RZ", simplify_param(ParamExpr(kPi / 2) + half), b)};
}

GateSeq cnot_to_cz(int control, int target) {
  return {g1("H", target), g2("CZ", control, target), g1("H", target)};
}

GateSeq cz_to_cnot(int a, int b) { return {g1("H", b), g2("CNOT", a, b), g1("H", b)}; }

GateSeq swap_to_cnots(int a, int b) { return {g2("CNOT", a, b), g2("CNOT", b, a), g2("CNOT", a, b)}; }

const std::vector<RewriteRule>& rule_catalog() {
  static const std::vector<RewriteRule> catalog = build_catalog();
  return catalog;
}

const RewriteRule& find_rule(const std::string& name) {
  for (const auto& r : rule_catalog()) {
    if (r.name == name) return r;
  }
  throw Error("unknown rule '" + name + "'");
}

RuleClass classify_rule(const RewriteRule& rule, const ChipSpecification& chip) {
  if (rule.state_aware) return chip.qubits.empty() ? RuleClass::Neither : RuleClass::Optimizer;

  // Shapes that some chain of single-instruction rules turns into native gates.
  // "any_k" records that every concrete k-qubit gate is covered.
  std::set<std::string> reachable_ops;
  std::set<int> any_arity;
  auto reachable = [&](const GateShape& s) {
    if (shape_native(s, chip) || reachable_ops.count(s.op)) return true;
    const int k = op_qubits(s.op);
    const bool concrete = s.param.has_value() || builtin_signature(s.op).first == 0;
    return concrete && k > 0 && any_arity.count(std::min(k, 3)) > 0;
  };
  bool grew = true;
  while (grew) {
    grew = false;
    for (const auto& r : rule_catalog()) {
      if (r.state_aware || r.input_arity != 1) continue;
      if (!std::all_of(r.outputs.begin(), r.outputs.end(), reachable)) continue;
      const std::string& op = r.input_ops[0];
      if (op.empty()) {
        if (r.input_qubits > 0 && !r.outputs.empty() && any_arity.insert(r.input_qubits).second) grew = true;
      } else if (reachable_ops.insert(op).second) {
        grew = true;
      }
    }
  }

  const bool inputs_native =
      rule.input_arity > 0 && std::all_of(rule.input_ops.begin(), rule.input_ops.end(), [&](const std::string& op) {
        if (op.empty()) return rule.input_qubits == 1 ? !chip.qubits.empty() : false;
        return shape_native({op, std::nullopt}, chip);
      });
  const bool outputs_native = std::all_of(rule.outputs.begin(), rule.outputs.end(),
                                          [&](const GateShape& s) { return shape_native(s, chip); });
  if (inputs_native && outputs_native && rule.never_worse) return RuleClass::Optimizer;
  if (rule.input_arity == 1 && !rule.outputs.empty() &&
      std::all_of(rule.outputs.begin(), rule.outputs.end(), reachable)) {
    return RuleClass::Nativizer;
  }
  return RuleClass::Neither;
}

}  // namespace qcc

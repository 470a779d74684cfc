#include "qcc/compressor.hpp"

#include <algorithm>
#include <set>

#include "qcc/rules.hpp"

namespace qcc {

namespace {

constexpr int kMaxRounds = 10;

struct Resources {
  std::set<int> qubits;
  std::set<MemoryRef> memory;

  bool meets(const Resources& o) const {
    for (int q : o.qubits) {
      if (qubits.count(q)) return true;
    }
    for (const auto& m : o.memory) {
      if (memory.count(m)) return true;
    }
    return false;
  }
  bool contains(const Resources& o) const {
    return std::includes(qubits.begin(), qubits.end(), o.qubits.begin(), o.qubits.end()) &&
           std::includes(memory.begin(), memory.end(), o.memory.begin(), o.memory.end());
  }
  void add(const Resources& o) {
    qubits.insert(o.qubits.begin(), o.qubits.end());
    memory.insert(o.memory.begin(), o.memory.end());
  }
  std::string describe() const {
    std::string s = "{";
    for (int q : qubits) s += (s.size() > 1 ? " " : "") + std::to_string(q);
    for (const auto& m : memory) s += (s.size() > 1 ? " " : "") + m.name + "[" + std::to_string(m.index) + "]";
    return s + "}";
  }
};

Resources resources_of(const Instruction& instr) {
  Resources r;
  for (int q : instruction_qubits(instr)) r.qubits.insert(q);
  if (const auto* m = std::get_if<Measure>(&instr)) r.memory.insert(m->target);
  return r;
}

bool shares_qubit(const GateApplication& a, const GateApplication& b) {
  return std::any_of(a.qubits.begin(), a.qubits.end(), [&](int q) {
    return std::find(b.qubits.begin(), b.qubits.end(), q) != b.qubits.end();
  });
}

bool touches(const GateApplication& g, int q) { return std::find(g.qubits.begin(), g.qubits.end(), q) != g.qubits.end(); }

// Everything the walk needs, computed once per compress call.
struct Context {
  const ChipSpecification& chip;
  const CompressOptions& options;
  std::vector<const RewriteRule*> unary;
  std::vector<const RewriteRule*> binary;
  const RewriteRule* commute = nullptr;

  Context(const ChipSpecification& c, const CompressOptions& o) : chip(c), options(o) {
    for (const auto& r : rule_catalog()) {
      if (r.state_aware || r.input_arity == 0 || classify_rule(r, chip) != RuleClass::Optimizer) continue;
      if (r.name.rfind("commute-", 0) == 0) {
        if (r.name == "commute-RZ-through-CZ") commute = &r;
        continue;
      }
      (r.input_arity == 1 ? unary : binary).push_back(&r);
    }
  }

  Trace* trace() const { return options.nativize.trace; }
  SeqCost cost(const GateSeq& s) const { return sequence_cost(s, chip, options.nativize.cost); }
};

// Next gate after i sharing a qubit with seq[i]. A diagonal 1Q gate slides
// past diagonal 2Q gates, which it commutes with.
std::optional<size_t> partner(const GateSeq& seq, size_t i, std::vector<size_t>* skipped) {
  const auto& x = seq[i];
  const bool slides = x.qubits.size() == 1 && is_diagonal_gate(x);
  for (size_t j = i + 1; j < seq.size(); ++j) {
    if (!shares_qubit(x, seq[j])) continue;
    if (slides && seq[j].qubits.size() == 2 && is_diagonal_gate(seq[j])) {
      if (skipped) skipped->push_back(j);
      continue;
    }
    return j;
  }
  return std::nullopt;
}

bool peephole_pass(GateSeq& seq, const Context& ctx) {
  RuleContext rc{&ctx.chip, ctx.options.nativize, nullptr, false};
  for (size_t i = 0; i < seq.size(); ++i) {
    for (const RewriteRule* r : ctx.unary) {
      const GateSeq window{seq[i]};
      auto out = r->apply(window, rc);
      if (!out || out->size() >= 1 || !all_native(*out, ctx.chip)) continue;
      if (ctx.trace()) ctx.trace()->rule("compress", r->name, window, *out);
      seq.erase(seq.begin() + static_cast<long>(i));
      return true;
    }
    std::vector<size_t> skipped;
    const auto j = partner(seq, i, &skipped);
    if (!j) continue;
    for (const RewriteRule* r : ctx.binary) {
      const GateSeq window{seq[i], seq[*j]};
      auto out = r->apply(window, rc);
      if (!out || out->size() >= 2 || !all_native(*out, ctx.chip)) continue;
      if (ctx.trace()) {
        for (size_t k : skipped) {
          if (k < *j && ctx.commute) ctx.trace()->rule("compress", ctx.commute->name, {seq[i], seq[k]}, {seq[k], seq[i]});
        }
        ctx.trace()->rule("compress", r->name, window, *out);
      }
      seq.erase(seq.begin() + static_cast<long>(*j));
      seq.insert(seq.begin() + static_cast<long>(*j), out->begin(), out->end());
      seq.erase(seq.begin() + static_cast<long>(i));
      return true;
    }
  }
  return false;
}

GateSeq peephole_impl(GateSeq seq, const Context& ctx) {
  while (peephole_pass(seq, ctx)) {
  }
  return seq;
}

struct Replacement {
  std::vector<size_t> members;
  GateSeq gates;
};

GateSeq apply_replacements(const GateSeq& seq, const std::vector<Replacement>& reps) {
  std::vector<bool> removed(seq.size(), false);
  std::map<size_t, const GateSeq*> at;
  for (const auto& r : reps) {
    for (size_t m : r.members) removed[m] = true;
    at[r.members.back()] = &r.gates;
  }
  GateSeq out;
  for (size_t i = 0; i < seq.size(); ++i) {
    if (auto it = at.find(i); it != at.end()) out.insert(out.end(), it->second->begin(), it->second->end());
    if (!removed[i]) out.push_back(seq[i]);
  }
  return out;
}

std::vector<Replacement> one_qubit_runs(const GateSeq& seq, const Context& ctx) {
  NativizeOptions o = ctx.options.nativize;
  o.verbatim_zyz = false;
  o.trace = nullptr;
  std::map<int, std::vector<size_t>> open;
  std::vector<Replacement> reps;
  auto close = [&](int q) {
    auto it = open.find(q);
    if (it == open.end()) return;
    const std::vector<size_t> run = std::move(it->second);
    open.erase(it);
    if (run.size() < 2) return;
    GateSeq old;
    for (size_t i : run) old.push_back(seq[i]);
    auto fresh = synthesize_1q_native(sequence_matrix(old, {q}, o.defs ? *o.defs : GateDefinitions{}), q, ctx.chip, o);
    if (!fresh || !(ctx.cost(*fresh) < ctx.cost(old))) return;
    if (ctx.trace()) ctx.trace()->rule("compress", "euler-zyz-compiler", old, *fresh);
    reps.push_back({run, *fresh});
  };
  for (size_t i = 0; i < seq.size(); ++i) {
    const auto& g = seq[i];
    if (g.qubits.size() == 1 && g.is_concrete()) {
      open[g.qubits[0]].push_back(i);
    } else {
      for (int q : g.qubits) close(q);
    }
  }
  while (!open.empty()) close(open.begin()->first);
  return reps;
}

std::vector<Replacement> two_qubit_blocks(const GateSeq& seq, const Context& ctx) {
  NativizeOptions o = ctx.options.nativize;
  o.trace = nullptr;
  std::vector<bool> used(seq.size(), false);
  std::vector<Replacement> reps;
  for (size_t s = 0; s < seq.size(); ++s) {
    const auto& seed = seq[s];
    if (used[s] || seed.qubits.size() != 2 || !seed.is_concrete()) continue;
    const int a = seed.qubits[0], b = seed.qubits[1];
    if (!ctx.chip.adjacent(a, b)) continue;
    std::vector<size_t> members;
    // Preceding 1Q gates on a and b, back to the first other gate on them.
    for (int q : {a, b}) {
      for (size_t k = s; k-- > 0;) {
        const auto& g = seq[k];
        if (!touches(g, q)) continue;
        if (used[k] || g.qubits.size() != 1 || !g.is_concrete()) break;
        members.push_back(k);
      }
    }
    members.push_back(s);
    int entanglers = 1;
    for (size_t k = s + 1; k < seq.size(); ++k) {
      const auto& g = seq[k];
      if (!touches(g, a) && !touches(g, b)) continue;
      const bool inside = std::all_of(g.qubits.begin(), g.qubits.end(), [&](int q) { return q == a || q == b; });
      if (!inside || !g.is_concrete() || used[k]) break;
      members.push_back(k);
      entanglers += g.qubits.size() == 2;
    }
    std::sort(members.begin(), members.end());
    if (members.size() < 2) continue;
    GateSeq old;
    for (size_t i : members) old.push_back(seq[i]);
    const Matrix u = sequence_matrix(old, {a, b}, o.defs ? *o.defs : GateDefinitions{});
    GateSeq fresh;
    try {
      fresh = synthesize_2q_native(u, a, b, ctx.chip, o);
    } catch (const std::exception&) {
      continue;
    }
    if (!(ctx.cost(fresh) < ctx.cost(old))) continue;
    if (ctx.trace()) ctx.trace()->rule("compress", "fuse-2q-block", old, fresh);
    for (size_t i : members) used[i] = true;
    reps.push_back({members, fresh});
    (void)entanglers;
  }
  return reps;
}

GateSeq rollup_impl(const GateSeq& seq, const Context& ctx) {
  GateSeq cur = apply_replacements(seq, one_qubit_runs(seq, ctx));
  return apply_replacements(cur, two_qubit_blocks(cur, ctx));
}

GateSeq optimize_impl(GateSeq seq, const Context& ctx) {
  for (int round = 0; round < kMaxRounds; ++round) {
    GateSeq next = peephole_impl(seq, ctx);
    if (ctx.options.rollups) next = peephole_impl(rollup_impl(next, ctx), ctx);
    if (next == seq) break;
    seq = std::move(next);
  }
  return seq;
}

struct Subgraph {
  GateSeq members;
  Resources tag;
};

class Walker {
 public:
  explicit Walker(const Context& ctx) : ctx_(ctx) {}

  std::vector<Instruction> walk(const std::vector<Instruction>& input, int depth) {
    std::vector<Subgraph> subs;
    std::vector<Instruction> out;
    const int limit = ctx_.options.limit;
    for (const auto& instr : input) {
      const Resources r = resources_of(instr);
      const auto* g = std::get_if<GateApplication>(&instr);
      const bool gate = g && static_cast<int>(g->qubits.size()) <= limit;
      std::vector<size_t> met;
      for (size_t i = 0; i < subs.size(); ++i) {
        if (subs[i].tag.meets(r)) met.push_back(i);
      }
      if (met.empty() && gate && !forbidden_within(r)) {
        subs.push_back({{*g}, r});
        continue;
      }
      Resources sum = r;
      for (size_t i : met) sum.add(subs[i].tag);
      const bool hits_forbidden = forbidden_within(sum);
      const bool too_big = static_cast<int>(sum.qubits.size()) > limit;
      if (!gate || hits_forbidden || too_big) {
        std::vector<Subgraph> taken;
        for (size_t k = met.size(); k-- > 0;) {
          taken.insert(taken.begin(), std::move(subs[met[k]]));
          subs.erase(subs.begin() + static_cast<long>(met[k]));
        }
        for (auto& s : taken) {
          std::vector<Resources> marks;
          if (hits_forbidden) marks.push_back(s.tag);
          if (too_big) marks.push_back(sum);
          flush(s, marks, depth, out);
        }
        out.push_back(instr);
        continue;
      }
      Subgraph merged;
      for (size_t i : met) {
        merged.members.insert(merged.members.end(), subs[i].members.begin(), subs[i].members.end());
      }
      merged.members.push_back(*g);
      merged.tag = sum;
      for (size_t k = met.size(); k-- > 1;) subs.erase(subs.begin() + static_cast<long>(met[k]));
      subs[met[0]] = std::move(merged);
    }
    for (auto& s : subs) flush(s, {}, depth, out);
    return out;
  }

 private:
  bool forbidden_within(const Resources& r) const {
    return std::any_of(forbidden_.begin(), forbidden_.end(), [&](const Resources& f) { return r.contains(f); });
  }

  void flush(const Subgraph& s, const std::vector<Resources>& marks, int depth, std::vector<Instruction>& out) {
    const GateSeq processed = optimize_impl(s.members, ctx_);
    if (depth >= ctx_.options.rewalk_depth) {
      out.insert(out.end(), processed.begin(), processed.end());
      return;
    }
    for (const auto& m : marks) {
      if (ctx_.trace()) ctx_.trace()->note("compress", "forbid " + m.describe());
      forbidden_.push_back(m);
    }
    const auto again = walk({processed.begin(), processed.end()}, depth + 1);
    forbidden_.resize(forbidden_.size() - marks.size());
    out.insert(out.end(), again.begin(), again.end());
  }

  const Context& ctx_;
  std::vector<Resources> forbidden_;
};

}  // namespace

GateSeq peephole(const GateSeq& seq, const ChipSpecification& chip, const CompressOptions& options) {
  return peephole_impl(seq, Context(chip, options));
}

GateSeq rollup_resynthesize(const GateSeq& seq, const ChipSpecification& chip, const CompressOptions& options) {
  return rollup_impl(seq, Context(chip, options));
}

GateSeq optimize_sequence(const GateSeq& seq, const ChipSpecification& chip, const CompressOptions& options) {
  return optimize_impl(seq, Context(chip, options));
}

std::vector<Instruction> compress(const std::vector<Instruction>& seq, const ChipSpecification& chip,
                                  const CompressOptions& options) {
  const Context ctx(chip, options);
  std::vector<Instruction> cur = seq;
  for (int round = 0; round < kMaxRounds; ++round) {
    Walker w(ctx);
    std::vector<Instruction> next = w.walk(cur, 0);
    if (next == cur) break;
    cur = std::move(next);
  }
  return cur;
}

GateSeq compress(const GateSeq& seq, const ChipSpecification& chip, const CompressOptions& options) {
  const auto out = compress(std::vector<Instruction>(seq.begin(), seq.end()), chip, options);
  GateSeq gates;
  for (const auto& i : out) gates.push_back(std::get<GateApplication>(i));
  return gates;
}

}  // namespace qcc

#include "qcc/cfg.hpp"

#include <algorithm>
#include <functional>
#include <queue>
#include <set>

#include "qcc/errors.hpp"

namespace qcc {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

bool is_empty(const BasicBlock& b) { return b.label.empty() && b.header.empty() && b.body.empty(); }

const std::string& jump_label(const Instruction& i) {
  if (const auto* j = std::get_if<Jump>(&i)) return j->label;
  if (const auto* j = std::get_if<JumpWhen>(&i)) return j->label;
  return std::get<JumpUnless>(i).label;
}

}  // namespace

ControlFlowGraph build_cfg(const Program& p) {
  ControlFlowGraph g;
  g.blocks.emplace_back();
  auto close = [&](TerminatorKind kind, std::optional<Instruction> instr) {
    BasicBlock& b = g.blocks.back();
    b.term.kind = kind;
    if (instr) b.term.instr = *instr;
    g.blocks.emplace_back();
  };
  for (const auto& instr : p.body) {
    std::visit(overloaded{
                   [&](const Label& l) {
                     if (!is_empty(g.blocks.back())) close(TerminatorKind::Fallthrough, std::nullopt);
                     g.blocks.back().label = l.name;
                   },
                   [&](const Jump&) { close(TerminatorKind::Jump, instr); },
                   [&](const JumpWhen&) { close(TerminatorKind::JumpWhen, instr); },
                   [&](const JumpUnless&) { close(TerminatorKind::JumpUnless, instr); },
                   [&](const Pragma&) {
                     if (!g.blocks.back().body.empty()) close(TerminatorKind::Fallthrough, std::nullopt);
                     g.blocks.back().header.push_back(instr);
                   },
                   [&](const CircuitCall& c) { throw Error("circuit " + c.name + " was not expanded"); },
                   [&](const auto&) { g.blocks.back().body.push_back(instr); },
               },
               instr);
  }
  // A trailing empty block left by a final jump carries nothing.
  if (g.blocks.size() > 1 && is_empty(g.blocks.back())) g.blocks.pop_back();
  g.blocks.back().term.kind = g.blocks.back().term.kind == TerminatorKind::Fallthrough ? TerminatorKind::Halt
                                                                                     : g.blocks.back().term.kind;

  std::map<std::string, int> labels;
  for (int i = 0; i < static_cast<int>(g.blocks.size()); ++i) {
    const auto& l = g.blocks[static_cast<size_t>(i)].label;
    if (l.empty()) continue;
    if (!labels.emplace(l, i).second) throw Error("label @" + l + " is defined twice");
  }
  for (int i = 0; i < static_cast<int>(g.blocks.size()); ++i) {
    Terminator& t = g.blocks[static_cast<size_t>(i)].term;
    const bool last = i + 1 == static_cast<int>(g.blocks.size());
    if (t.kind == TerminatorKind::Jump || t.kind == TerminatorKind::JumpWhen || t.kind == TerminatorKind::JumpUnless) {
      const std::string& l = jump_label(t.instr);
      auto it = labels.find(l);
      if (it == labels.end()) throw Error("jump to undefined label @" + l);
      t.target = it->second;
    }
    if (t.kind == TerminatorKind::Fallthrough || t.kind == TerminatorKind::JumpWhen ||
        t.kind == TerminatorKind::JumpUnless) {
      t.next = last ? -1 : i + 1;
    }
    if (t.kind == TerminatorKind::Fallthrough && last) t.kind = TerminatorKind::Halt;
  }
  return g;
}

std::vector<int> ControlFlowGraph::successors(int b) const {
  const Terminator& t = blocks[static_cast<size_t>(b)].term;
  std::vector<int> out;
  if (t.target >= 0) out.push_back(t.target);
  if (t.next >= 0 && std::find(out.begin(), out.end(), t.next) == out.end()) out.push_back(t.next);
  return out;
}

std::vector<int> ControlFlowGraph::predecessors(int b) const {
  std::vector<int> out;
  for (int i = 0; i < static_cast<int>(blocks.size()); ++i) {
    const auto s = successors(i);
    if (std::find(s.begin(), s.end(), b) != s.end()) out.push_back(i);
  }
  return out;
}

std::vector<int> ControlFlowGraph::reverse_post_order() const {
  std::vector<int> post;
  std::vector<bool> seen(blocks.size(), false);
  std::function<void(int)> dfs = [&](int b) {
    seen[static_cast<size_t>(b)] = true;
    for (int s : successors(b)) {
      if (!seen[static_cast<size_t>(s)]) dfs(s);
    }
    post.push_back(b);
  };
  if (!blocks.empty()) dfs(entry);
  std::reverse(post.begin(), post.end());
  return post;
}

std::vector<std::pair<int, int>> rewiring_swaps(const ChipSpecification& chip, const Rewiring& from, const Rewiring& to) {
  // Tokens: logical qubits that `to` places; every other slot content is free.
  std::map<int, int> content;  // slot -> logical, or -1
  for (int q : chip.qubit_ids()) content[q] = -1;
  bool needed = false;
  for (auto [l, p] : from.l2p()) {
    if (!to.physical(l)) continue;
    content.at(p) = l;
    needed |= *to.physical(l) != p;
  }
  if (!needed) return {};
  for (auto [l, p] : to.l2p()) {
    if (!from.physical(l)) throw AddressingError("logical qubit " + std::to_string(l) + " has no place to come from");
  }

  // Spanning tree of the component holding the tokens.
  const int root = to.l2p().begin()->second;
  std::map<int, int> parent{{root, root}};
  std::vector<int> order{root};
  for (size_t i = 0; i < order.size(); ++i) {
    for (int n : chip.neighbors(order[i])) {
      if (parent.emplace(n, order[i]).second) order.push_back(n);
    }
  }
  for (auto [l, p] : to.l2p()) {
    if (!parent.count(p) || !parent.count(*from.physical(l))) throw AddressingError("rewiring spans disconnected qubits");
  }
  std::set<int> remaining(order.begin(), order.end());
  auto tree_neighbors = [&](int v) {
    std::vector<int> out;
    for (int n : chip.neighbors(v)) {
      if (remaining.count(n) && (parent.at(n) == v || parent.at(v) == n) && n != v) out.push_back(n);
    }
    return out;
  };
  auto tree_path = [&](int a, int b) {
    std::map<int, int> prev{{a, a}};
    std::queue<int> q;
    q.push(a);
    while (!q.empty()) {
      const int v = q.front();
      q.pop();
      for (int n : tree_neighbors(v)) {
        if (prev.emplace(n, v).second) q.push(n);
      }
    }
    std::vector<int> path{b};
    while (path.back() != a) path.push_back(prev.at(path.back()));
    std::reverse(path.begin(), path.end());
    return path;
  };

  std::vector<std::pair<int, int>> swaps;
  while (remaining.size() > 1) {
    int leaf = -1;
    for (int v : remaining) {
      if (tree_neighbors(v).size() <= 1) {
        leaf = v;
        break;
      }
    }
    const auto wanted = to.logical(leaf);
    std::optional<int> source;
    if (wanted) {
      for (auto [slot, l] : content) {
        if (l == *wanted) source = slot;
      }
    } else if (content.at(leaf) >= 0) {
      // Pull in the nearest free slot.
      std::map<int, int> dist{{leaf, 0}};
      std::queue<int> q;
      q.push(leaf);
      while (!q.empty() && !source) {
        const int v = q.front();
        q.pop();
        for (int n : tree_neighbors(v)) {
          if (!dist.emplace(n, dist[v] + 1).second) continue;
          if (content.at(n) < 0) {
            source = n;
            break;
          }
          q.push(n);
        }
      }
    }
    if (source && *source != leaf) {
      const auto path = tree_path(*source, leaf);
      for (size_t i = 0; i + 1 < path.size(); ++i) {
        swaps.emplace_back(std::min(path[i], path[i + 1]), std::max(path[i], path[i + 1]));
        std::swap(content.at(path[i]), content.at(path[i + 1]));
      }
    }
    remaining.erase(leaf);
  }
  return swaps;
}

std::vector<Instruction> reassemble(const ControlFlowGraph& cfg, const std::vector<CompiledBlock>& compiled,
                                    const ChipSpecification& chip,
                                    const std::function<std::vector<Instruction>(const std::vector<std::pair<int, int>>&)>& fixup) {
  std::set<std::string> taken;
  for (const auto& b : cfg.blocks) taken.insert(b.label);
  auto fresh = [&](const std::string& base) {
    std::string name = base;
    for (int k = 1; taken.count(name); ++k) name = base + "-" + std::to_string(k);
    taken.insert(name);
    return name;
  };
  auto edge_code = [&](int from, int to) {
    return fixup(rewiring_swaps(chip, compiled[static_cast<size_t>(from)].exit, compiled[static_cast<size_t>(to)].entry));
  };
  auto append = [](std::vector<Instruction>& out, const std::vector<Instruction>& more) {
    out.insert(out.end(), more.begin(), more.end());
  };

  std::vector<Instruction> out;
  std::vector<Instruction> trampolines;
  for (int i = 0; i < static_cast<int>(cfg.blocks.size()); ++i) {
    const BasicBlock& b = cfg.blocks[static_cast<size_t>(i)];
    if (!b.label.empty()) out.emplace_back(Label{b.label});
    append(out, b.header);
    append(out, compiled[static_cast<size_t>(i)].code);
    const Terminator& t = b.term;
    switch (t.kind) {
      case TerminatorKind::Halt:
        break;
      case TerminatorKind::Fallthrough:
        append(out, edge_code(i, t.next));
        break;
      case TerminatorKind::Jump:
        append(out, edge_code(i, t.target));
        out.push_back(t.instr);
        break;
      case TerminatorKind::JumpWhen:
      case TerminatorKind::JumpUnless: {
        const auto taken_code = edge_code(i, t.target);
        if (taken_code.empty()) {
          out.push_back(t.instr);
        } else {
          // The taken edge detours through a block that fixes the wiring.
          const std::string tramp = fresh("rewire-" + std::to_string(i));
          Instruction j = t.instr;
          std::visit(overloaded{[&](JumpWhen& x) { x.label = tramp; }, [&](JumpUnless& x) { x.label = tramp; },
                                [](auto&) {}},
                     j);
          out.push_back(j);
          trampolines.emplace_back(Label{tramp});
          append(trampolines, taken_code);
          trampolines.emplace_back(Jump{cfg.blocks[static_cast<size_t>(t.target)].label});
        }
        if (t.next >= 0) append(out, edge_code(i, t.next));
        break;
      }
    }
  }
  if (!trampolines.empty()) {
    const std::string end = fresh("end-of-program");
    out.emplace_back(Jump{end});
    append(out, trampolines);
    out.emplace_back(Label{end});
  }
  return out;
}

}  // namespace qcc

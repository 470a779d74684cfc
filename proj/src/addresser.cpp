#include "qcc/addresser.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <queue>
#include <random>
#include <set>

#include "qcc/errors.hpp"
#include "qcc/linalg.hpp"

namespace qcc {

InstructionDag build_dag(const std::vector<Instruction>& block) {
  InstructionDag dag;
  dag.nodes = block;
  dag.preds.resize(block.size());
  dag.succs.resize(block.size());
  std::map<std::string, int> last;
  for (int i = 0; i < static_cast<int>(block.size()); ++i) {
    std::vector<std::string> res;
    for (int q : instruction_qubits(block[static_cast<size_t>(i)])) res.push_back("q" + std::to_string(q));
    if (const auto* m = std::get_if<Measure>(&block[static_cast<size_t>(i)])) {
      res.push_back(m->target.name + "[" + std::to_string(m->target.index) + "]");
    }
    for (const auto& r : res) {
      auto it = last.find(r);
      if (it != last.end() && it->second != i) {
        dag.edges.push_back({it->second, i, r});
        auto& p = dag.preds[static_cast<size_t>(i)];
        if (std::find(p.begin(), p.end(), it->second) == p.end()) {
          p.push_back(it->second);
          dag.succs[static_cast<size_t>(it->second)].push_back(i);
        }
      }
      last[r] = i;
    }
  }
  return dag;
}

std::optional<int> Rewiring::physical(int logical) const {
  auto it = l2p_.find(logical);
  if (it == l2p_.end()) return std::nullopt;
  return it->second;
}

std::optional<int> Rewiring::logical(int physical) const {
  auto it = p2l_.find(physical);
  if (it == p2l_.end()) return std::nullopt;
  return it->second;
}

void Rewiring::assign(int logical, int physical) {
  if (l2p_.count(logical) || p2l_.count(physical)) {
    throw AddressingError("rewiring conflict assigning " + std::to_string(logical) + " to " + std::to_string(physical));
  }
  l2p_[logical] = physical;
  p2l_[physical] = logical;
}

void Rewiring::swap_physical(int a, int b) {
  const auto la = logical(a);
  const auto lb = logical(b);
  p2l_.erase(a);
  p2l_.erase(b);
  if (la) {
    l2p_[*la] = b;
    p2l_[b] = *la;
  }
  if (lb) {
    l2p_[*lb] = a;
    p2l_[a] = *lb;
  }
}

std::string format_rewiring(const Rewiring& r) {
  std::string s = "#(";
  bool first = true;
  for (auto [l, p] : r.l2p()) {
    if (!first) s += " ";
    first = false;
    s += std::to_string(l) + "->" + std::to_string(p);
  }
  return s + ")";
}

AddressConfig default_address_config(const ChipSpecification& chip) {
  AddressConfig c;
  bool fidelities = false;
  for (const auto& [id, q] : chip.qubits) {
    for (const auto& r : q.gates) fidelities |= r.fidelity < 1.0;
  }
  for (const auto& [key, l] : chip.links) {
    for (const auto& r : l.gates) fidelities |= r.fidelity < 1.0;
  }
  if (fidelities) {
    c.cost = CostMode::Fidelity;
    c.search = SearchMode::AStar;
  }
  return c;
}

namespace {

constexpr double kEps = 1e-9;

// Cost of running a 2Q gate on physical p, q: the gate itself once adjacent,
// plus the cheapest swap route that brings p next to q.
double unit_cost(const ChipSpecification& chip, const CostTable& t, int p, int q) {
  if (chip.adjacent(p, q)) return t.edge(p, q) / 3.0;
  double best = CostTable::kInfinity;
  for (int r : chip.neighbors(q)) best = std::min(best, t.cost(p, r) + t.edge(r, q) / 3.0);
  return best;
}

bool is_two_qubit(const Instruction& i) {
  const auto* g = std::get_if<GateApplication>(&i);
  return g && g->qubits.size() == 2;
}

// Unplaced partners of pending gates are placed greedily on a scratch copy,
// each next to its already-placed partner, so later gates see them.
double heuristic_impl(const ChipSpecification& chip, const CostTable& t, const Rewiring& wiring,
                      const std::vector<GateApplication>& pending, double discount) {
  Rewiring w = wiring;
  double total = 0.0;
  double weight = 1.0;
  for (const auto& g : pending) {
    if (g.qubits.size() != 2) continue;
    auto pa = w.physical(g.qubits[0]);
    auto pb = w.physical(g.qubits[1]);
    double c = 0.0;
    if (pa && pb) {
      c = unit_cost(chip, t, *pa, *pb);
    } else if (pa || pb) {
      const int p = pa ? *pa : *pb;
      std::optional<int> best;
      double best_cost = CostTable::kInfinity;
      for (int r : t.ids()) {
        if (r == p || w.logical(r)) continue;
        const double u = unit_cost(chip, t, p, r);
        if (!best || u < best_cost - kEps) {
          best = r;
          best_cost = u;
        }
      }
      if (best) {
        c = best_cost;
        w.assign(pa ? g.qubits[1] : g.qubits[0], *best);
      }
    }
    if (std::isinf(c)) c = 1e12;
    total += weight * c;
    weight *= discount;
  }
  return total;
}

// Multiplicative noise on candidate scores; only used by randomized restarts.
double jitter(std::mt19937_64* rng) {
  if (!rng) return 1.0;
  return 1.0 + 0.05 * std::uniform_real_distribution<double>(0.0, 1.0)(*rng);
}

int assign_impl(const ChipSpecification& chip, const CostTable& t, const Rewiring& w, int logical,
                const std::vector<GateApplication>& pending, double discount, std::mt19937_64* rng) {
  int best = -1;
  double best_score = CostTable::kInfinity;
  for (int p : t.ids()) {
    if (w.logical(p)) continue;
    Rewiring trial = w;
    trial.assign(logical, p);
    const double s = heuristic_impl(chip, t, trial, pending, discount) * jitter(rng);
    if (best < 0 || s < best_score - kEps) {
      best = p;
      best_score = s;
    }
  }
  if (best < 0) throw AddressingError("no free physical qubit for logical qubit " + std::to_string(logical));
  return best;
}

std::vector<std::pair<int, int>> greedy_swaps(const ChipSpecification& chip, const CostTable& t, Rewiring w,
                                              const GateApplication& g, const std::vector<GateApplication>& rest,
                                              const AddressConfig& config, std::mt19937_64* rng) {
  std::vector<GateApplication> pending{g};
  pending.insert(pending.end(), rest.begin(), rest.end());
  std::vector<std::pair<int, int>> out;
  while (true) {
    const int pa = *w.physical(g.qubits[0]);
    const int pb = *w.physical(g.qubits[1]);
    if (chip.adjacent(pa, pb)) return out;
    const double here = t.cost(pa, pb);
    std::optional<std::pair<int, int>> best;
    double best_score = CostTable::kInfinity;
    for (int x : {pa, pb}) {
      for (int y : chip.neighbors(x)) {
        Rewiring trial = w;
        trial.swap_physical(x, y);
        // Only moves that shorten the blocking gate's distance, so the loop ends.
        if (t.cost(*trial.physical(g.qubits[0]), *trial.physical(g.qubits[1])) >= here - kEps) continue;
        const double s = (t.edge(x, y) + heuristic_impl(chip, t, trial, pending, config.discount)) * jitter(rng);
        if (!best || s < best_score - kEps) {
          best = std::make_pair(std::min(x, y), std::max(x, y));
          best_score = s;
        }
      }
    }
    if (!best) throw AddressingError("qubits " + std::to_string(pa) + " and " + std::to_string(pb) + " are not connected");
    w.swap_physical(best->first, best->second);
    out.push_back(*best);
  }
}

std::vector<std::pair<int, int>> astar_swaps(const ChipSpecification& chip, const CostTable& t, const Rewiring& w,
                                             const GateApplication& g, const std::vector<GateApplication>& rest,
                                             const AddressConfig& config, std::mt19937_64* rng) {
  using State = std::pair<int, int>;
  const State start{*w.physical(g.qubits[0]), *w.physical(g.qubits[1])};
  if (std::isinf(t.cost(start.first, start.second))) {
    throw AddressingError("qubits " + std::to_string(start.first) + " and " + std::to_string(start.second) +
                          " are not connected");
  }
  const double step = 3.0 * t.min_2q_cost();
  auto h = [&](const State& s) { return std::max(0, t.hops(s.first, s.second) - 1) * step; };
  struct Node {
    double f, g;
    State s;
    bool operator>(const Node& o) const { return f != o.f ? f > o.f : s > o.s; }
  };
  std::priority_queue<Node, std::vector<Node>, std::greater<>> open;
  std::map<State, double> best_g{{start, 0.0}};
  std::map<State, std::pair<State, std::pair<int, int>>> parent;
  open.push({h(start), 0.0, start});
  std::vector<State> goals;
  double goal_g = CostTable::kInfinity;
  while (!open.empty()) {
    const Node n = open.top();
    open.pop();
    if (n.g > best_g[n.s] + kEps) continue;
    if (n.f > goal_g + kEps) break;
    if (chip.adjacent(n.s.first, n.s.second)) {
      goal_g = std::min(goal_g, n.g);
      goals.push_back(n.s);
      continue;
    }
    for (int which = 0; which < 2; ++which) {
      const int x = which ? n.s.second : n.s.first;
      const int other = which ? n.s.first : n.s.second;
      for (int y : chip.neighbors(x)) {
        if (y == other) continue;
        const State next = which ? State{other, y} : State{y, other};
        const double ng = n.g + t.edge(x, y);
        auto it = best_g.find(next);
        if (it != best_g.end() && it->second <= ng + kEps) continue;
        best_g[next] = ng;
        parent[next] = {n.s, {std::min(x, y), std::max(x, y)}};
        open.push({ng + h(next), ng, next});
      }
    }
  }
  if (goals.empty()) throw AddressingError("no swap route found");
  std::vector<std::pair<int, int>> best;
  double best_score = CostTable::kInfinity;
  for (const State& goal : goals) {
    std::vector<std::pair<int, int>> path;
    for (State s = goal; s != start; s = parent.at(s).first) path.push_back(parent.at(s).second);
    std::reverse(path.begin(), path.end());
    Rewiring trial = w;
    for (auto [a, b] : path) trial.swap_physical(a, b);
    const double score = heuristic_impl(chip, t, trial, rest, config.discount) * jitter(rng);
    if (best.empty() || score < best_score - kEps) {
      best = path;
      best_score = score;
    }
  }
  return best;
}

std::vector<std::pair<int, int>> swaps_impl(const ChipSpecification& chip, const CostTable& t, const Rewiring& w,
                                            const GateApplication& g, const std::vector<GateApplication>& rest,
                                            const AddressConfig& config, std::mt19937_64* rng) {
  if (config.search == SearchMode::AStar) return astar_swaps(chip, t, w, g, rest, config, rng);
  return greedy_swaps(chip, t, w, g, rest, config, rng);
}

struct RawOp {
  Instruction instr;
  bool swap = false;
};

GateApplication relabel(const GateApplication& g, const Rewiring& w) {
  GateApplication out = g;
  for (int& q : out.qubits) q = *w.physical(q);
  return out;
}

class Addresser {
 public:
  Addresser(const std::vector<Instruction>& block, const ChipSpecification& chip, const AddressConfig& config,
            std::mt19937_64* rng)
      : chip_(chip), config_(config), table_(chip, config.cost), rng_(rng) {
    std::vector<Instruction> lowered;
    for (const auto& instr : block) {
      const auto* g = std::get_if<GateApplication>(&instr);
      if (g && g->qubits.size() > 2) {
        for (auto& part : lower_multiqubit(*g, config.nativize)) lowered.emplace_back(std::move(part));
      } else {
        lowered.push_back(instr);
      }
    }
    dag_ = build_dag(lowered);
    for (int p : table_.ids()) origin_[p] = p;
    if (config.initial) wiring_ = *config.initial;
    if (config.naive_rewiring) {
      for (const auto& instr : dag_.nodes) {
        for (int q : instruction_qubits(instr)) {
          if (wiring_.physical(q)) continue;
          if (!chip.has_qubit(q)) throw AddressingError("qubit " + std::to_string(q) + " is not on the chip");
          wiring_.assign(q, q);
        }
      }
    }
    entry_ = wiring_;
  }

  AddressResult run() {
    const size_t n = dag_.nodes.size();
    std::vector<size_t> waiting(n);
    std::set<int> ready;
    for (size_t i = 0; i < n; ++i) {
      waiting[i] = dag_.preds[i].size();
      if (!waiting[i]) ready.insert(static_cast<int>(i));
    }
    done_.assign(n, false);
    size_t finished = 0;
    auto complete = [&](int i) {
      done_[static_cast<size_t>(i)] = true;
      ++finished;
      ready.erase(i);
      for (int s : dag_.succs[static_cast<size_t>(i)]) {
        if (--waiting[static_cast<size_t>(s)] == 0) ready.insert(s);
      }
    };
    while (finished < n) {
      bool progress = true;
      while (progress) {
        progress = false;
        for (int i : std::vector<int>(ready.begin(), ready.end())) {
          if (try_emit(i)) {
            complete(i);
            progress = true;
          }
        }
      }
      if (finished == n) break;
      route(ready);
    }
    return finish();
  }

 private:
  // Upcoming 2Q gates in program order, optionally led by `first`.
  std::vector<GateApplication> lookahead(std::optional<int> first) const {
    std::vector<GateApplication> out;
    if (first) out.push_back(std::get<GateApplication>(dag_.nodes[static_cast<size_t>(*first)]));
    for (size_t i = 0; i < dag_.nodes.size() && static_cast<int>(out.size()) < config_.lookahead; ++i) {
      if (done_[i] || (first && static_cast<int>(i) == *first) || !is_two_qubit(dag_.nodes[i])) continue;
      out.push_back(std::get<GateApplication>(dag_.nodes[i]));
    }
    return out;
  }

  void ensure_assigned(int logical, std::optional<int> node) {
    if (wiring_.physical(logical)) return;
    std::vector<GateApplication> pending = lookahead(node && is_two_qubit(dag_.nodes[static_cast<size_t>(*node)])
                                                         ? node
                                                         : std::nullopt);
    const int p = assign_impl(chip_, table_, wiring_, logical, pending, config_.discount, rng_);
    wiring_.assign(logical, p);
    entry_.assign(logical, origin_.at(p));
    if (config_.nativize.trace) {
      config_.nativize.trace->note("address", "assign logical " + std::to_string(logical) + " to physical " +
                                                  std::to_string(p));
    }
  }

  bool try_emit(int i) {
    const Instruction& instr = dag_.nodes[static_cast<size_t>(i)];
    const std::vector<int> qs = instruction_qubits(instr);
    for (int q : qs) ensure_assigned(q, i);
    if (const auto* g = std::get_if<GateApplication>(&instr)) {
      GateApplication phys = relabel(*g, wiring_);
      if (phys.qubits.size() == 2 && !chip_.adjacent(phys.qubits[0], phys.qubits[1])) return false;
      raw_.push_back({std::move(phys), false});
      return true;
    }
    if (const auto* m = std::get_if<Measure>(&instr)) {
      raw_.push_back({Measure{*wiring_.physical(m->qubit), m->target}, false});
      return true;
    }
    if (const auto* m = std::get_if<MeasureDiscard>(&instr)) {
      raw_.push_back({MeasureDiscard{*wiring_.physical(m->qubit)}, false});
      return true;
    }
    raw_.push_back({instr, false});
    return true;
  }

  // Picks the ready gate nearest to executable and swaps it into place.
  void route(const std::set<int>& ready) {
    std::optional<int> blocked;
    double blocked_cost = CostTable::kInfinity;
    for (int i : ready) {
      const auto& g = std::get<GateApplication>(dag_.nodes[static_cast<size_t>(i)]);
      const double c = table_.cost(*wiring_.physical(g.qubits[0]), *wiring_.physical(g.qubits[1]));
      if (!blocked || c < blocked_cost - kEps) {
        blocked = i;
        blocked_cost = c;
      }
    }
    const auto& g = std::get<GateApplication>(dag_.nodes[static_cast<size_t>(*blocked)]);
    std::vector<GateApplication> rest = lookahead(blocked);
    rest.erase(rest.begin());
    const auto swaps = swaps_impl(chip_, table_, wiring_, g, rest, config_, rng_);
    assert(!swaps.empty());
    for (auto [a, b] : swaps) {
      raw_.push_back({GateApplication{"SWAP", {}, {a, b}}, true});
      wiring_.swap_physical(a, b);
      std::swap(origin_.at(a), origin_.at(b));
      ++swaps_;
    }
  }

  GateSeq native(const GateApplication& g) const { return nativize_gate(g, chip_, config_.nativize); }

  // Fuses each inserted SWAP with a neighbouring 2Q gate on the same pair
  // when the combined block is cheaper than the two apart.
  std::vector<Instruction> lower_raw() {
    const size_t n = raw_.size();
    std::vector<bool> dropped(n, false);
    std::map<size_t, GateSeq> fused;
    auto neighbour = [&](size_t j, int dir) -> std::optional<size_t> {
      const auto& s = std::get<GateApplication>(raw_[j].instr);
      for (long k = static_cast<long>(j) + dir; k >= 0 && k < static_cast<long>(n); k += dir) {
        const auto qs = instruction_qubits(raw_[static_cast<size_t>(k)].instr);
        const bool touches = std::any_of(qs.begin(), qs.end(), [&](int q) { return q == s.qubits[0] || q == s.qubits[1]; });
        if (!touches) continue;
        const auto* g = std::get_if<GateApplication>(&raw_[static_cast<size_t>(k)].instr);
        if (!g || g->qubits.size() != 2 || !g->is_concrete() || dropped[static_cast<size_t>(k)] ||
            fused.count(static_cast<size_t>(k))) {
          return std::nullopt;
        }
        const bool same = (g->qubits[0] == s.qubits[0] && g->qubits[1] == s.qubits[1]) ||
                          (g->qubits[0] == s.qubits[1] && g->qubits[1] == s.qubits[0]);
        if (!same) return std::nullopt;
        return static_cast<size_t>(k);
      }
      return std::nullopt;
    };
    if (config_.recombine_swaps) {
      const GateDefinitions none;
      const GateDefinitions& defs = config_.nativize.defs ? *config_.nativize.defs : none;
      for (size_t j = 0; j < n; ++j) {
        if (!raw_[j].swap || dropped[j] || fused.count(j)) continue;
        for (int dir : {-1, 1}) {
          const auto k = neighbour(j, dir);
          if (!k) continue;
          const auto& s = std::get<GateApplication>(raw_[j].instr);
          const auto& g = std::get<GateApplication>(raw_[*k].instr);
          const GateSeq pair = dir < 0 ? GateSeq{g, s} : GateSeq{s, g};
          GateSeq apart = native(pair[0]);
          for (const auto& x : native(pair[1])) apart.push_back(x);
          GateSeq together = synthesize_2q_native(sequence_matrix(pair, s.qubits, defs), s.qubits[0], s.qubits[1],
                                                  chip_, config_.nativize);
          if (!(sequence_cost(together, chip_, config_.cost) < sequence_cost(apart, chip_, config_.cost))) continue;
          if (config_.nativize.trace) config_.nativize.trace->rule("address", "swap-recombination", pair, together);
          const size_t last = std::max(j, *k);
          dropped[std::min(j, *k)] = true;
          fused[last] = std::move(together);
          break;
        }
      }
    }
    std::vector<Instruction> out;
    for (size_t i = 0; i < n; ++i) {
      if (dropped[i]) continue;
      if (auto it = fused.find(i); it != fused.end()) {
        out.insert(out.end(), it->second.begin(), it->second.end());
        continue;
      }
      if (const auto* g = std::get_if<GateApplication>(&raw_[i].instr)) {
        for (auto& x : native(*g)) out.emplace_back(std::move(x));
      } else {
        out.push_back(raw_[i].instr);
      }
    }
    return out;
  }

  AddressResult finish() {
    AddressResult r;
    r.code = lower_raw();
    r.entry = entry_;
    r.exit = wiring_;
    for (auto [p, o] : origin_) r.permutation[o] = p;
    r.swaps = swaps_;
    return r;
  }

  const ChipSpecification& chip_;
  const AddressConfig& config_;
  CostTable table_;
  std::mt19937_64* rng_;
  InstructionDag dag_;
  Rewiring wiring_;
  Rewiring entry_;
  std::map<int, int> origin_;  // physical slot -> where its contents started
  std::vector<bool> done_;
  std::vector<RawOp> raw_;
  int swaps_ = 0;
};

SeqCost result_cost(const AddressResult& r, const ChipSpecification& chip, CostMode mode) {
  GateSeq gates;
  for (const auto& i : r.code) {
    if (const auto* g = std::get_if<GateApplication>(&i)) gates.push_back(*g);
  }
  return sequence_cost(gates, chip, mode);
}

}  // namespace

double heuristic_cost(const ChipSpecification& chip, const CostTable& table, const Rewiring& wiring,
                      const std::vector<GateApplication>& pending, double discount) {
  return heuristic_impl(chip, table, wiring, pending, discount);
}

std::vector<std::pair<int, int>> select_swaps(const ChipSpecification& chip, const CostTable& table,
                                              const Rewiring& wiring, const GateApplication& gate,
                                              const std::vector<GateApplication>& rest, const AddressConfig& config) {
  return swaps_impl(chip, table, wiring, gate, rest, config, nullptr);
}

int assign_fresh(const ChipSpecification& chip, const CostTable& table, const Rewiring& wiring, int logical,
                 const std::vector<GateApplication>& pending, double discount) {
  return assign_impl(chip, table, wiring, logical, pending, discount, nullptr);
}

AddressResult address_block(const std::vector<Instruction>& block, const ChipSpecification& chip,
                            const AddressConfig& config) {
  AddressConfig quiet = config;
  AddressResult best = Addresser(block, chip, config, nullptr).run();
  if (config.seed == 0) return best;
  quiet.nativize.trace = nullptr;
  std::mt19937_64 rng(config.seed);
  SeqCost best_cost = result_cost(best, chip, config.cost);
  for (int i = 0; i < config.restarts; ++i) {
    AddressResult r = Addresser(block, chip, quiet, &rng).run();
    const SeqCost c = result_cost(r, chip, config.cost);
    if (c < best_cost) {
      best = std::move(r);
      best_cost = c;
    }
  }
  return best;
}

}  // namespace qcc

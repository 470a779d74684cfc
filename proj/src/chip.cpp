#include "qcc/chip.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <deque>
#include <json.hpp>
#include <numbers>

#include "qcc/errors.hpp"
#include "qcc/parser.hpp"

namespace qcc {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kParamMatch = 1e-10;

using json = nlohmann::json;

bool is_symmetric(const std::string& op) {
  return op == "CZ" || op == "CPHASE" || op == "ISWAP" || op == "SWAP";
}

bool is_periodic(const std::string& op) {
  return op == "RX" || op == "RY" || op == "RZ" || op == "CPHASE";
}

int parse_id(std::string_view s, std::string_view key) {
  int v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || p != s.data() + s.size() || v < 0) {
    throw ChipError("malformed qubit key '" + std::string(key) + "'");
  }
  return v;
}

NativeGateRecord parse_record(const json& j, int arity, const std::string& where) {
  if (!j.is_object()) throw ChipError(where + ": gate record must be an object");
  if (!j.contains("operator") || !j["operator"].is_string()) throw ChipError(where + ": gate record needs an operator");
  NativeGateRecord r;
  r.op = j["operator"].get<std::string>();
  const auto [nparams, nqubits] = builtin_signature(r.op);
  if (nparams < 0) throw ChipError(where + ": unknown operator '" + r.op + "'");
  if (nqubits != arity) {
    throw ChipError(where + ": operator " + r.op + " does not fit a " + std::to_string(arity) + "-qubit simplex");
  }
  if (j.contains("parameters")) {
    if (!j["parameters"].is_array()) throw ChipError(where + ": parameters must be a list");
    for (const auto& p : j["parameters"]) {
      if (p.is_string() && p.get<std::string>() == "_") {
        r.params.emplace_back();
      } else if (p.is_number()) {
        r.params.emplace_back(p.get<double>());
      } else {
        throw ChipError(where + ": parameter must be a number or \"_\"");
      }
    }
  }
  if (static_cast<int>(r.params.size()) != nparams) {
    throw ChipError(where + ": " + r.op + " takes " + std::to_string(nparams) + " parameter(s)");
  }
  if (j.contains("arguments")) {
    if (!j["arguments"].is_array()) throw ChipError(where + ": arguments must be a list");
    for (const auto& a : j["arguments"]) {
      if (a.is_string() && a.get<std::string>() == "_") {
        r.args.emplace_back();
      } else if (a.is_number_integer() && a.get<int>() >= 0 && a.get<int>() < arity) {
        r.args.emplace_back(a.get<int>());
      } else {
        throw ChipError(where + ": argument must be a simplex position or \"_\"");
      }
    }
  } else {
    for (int i = 0; i < arity; ++i) r.args.emplace_back(i);
  }
  if (static_cast<int>(r.args.size()) != arity) throw ChipError(where + ": argument count does not match simplex");
  r.duration_ns = arity == 1 ? ChipSpecification::kDefault1QDuration : ChipSpecification::kDefault2QDuration;
  if (j.contains("duration")) {
    if (!j["duration"].is_number() || j["duration"].get<double>() < 0) {
      throw ChipError(where + ": duration must be a non-negative number");
    }
    r.duration_ns = j["duration"].get<double>();
  }
  if (j.contains("fidelity")) {
    const double f = j["fidelity"].is_number() ? j["fidelity"].get<double>() : -1.0;
    if (!(f > 0.0 && f <= 1.0)) throw ChipError(where + ": fidelity must be in (0, 1]");
    r.fidelity = f;
  }
  return r;
}

std::vector<NativeGateRecord> parse_gates(const json& simplex, int arity, const std::string& where) {
  if (!simplex.is_object()) throw ChipError(where + ": expected an object");
  if (!simplex.contains("gates")) return arity == 1 ? default_qubit_gates() : default_link_gates();
  if (!simplex["gates"].is_array()) throw ChipError(where + ": gates must be a list");
  std::vector<NativeGateRecord> out;
  for (const auto& g : simplex["gates"]) out.push_back(parse_record(g, arity, where));
  return out;
}

json record_json(const NativeGateRecord& r) {
  json params = json::array();
  for (const auto& p : r.params) params.push_back(p ? json(*p) : json("_"));
  json args = json::array();
  for (const auto& a : r.args) args.push_back(a ? json(*a) : json("_"));
  return json{{"operator", r.op},
              {"parameters", params},
              {"arguments", args},
              {"duration", r.duration_ns},
              {"fidelity", r.fidelity}};
}

bool param_matches(const std::optional<double>& pattern, const ParamExpr& p, const std::string& op) {
  if (!pattern) return true;
  if (!p.is_concrete()) return false;
  double diff = p.value() - *pattern;
  if (is_periodic(op)) diff = std::remainder(diff, 2 * kPi);
  return std::abs(diff) < kParamMatch;
}

}  // namespace

std::vector<NativeGateRecord> default_qubit_gates() {
  std::vector<NativeGateRecord> out;
  for (double k : {-2.0, -1.0, 1.0, 2.0}) {
    out.push_back({"RX", {k * kPi / 2}, {0}, ChipSpecification::kDefault1QDuration, 1.0});
  }
  out.push_back({"RZ", {std::nullopt}, {0}, ChipSpecification::kDefault1QDuration, 1.0});
  return out;
}

std::vector<NativeGateRecord> default_link_gates() {
  return {{"CZ", {}, {0, 1}, ChipSpecification::kDefault2QDuration, 1.0}};
}

bool ChipSpecification::adjacent(int a, int b) const { return link(a, b) != nullptr; }

const LinkRecord* ChipSpecification::link(int a, int b) const {
  auto it = links.find({std::min(a, b), std::max(a, b)});
  return it == links.end() ? nullptr : &it->second;
}

std::vector<int> ChipSpecification::neighbors(int q) const {
  std::vector<int> out;
  for (const auto& [key, l] : links) {
    if (key.first == q) out.push_back(key.second);
    if (key.second == q) out.push_back(key.first);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<int> ChipSpecification::qubit_ids() const {
  std::vector<int> out;
  for (const auto& [id, rec] : qubits) out.push_back(id);
  return out;
}

const std::vector<NativeGateRecord>* ChipSpecification::records(const std::vector<int>& simplex) const {
  if (simplex.size() == 1) {
    auto it = qubits.find(simplex[0]);
    return it == qubits.end() ? nullptr : &it->second.gates;
  }
  if (simplex.size() == 2 && simplex[0] != simplex[1]) {
    const LinkRecord* l = link(simplex[0], simplex[1]);
    return l ? &l->gates : nullptr;
  }
  return nullptr;
}

bool record_matches(const NativeGateRecord& r, const GateApplication& g, const std::vector<int>& positions) {
  if (r.op != g.name || r.params.size() != g.params.size() || r.args.size() != positions.size()) return false;
  for (size_t i = 0; i < r.params.size(); ++i) {
    if (!param_matches(r.params[i], g.params[i], r.op)) return false;
  }
  auto args_match = [&](bool flipped) {
    for (size_t i = 0; i < r.args.size(); ++i) {
      const int pos = flipped ? 1 - positions[i] : positions[i];
      if (r.args[i] && *r.args[i] != pos) return false;
    }
    return true;
  };
  if (args_match(false)) return true;
  return positions.size() == 2 && is_symmetric(r.op) && args_match(true);
}

const NativeGateRecord* ChipSpecification::find_native(const GateApplication& g) const {
  const auto* recs = records(g.qubits);
  if (!recs) return nullptr;
  std::vector<int> positions;
  if (g.qubits.size() == 1) {
    positions = {0};
  } else {
    const bool ordered = g.qubits[0] < g.qubits[1];
    positions = ordered ? std::vector<int>{0, 1} : std::vector<int>{1, 0};
  }
  for (const auto& r : *recs) {
    if (record_matches(r, g, positions)) return &r;
  }
  return nullptr;
}

ChipSpecification load_chip(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ChipError(std::string("chip file is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ChipError("chip file must be an object with \"1Q\" and \"2Q\"");
  for (const auto& [key, value] : j.items()) {
    if (key != "1Q" && key != "2Q") {
      if (key.size() >= 2 && key.back() == 'Q') {
        throw ChipError("simplices of dimension >= 2 (\"" + key + "\") are not supported");
      }
      throw ChipError("unexpected top-level key '" + key + "'");
    }
  }
  ChipSpecification chip;
  if (j.contains("1Q")) {
    if (!j["1Q"].is_object()) throw ChipError("\"1Q\" must be an object");
    for (const auto& [key, value] : j["1Q"].items()) {
      const int id = parse_id(key, key);
      chip.qubits[id] = QubitRecord{id, parse_gates(value, 1, "qubit " + key)};
    }
  }
  if (j.contains("2Q")) {
    if (!j["2Q"].is_object()) throw ChipError("\"2Q\" must be an object");
    for (const auto& [key, value] : j["2Q"].items()) {
      const auto dash = key.find('-');
      if (dash == std::string::npos) throw ChipError("malformed link key '" + key + "'");
      if (key.find('-', dash + 1) != std::string::npos) {
        throw ChipError("link '" + key + "' spans more than two qubits; 3Q simplices are not supported");
      }
      const int a = parse_id(std::string_view(key).substr(0, dash), key);
      const int b = parse_id(std::string_view(key).substr(dash + 1), key);
      if (a == b) throw ChipError("link '" + key + "' joins a qubit to itself");
      if (!chip.has_qubit(a) || !chip.has_qubit(b)) throw ChipError("link '" + key + "' has a dangling endpoint");
      const std::pair<int, int> k{std::min(a, b), std::max(a, b)};
      if (chip.links.count(k)) throw ChipError("link '" + key + "' is listed twice");
      auto gates = parse_gates(value, 2, "link " + key);
      if (a > b) {
        // Positions were given relative to the key order; store them sorted.
        for (auto& g : gates) {
          for (auto& arg : g.args) {
            if (arg) arg = 1 - *arg;
          }
        }
      }
      chip.links[k] = LinkRecord{k.first, k.second, std::move(gates)};
    }
  }
  return chip;
}

std::string serialize_chip(const ChipSpecification& chip) {
  json one = json::object();
  for (const auto& [id, rec] : chip.qubits) {
    json gates = json::array();
    for (const auto& g : rec.gates) gates.push_back(record_json(g));
    one[std::to_string(id)] = json{{"gates", gates}};
  }
  json two = json::object();
  for (const auto& [key, rec] : chip.links) {
    json gates = json::array();
    for (const auto& g : rec.gates) gates.push_back(record_json(g));
    two[std::to_string(key.first) + "-" + std::to_string(key.second)] = json{{"gates", gates}};
  }
  return json{{"1Q", one}, {"2Q", two}}.dump(1) + "\n";
}

NativeStatus is_native(const ChipSpecification& chip, const Instruction& instr, bool rewired) {
  const auto* g = std::get_if<GateApplication>(&instr);
  if (!g) return NativeStatus::Native;  // classical instructions need no translation
  if (g->qubits.empty() || g->qubits.size() > 2) return NativeStatus::NonNativeGate;
  if (rewired) {
    if (!std::all_of(g->qubits.begin(), g->qubits.end(), [&](int q) { return chip.has_qubit(q); })) {
      return NativeStatus::NonAdjacent;
    }
    if (g->qubits.size() == 2 && !chip.adjacent(g->qubits[0], g->qubits[1])) {
      // Distinguish gates that would be native on some link.
      for (const auto& [key, l] : chip.links) {
        for (const auto& r : l.gates) {
          if (record_matches(r, *g, {0, 1}) || record_matches(r, *g, {1, 0})) return NativeStatus::NonAdjacent;
        }
      }
      return NativeStatus::NonNativeGate;
    }
    return chip.find_native(*g) ? NativeStatus::Native : NativeStatus::NonNativeGate;
  }
  if (g->qubits.size() == 1) {
    for (const auto& [id, q] : chip.qubits) {
      for (const auto& r : q.gates) {
        if (record_matches(r, *g, {0})) return NativeStatus::Native;
      }
    }
    return NativeStatus::NonNativeGate;
  }
  for (const auto& [key, l] : chip.links) {
    for (const auto& r : l.gates) {
      if (record_matches(r, *g, {0, 1}) || record_matches(r, *g, {1, 0})) return NativeStatus::Native;
    }
  }
  return NativeStatus::NonNativeGate;
}

double record_cost(const NativeGateRecord& r, CostMode mode) {
  if (mode == CostMode::Duration) return r.duration_ns;
  return std::max(-std::log(r.fidelity), 1e-9);
}

double gate_cost(const ChipSpecification& chip, const GateApplication& g, CostMode mode) {
  if (const NativeGateRecord* r = chip.find_native(g)) return record_cost(*r, mode);
  double best = CostTable::kInfinity;
  if (g.qubits.size() == 1) {
    for (const auto& [id, q] : chip.qubits) {
      for (const auto& r : q.gates) best = std::min(best, record_cost(r, mode));
    }
  } else {
    for (const auto& [key, l] : chip.links) {
      for (const auto& r : l.gates) best = std::min(best, record_cost(r, mode));
    }
  }
  if (best == CostTable::kInfinity) {
    NativeGateRecord fallback;
    fallback.duration_ns =
        g.qubits.size() == 1 ? ChipSpecification::kDefault1QDuration : ChipSpecification::kDefault2QDuration;
    best = record_cost(fallback, mode);
  }
  return best;
}

CostTable::CostTable(const ChipSpecification& chip, CostMode mode) : mode_(mode) {
  ids_ = chip.qubit_ids();
  const size_t n = ids_.size();
  for (size_t i = 0; i < n; ++i) index_[ids_[i]] = static_cast<int>(i);
  dist_.assign(n * n, kInfinity);
  edge_.assign(n * n, kInfinity);
  hops_.assign(n * n, -1);
  min_2q_ = kInfinity;
  for (size_t i = 0; i < n; ++i) {
    dist_[i * n + i] = 0.0;
    edge_[i * n + i] = 0.0;
  }
  for (const auto& [key, l] : chip.links) {
    double best = kInfinity;
    for (const auto& r : l.gates) best = std::min(best, record_cost(r, mode));
    if (best == kInfinity) continue;
    min_2q_ = std::min(min_2q_, best);
    const size_t a = static_cast<size_t>(index(key.first));
    const size_t b = static_cast<size_t>(index(key.second));
    edge_[a * n + b] = edge_[b * n + a] = 3.0 * best;
    dist_[a * n + b] = dist_[b * n + a] = 3.0 * best;
  }
  if (min_2q_ == kInfinity) min_2q_ = 0.0;
  for (size_t k = 0; k < n; ++k) {
    for (size_t i = 0; i < n; ++i) {
      for (size_t j = 0; j < n; ++j) {
        const double via = dist_[i * n + k] + dist_[k * n + j];
        if (via < dist_[i * n + j]) dist_[i * n + j] = via;
      }
    }
  }
  for (size_t s = 0; s < n; ++s) {
    std::deque<size_t> queue = {s};
    hops_[s * n + s] = 0;
    while (!queue.empty()) {
      const size_t u = queue.front();
      queue.pop_front();
      for (size_t v = 0; v < n; ++v) {
        if (v != u && edge_[u * n + v] < kInfinity && hops_[s * n + v] < 0) {
          hops_[s * n + v] = hops_[s * n + u] + 1;
          queue.push_back(v);
        }
      }
    }
  }
}

int CostTable::index(int q) const {
  auto it = index_.find(q);
  if (it == index_.end()) throw ChipError("qubit " + std::to_string(q) + " is not on the chip");
  return it->second;
}

double CostTable::cost(int a, int b) const {
  const size_t n = ids_.size();
  return dist_[static_cast<size_t>(index(a)) * n + static_cast<size_t>(index(b))];
}

double CostTable::edge(int a, int b) const {
  const size_t n = ids_.size();
  return edge_[static_cast<size_t>(index(a)) * n + static_cast<size_t>(index(b))];
}

int CostTable::hops(int a, int b) const {
  const size_t n = ids_.size();
  const int h = hops_[static_cast<size_t>(index(a)) * n + static_cast<size_t>(index(b))];
  return h < 0 ? std::numeric_limits<int>::max() : h;
}

std::vector<int> CostTable::path(int a, int b) const {
  if (cost(a, b) == kInfinity) return {};
  std::vector<int> out = {a};
  int cur = a;
  while (cur != b) {
    const double remaining = cost(cur, b);
    const double slack = 1e-9 * std::max(1.0, remaining);
    int next = -1;
    for (int v : ids_) {
      // ids_ is sorted, so the first hit is the smallest neighbour.
      if (v == cur || edge(cur, v) == kInfinity) continue;
      if (std::abs(edge(cur, v) + cost(v, b) - remaining) <= slack) {
        next = v;
        break;
      }
    }
    if (next < 0) break;
    out.push_back(next);
    cur = next;
  }
  return out;
}

CostTable build_cost_table(const ChipSpecification& chip, CostMode mode) { return CostTable(chip, mode); }

}  // namespace qcc

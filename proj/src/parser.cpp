#include "qcc/parser.hpp"

#include <cctype>
#include <charconv>
#include <algorithm>
#include <functional>
#include <optional>
#include <numbers>
#include <set>
#include <sstream>

#include "qcc/errors.hpp"

namespace qcc {

namespace {

const std::map<std::string, std::pair<int, int>>& builtin_table() {
  static const std::map<std::string, std::pair<int, int>> table = {
      {"I", {0, 1}},      {"X", {0, 1}},     {"Y", {0, 1}},     {"Z", {0, 1}},
      {"H", {0, 1}},      {"S", {0, 1}},     {"T", {0, 1}},     {"RX", {1, 1}},
      {"RY", {1, 1}},     {"RZ", {1, 1}},    {"CNOT", {0, 2}},  {"CZ", {0, 2}},
      {"SWAP", {0, 2}},   {"ISWAP", {0, 2}}, {"CPHASE", {1, 2}}, {"CCNOT", {0, 3}},
  };
  return table;
}

struct Token {
  enum class Kind { Ident, Number, Label, Punct, End };
  Kind kind = Kind::End;
  std::string text;
  double number = 0.0;
  bool imaginary = false;
  int column = 0;
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '%'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

std::vector<Token> tokenize(const std::string& text, int line, int col0) {
  std::vector<Token> out;
  size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    const int col = col0 + static_cast<int>(i);
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    Token t;
    t.column = col;
    if (c == '@') {
      size_t j = i + 1;
      while (j < text.size() && (ident_char(text[j]) || text[j] == '-')) ++j;
      if (j == i + 1) throw ParseError("empty label name", line, col);
      t.kind = Token::Kind::Label;
      t.text = text.substr(i + 1, j - i - 1);
      i = j;
    } else if (std::isdigit(static_cast<unsigned char>(c)) ||
               (c == '.' && i + 1 < text.size() && std::isdigit(static_cast<unsigned char>(text[i + 1])))) {
      size_t j = i;
      while (j < text.size() && (std::isdigit(static_cast<unsigned char>(text[j])) || text[j] == '.')) ++j;
      if (j < text.size() && (text[j] == 'e' || text[j] == 'E')) {
        size_t k = j + 1;
        if (k < text.size() && (text[k] == '+' || text[k] == '-')) ++k;
        if (k < text.size() && std::isdigit(static_cast<unsigned char>(text[k]))) {
          j = k;
          while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
        }
      }
      t.kind = Token::Kind::Number;
      t.text = text.substr(i, j - i);
      auto res = std::from_chars(t.text.data(), t.text.data() + t.text.size(), t.number);
      if (res.ec != std::errc() || res.ptr != t.text.data() + t.text.size()) {
        throw ParseError("malformed number '" + t.text + "'", line, col);
      }
      if (j < text.size() && text[j] == 'i' && (j + 1 >= text.size() || !ident_char(text[j + 1]))) {
        t.imaginary = true;
        ++j;
      }
      i = j;
    } else if (ident_start(c)) {
      size_t j = i + 1;
      while (j < text.size() && ident_char(text[j])) ++j;
      t.kind = Token::Kind::Ident;
      t.text = text.substr(i, j - i);
      i = j;
    } else if (std::string_view("()[],:+-*/^").find(c) != std::string_view::npos) {
      t.kind = Token::Kind::Punct;
      t.text = std::string(1, c);
      ++i;
    } else {
      throw ParseError(std::string("unexpected character '") + c + "'", line, col);
    }
    out.push_back(std::move(t));
  }
  Token end;
  end.column = col0 + static_cast<int>(text.size());
  out.push_back(end);
  return out;
}

// Resolves identifiers appearing in arithmetic.
using VariableCheck = std::function<void(const std::string& name, int column)>;

class TokenStream {
 public:
  TokenStream(std::vector<Token> tokens, int line) : tokens_(std::move(tokens)), line_(line) {}

  const Token& peek(size_t ahead = 0) const {
    return tokens_[std::min(pos_ + ahead, tokens_.size() - 1)];
  }
  Token next() { return tokens_[pos_ < tokens_.size() - 1 ? pos_++ : pos_]; }
  bool at_end() const { return peek().kind == Token::Kind::End; }
  bool accept(const std::string& punct) {
    if (peek().kind == Token::Kind::Punct && peek().text == punct) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(const std::string& punct) {
    if (!accept(punct)) fail("expected '" + punct + "'");
  }
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, line_, peek().column); }
  int line() const { return line_; }

  ExprPtr parse_expr(const VariableCheck& check) {
    ExprPtr lhs = parse_term(check);
    while (peek().kind == Token::Kind::Punct && (peek().text == "+" || peek().text == "-")) {
      const char op = next().text[0];
      lhs = Expr::make_binary(op, lhs, parse_term(check));
    }
    return lhs;
  }

 private:
  ExprPtr parse_term(const VariableCheck& check) {
    ExprPtr lhs = parse_unary(check);
    while (peek().kind == Token::Kind::Punct && (peek().text == "*" || peek().text == "/")) {
      const char op = next().text[0];
      lhs = Expr::make_binary(op, lhs, parse_unary(check));
    }
    return lhs;
  }

  ExprPtr parse_unary(const VariableCheck& check) {
    if (accept("-")) {
      ExprPtr inner = parse_unary(check);
      if (inner->kind == Expr::Kind::Number) return Expr::make_number(-inner->number);
      return Expr::make_unary('-', inner);
    }
    if (accept("+")) return parse_unary(check);
    ExprPtr base = parse_atom(check);
    if (accept("^")) return Expr::make_binary('^', base, parse_unary(check));
    return base;
  }

  ExprPtr parse_atom(const VariableCheck& check) {
    const Token t = peek();
    if (t.kind == Token::Kind::Number) {
      next();
      return Expr::make_number(t.imaginary ? std::complex<double>(0, t.number) : std::complex<double>(t.number, 0));
    }
    if (accept("(")) {
      ExprPtr inner = parse_expr(check);
      expect(")");
      return inner;
    }
    if (t.kind == Token::Kind::Ident) {
      next();
      if (t.text == "pi") return Expr::make_number(std::numbers::pi);
      if (t.text == "i") return Expr::make_number(std::complex<double>(0, 1));
      static const std::set<std::string> kFunctions = {"sin", "cos", "sqrt", "exp", "cis"};
      if (kFunctions.count(t.text) && peek().kind == Token::Kind::Punct && peek().text == "(") {
        next();
        ExprPtr arg = parse_expr(check);
        expect(")");
        return Expr::make_call(t.text, arg);
      }
      std::string name = t.text;
      if (accept("[")) {
        const Token idx = next();
        if (idx.kind != Token::Kind::Number || idx.imaginary) fail("expected memory index");
        expect("]");
        name += "[" + idx.text + "]";
      }
      check(name, t.column);
      return Expr::make_variable(name);
    }
    fail("expected expression");
  }

  std::vector<Token> tokens_;
  size_t pos_ = 0;
  int line_;
};

struct SourceLine {
  int number = 0;
  int indent = 0;
  std::string text;  // comment-stripped, leading whitespace removed
  int column = 1;    // column of text[0]
};

std::vector<SourceLine> split_lines(std::string_view source) {
  std::vector<SourceLine> out;
  int number = 0;
  size_t start = 0;
  while (start <= source.size()) {
    size_t end = source.find('\n', start);
    if (end == std::string_view::npos) end = source.size();
    std::string raw(source.substr(start, end - start));
    ++number;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    size_t lead = 0;
    while (lead < raw.size() && (raw[lead] == ' ' || raw[lead] == '\t')) ++lead;
    std::string body = raw.substr(lead);
    while (!body.empty() && std::isspace(static_cast<unsigned char>(body.back()))) body.pop_back();
    if (!body.empty()) out.push_back({number, static_cast<int>(lead), body, static_cast<int>(lead) + 1});
    if (end == source.size()) break;
    start = end + 1;
  }
  return out;
}

// Splits on ';' so several instructions may share a line.
std::vector<std::pair<std::string, int>> split_statements(const std::string& text, int column) {
  std::vector<std::pair<std::string, int>> out;
  size_t start = 0;
  while (start <= text.size()) {
    size_t end = text.find(';', start);
    if (end == std::string::npos) end = text.size();
    std::string piece = text.substr(start, end - start);
    size_t lead = 0;
    while (lead < piece.size() && std::isspace(static_cast<unsigned char>(piece[lead]))) ++lead;
    piece.erase(0, lead);
    while (!piece.empty() && std::isspace(static_cast<unsigned char>(piece.back()))) piece.pop_back();
    if (!piece.empty()) out.emplace_back(piece, column + static_cast<int>(start + lead));
    if (end == text.size()) break;
    start = end + 1;
  }
  return out;
}

std::string leading_keyword(const std::string& text) {
  size_t j = 0;
  while (j < text.size() && (ident_char(text[j]) || text[j] == '-')) ++j;
  return text.substr(0, j);
}

class Parser {
 public:
  explicit Parser(Program& program) : program_(program) {}

  void parse_source(std::string_view source) {
    const auto lines = split_lines(source);
    size_t i = 0;
    while (i < lines.size()) {
      const SourceLine& line = lines[i];
      const std::string kw = leading_keyword(line.text);
      if (kw == "DEFGATE" || kw == "DEFCIRCUIT") {
        size_t j = i + 1;
        while (j < lines.size() && lines[j].indent > 0) ++j;
        std::vector<SourceLine> block(lines.begin() + static_cast<long>(i) + 1,
                                      lines.begin() + static_cast<long>(j));
        if (kw == "DEFGATE") {
          parse_defgate(line, block);
        } else {
          parse_defcircuit(line, block);
        }
        i = j;
        continue;
      }
      for (const auto& [stmt, col] : split_statements(line.text, line.column)) {
        parse_statement(stmt, line.number, col);
      }
      ++i;
    }
    resolve_pending_calls();
  }

  // Parses one instruction (used for bodies after circuit substitution).
  Instruction parse_instruction(const std::string& text, int line, int column) {
    if (auto pragma = as_pragma(text)) return *pragma;
    auto toks = tokenize(text, line, column);
    TokenStream ts(std::move(toks), line);
    return instruction_from(ts);
  }

 private:
  static std::optional<Pragma> as_pragma(const std::string& text) {
    if (leading_keyword(text) != "PRAGMA") return std::nullopt;
    std::string rest = text.substr(6);
    size_t lead = 0;
    while (lead < rest.size() && std::isspace(static_cast<unsigned char>(rest[lead]))) ++lead;
    return Pragma{rest.substr(lead)};
  }

  void parse_statement(const std::string& text, int line, int column) {
    if (auto pragma = as_pragma(text)) {
      program_.body.push_back(*pragma);
      return;
    }
    auto toks = tokenize(text, line, column);
    if (toks.front().kind == Token::Kind::Ident && toks.front().text == "DECLARE") {
      TokenStream ts(std::move(toks), line);
      parse_declare(ts);
      return;
    }
    TokenStream ts(std::move(toks), line);
    program_.body.push_back(instruction_from(ts));
  }

  void parse_declare(TokenStream& ts) {
    ts.next();
    Declaration d;
    const Token name = ts.next();
    if (name.kind != Token::Kind::Ident) ts.fail("expected memory name");
    d.name = name.text;
    if (program_.find_declaration(d.name)) ts.fail("memory region '" + d.name + "' declared twice");
    const Token type = ts.next();
    if (type.kind != Token::Kind::Ident || (type.text != "BIT" && type.text != "REAL")) {
      ts.fail("expected BIT or REAL");
    }
    d.type = type.text == "BIT" ? DataType::Bit : DataType::Real;
    if (ts.accept("[")) {
      const Token n = ts.next();
      if (n.kind != Token::Kind::Number || n.number < 1 || n.number != static_cast<int>(n.number)) {
        ts.fail("expected positive memory length");
      }
      ts.expect("]");
      d.length = static_cast<int>(n.number);
      d.explicit_length = true;
    }
    if (!ts.at_end()) ts.fail("unexpected trailing input");
    program_.declarations.push_back(d);
  }

  VariableCheck real_memory_check(int line) const {
    return [this, line](const std::string& name, int column) {
      std::string base = name;
      int index = 0;
      if (auto b = name.find('['); b != std::string::npos) {
        base = name.substr(0, b);
        index = std::stoi(name.substr(b + 1));
      }
      const Declaration* d = program_.find_declaration(base);
      if (!d) throw ParseError("reference to undeclared memory region '" + base + "'", line, column);
      if (d->type != DataType::Real) throw ParseError("'" + base + "' is not REAL memory", line, column);
      if (index >= d->length) throw ParseError("index out of range for '" + base + "'", line, column);
    };
  }

  MemoryRef memory_ref(TokenStream& ts) {
    const Token name = ts.next();
    if (name.kind != Token::Kind::Ident) ts.fail("expected memory reference");
    MemoryRef ref{name.text, 0, false};
    if (ts.accept("[")) {
      const Token idx = ts.next();
      if (idx.kind != Token::Kind::Number || idx.number < 0 || idx.number != static_cast<int>(idx.number)) {
        ts.fail("expected memory index");
      }
      ts.expect("]");
      ref.index = static_cast<int>(idx.number);
      ref.indexed = true;
    }
    if (check_memory_) {
      const Declaration* d = program_.find_declaration(ref.name);
      if (!d) throw ParseError("reference to undeclared memory region '" + ref.name + "'", ts.line(), name.column);
      if (ref.index >= d->length) throw ParseError("index out of range for '" + ref.name + "'", ts.line(), name.column);
    }
    return ref;
  }

  int qubit_index(TokenStream& ts) {
    const Token t = ts.next();
    if (t.kind != Token::Kind::Number || t.imaginary || t.number < 0 || t.number != static_cast<int>(t.number) ||
        t.text.find_first_of(".eE") != std::string::npos) {
      throw ParseError("expected qubit index", ts.line(), t.column);
    }
    return static_cast<int>(t.number);
  }

  std::string label_name(TokenStream& ts) {
    const Token t = ts.next();
    if (t.kind != Token::Kind::Label) throw ParseError("expected @label", ts.line(), t.column);
    return t.text;
  }

  Instruction instruction_from(TokenStream& ts) {
    const Token head = ts.peek();
    if (head.kind != Token::Kind::Ident) ts.fail("expected instruction");
    // Keywords may contain '-', which the tokenizer splits.
    std::string kw = head.text;
    if ((kw == "JUMP") && ts.peek(1).kind == Token::Kind::Punct && ts.peek(1).text == "-" &&
        ts.peek(2).kind == Token::Kind::Ident) {
      kw += "-" + ts.peek(2).text;
      ts.next();
      ts.next();
    }
    ts.next();
    Instruction out;
    if (kw == "MEASURE") {
      const int q = qubit_index(ts);
      if (ts.at_end()) {
        out = MeasureDiscard{q};
      } else {
        out = Measure{q, memory_ref(ts)};
      }
    } else if (kw == "LABEL") {
      out = Label{label_name(ts)};
    } else if (kw == "JUMP") {
      out = Jump{label_name(ts)};
    } else if (kw == "JUMP-WHEN") {
      std::string l = label_name(ts);
      out = JumpWhen{l, memory_ref(ts)};
    } else if (kw == "JUMP-UNLESS") {
      std::string l = label_name(ts);
      out = JumpUnless{l, memory_ref(ts)};
    } else if (kw == "DECLARE") {
      ts.fail("DECLARE is not allowed here");
    } else {
      out = gate_or_call(ts, head);
    }
    if (!ts.at_end()) ts.fail("unexpected trailing input");
    return out;
  }

  Instruction gate_or_call(TokenStream& ts, const Token& head) {
    CircuitCall call;
    call.name = head.text;
    call.line = ts.line();
    if (ts.accept("(")) {
      if (!ts.accept(")")) {
        do {
          call.params.push_back(ts.parse_expr([](const std::string&, int) {}));
        } while (ts.accept(","));
        ts.expect(")");
      }
    }
    bool all_integer = true;
    while (!ts.at_end()) {
      const Token t = ts.next();
      if (t.kind == Token::Kind::Number && !t.imaginary && t.text.find_first_of(".eE") == std::string::npos) {
        call.operands.push_back(t.text);
      } else if (t.kind == Token::Kind::Ident) {
        std::string op = t.text;
        if (ts.accept("[")) {
          const Token idx = ts.next();
          if (idx.kind != Token::Kind::Number) ts.fail("expected memory index");
          ts.expect("]");
          op += "[" + idx.text + "]";
        }
        call.operands.push_back(op);
        all_integer = false;
      } else {
        throw ParseError("unexpected operand", ts.line(), t.column);
      }
    }
    const bool known_gate = is_builtin_gate(call.name) || program_.gate_definitions.count(call.name);
    if (known_gate && all_integer && !program_.circuit_definitions.count(call.name)) {
      return to_gate(call, head.column);
    }
    if (known_gate && !all_integer && !program_.circuit_definitions.count(call.name)) {
      throw ParseError("gate '" + call.name + "' requires integer qubit operands", ts.line(), head.column);
    }
    pending_columns_.push_back(head.column);
    return call;
  }

  GateApplication to_gate(const CircuitCall& call, int column) {
    GateApplication g;
    g.name = call.name;
    int nparams = 0;
    int nqubits = 0;
    if (is_builtin_gate(call.name)) {
      std::tie(nparams, nqubits) = builtin_signature(call.name);
    } else {
      const auto& def = program_.gate_definitions.at(call.name);
      nparams = static_cast<int>(def.params.size());
      nqubits = def.arity();
    }
    if (static_cast<int>(call.params.size()) != nparams) {
      throw ParseError("gate '" + g.name + "' expects " + std::to_string(nparams) + " parameter(s)", call.line,
                       column);
    }
    if (static_cast<int>(call.operands.size()) != nqubits) {
      throw ParseError("gate '" + g.name + "' expects " + std::to_string(nqubits) + " qubit(s)", call.line, column);
    }
    auto check = real_memory_check(call.line);
    for (const auto& p : call.params) {
      walk_variables(*p, [&](const std::string& v) { check(v, column); });
      auto folded = fold_affine(*p);
      if (!folded) throw ParseError("parameter is not an affine real expression", call.line, column);
      g.params.push_back(simplify_param(*folded));
    }
    std::set<int> seen;
    for (const auto& op : call.operands) {
      const int q = std::stoi(op);
      if (!seen.insert(q).second) throw ParseError("repeated qubit in '" + g.name + "'", call.line, column);
      g.qubits.push_back(q);
    }
    return g;
  }

  static void walk_variables(const Expr& e, const std::function<void(const std::string&)>& f) {
    if (e.kind == Expr::Kind::Variable) f(e.name);
    for (const auto& a : e.args) walk_variables(*a, f);
  }

  void parse_defgate(const SourceLine& header, const std::vector<SourceLine>& rows) {
    auto toks = tokenize(header.text, header.number, header.column);
    TokenStream ts(std::move(toks), header.number);
    ts.next();
    const Token name = ts.next();
    if (name.kind != Token::Kind::Ident) ts.fail("expected gate name");
    GateDefinition def;
    def.name = name.text;
    if (is_builtin_gate(def.name)) {
      throw ParseError("DEFGATE may not redefine builtin gate '" + def.name + "'", header.number, name.column);
    }
    if (program_.gate_definitions.count(def.name) || program_.circuit_definitions.count(def.name)) {
      throw ParseError("'" + def.name + "' is already defined", header.number, name.column);
    }
    if (ts.accept("(")) {
      do {
        const Token p = ts.next();
        if (p.kind != Token::Kind::Ident) ts.fail("expected parameter name");
        def.params.push_back(p.text);
      } while (ts.accept(","));
      ts.expect(")");
    }
    if (ts.peek().kind == Token::Kind::Ident && ts.peek().text == "AS") {
      ts.next();
      const Token kind = ts.next();
      if (kind.text != "MATRIX") ts.fail("only MATRIX gate definitions are supported");
    }
    ts.expect(":");
    if (!ts.at_end()) ts.fail("unexpected trailing input");
    std::set<std::string> formals(def.params.begin(), def.params.end());
    int row_line = header.number;
    VariableCheck check = [&](const std::string& v, int column) {
      if (!formals.count(v)) throw ParseError("unknown name '" + v + "' in gate definition", row_line, column);
    };
    size_t width = 0;
    for (const auto& row : rows) {
      row_line = row.number;
      auto rt = tokenize(row.text, row.number, row.column);
      TokenStream rs(std::move(rt), row.number);
      size_t count = 0;
      do {
        def.entries.push_back(rs.parse_expr(check));
        ++count;
      } while (rs.accept(","));
      if (!rs.at_end()) rs.fail("unexpected input in matrix row");
      if (width == 0) width = count;
      if (count != width) throw ParseError("matrix rows have different lengths", row.number, row.column);
    }
    const size_t dim = rows.size();
    if (dim == 0 || width != dim || (dim & (dim - 1)) != 0 || dim < 2) {
      throw ParseError("DEFGATE matrix must be square with power-of-two dimension", header.number, header.column);
    }
    def.dimension = static_cast<int>(dim);
    program_.gate_definitions.emplace(def.name, std::move(def));
  }

  void parse_defcircuit(const SourceLine& header, const std::vector<SourceLine>& body) {
    auto toks = tokenize(header.text, header.number, header.column);
    TokenStream ts(std::move(toks), header.number);
    ts.next();
    const Token name = ts.next();
    if (name.kind != Token::Kind::Ident) ts.fail("expected circuit name");
    CircuitDefinition def;
    def.name = name.text;
    def.line = header.number;
    if (is_builtin_gate(def.name) || program_.gate_definitions.count(def.name) ||
        program_.circuit_definitions.count(def.name)) {
      throw ParseError("'" + def.name + "' is already defined", header.number, name.column);
    }
    if (ts.accept("(")) {
      do {
        const Token p = ts.next();
        if (p.kind != Token::Kind::Ident) ts.fail("expected parameter name");
        def.params.push_back(p.text);
      } while (ts.accept(","));
      ts.expect(")");
    }
    while (ts.peek().kind == Token::Kind::Ident) def.formals.push_back(ts.next().text);
    ts.expect(":");
    if (!ts.at_end()) ts.fail("unexpected trailing input");
    for (const auto& line : body) def.body.push_back(line.text);
    program_.circuit_definitions.emplace(def.name, std::move(def));
  }

  void resolve_pending_calls() {
    size_t k = 0;
    for (auto& instr : program_.body) {
      auto* call = std::get_if<CircuitCall>(&instr);
      if (!call) continue;
      const int column = k < pending_columns_.size() ? pending_columns_[k] : 1;
      ++k;
      if (program_.circuit_definitions.count(call->name)) continue;
      if (program_.gate_definitions.count(call->name)) {
        bool ints = std::all_of(call->operands.begin(), call->operands.end(), [](const std::string& s) {
          return !s.empty() && std::all_of(s.begin(), s.end(), ::isdigit);
        });
        if (!ints) throw ParseError("gate '" + call->name + "' requires integer qubit operands", call->line, column);
        instr = to_gate(*call, column);
        continue;
      }
      throw ParseError("unknown gate or circuit '" + call->name + "'", call->line, column);
    }
  }

 public:
  bool check_memory_ = true;

 private:
  Program& program_;
  std::vector<int> pending_columns_;
};

}  // namespace

bool is_builtin_gate(const std::string& name) { return builtin_table().count(name) > 0; }

std::pair<int, int> builtin_signature(const std::string& name) {
  auto it = builtin_table().find(name);
  if (it == builtin_table().end()) return {-1, -1};
  return it->second;
}

Program parse_program(std::string_view text) {
  Program p;
  Parser parser(p);
  parser.parse_source(text);
  return p;
}

namespace {

struct Expander {
  const Program& source;
  Program& out;
  int counter = 0;
  std::vector<std::string> stack;

  void expand_into(const CircuitCall& call, std::vector<Instruction>& sink) {
    auto it = source.circuit_definitions.find(call.name);
    if (it == source.circuit_definitions.end()) throw Error("unknown circuit '" + call.name + "'");
    const CircuitDefinition& def = it->second;
    if (std::find(stack.begin(), stack.end(), def.name) != stack.end()) {
      throw Error("recursive circuit definition involving '" + def.name + "'");
    }
    if (call.params.size() != def.params.size() || call.operands.size() != def.formals.size()) {
      throw Error("arity mismatch in call to circuit '" + def.name + "' on line " + std::to_string(call.line));
    }
    std::map<std::string, std::string> subst;
    for (size_t i = 0; i < def.params.size(); ++i) subst[def.params[i]] = "(" + format_expr(*call.params[i]) + ")";
    for (size_t i = 0; i < def.formals.size(); ++i) subst[def.formals[i]] = call.operands[i];

    std::set<std::string> local_labels;
    for (const auto& line : def.body) {
      auto toks = tokenize(line, def.line, 1);
      if (toks.size() >= 2 && toks[0].kind == Token::Kind::Ident && toks[0].text == "LABEL" &&
          toks[1].kind == Token::Kind::Label) {
        local_labels.insert(toks[1].text);
      }
    }
    const int k = local_labels.empty() ? 0 : ++counter;

    stack.push_back(def.name);
    int offset = 0;
    for (const auto& line : def.body) {
      ++offset;
      std::string rewritten = substitute(line, subst, local_labels, k);
      Parser parser(out);
      parser.check_memory_ = true;
      Instruction instr = parser.parse_instruction(rewritten, def.line + offset, 1);
      if (auto* inner = std::get_if<CircuitCall>(&instr)) {
        if (!source.circuit_definitions.count(inner->name)) {
          throw Error("unknown gate or circuit '" + inner->name + "' in circuit '" + def.name + "'");
        }
        expand_into(*inner, sink);
      } else {
        sink.push_back(std::move(instr));
      }
    }
    stack.pop_back();
  }

  static std::string substitute(const std::string& line, const std::map<std::string, std::string>& subst,
                                const std::set<std::string>& labels, int k) {
    std::string out;
    size_t i = 0;
    while (i < line.size()) {
      const char c = line[i];
      if (c == '@') {
        size_t j = i + 1;
        while (j < line.size() && (ident_char(line[j]) || line[j] == '-')) ++j;
        std::string name = line.substr(i + 1, j - i - 1);
        out += "@" + (labels.count(name) ? name + "_" + std::to_string(k) : name);
        i = j;
      } else if (ident_start(c) && (i == 0 || !ident_char(line[i - 1]))) {
        size_t j = i + 1;
        while (j < line.size() && ident_char(line[j])) ++j;
        std::string word = line.substr(i, j - i);
        auto it = subst.find(word);
        out += it == subst.end() ? word : it->second;
        i = j;
      } else {
        out += c;
        ++i;
      }
    }
    return out;
  }
};

}  // namespace

Program expand_circuits(const Program& p) {
  Program out;
  out.declarations = p.declarations;
  out.gate_definitions = p.gate_definitions;
  Expander ex{p, out, 0, {}};
  for (const auto& instr : p.body) {
    if (const auto* call = std::get_if<CircuitCall>(&instr)) {
      ex.expand_into(*call, out.body);
    } else {
      out.body.push_back(instr);
    }
  }
  return out;
}

namespace {

std::string format_memory(const MemoryRef& m) {
  return m.indexed ? m.name + "[" + std::to_string(m.index) + "]" : m.name;
}

}  // namespace

std::string format_instruction(const Instruction& instr) {
  std::ostringstream os;
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, GateApplication>) {
          os << x.name;
          if (!x.params.empty()) {
            os << "(";
            for (size_t i = 0; i < x.params.size(); ++i) os << (i ? ", " : "") << format_param(x.params[i]);
            os << ")";
          }
          for (int q : x.qubits) os << " " << q;
        } else if constexpr (std::is_same_v<T, Measure>) {
          os << "MEASURE " << x.qubit << " " << format_memory(x.target);
        } else if constexpr (std::is_same_v<T, MeasureDiscard>) {
          os << "MEASURE " << x.qubit;
        } else if constexpr (std::is_same_v<T, Label>) {
          os << "LABEL @" << x.name;
        } else if constexpr (std::is_same_v<T, Jump>) {
          os << "JUMP @" << x.label;
        } else if constexpr (std::is_same_v<T, JumpWhen>) {
          os << "JUMP-WHEN @" << x.label << " " << format_memory(x.condition);
        } else if constexpr (std::is_same_v<T, JumpUnless>) {
          os << "JUMP-UNLESS @" << x.label << " " << format_memory(x.condition);
        } else if constexpr (std::is_same_v<T, Pragma>) {
          os << "PRAGMA " << x.text;
        } else if constexpr (std::is_same_v<T, CircuitCall>) {
          os << x.name;
          if (!x.params.empty()) {
            os << "(";
            for (size_t i = 0; i < x.params.size(); ++i) os << (i ? ", " : "") << format_expr(*x.params[i]);
            os << ")";
          }
          for (const auto& o : x.operands) os << " " << o;
        }
      },
      instr);
  return os.str();
}

std::string print_program(const Program& p) {
  std::ostringstream os;
  for (const auto& d : p.declarations) {
    os << "DECLARE " << d.name << " " << (d.type == DataType::Bit ? "BIT" : "REAL");
    if (d.explicit_length) os << "[" << d.length << "]";
    os << "\n";
  }
  for (const auto& [name, def] : p.gate_definitions) {
    os << "DEFGATE " << name;
    if (!def.params.empty()) {
      os << "(";
      for (size_t i = 0; i < def.params.size(); ++i) os << (i ? ", " : "") << def.params[i];
      os << ")";
    }
    os << ":\n";
    for (int r = 0; r < def.dimension; ++r) {
      os << "    ";
      for (int c = 0; c < def.dimension; ++c) {
        os << (c ? ", " : "") << format_expr(*def.entries[static_cast<size_t>(r * def.dimension + c)]);
      }
      os << "\n";
    }
  }
  for (const auto& [name, def] : p.circuit_definitions) {
    os << "DEFCIRCUIT " << name;
    if (!def.params.empty()) {
      os << "(";
      for (size_t i = 0; i < def.params.size(); ++i) os << (i ? ", " : "") << def.params[i];
      os << ")";
    }
    for (const auto& f : def.formals) os << " " << f;
    os << ":\n";
    for (const auto& line : def.body) os << "    " << line << "\n";
  }
  for (const auto& instr : p.body) os << format_instruction(instr) << "\n";
  return os.str();
}

}  // namespace qcc

#include "gmmcc/lp_format.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

#include "gmmcc/json_io.hpp"

namespace gmmcc {

namespace {

void append_signed(std::string& out, double coeff, const std::string& name, bool first) {
  double mag = std::fabs(coeff);
  if (first) {
    if (coeff < 0.0) out += "- ";
  } else {
    out += coeff < 0.0 ? " - " : " + ";
  }
  out += format_double17(mag);
  out += ' ';
  out += name;
}

void append_linear(std::string& out, const MiqpModel& m, const std::vector<LinTerm>& terms,
                   bool& first) {
  for (const auto& t : terms) {
    append_signed(out, t.coeff, m.variables[t.var].name, first);
    first = false;
  }
}

void append_quad(std::string& out, const MiqpModel& m, const std::vector<QuadTerm>& terms,
                 bool& first) {
  out += first ? "[ " : " + [ ";
  first = false;
  bool qfirst = true;
  for (const auto& q : terms) {
    double mag = std::fabs(q.coeff);
    if (qfirst) {
      if (q.coeff < 0.0) out += "- ";
      qfirst = false;
    } else {
      out += q.coeff < 0.0 ? " - " : " + ";
    }
    out += format_double17(mag);
    out += ' ';
    out += m.variables[q.var_i].name;
    if (q.var_i == q.var_j) {
      out += " ^2";
    } else {
      out += " * ";
      out += m.variables[q.var_j].name;
    }
  }
  out += " ]";
}

const char* sense_text(RowSense s) {
  switch (s) {
    case RowSense::Le: return "<=";
    case RowSense::Ge: return ">=";
    default: return "=";
  }
}

}  // namespace

std::string write_lp(const MiqpModel& m) {
  std::string out;
  size_t approx = 64;
  for (const auto& r : m.rows) approx += 24 * (r.terms.size() + 2);
  for (const auto& r : m.quad_rows) approx += 24 * (r.linear.size() + 2 * r.quad.size() + 2);
  approx += 40 * m.variables.size();
  out.reserve(approx);

  for (const auto& kv : m.metadata) {
    out += "\\ ";
    out += kv.first;
    out += ": ";
    out += kv.second;
    out += '\n';
  }
  out += "Minimize\n obj: ";
  bool first = true;
  append_linear(out, m, m.objective, first);
  if (first) out += "0 " + m.variables.at(0).name;
  out += "\nSubject To\n";

  for (const auto& row : m.rows) {
    out += ' ';
    out += row.name;
    out += ": ";
    first = true;
    append_linear(out, m, row.terms, first);
    out += ' ';
    out += sense_text(row.sense);
    out += ' ';
    out += format_double17(row.rhs);
    out += '\n';
  }
  for (const auto& row : m.quad_rows) {
    out += ' ';
    out += row.name;
    out += ": ";
    first = true;
    append_linear(out, m, row.linear, first);
    append_quad(out, m, row.quad, first);
    out += ' ';
    out += sense_text(row.sense);
    out += ' ';
    out += format_double17(row.rhs);
    out += '\n';
  }

  out += "Bounds\n";
  for (const auto& v : m.variables) {
    out += ' ';
    if (v.lower <= -kInf && v.upper >= kInf) {
      out += v.name;
      out += " free\n";
    } else if (v.upper >= kInf) {
      out += v.name;
      out += " >= ";
      out += format_double17(v.lower);
      out += '\n';
    } else if (v.lower <= -kInf) {
      out += v.name;
      out += " <= ";
      out += format_double17(v.upper);
      out += '\n';
    } else {
      out += format_double17(v.lower);
      out += " <= ";
      out += v.name;
      out += " <= ";
      out += format_double17(v.upper);
      out += '\n';
    }
  }

  bool any_binary = false;
  for (const auto& v : m.variables)
    if (v.kind == VarKind::Binary) any_binary = true;
  if (any_binary) {
    out += "Binaries\n";
    for (const auto& v : m.variables)
      if (v.kind == VarKind::Binary) {
        out += ' ';
        out += v.name;
        out += '\n';
      }
  }

  if (!m.sos2.empty()) {
    out += "SOS\n";
    for (const auto& g : m.sos2) {
      out += ' ';
      out += g.name;
      out += ": S2::";
      for (size_t i = 0; i < g.vars.size(); ++i) {
        out += ' ';
        out += m.variables[g.vars[i]].name;
        out += ':';
        out += std::to_string(i + 1);
      }
      out += '\n';
    }
  }
  out += "End\n";
  return out;
}

namespace {

struct Tokenizer {
  const std::string& text;
  size_t pos = 0;

  explicit Tokenizer(const std::string& t) : text(t) {}

  // Comment lines start with backslash; treated as whitespace.
  void skip_space() {
    while (pos < text.size()) {
      char c = text[pos];
      if (c == '\\') {
        while (pos < text.size() && text[pos] != '\n') ++pos;
      } else if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
        ++pos;
      } else {
        break;
      }
    }
  }

  bool eof() {
    skip_space();
    return pos >= text.size();
  }

  std::string peek() {
    size_t save = pos;
    std::string tok = next();
    pos = save;
    return tok;
  }

  std::string next() {
    skip_space();
    if (pos >= text.size()) return {};
    char c = text[pos];
    if (c == '+' || c == '-' || c == '[' || c == ']' || c == '*' || c == ':') {
      // ':' may be part of "::" or a name:weight separator
      if (c == ':' && pos + 1 < text.size() && text[pos + 1] == ':') {
        pos += 2;
        return "::";
      }
      ++pos;
      return std::string(1, c);
    }
    if (c == '<' || c == '>' || c == '=') {
      size_t start = pos++;
      if (pos < text.size() && text[pos] == '=') ++pos;
      return text.substr(start, pos - start);
    }
    size_t start = pos;
    while (pos < text.size() && !strchr_token(text[pos])) ++pos;
    // Keep scientific-notation exponents ("1.5e-11") in one token.
    if (pos < text.size() && (text[pos] == '+' || text[pos] == '-') && pos > start &&
        (text[pos - 1] == 'e' || text[pos - 1] == 'E') && text[start] >= '0' &&
        text[start] <= '9') {
      ++pos;
      while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') ++pos;
    }
    return text.substr(start, pos - start);
  }

  static bool strchr_token(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '+' || c == '-' || c == '[' ||
           c == ']' || c == '*' || c == ':' || c == '<' || c == '>' || c == '=' || c == '\\';
  }
};

bool is_number_token(const std::string& tok) {
  if (tok.empty()) return false;
  char c = tok[0];
  return (c >= '0' && c <= '9') || c == '.';
}

double to_double(const std::string& tok) {
  double v = 0.0;
  auto r = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (r.ec != std::errc() || r.ptr != tok.data() + tok.size())
    throw std::runtime_error("parse_lp: bad number '" + tok + "'");
  return v;
}

RowSense to_sense(const std::string& tok) {
  if (tok == "<=" || tok == "<") return RowSense::Le;
  if (tok == ">=" || tok == ">") return RowSense::Ge;
  if (tok == "=" || tok == "==") return RowSense::Eq;
  throw std::runtime_error("parse_lp: expected sense, got '" + tok + "'");
}

bool is_section(const std::string& tok) {
  return tok == "Minimize" || tok == "Subject" || tok == "Bounds" || tok == "Binaries" ||
         tok == "SOS" || tok == "End";
}

// name -> index map built from the Bounds section (declaration order).
struct VarTable {
  std::vector<std::string> names;
  std::vector<double> lowers, uppers;
  std::unordered_map<std::string, int> index;
};

}  // namespace

MiqpModel parse_lp(const std::string& text) {
  // Pass 1: variable list from Bounds (every variable appears there, in
  // declaration order).
  VarTable vars;
  {
    size_t b = text.find("\nBounds\n");
    if (b == std::string::npos) throw std::runtime_error("parse_lp: missing Bounds section");
    Tokenizer tk(text);
    tk.pos = b + 1;
    std::string section = tk.next();  // "Bounds"
    while (!tk.eof()) {
      std::string tok = tk.next();
      if (is_section(tok)) break;
      double lo = -kInf, hi = kInf;
      std::string name;
      if (is_number_token(tok) || tok == "-" || tok == "+") {
        // lo <= name <= hi
        double sign = 1.0;
        if (tok == "-" || tok == "+") {
          sign = tok == "-" ? -1.0 : 1.0;
          tok = tk.next();
        }
        lo = sign * to_double(tok);
        if (tk.next() != "<=") throw std::runtime_error("parse_lp: malformed bound line");
        name = tk.next();
        if (tk.next() != "<=") throw std::runtime_error("parse_lp: malformed bound line");
        std::string hitok = tk.next();
        double hsign = 1.0;
        if (hitok == "-" || hitok == "+") {
          hsign = hitok == "-" ? -1.0 : 1.0;
          hitok = tk.next();
        }
        hi = hsign * to_double(hitok);
      } else {
        name = tok;
        std::string follow = tk.peek();
        if (follow == "free") {
          tk.next();
        } else if (follow == ">=" || follow == "<=") {
          std::string op = tk.next();
          std::string num = tk.next();
          double sign = 1.0;
          if (num == "-" || num == "+") {
            sign = num == "-" ? -1.0 : 1.0;
            num = tk.next();
          }
          double v = sign * to_double(num);
          if (op == ">=")
            lo = v;
          else
            hi = v;
        } else {
          throw std::runtime_error("parse_lp: malformed bound line near '" + name + "'");
        }
      }
      vars.index[name] = static_cast<int>(vars.names.size());
      vars.names.push_back(name);
      vars.lowers.push_back(lo);
      vars.uppers.push_back(hi);
    }
  }

  MiqpModel m;
  for (size_t i = 0; i < vars.names.size(); ++i)
    m.add_var(vars.names[i], VarKind::Continuous, vars.lowers[i], vars.uppers[i]);
  auto var_of = [&](const std::string& name) {
    auto it = vars.index.find(name);
    if (it == vars.index.end()) throw std::runtime_error("parse_lp: unknown variable " + name);
    return it->second;
  };

  // Metadata from leading comment lines "\ key: value".
  {
    size_t pos = 0;
    while (pos < text.size() && text[pos] == '\\') {
      size_t eol = text.find('\n', pos);
      std::string line = text.substr(pos + 1, eol - pos - 1);
      size_t colon = line.find(": ");
      if (colon != std::string::npos) {
        std::string key = line.substr(0, colon);
        while (!key.empty() && key.front() == ' ') key.erase(key.begin());
        m.metadata.emplace_back(key, line.substr(colon + 2));
      }
      pos = eol + 1;
    }
  }

  Tokenizer tk(text);
  std::string tok = tk.next();
  if (tok != "Minimize") throw std::runtime_error("parse_lp: expected Minimize");
  // Objective: "obj: terms".
  tok = tk.next();
  if (tok != "obj") throw std::runtime_error("parse_lp: expected obj label");
  if (tk.next() != ":") throw std::runtime_error("parse_lp: expected ':' after obj");

  // Reads a run of linear/quad terms until a sense token or section keyword.
  auto parse_terms = [&](std::vector<LinTerm>& linear, std::vector<QuadTerm>* quad,
                         std::string& stop) {
    double sign = 1.0;
    bool in_quad = false;
    for (;;) {
      std::string t = tk.peek();
      if (t.empty() || ((t == "<=" || t == ">=" || t == "=" || is_section(t)) && !in_quad)) {
        stop = t;
        return;
      }
      t = tk.next();
      if (t == "+") continue;
      if (t == "-") {
        sign = -sign;
        continue;
      }
      if (t == "[") {
        if (!quad) throw std::runtime_error("parse_lp: unexpected quadratic bracket");
        in_quad = true;
        continue;
      }
      if (t == "]") {
        in_quad = false;
        continue;
      }
      double coeff = sign;
      std::string name = t;
      if (is_number_token(t)) {
        coeff = sign * to_double(t);
        name = tk.next();
      }
      sign = 1.0;
      if (in_quad) {
        std::string follow = tk.peek();
        if (follow == "*") {
          tk.next();
          std::string other = tk.next();
          quad->push_back({var_of(name), var_of(other), coeff});
        } else if (follow.size() >= 2 && follow[0] == '^') {
          tk.next();
          int v = var_of(name);
          quad->push_back({v, v, coeff});
        } else {
          throw std::runtime_error("parse_lp: malformed quadratic term near " + name);
        }
      } else {
        linear.push_back({var_of(name), coeff});
      }
    }
  };

  std::string stop;
  parse_terms(m.objective, nullptr, stop);
  // Zero objective placeholder "0 x" parses as coefficient 0.
  if (m.objective.size() == 1 && m.objective[0].coeff == 0.0) m.objective.clear();

  tok = tk.next();
  if (tok != "Subject") throw std::runtime_error("parse_lp: expected Subject To");
  if (tk.next() != "To") throw std::runtime_error("parse_lp: expected Subject To");

  for (;;) {
    tok = tk.peek();
    if (is_section(tok) || tok.empty()) break;
    std::string name = tk.next();
    if (tk.next() != ":") throw std::runtime_error("parse_lp: expected ':' after row " + name);
    std::vector<LinTerm> linear;
    std::vector<QuadTerm> quad;
    parse_terms(linear, &quad, stop);
    std::string sense_tok = tk.next();
    RowSense sense = to_sense(sense_tok);
    std::string num = tk.next();
    double sign = 1.0;
    if (num == "-" || num == "+") {
      sign = num == "-" ? -1.0 : 1.0;
      num = tk.next();
    }
    double rhs = sign * to_double(num);
    if (quad.empty()) {
      m.rows.push_back({name, std::move(linear), sense, rhs});
    } else {
      m.quad_rows.push_back({name, std::move(linear), std::move(quad), sense, rhs});
    }
  }

  tok = tk.next();  // Bounds
  if (tok != "Bounds") throw std::runtime_error("parse_lp: expected Bounds");
  // Skip through the already-parsed Bounds section.
  for (;;) {
    tok = tk.peek();
    if (tok.empty() || tok == "Binaries" || tok == "SOS" || tok == "End") break;
    tk.next();
  }

  tok = tk.next();
  if (tok == "Binaries") {
    for (;;) {
      std::string t = tk.peek();
      if (t.empty() || t == "SOS" || t == "End") break;
      m.variables[var_of(tk.next())].kind = VarKind::Binary;
    }
    tok = tk.next();
  }

  if (tok == "SOS") {
    for (;;) {
      std::string t = tk.peek();
      if (t.empty() || t == "End") break;
      Sos2Group g;
      g.name = tk.next();
      if (tk.next() != ":") throw std::runtime_error("parse_lp: expected ':' in SOS line");
      if (tk.next() != "S2") throw std::runtime_error("parse_lp: only S2 groups supported");
      if (tk.next() != "::") throw std::runtime_error("parse_lp: expected '::' in SOS line");
      for (;;) {
        std::string nt = tk.peek();
        if (nt.empty() || nt == "End") break;
        // Members are name:weight; a new group starts with name: S2::.
        size_t save = tk.pos;
        std::string cand = tk.next();
        if (tk.peek() != ":") {
          tk.pos = save;
          break;
        }
        tk.next();  // ':'
        std::string after = tk.peek();
        if (after == "S2") {
          tk.pos = save;
          break;
        }
        tk.next();  // weight (positional, implied by order)
        g.vars.push_back(var_of(cand));
      }
      m.sos2.push_back(std::move(g));
    }
    tok = tk.next();
  }

  if (tok != "End") throw std::runtime_error("parse_lp: expected End, got '" + tok + "'");
  return m;
}

std::string write_ir_json(const MiqpModel& m) {
  JsonWriter w;
  w.begin_object();
  w.key("schema").value("gmmcc-ir-v1");
  w.key("metadata").begin_object();
  for (const auto& kv : m.metadata) w.key(kv.first).value(kv.second);
  w.end_object();
  w.key("variables").begin_array();
  for (const auto& v : m.variables) {
    w.begin_object();
    w.key("name").value(v.name);
    w.key("kind").value(v.kind == VarKind::Binary ? "binary" : "continuous");
    if (v.lower > -kInf) w.key("lower").value(v.lower);
    if (v.upper < kInf) w.key("upper").value(v.upper);
    w.end_object();
  }
  w.end_array();
  w.key("objective").begin_array();
  for (const auto& t : m.objective) {
    w.begin_object();
    w.key("var").value(t.var);
    w.key("coeff").value(t.coeff);
    w.end_object();
  }
  w.end_array();
  auto sense_str = [](RowSense s) {
    switch (s) {
      case RowSense::Le: return "le";
      case RowSense::Ge: return "ge";
      default: return "eq";
    }
  };
  w.key("rows").begin_array();
  for (const auto& r : m.rows) {
    w.begin_object();
    w.key("name").value(r.name);
    w.key("sense").value(sense_str(r.sense));
    w.key("rhs").value(r.rhs);
    w.key("terms").begin_array();
    for (const auto& t : r.terms) {
      w.begin_object();
      w.key("var").value(t.var);
      w.key("coeff").value(t.coeff);
      w.end_object();
    }
    w.end_array();
    w.end_object();
  }
  w.end_array();
  w.key("quad_rows").begin_array();
  for (const auto& r : m.quad_rows) {
    w.begin_object();
    w.key("name").value(r.name);
    w.key("sense").value(sense_str(r.sense));
    w.key("rhs").value(r.rhs);
    w.key("linear").begin_array();
    for (const auto& t : r.linear) {
      w.begin_object();
      w.key("var").value(t.var);
      w.key("coeff").value(t.coeff);
      w.end_object();
    }
    w.end_array();
    w.key("quad").begin_array();
    for (const auto& q : r.quad) {
      w.begin_object();
      w.key("i").value(q.var_i);
      w.key("j").value(q.var_j);
      w.key("coeff").value(q.coeff);
      w.end_object();
    }
    w.end_array();
    w.end_object();
  }
  w.end_array();
  w.key("sos2").begin_array();
  for (const auto& g : m.sos2) {
    w.begin_object();
    w.key("name").value(g.name);
    w.key("vars").begin_array();
    for (int v : g.vars) w.value(v);
    w.end_array();
    w.end_object();
  }
  w.end_array();
  w.end_object();
  return w.str() + "\n";
}

}  // namespace gmmcc

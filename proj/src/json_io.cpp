#include "gmmcc/json_io.hpp"

#include <charconv>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace gmmcc {

std::string format_double17(double v) {
  char buf[40];
  auto r = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, r.ptr);
}

JsonWriter& JsonWriter::begin_object() {
  comma();
  out_ += '{';
  need_comma_.push_back(false);
  return *this;
}

JsonWriter& JsonWriter::end_object() {
  out_ += '}';
  need_comma_.pop_back();
  return *this;
}

JsonWriter& JsonWriter::begin_array() {
  comma();
  out_ += '[';
  need_comma_.push_back(false);
  return *this;
}

JsonWriter& JsonWriter::end_array() {
  out_ += ']';
  need_comma_.pop_back();
  return *this;
}

void JsonWriter::comma() {
  if (pending_key_) {
    pending_key_ = false;
    return;
  }
  if (!need_comma_.empty()) {
    if (need_comma_.back()) out_ += ',';
    need_comma_.back() = true;
  }
}

JsonWriter& JsonWriter::key(const std::string& k) {
  comma();
  out_ += '"';
  out_ += k;
  out_ += "\":";
  pending_key_ = true;
  return *this;
}

JsonWriter& JsonWriter::value(double v) {
  comma();
  out_ += format_double17(v);
  return *this;
}

JsonWriter& JsonWriter::value(int v) {
  comma();
  out_ += std::to_string(v);
  return *this;
}

JsonWriter& JsonWriter::value(long long v) {
  comma();
  out_ += std::to_string(v);
  return *this;
}

JsonWriter& JsonWriter::value(uint64_t v) {
  comma();
  out_ += std::to_string(v);
  return *this;
}

JsonWriter& JsonWriter::value(bool v) {
  comma();
  out_ += v ? "true" : "false";
  return *this;
}

JsonWriter& JsonWriter::value(const std::string& s) {
  comma();
  out_ += '"';
  for (char c : s) {
    switch (c) {
      case '"': out_ += "\\\""; break;
      case '\\': out_ += "\\\\"; break;
      case '\n': out_ += "\\n"; break;
      case '\t': out_ += "\\t"; break;
      case '\r': out_ += "\\r"; break;
      default: out_ += c;
    }
  }
  out_ += '"';
  return *this;
}

JsonWriter& JsonWriter::value(const char* s) { return value(std::string(s)); }

JsonWriter& JsonWriter::value(const Vec& v) {
  begin_array();
  for (double x : v) value(x);
  end_array();
  return *this;
}

namespace {

void write_matrix_rows(JsonWriter& w, const Mat& m) {
  w.begin_array();
  for (int i = 0; i < m.rows; ++i) {
    w.begin_array();
    for (int j = 0; j < m.cols; ++j) w.value(m(i, j));
    w.end_array();
  }
  w.end_array();
}

Mat parse_matrix_rows(const nlohmann::json& j, int expect_cols, const char* what) {
  Mat m(static_cast<int>(j.size()), j.empty() ? expect_cols : 0);
  if (!j.empty()) {
    m = Mat(static_cast<int>(j.size()), static_cast<int>(j[0].size()));
    for (int i = 0; i < m.rows; ++i) {
      if (static_cast<int>(j[i].size()) != m.cols)
        throw std::runtime_error(std::string(what) + ": ragged matrix rows");
      for (int jj = 0; jj < m.cols; ++jj) m(i, jj) = j[i][jj].get<double>();
    }
    if (expect_cols > 0 && m.cols != expect_cols)
      throw std::runtime_error(std::string(what) + ": wrong column count");
  }
  return m;
}

Vec parse_vec(const nlohmann::json& j) {
  Vec v;
  v.reserve(j.size());
  for (const auto& e : j) v.push_back(e.get<double>());
  return v;
}

}  // namespace

std::string write_instance_json(const GmmInstance& inst) {
  JsonWriter w;
  w.begin_object();
  w.key("schema").value("gmmcc-instance-v1");
  w.key("n").value(inst.n);
  w.key("K").value(static_cast<int>(inst.components.size()));
  w.key("theta").value(inst.theta);
  w.key("b").value(inst.b);
  w.key("c").value(inst.c);
  w.key("components").begin_array();
  for (const auto& comp : inst.components) {
    w.begin_object();
    w.key("weight").value(comp.weight);
    w.key("mean").value(comp.mean);
    w.key("covariance").value(comp.covariance.a);  // row-major n*n
    w.end_object();
  }
  w.end_array();
  w.key("region").begin_object();
  w.key("A");
  write_matrix_rows(w, inst.region.A);
  w.key("d").value(inst.region.d);
  w.key("H");
  write_matrix_rows(w, inst.region.H);
  w.key("h").value(inst.region.h);
  w.key("box_lo").value(inst.region.box_lo);
  w.key("box_hi").value(inst.region.box_hi);
  w.end_object();
  w.end_object();
  return w.str() + "\n";
}

GmmInstance parse_instance_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  if (!j.contains("schema") || j["schema"] != "gmmcc-instance-v1")
    throw std::runtime_error("instance file: missing or unsupported schema");
  GmmInstance inst;
  inst.n = j.at("n").get<int>();
  inst.theta = j.at("theta").get<double>();
  inst.b = j.at("b").get<double>();
  inst.c = parse_vec(j.at("c"));
  int K = j.at("K").get<int>();
  const auto& comps = j.at("components");
  if (static_cast<int>(comps.size()) != K)
    throw std::runtime_error("instance file: K does not match component count");
  for (const auto& cj : comps) {
    GaussianComponent comp;
    comp.weight = cj.at("weight").get<double>();
    comp.mean = parse_vec(cj.at("mean"));
    Vec flat = parse_vec(cj.at("covariance"));
    if (static_cast<int>(flat.size()) != inst.n * inst.n)
      throw std::runtime_error("instance file: covariance must hold n*n row-major entries");
    comp.covariance = Mat(inst.n, inst.n);
    comp.covariance.a = flat;
    inst.components.push_back(std::move(comp));
  }
  const auto& rj = j.at("region");
  inst.region.A = parse_matrix_rows(rj.at("A"), inst.n, "A");
  inst.region.d = parse_vec(rj.at("d"));
  inst.region.H = parse_matrix_rows(rj.at("H"), inst.n, "H");
  inst.region.h = parse_vec(rj.at("h"));
  inst.region.box_lo = parse_vec(rj.at("box_lo"));
  inst.region.box_hi = parse_vec(rj.at("box_hi"));
  return inst;
}

std::string write_breakpoints_json(const BreakpointArray& bp) {
  JsonWriter w;
  w.begin_object();
  w.key("schema").value("gmmcc-breakpoints-v1");
  w.key("kind").value(bp.kind == Side::Outer ? "outer" : "inner");
  w.key("tau").value(bp.tau);
  w.key("L").value(bp.left_count);
  w.key("R").value(bp.right_count);
  w.key("count").value(static_cast<int>(bp.points.size()));
  w.key("points").value(bp.points);
  w.end_object();
  return w.str() + "\n";
}

Vec parse_solution(const std::string& text, int n) {
  // JSON form first; fall back to "name value" lines.
  size_t first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    nlohmann::json j = nlohmann::json::parse(text);
    if (!j.contains("schema") || j["schema"] != "gmmcc-solution-v1")
      throw std::runtime_error("solution file: missing or unsupported schema");
    Vec x = parse_vec(j.at("x"));
    if (static_cast<int>(x.size()) != n)
      throw std::runtime_error("solution file: x has wrong dimension");
    return x;
  }
  Vec x(n, 0.0);
  std::vector<bool> seen(n, false);
  std::istringstream in(text);
  std::string name;
  double value;
  while (in >> name >> value) {
    if (name.rfind("x_", 0) != 0) continue;  // other model variables are ignored
    int idx = -1;
    try {
      idx = std::stoi(name.substr(2));
    } catch (...) {
      throw std::runtime_error("solution file: bad variable name " + name);
    }
    if (idx < 0 || idx >= n) throw std::runtime_error("solution file: index out of range in " + name);
    x[idx] = value;
    seen[idx] = true;
  }
  for (int i = 0; i < n; ++i)
    if (!seen[i]) throw std::runtime_error("solution file: missing x_" + std::to_string(i));
  return x;
}

uint64_t fnv1a_hash(const std::string& bytes) {
  uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hash_hex(uint64_t h) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i) {
    s[i] = digits[h & 0xF];
    h >>= 4;
  }
  return s;
}

}  // namespace gmmcc

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gmmcc/gmm.hpp"
#include "gmmcc/pwl.hpp"

namespace gmmcc {

// Doubles serialized with 17 significant digits round-trip exactly; every
// writer below goes through this so file bytes are deterministic.
std::string format_double17(double v);

// Minimal canonical JSON emitter: keys in insertion order, no whitespace
// variation, numbers via format_double17.
class JsonWriter {
 public:
  JsonWriter& begin_object();
  JsonWriter& end_object();
  JsonWriter& begin_array();
  JsonWriter& end_array();
  JsonWriter& key(const std::string& k);
  JsonWriter& value(double v);
  JsonWriter& value(int v);
  JsonWriter& value(long long v);
  JsonWriter& value(uint64_t v);
  JsonWriter& value(bool v);
  JsonWriter& value(const std::string& s);
  JsonWriter& value(const char* s);
  JsonWriter& value(const Vec& v);
  std::string str() const { return out_; }

 private:
  void comma();
  std::string out_;
  std::vector<bool> need_comma_;
  bool pending_key_ = false;
};

// Instance file, schema "gmmcc-instance-v1". Round-trips are bit-faithful for
// finite doubles.
std::string write_instance_json(const GmmInstance& inst);
GmmInstance parse_instance_json(const std::string& text);

// Breakpoint array document (points, L, R, tau, kind).
std::string write_breakpoints_json(const BreakpointArray& bp);

// Solution input: JSON {"schema":"gmmcc-solution-v1","x":[...]} or plain
// "name value" lines using the exported variable names (x_0, x_1, ...).
Vec parse_solution(const std::string& text, int n);

// FNV-1a over bytes; used for manifest output hashes.
uint64_t fnv1a_hash(const std::string& bytes);
std::string hash_hex(uint64_t h);

}  // namespace gmmcc

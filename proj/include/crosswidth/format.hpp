#pragma once

#include <string>
#include <vector>

namespace cw::format {

// Fixed 17-significant-digit rendering; non-finite values become "nan"/"inf"/"-inf".
std::string number(double v);

// Minimal ordered document model for stable JSON output.
class Json {
 public:
  enum class Type { Null, Bool, Number, Integer, String, Array, Object };

  Json() = default;
  Json(std::nullptr_t) {}
  Json(bool b) : type_(Type::Bool), b_(b) {}
  Json(double v) : type_(Type::Number), d_(v) {}
  Json(int v) : type_(Type::Integer), i_(v) {}
  Json(long v) : type_(Type::Integer), i_(v) {}
  Json(const char* s) : type_(Type::String), s_(s) {}
  Json(std::string s) : type_(Type::String), s_(std::move(s)) {}

  static Json array() { Json j; j.type_ = Type::Array; return j; }
  static Json object() { Json j; j.type_ = Type::Object; return j; }

  Json& push(Json v);
  Json& set(const std::string& key, Json v);  // keeps insertion order; replaces an existing key

  Type type() const { return type_; }
  std::string dump(int indent = 2) const;

 private:
  void dump_to(std::string& out, int indent, int depth) const;

  Type type_ = Type::Null;
  bool b_ = false;
  double d_ = 0.0;
  long i_ = 0;
  std::string s_;
  std::vector<Json> items_;
  std::vector<std::string> keys_;
};

struct Csv {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> comments;  // trailing '# ...' lines

  std::string dump() const;
};

}  // namespace cw::format

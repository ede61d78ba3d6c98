#include "qors/json_locator.hpp"

#include <iterator>
#include <vector>

#include "qors/errors.hpp"

namespace qors {

namespace {

using nlohmann::json;

// Character iterator that counts the newlines it has stepped over. Copies
// share the counter, which is what the parser's input adapter needs.
class LineCountingIterator {
 public:
  using iterator_category = std::forward_iterator_tag;
  using value_type = char;
  using difference_type = std::ptrdiff_t;
  using pointer = const char*;
  using reference = const char&;

  LineCountingIterator() = default;
  LineCountingIterator(const char* p, std::size_t* line) : p_(p), line_(line) {}

  reference operator*() const { return *p_; }
  LineCountingIterator& operator++() {
    if (*p_ == '\n') {
      ++*line_;
    }
    ++p_;
    return *this;
  }
  LineCountingIterator operator++(int) {
    LineCountingIterator old = *this;
    ++*this;
    return old;
  }
  friend bool operator==(const LineCountingIterator& a, const LineCountingIterator& b) {
    return a.p_ == b.p_;
  }

 private:
  const char* p_ = nullptr;
  std::size_t* line_ = nullptr;
};

class LocatingSax {
 public:
  using number_integer_t = json::number_integer_t;
  using number_unsigned_t = json::number_unsigned_t;
  using number_float_t = json::number_float_t;
  using string_t = json::string_t;
  using binary_t = json::binary_t;

  LocatingSax(json& root, const std::size_t* line, std::map<std::string, std::size_t>& lines,
              std::string file)
      : dom_(root, false), line_(line), lines_(lines), file_(std::move(file)) {}

  bool null() { return scalar() && dom_.null(); }
  bool boolean(bool v) { return scalar() && dom_.boolean(v); }
  bool number_integer(number_integer_t v) { return scalar() && dom_.number_integer(v); }
  bool number_unsigned(number_unsigned_t v) { return scalar() && dom_.number_unsigned(v); }
  bool number_float(number_float_t v, const string_t& s) {
    return scalar() && dom_.number_float(v, s);
  }
  bool string(string_t& v) { return scalar() && dom_.string(v); }
  bool binary(binary_t& v) { return scalar() && dom_.binary(v); }

  bool start_object(std::size_t n) {
    begin_value();
    frames_.push_back({false, {}, 0});
    return dom_.start_object(n);
  }
  bool key(string_t& k) {
    frames_.back().key = k;
    lines_.emplace(current_pointer(), *line_);
    return dom_.key(k);
  }
  bool end_object() {
    frames_.pop_back();
    end_value();
    return dom_.end_object();
  }
  bool start_array(std::size_t n) {
    begin_value();
    frames_.push_back({true, {}, 0});
    return dom_.start_array(n);
  }
  bool end_array() {
    frames_.pop_back();
    end_value();
    return dom_.end_array();
  }

  bool parse_error(std::size_t, const std::string&, const nlohmann::detail::exception& ex) {
    // The lexer has consumed the offending token; its line is the counter.
    std::string what = ex.what();
    if (const auto pos = what.find("syntax error"); pos != std::string::npos) {
      what = what.substr(pos);
    }
    throw ConfigError(file_, *line_, "invalid JSON: " + what);
  }

 private:
  struct Frame {
    bool array;
    std::string key;
    std::size_t index;
  };

  std::string current_pointer() const {
    std::string out;
    for (const auto& f : frames_) {
      out = f.array ? pointer_child(out, f.index) : pointer_child(out, f.key);
    }
    return out;
  }

  void begin_value() { lines_.emplace(current_pointer(), *line_); }
  void end_value() {
    if (!frames_.empty() && frames_.back().array) {
      ++frames_.back().index;
    }
  }
  bool scalar() {
    begin_value();
    end_value();
    return true;
  }

  nlohmann::detail::json_sax_dom_parser<json> dom_;
  const std::size_t* line_;
  std::map<std::string, std::size_t>& lines_;
  std::vector<Frame> frames_;
  std::string file_;
};

}  // namespace

std::size_t LocatedJson::line_of(const std::string& pointer) const {
  std::string p = pointer;
  while (true) {
    if (const auto it = lines.find(p); it != lines.end()) {
      return it->second;
    }
    if (p.empty()) {
      return 0;
    }
    p.erase(p.rfind('/'));
  }
}

LocatedJson parse_located(std::string_view text, const std::string& file) {
  LocatedJson out;
  std::size_t line = 1;
  LocatingSax sax(out.value, &line, out.lines, file);
  LineCountingIterator first(text.data(), &line);
  LineCountingIterator last(text.data() + text.size(), &line);
  json::sax_parse(first, last, &sax);
  return out;
}

std::string pointer_child(const std::string& parent, std::string_view token) {
  std::string out = parent;
  out += '/';
  for (char c : token) {
    if (c == '~') {
      out += "~0";
    } else if (c == '/') {
      out += "~1";
    } else {
      out += c;
    }
  }
  return out;
}

std::string pointer_child(const std::string& parent, std::size_t index) {
  return parent + "/" + std::to_string(index);
}

}  // namespace qors

// jsonout.hpp
//
// Minimal deterministic JSON emitter for report files. Keys keep insertion
// order and floating-point values are printed with 17 significant digits so
// that repeated runs produce byte-identical output.

#ifndef SSLAB_JSONOUT_HPP
#define SSLAB_JSONOUT_HPP

#include <charconv>
#include <cmath>
#include <string>
#include <vector>

namespace sslab {

inline std::string json_number(double v) {
    if (!std::isfinite(v)) return "null";
    char buf[48];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

inline std::string json_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size() + 2);
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            default: out += c;
        }
    }
    return out;
}

// Streaming writer with explicit structure; the caller provides nesting.
class JsonWriter {
public:
    std::string str() const { return out_; }

    void begin_object() { open('{'); }
    void end_object() { close('}'); }
    void begin_array() { open('['); }
    void end_array() { close(']'); }

    void key(const std::string& name) {
        separate();
        out_ += '"' + json_escape(name) + "\":";
        pending_value_ = true;
    }

    void value(double v) { raw(json_number(v)); }
    void value(int v) { raw(std::to_string(v)); }
    void value(long v) { raw(std::to_string(v)); }
    void value(unsigned long v) { raw(std::to_string(v)); }
    void value(bool v) { raw(v ? "true" : "false"); }
    void value(const std::string& v) { raw('"' + json_escape(v) + '"'); }
    void value(const char* v) { value(std::string(v)); }

private:
    void open(char c) {
        separate();
        out_ += c;
        fresh_ = true;
        pending_value_ = false;
    }
    void close(char c) {
        out_ += c;
        fresh_ = false;
    }
    void separate() {
        if (pending_value_) return;
        if (!fresh_ && !out_.empty() && out_.back() != '{' && out_.back() != '[') out_ += ',';
        fresh_ = false;
    }
    void raw(const std::string& s) {
        separate();
        out_ += s;
        pending_value_ = false;
    }

    std::string out_;
    bool fresh_ = true;
    bool pending_value_ = false;
};

} // namespace sslab

#endif

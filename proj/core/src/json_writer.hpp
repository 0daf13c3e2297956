#pragma once

#include <cstdio>
#include <string>
#include <vector>

namespace clusterfx::detail {

// Minimal append-style JSON writer. Numbers are emitted with 17 significant
// digits so serialized reports round-trip exactly.
class JsonWriter {
public:
    std::string str() const { return out_; }

    void begin_object() { open('{'); }
    void end_object() { close('}'); }
    void begin_array() { open('['); }
    void end_array() { close(']'); }

    void key(const std::string& k) {
        comma();
        write_string(k);
        out_ += ':';
        pending_value_ = true;
    }

    void value(double v) {
        comma();
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        out_ += buf;
    }
    void value(long long v) {
        comma();
        out_ += std::to_string(v);
    }
    void value(int v) { value(static_cast<long long>(v)); }
    void value(bool v) {
        comma();
        out_ += v ? "true" : "false";
    }
    void value(const std::string& v) {
        comma();
        write_string(v);
    }
    void value(const char* v) { value(std::string(v)); }

    template <typename T>
    void kv(const std::string& k, const T& v) {
        key(k);
        value(v);
    }

private:
    void open(char ch) {
        comma();
        out_ += ch;
        first_.push_back(true);
    }
    void close(char ch) {
        out_ += ch;
        first_.pop_back();
    }
    void comma() {
        if (pending_value_) {
            pending_value_ = false;
            return;
        }
        if (!first_.empty()) {
            if (!first_.back()) out_ += ',';
            first_.back() = false;
        }
    }
    void write_string(const std::string& s) {
        out_ += '"';
        for (char ch : s) {
            switch (ch) {
                case '"': out_ += "\\\""; break;
                case '\\': out_ += "\\\\"; break;
                case '\n': out_ += "\\n"; break;
                case '\t': out_ += "\\t"; break;
                case '\r': out_ += "\\r"; break;
                default: out_ += ch;
            }
        }
        out_ += '"';
    }

    std::string out_;
    std::vector<bool> first_;
    bool pending_value_ = false;
};

}  // namespace clusterfx::detail

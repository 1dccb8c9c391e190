#include "source_map.hpp"

#include <algorithm>
#include <cctype>

namespace kacm::cli {

namespace {

class Scanner {
public:
    Scanner(std::string_view text, std::map<std::string, int>& out) : s_(text), out_(out) {}

    void run() {
        skip_ws();
        value("");
    }

private:
    std::string_view s_;
    std::map<std::string, int>& out_;
    std::size_t i_ = 0;
    int line_ = 1;

    void advance() {
        if (s_[i_] == '\n') ++line_;
        ++i_;
    }

    void skip_ws() {
        while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) advance();
    }

    std::string string_token() {
        std::string out;
        advance();  // opening quote
        while (i_ < s_.size() && s_[i_] != '"') {
            if (s_[i_] == '\\' && i_ + 1 < s_.size()) {
                advance();
                // escapes only matter for key lookup; keep the common ones
                const char c = s_[i_];
                out.push_back(c == 'n' ? '\n' : c == 't' ? '\t' : c);
            } else {
                out.push_back(s_[i_]);
            }
            advance();
        }
        if (i_ < s_.size()) advance();
        return out;
    }

    void value(const std::string& ptr) {
        if (i_ >= s_.size()) return;
        out_.emplace(ptr, line_);
        const char c = s_[i_];
        if (c == '{') {
            advance();
            skip_ws();
            while (i_ < s_.size() && s_[i_] != '}') {
                const std::string key = string_token();
                skip_ws();
                advance();  // ':'
                skip_ws();
                value(ptr + "/" + pointer_escape(key));
                skip_ws();
                if (i_ < s_.size() && s_[i_] == ',') advance();
                skip_ws();
            }
            if (i_ < s_.size()) advance();
        } else if (c == '[') {
            advance();
            skip_ws();
            for (int n = 0; i_ < s_.size() && s_[i_] != ']'; ++n) {
                value(ptr + "/" + std::to_string(n));
                skip_ws();
                if (i_ < s_.size() && s_[i_] == ',') advance();
                skip_ws();
            }
            if (i_ < s_.size()) advance();
        } else if (c == '"') {
            string_token();
        } else {
            while (i_ < s_.size() && !std::isspace(static_cast<unsigned char>(s_[i_])) && s_[i_] != ',' &&
                   s_[i_] != '}' && s_[i_] != ']')
                advance();
        }
    }
};

}  // namespace

std::string pointer_escape(std::string_view token) {
    std::string out;
    for (char c : token) {
        if (c == '~')
            out += "~0";
        else if (c == '/')
            out += "~1";
        else
            out.push_back(c);
    }
    return out;
}

SourceMap::SourceMap(std::string_view text) { Scanner(text, lines_).run(); }

int SourceMap::line_of(const std::string& pointer) const {
    std::string p = pointer;
    for (;;) {
        auto it = lines_.find(p);
        if (it != lines_.end()) return it->second;
        if (p.empty()) return 1;
        p.erase(p.rfind('/'));
    }
}

int SourceMap::line_at(std::string_view text, std::size_t pos) {
    pos = std::min(pos, text.size());
    return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(pos), '\n'));
}

}  // namespace kacm::cli

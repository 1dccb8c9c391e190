#pragma once

#include <map>
#include <string>
#include <string_view>

namespace kacm::cli {

/// Line numbers of every value in a JSON document, keyed by JSON pointer
/// ("/tasks/2/measures/0"). The text must already be valid JSON.
class SourceMap {
public:
    SourceMap() = default;
    explicit SourceMap(std::string_view text);

    /// Line of the value at `pointer`, falling back to its closest ancestor.
    int line_of(const std::string& pointer) const;

    /// Line containing byte offset `pos`.
    static int line_at(std::string_view text, std::size_t pos);

private:
    std::map<std::string, int> lines_;
};

std::string pointer_escape(std::string_view token);

}  // namespace kacm::cli

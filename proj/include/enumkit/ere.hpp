#pragma once

// Backtracking matcher for the extended-regular-expression subset used by
// NAPTR rewrite rules: ^ $ . [] * + ? ( ) | and backslash escapes.
// Intervals ({n,m}) and POSIX bracket classes are not supported; "{" is a
// literal character.

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace enumkit::ere {

struct Node;

enum class PlusMode {
    Lenient, // "+" with nothing to repeat is a literal plus
    Strict,  // "+" with nothing to repeat is a BadPattern error
};

struct Span {
    std::size_t begin = 0;
    std::size_t end = 0;
    bool operator==(const Span&) const = default;
};

struct Match {
    Span whole;
    // Index i holds capture group i+1; absent when the group did not take part.
    std::vector<std::optional<Span>> groups;
};

class Regex {
public:
    /// Throws Error(BadPattern) on syntax errors.
    explicit Regex(std::string_view pattern, PlusMode mode = PlusMode::Lenient);
    ~Regex();
    Regex(Regex&&) noexcept;
    Regex& operator=(Regex&&) noexcept;
    Regex(const Regex&) = delete;
    Regex& operator=(const Regex&) = delete;

    std::size_t group_count() const noexcept { return groups_; }

    /// Leftmost match, alternatives tried first-to-last, quantifiers greedy.
    std::optional<Match> search(std::string_view subject) const;

private:
    std::unique_ptr<Node> root_;
    std::size_t groups_ = 0;
};

} // namespace enumkit::ere

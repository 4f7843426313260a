#include "enumkit/ere.hpp"

#include "enumkit/error.hpp"

#include <bitset>
#include <functional>

namespace enumkit::ere {

enum class Kind { Literal, Any, Class, Begin, End, Group, Concat, Alternation, Repeat };

struct Node {
    Kind kind;
    char literal = 0;
    std::bitset<256> set;
    std::size_t group = 0; // 1-based for Group
    std::size_t min = 0;
    std::size_t max = 0; // SIZE_MAX means unbounded
    std::vector<std::unique_ptr<Node>> children;
};

namespace {

constexpr std::size_t kUnbounded = static_cast<std::size_t>(-1);

std::unique_ptr<Node> make(Kind k)
{
    auto n = std::make_unique<Node>();
    n->kind = k;
    return n;
}

class Parser {
public:
    Parser(std::string_view src, PlusMode mode) : src_(src), mode_(mode) {}

    std::unique_ptr<Node> parse()
    {
        auto node = alternation();
        if (pos_ != src_.size()) {
            error("unmatched ')'");
        }
        return node;
    }

    std::size_t groups() const { return groups_; }

private:
    [[noreturn]] void error(const std::string& msg) const
    {
        Error e(Errc::BadPattern, "pattern '" + std::string(src_) + "': " + msg);
        e.column = pos_ + 1;
        throw e;
    }

    bool at_end() const { return pos_ >= src_.size(); }
    char peek() const { return src_[pos_]; }

    std::unique_ptr<Node> alternation()
    {
        auto alt = make(Kind::Alternation);
        alt->children.push_back(concat());
        while (!at_end() && peek() == '|') {
            ++pos_;
            alt->children.push_back(concat());
        }
        if (alt->children.size() == 1) {
            return std::move(alt->children.front());
        }
        return alt;
    }

    std::unique_ptr<Node> concat()
    {
        auto seq = make(Kind::Concat);
        while (!at_end() && peek() != '|' && peek() != ')') {
            char c = peek();
            if (c == '*' || c == '+' || c == '?') {
                bool repeatable = !seq->children.empty() &&
                                  seq->children.back()->kind != Kind::Begin;
                if (!repeatable) {
                    if (c == '+' && mode_ == PlusMode::Lenient) {
                        ++pos_;
                        auto lit = make(Kind::Literal);
                        lit->literal = '+';
                        seq->children.push_back(std::move(lit));
                        continue;
                    }
                    error(std::string("nothing to repeat before '") + c + "'");
                }
                ++pos_;
                auto rep = make(Kind::Repeat);
                rep->min = c == '+' ? 1 : 0;
                rep->max = c == '?' ? 1 : kUnbounded;
                rep->children.push_back(std::move(seq->children.back()));
                seq->children.back() = std::move(rep);
                continue;
            }
            seq->children.push_back(atom());
        }
        return seq;
    }

    std::unique_ptr<Node> atom()
    {
        char c = src_[pos_++];
        switch (c) {
        case '^':
            return make(Kind::Begin);
        case '$':
            return make(Kind::End);
        case '.':
            return make(Kind::Any);
        case '(': {
            auto group = make(Kind::Group);
            group->group = ++groups_;
            group->children.push_back(alternation());
            if (at_end() || peek() != ')') {
                error("unterminated group");
            }
            ++pos_;
            return group;
        }
        case '[':
            return bracket();
        case '\\': {
            if (at_end()) {
                error("trailing backslash");
            }
            auto lit = make(Kind::Literal);
            lit->literal = src_[pos_++];
            return lit;
        }
        default: {
            auto lit = make(Kind::Literal);
            lit->literal = c;
            return lit;
        }
        }
    }

    std::unique_ptr<Node> bracket()
    {
        auto cls = make(Kind::Class);
        bool negate = false;
        if (!at_end() && peek() == '^') {
            negate = true;
            ++pos_;
        }
        bool first = true;
        while (true) {
            if (at_end()) {
                error("unterminated bracket expression");
            }
            auto lo = static_cast<unsigned char>(src_[pos_]);
            if (lo == ']' && !first) {
                ++pos_;
                break;
            }
            first = false;
            ++pos_;
            if (pos_ + 1 < src_.size() && src_[pos_] == '-' && src_[pos_ + 1] != ']') {
                auto hi = static_cast<unsigned char>(src_[pos_ + 1]);
                if (hi < lo) {
                    error("reversed range in bracket expression");
                }
                for (unsigned v = lo; v <= hi; ++v) {
                    cls->set.set(v);
                }
                pos_ += 2;
            } else {
                cls->set.set(lo);
            }
        }
        if (negate) {
            cls->set.flip();
        }
        return cls;
    }

    std::string_view src_;
    PlusMode mode_;
    std::size_t pos_ = 0;
    std::size_t groups_ = 0;
};

using Cont = std::function<bool(std::size_t)>;

class Matcher {
public:
    Matcher(std::string_view subject, std::size_t groups)
        : s_(subject), caps_(groups)
    {
    }

    bool run(const Node& n, std::size_t pos, const Cont& k)
    {
        switch (n.kind) {
        case Kind::Literal:
            return pos < s_.size() && s_[pos] == n.literal && k(pos + 1);
        case Kind::Any:
            return pos < s_.size() && k(pos + 1);
        case Kind::Class:
            return pos < s_.size() && n.set.test(static_cast<unsigned char>(s_[pos])) && k(pos + 1);
        case Kind::Begin:
            return pos == 0 && k(pos);
        case Kind::End:
            return pos == s_.size() && k(pos);
        case Kind::Group: {
            auto saved = caps_[n.group - 1];
            bool ok = run(*n.children.front(), pos, [&](std::size_t end) {
                auto inner = caps_[n.group - 1];
                caps_[n.group - 1] = Span{pos, end};
                if (k(end)) {
                    return true;
                }
                caps_[n.group - 1] = inner;
                return false;
            });
            if (!ok) {
                caps_[n.group - 1] = saved;
            }
            return ok;
        }
        case Kind::Concat:
            return sequence(n, 0, pos, k);
        case Kind::Alternation:
            for (const auto& child : n.children) {
                if (run(*child, pos, k)) {
                    return true;
                }
            }
            return false;
        case Kind::Repeat:
            return repeat(n, 0, pos, k);
        }
        return false;
    }

    std::vector<std::optional<Span>> captures() const { return caps_; }
    void reset() { std::fill(caps_.begin(), caps_.end(), std::nullopt); }

private:
    bool sequence(const Node& n, std::size_t i, std::size_t pos, const Cont& k)
    {
        if (i == n.children.size()) {
            return k(pos);
        }
        return run(*n.children[i], pos, [&](std::size_t next) { return sequence(n, i + 1, next, k); });
    }

    bool repeat(const Node& n, std::size_t count, std::size_t pos, const Cont& k)
    {
        if (n.max == kUnbounded || count < n.max) {
            bool more = run(*n.children.front(), pos, [&](std::size_t next) {
                // An empty iteration past the minimum can never make progress.
                if (next == pos && count >= n.min) {
                    return false;
                }
                return repeat(n, count + 1, next, k);
            });
            if (more) {
                return true;
            }
        }
        return count >= n.min && k(pos);
    }

    std::string_view s_;
    std::vector<std::optional<Span>> caps_;
};

} // namespace

Regex::Regex(std::string_view pattern, PlusMode mode)
{
    Parser p(pattern, mode);
    root_ = p.parse();
    groups_ = p.groups();
}

Regex::~Regex() = default;
Regex::Regex(Regex&&) noexcept = default;
Regex& Regex::operator=(Regex&&) noexcept = default;

std::optional<Match> Regex::search(std::string_view subject) const
{
    Matcher m(subject, groups_);
    for (std::size_t start = 0; start <= subject.size(); ++start) {
        m.reset();
        std::size_t end = 0;
        if (m.run(*root_, start, [&](std::size_t e) {
                end = e;
                return true;
            })) {
            return Match{Span{start, end}, m.captures()};
        }
    }
    return std::nullopt;
}

} // namespace enumkit::ere

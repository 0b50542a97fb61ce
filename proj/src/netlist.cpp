#include "khsim/netlist.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

namespace khsim {

namespace {

struct Suffix {
    char letter;
    int exponent;
};

constexpr std::array<Suffix, 8> kSuffixes{{
    {'f', -15}, {'p', -12}, {'n', -9}, {'u', -6},
    {'m', -3},  {'k', 3},   {'M', 6},  {'G', 9},
}};

// Exact powers of ten up to 1e15 are representable, so multiplying (or
// dividing) by them rounds once.
double pow10_exact(int exponent) {
    double p = 1.0;
    for (int i = 0; i < std::abs(exponent); ++i) {
        p *= 10.0;
    }
    return p;
}

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n\v\f");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r\n\v\f");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_ws(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) {
            ++i;
        }
        const std::size_t start = i;
        while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i]))) {
            ++i;
        }
        if (i > start) {
            out.push_back(s.substr(start, i - start));
        }
    }
    return out;
}

bool kind_from_letter(char c, ElementKind& kind) {
    switch (c) {
        case 'C': case 'c': kind = ElementKind::capacitor; return true;
        case 'L': case 'l': kind = ElementKind::inductor; return true;
        case 'R': case 'r': kind = ElementKind::resistor; return true;
        case 'J': case 'j': kind = ElementKind::junction; return true;
        default: return false;
    }
}

bool is_identifier(std::string_view s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
    });
}

int parse_node(std::string_view token, int line) {
    int id = -1;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), id);
    if (ec != std::errc{} || ptr != token.data() + token.size() || id < 0) {
        throw NetlistError(line, "invalid node id '" + std::string(token) + "'");
    }
    return id;
}

}  // namespace

char kind_letter(ElementKind kind) {
    switch (kind) {
        case ElementKind::capacitor: return 'C';
        case ElementKind::inductor: return 'L';
        case ElementKind::resistor: return 'R';
        case ElementKind::junction: return 'J';
    }
    return '?';
}

bool ElementDecl::is_auxiliary() const {
    return kind == ElementKind::capacitor && name.size() > 4 &&
           (name.rfind("Caux", 0) == 0 || name.rfind("caux", 0) == 0);
}

const std::string& CircuitSpec::label(int node) const {
    static const std::string ground = "0";
    if (node == 0) {
        return ground;
    }
    return node_labels.at(static_cast<std::size_t>(node - 1));
}

const ElementDecl* CircuitSpec::find(std::string_view name) const {
    const auto it = std::find_if(elements.begin(), elements.end(),
                                 [&](const ElementDecl& e) { return e.name == name; });
    return it == elements.end() ? nullptr : &*it;
}

NetlistError::NetlistError(int line, const std::string& message)
    : InputError(line > 0 ? "line " + std::to_string(line) + ": " + message : message),
      line_(line) {}

double parse_value(std::string_view text) {
    text = trim(text);
    if (text.empty()) {
        throw InputError("empty value");
    }
    int exponent = 0;
    std::string_view literal = text;
    const char last = text.back();
    if (std::isalpha(static_cast<unsigned char>(last))) {
        const auto it = std::find_if(kSuffixes.begin(), kSuffixes.end(),
                                     [&](const Suffix& s) { return s.letter == last; });
        if (it == kSuffixes.end()) {
            throw InputError("unknown suffix in value '" + std::string(text) + "'");
        }
        exponent = it->exponent;
        literal = text.substr(0, text.size() - 1);
    }
    if (literal.empty() || literal.front() == '+') {
        throw InputError("malformed value '" + std::string(text) + "'");
    }
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(literal.data(), literal.data() + literal.size(), v,
                                           std::chars_format::general);
    if (ec != std::errc{} || ptr != literal.data() + literal.size()) {
        if (ptr != literal.data() && ptr < literal.data() + literal.size() &&
            std::isalpha(static_cast<unsigned char>(*ptr))) {
            throw InputError("unknown suffix in value '" + std::string(text) + "'");
        }
        throw InputError("malformed value '" + std::string(text) + "'");
    }
    if (!std::isfinite(v)) {
        throw InputError("non-finite value '" + std::string(text) + "'");
    }
    if (exponent > 0) {
        v *= pow10_exact(exponent);
    } else if (exponent < 0) {
        v /= pow10_exact(exponent);
    }
    if (!(v > 0.0)) {
        throw InputError("value must be positive: '" + std::string(text) + "'");
    }
    return v;
}

CircuitSpec parse_netlist(std::string_view text) {
    std::vector<ElementDecl> elements;
    std::set<std::string> names;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto end = text.find('\n', pos);
        std::string_view line = text.substr(pos, end == std::string_view::npos ? text.size() - pos : end - pos);
        pos = end == std::string_view::npos ? text.size() + 1 : end + 1;
        ++line_no;

        if (const auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        const auto tokens = split_ws(line);
        if (tokens.empty()) {
            continue;
        }

        ElementDecl e;
        std::size_t first_node = 0;
        if (tokens.size() == 5 && tokens[0].size() == 1) {
            if (!kind_from_letter(tokens[0][0], e.kind)) {
                throw NetlistError(line_no, "unknown element kind '" + std::string(tokens[0]) + "'");
            }
            e.name = std::string(tokens[1]);
            first_node = 2;
        } else if (tokens.size() == 4) {
            if (!kind_from_letter(tokens[0][0], e.kind)) {
                throw NetlistError(line_no, "unknown element kind '" + std::string(tokens[0]) + "'");
            }
            e.name = std::string(tokens[0]);
            first_node = 1;
        } else {
            throw NetlistError(line_no, "expected '<kind> <name> <node_a> <node_b> <value>'");
        }
        if (!is_identifier(e.name)) {
            throw NetlistError(line_no, "invalid element name '" + e.name + "'");
        }
        e.node_a = parse_node(tokens[first_node], line_no);
        e.node_b = parse_node(tokens[first_node + 1], line_no);
        try {
            e.value = parse_value(tokens[first_node + 2]);
        } catch (const InputError& err) {
            throw NetlistError(line_no, err.what());
        }
        if (e.node_a == e.node_b) {
            throw NetlistError(line_no, "element '" + e.name + "' has both terminals on node " +
                                            std::to_string(e.node_a));
        }
        if (!names.insert(e.name).second) {
            throw NetlistError(line_no, "duplicate element name '" + e.name + "'");
        }
        elements.push_back(std::move(e));
    }

    if (elements.empty()) {
        throw NetlistError(0, "empty netlist");
    }

    std::map<int, int> terminal_count;
    bool has_ground = false;
    for (const auto& e : elements) {
        for (const int n : {e.node_a, e.node_b}) {
            if (n == 0) {
                has_ground = true;
            } else {
                ++terminal_count[n];
            }
        }
    }
    if (!has_ground) {
        throw NetlistError(0, "netlist has no ground (node 0) connection");
    }
    for (const auto& [node, count] : terminal_count) {
        if (count < 2) {
            throw NetlistError(0, "dangling node " + std::to_string(node));
        }
    }

    CircuitSpec spec;
    std::map<int, int> canonical;
    for (const auto& [node, count] : terminal_count) {
        canonical[node] = static_cast<int>(canonical.size()) + 1;
        spec.node_labels.push_back(std::to_string(node));
    }
    spec.node_count = static_cast<int>(canonical.size());
    for (auto& e : elements) {
        e.node_a = e.node_a == 0 ? 0 : canonical.at(e.node_a);
        e.node_b = e.node_b == 0 ? 0 : canonical.at(e.node_b);
    }
    spec.elements = std::move(elements);
    return spec;
}

std::string format_double(double value) {
    std::array<char, 64> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    return std::string(buf.data(), ptr);
}

std::string render_netlist(const CircuitSpec& spec) {
    std::ostringstream out;
    for (const auto& e : spec.elements) {
        out << kind_letter(e.kind) << ' ' << e.name << ' ' << spec.label(e.node_a) << ' '
            << spec.label(e.node_b) << ' ' << format_double(e.value);
        if (e.is_auxiliary()) {
            out << "  # auxiliary";
        }
        out << '\n';
    }
    return out.str();
}

}  // namespace khsim

#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "khsim/errors.hpp"

namespace khsim {

enum class ElementKind { capacitor, inductor, resistor, junction };

[[nodiscard]] char kind_letter(ElementKind kind);

// One two-terminal element. Node 0 is ground. For junctions `value` is the
// critical current I_c0 in amperes; otherwise F, H or Ohm.
struct ElementDecl {
    ElementKind kind = ElementKind::capacitor;
    std::string name;
    int node_a = 0;
    int node_b = 0;
    double value = 0.0;

    // Capacitors named "Caux..." are auxiliary elements inserted to complete
    // the Hamiltonian of a singular circuit.
    [[nodiscard]] bool is_auxiliary() const;

    bool operator==(const ElementDecl&) const = default;
};

// A parsed netlist with canonical node numbering: non-ground nodes are
// exactly 1..node_count, in ascending order of the ids used in the source.
struct CircuitSpec {
    std::vector<ElementDecl> elements;
    int node_count = 0;
    // node_labels[i] is the source id of canonical node i + 1.
    std::vector<std::string> node_labels;

    [[nodiscard]] const std::string& label(int node) const;
    [[nodiscard]] const ElementDecl* find(std::string_view name) const;

    bool operator==(const CircuitSpec&) const = default;
};

class NetlistError : public InputError {
public:
    NetlistError(int line, const std::string& message);
    [[nodiscard]] int line() const noexcept { return line_; }

private:
    int line_;
};

// Decimal literal with an optional engineering suffix
// (f p n u m k M G). Throws InputError.
[[nodiscard]] double parse_value(std::string_view text);

// One element per line: `<KIND> <name> <node_a> <node_b> <value>` or the
// SPICE-like `<KIND><rest> <node_a> <node_b> <value>`, where the name then is
// the whole first token. `#` starts a comment. Throws NetlistError.
[[nodiscard]] CircuitSpec parse_netlist(std::string_view text);

// Inverse of parse_netlist: the output re-parses to an identical spec.
[[nodiscard]] std::string render_netlist(const CircuitSpec& spec);

// Shortest decimal text that round-trips the double exactly.
[[nodiscard]] std::string format_double(double value);

}  // namespace khsim

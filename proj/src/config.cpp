#include "khsim/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace khsim {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    return s.substr(first, s.find_last_not_of(" \t\r") - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (true) {
        const auto next = s.find(sep, pos);
        out.push_back(trim(s.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos)));
        if (next == std::string_view::npos) {
            return out;
        }
        pos = next + 1;
    }
}

int parse_int(std::string_view text) {
    int v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw InputError("invalid integer '" + std::string(text) + "'");
    }
    return v;
}

bool parse_bool(std::string_view text) {
    if (text == "true" || text == "1" || text == "yes") {
        return true;
    }
    if (text == "false" || text == "0" || text == "no") {
        return false;
    }
    throw InputError("invalid boolean '" + std::string(text) + "'");
}

double positive(std::string_view key, double v) {
    if (!(v > 0.0)) {
        throw InputError(std::string(key) + " must be positive");
    }
    return v;
}

void apply_sim(RunConfig& cfg, std::string_view key, std::string_view value) {
    if (key == "t_end") {
        cfg.t_end = positive(key, parse_real(value));
    } else if (key == "dt") {
        if (value == "auto") {
            cfg.dt.reset();
        } else {
            cfg.dt = positive(key, parse_real(value));
        }
    } else if (key == "method") {
        cfg.method = parse_method(value);
    } else if (key == "sample_every") {
        cfg.sample_every = parse_int(value);
        if (cfg.sample_every < 1) {
            throw InputError("sample_every must be at least 1");
        }
    } else if (key == "t_ref") {
        cfg.t_ref = positive(key, parse_real(value));
    } else if (key == "k_j") {
        cfg.k_j = positive(key, parse_real(value));
    } else if (key == "aux_capacitance") {
        cfg.aux_capacitance = positive(key, parse_real(value));
    } else if (key == "aux_placement") {
        if (value == "across-inductor") {
            cfg.aux_placement = AuxPlacement::across_inductor;
        } else if (value == "to-ground") {
            cfg.aux_placement = AuxPlacement::to_ground;
        } else {
            throw InputError("aux_placement must be across-inductor or to-ground");
        }
    } else if (key == "sync_pair") {
        const auto parts = split(value, ',');
        if (parts.size() != 2 || parts[0].empty() || parts[1].empty()) {
            throw InputError("sync_pair needs two node labels");
        }
        cfg.sync_pair = std::pair{std::string(parts[0]), std::string(parts[1])};
    } else if (key == "output") {
        cfg.output_dir = std::string(value);
    } else {
        throw InputError("unknown key '" + std::string(key) + "' in [sim]");
    }
}

void apply_quantum(RunConfig& cfg, std::string_view key, std::string_view value) {
    if (key == "dims") {
        cfg.dims.clear();
        for (const auto part : split(value, ',')) {
            const int n = parse_int(part);
            if (n < 2) {
                throw InputError("Fock dimensions must be at least 2");
            }
            cfg.dims.push_back(n);
        }
    } else if (key == "zero_point") {
        if (value == "coupled") {
            cfg.zero_point = ZeroPointBasis::coupled;
        } else if (value == "bare") {
            cfg.zero_point = ZeroPointBasis::bare;
        } else {
            throw InputError("zero_point must be coupled or bare");
        }
    } else if (key == "excitation_scale") {
        cfg.excitation_scale = positive(key, parse_real(value));
    } else if (key == "diagnostics") {
        cfg.diagnostics = parse_bool(value);
    } else {
        throw InputError("unknown key '" + std::string(key) + "' in [quantum]");
    }
}

void apply_tolerances(RunConfig& cfg, std::string_view key, std::string_view value) {
    if (key == "phase_tol") {
        cfg.tolerances.phase_tol = positive(key, parse_real(value));
    } else if (key == "amp_tol") {
        cfg.tolerances.amp_tol = positive(key, parse_real(value));
    } else if (key == "periods") {
        cfg.tolerances.periods = parse_int(value);
        if (cfg.tolerances.periods < 1) {
            throw InputError("periods must be at least 1");
        }
    } else {
        throw InputError("unknown key '" + std::string(key) + "' in [tolerances]");
    }
}

}  // namespace

RunMethod parse_method(std::string_view text) {
    if (text == "auto") {
        return RunMethod::automatic;
    }
    if (text == "rk4-full") {
        return RunMethod::rk4_full;
    }
    if (text == "linear-propagator") {
        return RunMethod::linear_propagator;
    }
    if (text == "classical") {
        return RunMethod::classical;
    }
    throw InputError("unknown method '" + std::string(text) + "'");
}

std::string method_name(RunMethod method) {
    switch (method) {
        case RunMethod::automatic: return "auto";
        case RunMethod::rk4_full: return "rk4-full";
        case RunMethod::linear_propagator: return "linear-propagator";
        case RunMethod::classical: return "classical";
    }
    return "?";
}

double parse_real(std::string_view text) {
    text = trim(text);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec == std::errc{} && ptr == text.data() + text.size()) {
        if (!std::isfinite(v)) {
            throw InputError("non-finite value '" + std::string(text) + "'");
        }
        return v;
    }
    if (!text.empty() && text.front() == '-') {
        return -parse_value(text.substr(1));
    }
    return parse_value(text);
}

std::complex<double> parse_complex(std::string_view text) {
    const auto parts = split(text, ',');
    if (parts.size() == 1) {
        return {parse_real(parts[0]), 0.0};
    }
    if (parts.size() == 2) {
        return {parse_real(parts[0]), parse_real(parts[1])};
    }
    throw InputError("invalid complex value '" + std::string(text) + "'");
}

RunConfig parse_config(std::string_view text) {
    RunConfig cfg;
    std::string section;
    bool saw_sim = false;
    bool saw_t_end = false;
    int line_no = 0;
    std::istringstream in{std::string(text)};
    std::string raw;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line = raw;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        try {
            if (line.front() == '[') {
                if (line.back() != ']') {
                    throw InputError("malformed section header");
                }
                section = std::string(trim(line.substr(1, line.size() - 2)));
                if (section == "sim") {
                    saw_sim = true;
                } else if (section.rfind("initial.", 0) == 0 && section.size() > 8) {
                    cfg.initial.try_emplace(section.substr(8));
                } else if (section != "quantum" && section != "tolerances") {
                    throw InputError("unknown section [" + section + "]");
                }
                continue;
            }
            const auto eq = line.find('=');
            if (eq == std::string_view::npos) {
                throw InputError("expected key = value");
            }
            const auto key = trim(line.substr(0, eq));
            const auto value = trim(line.substr(eq + 1));
            if (value.empty()) {
                throw InputError("missing value for '" + std::string(key) + "'");
            }
            if (section == "sim") {
                apply_sim(cfg, key, value);
                saw_t_end = saw_t_end || key == "t_end";
            } else if (section == "quantum") {
                apply_quantum(cfg, key, value);
            } else if (section == "tolerances") {
                apply_tolerances(cfg, key, value);
            } else if (section.rfind("initial.", 0) == 0) {
                auto& amp = cfg.initial[section.substr(8)];
                if (key == "alpha") {
                    amp.alpha = parse_complex(value);
                } else if (key == "beta") {
                    amp.beta = parse_complex(value);
                } else {
                    throw InputError("unknown key '" + std::string(key) + "' in [" + section + "]");
                }
            } else {
                throw InputError("key outside of a section");
            }
        } catch (const InputError& e) {
            throw InputError("config line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    if (!saw_sim) {
        throw InputError("config is missing the [sim] section");
    }
    if (!saw_t_end) {
        throw InputError("config is missing t_end in [sim]");
    }
    for (const auto& [node, amp] : cfg.initial) {
        if (std::norm(amp.alpha) + std::norm(amp.beta) == 0.0) {
            throw InputError("initial state for node " + node + " has alpha = beta = 0");
        }
    }
    return cfg;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw InputError("cannot open '" + path + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

RunConfig load_config(const std::string& path) {
    return parse_config(read_text_file(path));
}

}  // namespace khsim

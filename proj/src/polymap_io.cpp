// polymap_io.cpp - PolyMap text format and shared text helpers

#include "cohatlas/errors.hpp"
#include "cohatlas/phase_space.hpp"
#include "cohatlas/text_format.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>

namespace cohatlas {

namespace text {

std::string format_double(double value) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

double parse_double(std::string_view token) {
    const std::string s(token);
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size() || !std::isfinite(v)) {
        throw ValidationError("invalid number '" + s + "'");
    }
    return v;
}

int parse_int(std::string_view token) {
    int v = 0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec != std::errc{} || ptr != token.data() + token.size()) {
        throw ValidationError("invalid integer '" + std::string(token) + "'");
    }
    return v;
}

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_ws(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
        const std::size_t start = i;
        while (i < s.size() && s[i] != ' ' && s[i] != '\t') ++i;
        if (i > start) out.push_back(s.substr(start, i - start));
    }
    return out;
}

std::vector<std::pair<int, std::string_view>> content_lines(std::string_view text) {
    std::vector<std::pair<int, std::string_view>> out;
    int number = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        ++number;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (!line.empty()) out.emplace_back(number, line);
        if (nl == std::string_view::npos) break;
        pos = nl + 1;
    }
    return out;
}

} // namespace text

namespace {

std::vector<int> parse_exponents(std::string_view field, int line) {
    std::vector<int> out;
    for (auto tok : text::split_ws(field)) {
        try {
            out.push_back(text::parse_int(tok));
        } catch (const ValidationError& e) {
            throw ValidationError("polymap line " + std::to_string(line) + ": " + e.what());
        }
    }
    return out;
}

} // namespace

std::string serialize(const PolyMap& map) {
    std::string out = "polymap " + std::to_string(map.n_modes()) + " " + std::to_string(map.max_degree()) + "\n";
    for (int l = 0; l < map.n_modes(); ++l) {
        out += "mode " + std::to_string(l) + "\n";
        for (const Term& t : map.terms(l)) {
            out += text::format_double(t.coefficient.real()) + " " + text::format_double(t.coefficient.imag()) + " :";
            for (int e : t.w_powers) out += " " + std::to_string(e);
            out += " :";
            for (int e : t.wbar_powers) out += " " + std::to_string(e);
            out += "\n";
        }
    }
    return out;
}

PolyMap parse_polymap(std::string_view source) {
    struct PendingTerm {
        int line;
        int mode;
        Complex coefficient;
        std::vector<int> j, k;
    };
    int n_modes = -1;
    int max_degree = kDefaultMaxDegree;
    int mode = 0;
    bool header_seen = false;
    std::vector<PendingTerm> pending;

    for (const auto& [line, content] : text::content_lines(source)) {
        const auto where = "polymap line " + std::to_string(line) + ": ";
        const auto tokens = text::split_ws(content);
        if (tokens.front() == "polymap") {
            if (header_seen || !pending.empty() || tokens.size() != 3) {
                throw ValidationError(where + "header must be 'polymap <n_modes> <max_degree>' on the first line");
            }
            n_modes = text::parse_int(tokens[1]);
            max_degree = text::parse_int(tokens[2]);
            header_seen = true;
            continue;
        }
        if (tokens.front() == "mode") {
            if (tokens.size() != 2) throw ValidationError(where + "expected 'mode <index>'");
            mode = text::parse_int(tokens[1]);
            continue;
        }
        const auto c1 = content.find(':');
        const auto c2 = c1 == std::string_view::npos ? c1 : content.find(':', c1 + 1);
        if (c2 == std::string_view::npos || content.find(':', c2 + 1) != std::string_view::npos) {
            throw ValidationError(where + "expected 're im : j1..jn : k1..kn'");
        }
        const auto coeff = text::split_ws(content.substr(0, c1));
        if (coeff.size() != 2) throw ValidationError(where + "coefficient needs real and imaginary parts");
        PendingTerm term{line, mode, {text::parse_double(coeff[0]), text::parse_double(coeff[1])},
                         parse_exponents(content.substr(c1 + 1, c2 - c1 - 1), line),
                         parse_exponents(content.substr(c2 + 1), line)};
        if (n_modes < 0) n_modes = static_cast<int>(term.j.size());
        pending.push_back(std::move(term));
    }
    if (n_modes < 1) throw ValidationError("polymap: no header and no terms");

    PolyMap map(n_modes, max_degree);
    for (auto& t : pending) {
        try {
            map.add_term(t.mode, t.coefficient, std::move(t.j), std::move(t.k));
        } catch (const ValidationError& e) {
            throw ValidationError("polymap line " + std::to_string(t.line) + ": " + e.what());
        }
    }
    return map;
}

} // namespace cohatlas

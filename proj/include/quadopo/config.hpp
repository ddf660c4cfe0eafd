#pragma once

#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "quadopo/errors.hpp"
#include "quadopo/model.hpp"

namespace quadopo {
namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline double parse_number(const std::string& s, const std::string& key) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw DomainError("config value for '" + key + "' is not a number: '" + s + "'");
    }
}

} // namespace detail

// Flat key=value configuration with '#' comments.  Recognized keys:
// chi1..chi4, eps1..eps4, gamma1..gamma4, kappa1..kappa4, plus the
// shorthands chi, eps, gamma, kappa which apply to all four modes of the
// family.  A per-mode key always beats the family shorthand, regardless
// of line order; within the same key the last line wins.  Every one of
// the sixteen parameters must end up defined.
inline SystemParams parse_config_text(const std::string& text) {
    std::map<std::string, double> seen;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw DomainError("config line " + std::to_string(lineno) +
                              " is not of the form key=value: '" + line + "'");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string val = detail::trim(line.substr(eq + 1));

        const bool family = key == "chi" || key == "eps" || key == "gamma" || key == "kappa";
        const bool indexed =
            key.size() >= 2 && key.back() >= '1' && key.back() <= '4' &&
            (key.substr(0, key.size() - 1) == "chi" || key.substr(0, key.size() - 1) == "eps" ||
             key.substr(0, key.size() - 1) == "gamma" ||
             key.substr(0, key.size() - 1) == "kappa");
        if (!family && !indexed)
            throw DomainError("config line " + std::to_string(lineno) + ": unknown key '" + key +
                              "'");
        seen[key] = detail::parse_number(val, key);
    }

    SystemParams p;
    const auto resolve = [&seen](const std::string& fam, std::array<double, 4>& dst) {
        for (int i = 0; i < 4; ++i) {
            const std::string k = fam + std::to_string(i + 1);
            if (auto it = seen.find(k); it != seen.end()) {
                dst[i] = it->second;
            } else if (auto jt = seen.find(fam); jt != seen.end()) {
                dst[i] = jt->second;
            } else {
                throw DomainError("config does not define '" + k + "' (or shorthand '" + fam +
                                  "')");
            }
        }
    };
    resolve("chi", p.chi);
    resolve("eps", p.eps);
    resolve("gamma", p.gamma);
    resolve("kappa", p.kappa);
    return p;
}

inline SystemParams load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

} // namespace quadopo

#include "mlbisim/prism/explicit_io.h"

#include <fstream>
#include <map>
#include <sstream>

#include "mlbisim/core/errors.h"

namespace mlbisim::prism {

namespace {

std::string prob_text(const Prob& p, ProbFormat format) {
    return format == ProbFormat::rational ? p.to_string() : p.to_decimal_string();
}

std::vector<std::string> split_ws(const std::string& line) {
    std::istringstream is(line);
    std::vector<std::string> out;
    std::string tok;
    while (is >> tok) out.push_back(tok);
    return out;
}

std::int64_t parse_int(const std::string& text, const std::string& file, int line) {
    std::size_t used = 0;
    std::int64_t v = 0;
    try {
        v = std::stoll(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != text.size() || text.empty()) throw ParseError(file + ": expected an integer, got '" + text + "'", line);
    return v;
}

StateId parse_state(const std::string& text, std::size_t n_states, const std::string& file, int line) {
    auto v = parse_int(text, file, line);
    if (v < 0 || static_cast<std::uint64_t>(v) >= n_states) {
        throw ParseError(file + ": state " + text + " out of range (" + std::to_string(n_states) + " states)", line);
    }
    return static_cast<StateId>(v);
}

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

// Comma-separated items of "(a,b,c)".
std::vector<std::string> tuple_items(const std::string& text, const std::string& file, int line) {
    std::string t = trim(text);
    if (t.size() < 2 || t.front() != '(' || t.back() != ')') {
        throw ParseError(file + ": expected a parenthesised tuple", line);
    }
    std::vector<std::string> out;
    std::string inner = t.substr(1, t.size() - 2);
    if (trim(inner).empty()) return out;
    std::size_t start = 0;
    while (true) {
        auto comma = inner.find(',', start);
        out.push_back(trim(inner.substr(start, comma == std::string::npos ? std::string::npos : comma - start)));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

struct StaContent {
    std::vector<std::string> names;
    std::vector<bool> is_bool;
    std::vector<std::int64_t> valuations;
    std::size_t n_states = 0;
};

StaContent read_sta(std::istream& in) {
    const std::string file = "sta";
    StaContent sta;
    std::string line;
    int lineno = 0;
    if (!std::getline(in, line)) throw ParseError(file + ": missing header", 1);
    ++lineno;
    sta.names = tuple_items(line, file, lineno);
    const std::size_t width = sta.names.size();
    sta.is_bool.assign(width, false);
    std::vector<bool> seen_int(width, false);
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        auto colon = line.find(':');
        if (colon == std::string::npos) throw ParseError(file + ": expected 'index:(values)'", lineno);
        auto idx = parse_int(trim(line.substr(0, colon)), file, lineno);
        if (idx != static_cast<std::int64_t>(sta.n_states)) {
            throw ParseError(file + ": expected state " + std::to_string(sta.n_states) + ", got " + std::to_string(idx),
                             lineno);
        }
        auto items = tuple_items(line.substr(colon + 1), file, lineno);
        if (items.size() != width) {
            throw ParseError(file + ": expected " + std::to_string(width) + " values, got " +
                                 std::to_string(items.size()),
                             lineno);
        }
        for (std::size_t v = 0; v < width; ++v) {
            if (items[v] == "true" || items[v] == "false") {
                if (seen_int[v]) throw ParseError(file + ": mixed boolean and integer values for " + sta.names[v], lineno);
                sta.is_bool[v] = true;
                sta.valuations.push_back(items[v] == "true" ? 1 : 0);
            } else {
                if (sta.is_bool[v]) throw ParseError(file + ": mixed boolean and integer values for " + sta.names[v], lineno);
                seen_int[v] = true;
                sta.valuations.push_back(parse_int(items[v], file, lineno));
            }
        }
        ++sta.n_states;
    }
    if (sta.n_states == 0) throw ParseError(file + ": no states", lineno);
    return sta;
}

struct LabContent {
    std::optional<StateId> initial;
    std::vector<StateId> deadlocks;
    std::vector<std::string> names;
    std::vector<std::vector<StateId>> states;
};

LabContent read_lab(std::istream& in, std::size_t n_states) {
    const std::string file = "lab";
    LabContent lab;
    std::string line;
    int lineno = 0;
    if (!std::getline(in, line)) throw ParseError(file + ": missing label declarations", 1);
    ++lineno;
    // declared id -> index into lab.names, or -1 for init, -2 for deadlock
    std::map<std::int64_t, int> slot;
    for (const auto& decl : split_ws(line)) {
        auto eq = decl.find('=');
        if (eq == std::string::npos || decl.size() < eq + 3 || decl[eq + 1] != '"' || decl.back() != '"') {
            throw ParseError(file + ": malformed label declaration '" + decl + "'", lineno);
        }
        auto id = parse_int(decl.substr(0, eq), file, lineno);
        std::string name = decl.substr(eq + 2, decl.size() - eq - 3);
        if (slot.count(id)) throw ParseError(file + ": duplicate label id " + std::to_string(id), lineno);
        if (name == "init") {
            slot[id] = -1;
        } else if (name == "deadlock") {
            slot[id] = -2;
        } else {
            slot[id] = static_cast<int>(lab.names.size());
            lab.names.push_back(name);
        }
    }
    lab.states.resize(lab.names.size());
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        auto colon = line.find(':');
        if (colon == std::string::npos) throw ParseError(file + ": expected 'state: ids'", lineno);
        StateId s = parse_state(trim(line.substr(0, colon)), n_states, file, lineno);
        for (const auto& tok : split_ws(line.substr(colon + 1))) {
            auto id = parse_int(tok, file, lineno);
            auto it = slot.find(id);
            if (it == slot.end()) throw ParseError(file + ": undeclared label id " + tok, lineno);
            if (it->second == -1) {
                if (lab.initial) throw ParseError(file + ": more than one initial state", lineno);
                lab.initial = s;
            } else if (it->second == -2) {
                lab.deadlocks.push_back(s);
            } else {
                lab.states[it->second].push_back(s);
            }
        }
    }
    if (!lab.initial) throw ParseError(file + ": no initial state", lineno);
    return lab;
}

struct RawChoice {
    std::string action;
    std::vector<Distribution::Entry> entries;
    bool inexact = false;
    int line = 0;
};

}  // namespace

void write_sta(const Mdp& m, std::ostream& out) {
    const auto& vars = m.variables();
    out << "(";
    for (std::size_t v = 0; v < vars.size(); ++v) out << (v ? "," : "") << vars[v].name;
    out << ")\n";
    for (StateId s = 0; s < m.n_states(); ++s) {
        out << s << ":(";
        auto vals = m.valuation(s);
        for (std::size_t v = 0; v < vars.size(); ++v) {
            if (v) out << ",";
            if (vars[v].is_bool) {
                out << (vals[v] ? "true" : "false");
            } else {
                out << vals[v];
            }
        }
        out << ")\n";
    }
}

void write_tra(const Mdp& m, std::ostream& out, ProbFormat format) {
    out << m.n_states() << " " << m.n_choices() << " " << m.n_transitions() << "\n";
    for (StateId s = 0; s < m.n_states(); ++s) {
        auto choices = m.choices(s);
        for (std::size_t c = 0; c < choices.size(); ++c) {
            const auto& action = m.action_names()[choices[c].action];
            for (const auto& [t, p] : choices[c].distribution) {
                out << s << " " << c << " " << t << " " << prob_text(p, format);
                if (!action.empty()) out << " " << action;
                out << "\n";
            }
        }
    }
}

void write_lab(const Mdp& m, std::ostream& out) {
    out << "0=\"init\" 1=\"deadlock\"";
    for (std::size_t l = 0; l < m.label_names().size(); ++l) out << " " << l + 2 << "=\"" << m.label_names()[l] << "\"";
    out << "\n";
    for (StateId s = 0; s < m.n_states(); ++s) {
        std::vector<std::size_t> ids;
        if (s == m.initial()) ids.push_back(0);
        if (m.is_deadlock(s)) ids.push_back(1);
        for (std::size_t l = 0; l < m.label_names().size(); ++l) {
            if (m.has_label(s, l)) ids.push_back(l + 2);
        }
        if (ids.empty()) continue;
        out << s << ":";
        for (auto id : ids) out << " " << id;
        out << "\n";
    }
}

void export_explicit(const Mdp& m, const std::filesystem::path& basename, ProbFormat format) {
    auto open = [&](const char* ext) {
        std::filesystem::path p = basename;
        p += ext;
        std::ofstream f(p);
        if (!f) throw IoError("cannot write " + p.string());
        return f;
    };
    {
        auto f = open(".sta");
        write_sta(m, f);
    }
    {
        auto f = open(".tra");
        write_tra(m, f, format);
    }
    {
        auto f = open(".lab");
        write_lab(m, f);
    }
}

Mdp read_explicit(std::istream& sta_in, std::istream& tra_in, std::istream& lab_in) {
    StaContent sta = read_sta(sta_in);
    const std::size_t n = sta.n_states;

    const std::string file = "tra";
    std::string line;
    int lineno = 0;
    if (!std::getline(tra_in, line)) throw ParseError(file + ": missing header", 1);
    ++lineno;
    auto header = split_ws(line);
    if (header.size() != 3) throw ParseError(file + ": header must be 'n_states n_choices n_transitions'", lineno);
    auto h_states = parse_int(header[0], file, lineno);
    auto h_choices = parse_int(header[1], file, lineno);
    auto h_transitions = parse_int(header[2], file, lineno);
    if (h_states != static_cast<std::int64_t>(n)) {
        throw ParseError(file + ": header declares " + header[0] + " states but the state file has " +
                             std::to_string(n),
                         lineno);
    }

    std::vector<std::vector<RawChoice>> raw(n);
    std::int64_t n_rows = 0;
    while (std::getline(tra_in, line)) {
        ++lineno;
        auto toks = split_ws(line);
        if (toks.empty()) continue;
        if (toks.size() != 4 && toks.size() != 5) throw ParseError(file + ": expected 'src choice dst prob [action]'", lineno);
        StateId src = parse_state(toks[0], n, file, lineno);
        auto c = parse_int(toks[1], file, lineno);
        StateId dst = parse_state(toks[2], n, file, lineno);
        Prob p;
        try {
            p = Rational::parse(toks[3]);
        } catch (const std::exception&) {
            throw ParseError(file + ": malformed probability '" + toks[3] + "'", lineno);
        }
        auto& choices = raw[src];
        if (c < 0 || c > static_cast<std::int64_t>(choices.size())) {
            throw ParseError(file + ": choice " + toks[1] + " of state " + toks[0] + " is not contiguous", lineno);
        }
        if (c == static_cast<std::int64_t>(choices.size())) {
            choices.emplace_back();
            choices.back().action = toks.size() == 5 ? toks[4] : "";
            choices.back().line = lineno;
        } else if (choices[c].action != (toks.size() == 5 ? toks[4] : "")) {
            throw ParseError(file + ": action label changes within choice " + toks[1] + " of state " + toks[0], lineno);
        }
        choices[c].entries.emplace_back(dst, p);
        choices[c].inexact = choices[c].inexact || toks[3].find_first_of(".eE") != std::string::npos;
        ++n_rows;
    }
    if (n_rows != h_transitions) {
        throw ParseError(file + ": header declares " + header[2] + " transitions, found " + std::to_string(n_rows),
                         lineno);
    }

    LabContent lab = read_lab(lab_in, n);

    MdpData data;
    data.initial = *lab.initial;
    data.choices.resize(n);
    std::map<std::string, ActionId> action_ids{{"", 0}};
    std::int64_t n_choices = 0;
    for (StateId s = 0; s < n; ++s) {
        if (raw[s].empty()) throw ParseError(file + ": state " + std::to_string(s) + " has no choices", lineno);
        for (auto& rc : raw[s]) {
            auto [it, inserted] = action_ids.emplace(rc.action, static_cast<ActionId>(data.action_names.size()));
            if (inserted) data.action_names.push_back(rc.action);
            std::optional<Distribution> dist;
            try {
                dist.emplace(rc.entries);
            } catch (const ModelError& e) {
                if (!rc.inexact) throw ParseError(file + ": " + e.what(), rc.line);
                for (auto& entry : rc.entries) entry.second = Rational::approximate(entry.second.to_double());
                try {
                    dist.emplace(rc.entries);
                } catch (const ModelError& e2) {
                    throw ParseError(file + ": " + e2.what(), rc.line);
                }
            }
            data.choices[s].push_back(Choice{it->second, std::move(*dist)});
            ++n_choices;
        }
    }
    if (n_choices != h_choices) {
        throw ParseError(file + ": header declares " + header[1] + " choices, found " + std::to_string(n_choices), 1);
    }

    data.label_names = std::move(lab.names);
    data.label_states = std::move(lab.states);
    data.deadlocks = std::move(lab.deadlocks);
    const std::size_t width = sta.names.size();
    for (std::size_t v = 0; v < width; ++v) {
        VariableInfo info;
        info.name = sta.names[v];
        info.is_bool = sta.is_bool[v];
        info.lower = info.upper = sta.valuations[v];
        for (StateId s = 0; s < n; ++s) {
            info.lower = std::min(info.lower, sta.valuations[s * width + v]);
            info.upper = std::max(info.upper, sta.valuations[s * width + v]);
        }
        if (info.is_bool) {
            info.lower = 0;
            info.upper = 1;
        }
        data.variables.push_back(std::move(info));
    }
    data.valuations = std::move(sta.valuations);
    try {
        return Mdp(std::move(data));
    } catch (const ModelError& e) {
        throw ParseError(std::string("inconsistent explicit model: ") + e.what());
    }
}

Mdp import_explicit(const std::filesystem::path& basename) {
    auto open = [&](const char* ext) {
        std::filesystem::path p = basename;
        p += ext;
        std::ifstream f(p);
        if (!f) throw IoError("cannot read " + p.string());
        return f;
    };
    auto sta = open(".sta");
    auto tra = open(".tra");
    auto lab = open(".lab");
    return read_explicit(sta, tra, lab);
}

}  // namespace mlbisim::prism

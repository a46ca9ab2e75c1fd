#include "rplink/milp.hpp"

#include "rplink/errors.hpp"
#include "rplink/numfmt.hpp"

#include <fstream>
#include <sstream>

namespace rplink {

const char* role_name(Role role) {
    switch (role) {
        case Role::p: return "p";
        case Role::u: return "u";
        case Role::su: return "su";
        case Role::sd: return "sd";
        case Role::l: return "l";
        case Role::c: return "c";
        case Role::gdis: return "gdis";
        case Role::pns: return "pns";
        case Role::eps: return "eps";
    }
    return "?";
}

std::string var_name(const VarKey& key) {
    std::string name = std::string(role_name(key.role)) + "_rp" + std::to_string(key.rp + 1) +
                       "_k" + std::to_string(key.k + 1);
    if (!key.entity.empty()) name += "_" + key.entity;
    return name;
}

int MilpInstance::add_variable(Variable v) {
    int idx = static_cast<int>(vars.size());
    catalog.emplace(v.key, idx);
    vars.push_back(std::move(v));
    return idx;
}

int MilpInstance::var_index(const VarKey& key) const {
    auto it = catalog.find(key);
    return it == catalog.end() ? -1 : it->second;
}

const Variable& MilpInstance::variable(const VarKey& key) const {
    int idx = var_index(key);
    if (idx < 0) throw ValidationError("unknown variable " + var_name(key));
    return vars[static_cast<size_t>(idx)];
}

namespace {

// Term lists can get long; keep lines comfortably short for LP readers.
class LineWrapper {
public:
    explicit LineWrapper(std::ostream& out) : out_(out) {}

    void begin(const std::string& prefix) {
        out_ << prefix;
        width_ = prefix.size();
    }
    void append(const std::string& piece) {
        if (width_ + piece.size() > 200) {
            out_ << "\n   ";
            width_ = 3;
        }
        out_ << piece;
        width_ += piece.size();
    }
    void end() { out_ << '\n'; }

private:
    std::ostream& out_;
    size_t width_ = 0;
};

void write_terms(LineWrapper& line, const std::vector<LinTerm>& terms,
                 const std::vector<Variable>& vars) {
    for (const auto& t : terms) {
        double c = t.coef;
        std::string piece = c < 0 ? " - " : " + ";
        piece += fmt_shortest(c < 0 ? -c : c);
        piece += ' ';
        piece += vars[static_cast<size_t>(t.var)].name;
        line.append(piece);
    }
}

} // namespace

std::string write_lp(const MilpInstance& milp) {
    std::ostringstream out;
    LineWrapper line(out);

    out << "\\ rplink model\n";
    out << "Minimize\n";
    line.begin(" obj:");
    write_terms(line, milp.objective, milp.vars);
    line.end();

    out << "Subject To\n";
    for (const auto& con : milp.cons) {
        line.begin(" " + con.name + ":");
        write_terms(line, con.terms, milp.vars);
        const char* sense = con.sense == Sense::le ? " <= " : con.sense == Sense::ge ? " >= " : " = ";
        line.append(sense + fmt_shortest(con.rhs));
        line.end();
    }

    out << "Bounds\n";
    for (const auto& v : milp.vars) {
        // Default LP bound is [0, +inf); only deviations are written.
        if (v.lower == 0.0 && !v.has_upper) continue;
        if (v.has_upper)
            out << ' ' << fmt_shortest(v.lower) << " <= " << v.name << " <= "
                << fmt_shortest(v.upper) << '\n';
        else
            out << ' ' << v.name << " >= " << fmt_shortest(v.lower) << '\n';
    }

    bool any_binary = false;
    for (const auto& v : milp.vars)
        if (v.kind == VarKind::binary) { any_binary = true; break; }
    if (any_binary) {
        out << "Binaries\n";
        for (const auto& v : milp.vars)
            if (v.kind == VarKind::binary) out << ' ' << v.name << '\n';
    }

    out << "End\n";
    return out.str();
}

void write_lp_file(const std::string& path, const MilpInstance& milp) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError(path + ": cannot open file for writing");
    out << write_lp(milp);
}

} // namespace rplink

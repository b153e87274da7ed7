#include "report.hpp"

#include <cmath>
#include <cstdio>

namespace lvbcli {

namespace {

std::string json_string(const std::string& s) {
    std::string out = "\"";
    for (char ch : s) {
        switch (ch) {
        case '"': out += "\\\""; break;
        case '\\': out += "\\\\"; break;
        case '\n': out += "\\n"; break;
        case '\t': out += "\\t"; break;
        default:
            if (static_cast<unsigned char>(ch) < 0x20) {
                char buf[8];
                std::snprintf(buf, sizeof buf, "\\u%04x", ch);
                out += buf;
            } else {
                out += ch;
            }
        }
    }
    return out + "\"";
}

std::string json_cell(const Cell& c, bool pretty) {
    struct V {
        bool pretty;
        std::string operator()(std::monostate) const { return "null"; }
        std::string operator()(bool b) const { return b ? "true" : "false"; }
        std::string operator()(std::int64_t i) const { return std::to_string(i); }
        std::string operator()(double d) const { return std::isfinite(d) ? format_real(d, pretty) : "null"; }
        std::string operator()(const std::string& s) const { return json_string(s); }
    };
    return std::visit(V{pretty}, c);
}

std::string csv_cell(const Cell& c, bool pretty) {
    struct V {
        bool pretty;
        std::string operator()(std::monostate) const { return ""; }
        std::string operator()(bool b) const { return b ? "1" : "0"; }
        std::string operator()(std::int64_t i) const { return std::to_string(i); }
        std::string operator()(double d) const { return std::isfinite(d) ? format_real(d, pretty) : ""; }
        std::string operator()(const std::string& s) const {
            if (s.find_first_of(",\"\n") == std::string::npos) return s;
            std::string out = "\"";
            for (char ch : s) out += ch == '"' ? std::string("\"\"") : std::string(1, ch);
            return out + "\"";
        }
    };
    return std::visit(V{pretty}, c);
}

} // namespace

std::string format_real(double v, bool pretty) {
    char buf[40];
    std::snprintf(buf, sizeof buf, pretty ? "%.6g" : "%.17e", v);
    return buf;
}

void write_json(std::ostream& os, const Report& r, bool pretty) {
    const char* nl = pretty ? "\n" : "";
    const char* in1 = pretty ? "  " : "";
    const char* in2 = pretty ? "    " : "";
    const char* sp = pretty ? " " : "";
    os << "{" << nl << in1 << "\"command\":" << sp << json_string(r.command);
    for (const auto& [k, v] : r.meta) os << "," << nl << in1 << json_string(k) << ":" << sp << json_cell(v, pretty);
    os << "," << nl << in1 << "\"warnings\":" << sp << "[";
    for (std::size_t i = 0; i < r.warnings.size(); ++i) os << (i ? "," : "") << json_string(r.warnings[i]);
    os << "]";
    os << "," << nl << in1 << "\"rows\":" << sp << "[";
    for (std::size_t i = 0; i < r.table.rows.size(); ++i) {
        os << (i ? "," : "") << nl << in2 << "{";
        const auto& row = r.table.rows[i];
        for (std::size_t c = 0; c < r.table.columns.size(); ++c)
            os << (c ? "," : "") << (c ? sp : "") << json_string(r.table.columns[c]) << ":" << sp
               << json_cell(row[c], pretty);
        os << "}";
    }
    if (!r.table.rows.empty()) os << nl << in1;
    os << "]" << nl << "}\n";
}

void write_csv(std::ostream& os, const Report& r, bool pretty) {
    for (std::size_t c = 0; c < r.table.columns.size(); ++c) os << (c ? "," : "") << r.table.columns[c];
    os << "\n";
    for (const auto& row : r.table.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << csv_cell(row[c], pretty);
        os << "\n";
    }
}

} // namespace lvbcli

#pragma once

// Deterministic result serialization: a small ordered-JSON value type whose
// emission is byte-stable (sorted keys, 12 significant digits, fixed
// indentation), and the CSV field dump.

#include <cinttypes>
#include <cstdio>
#include <map>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include "fcap/common.hpp"
#include "fcap/grid.hpp"

namespace fcap {

class Json {
public:
    using Obj = std::map<std::string, Json>;  // sorted keys by construction
    using Arr = std::vector<Json>;

    Json() : v_(nullptr) {}
    Json(std::nullptr_t) : v_(nullptr) {}
    Json(bool b) : v_(b) {}
    Json(double d) : v_(d) {}
    Json(int i) : v_(static_cast<int64_t>(i)) {}
    Json(int64_t i) : v_(i) {}
    Json(uint64_t i) : v_(static_cast<int64_t>(i)) {}
    Json(const char* s) : v_(std::string(s)) {}
    Json(std::string s) : v_(std::move(s)) {}
    Json(Obj o) : v_(std::move(o)) {}
    Json(Arr a) : v_(std::move(a)) {}

    template <class T>
    Json(const std::vector<T>& xs) {
        Arr a;
        a.reserve(xs.size());
        for (const auto& x : xs) a.emplace_back(x);
        v_ = std::move(a);
    }

    Json& operator[](const std::string& key) {
        if (!std::holds_alternative<Obj>(v_)) v_ = Obj{};
        return std::get<Obj>(v_)[key];
    }

    // Read access; std::bad_variant_access on a type mismatch.
    const Json& at(const std::string& key) const { return std::get<Obj>(v_).at(key); }
    bool has(const std::string& key) const {
        return std::holds_alternative<Obj>(v_) && std::get<Obj>(v_).count(key) > 0;
    }
    const Json& item(std::size_t i) const { return std::get<Arr>(v_).at(i); }
    std::size_t size() const { return std::get<Arr>(v_).size(); }
    double as_double() const {
        if (std::holds_alternative<int64_t>(v_)) return static_cast<double>(std::get<int64_t>(v_));
        return std::get<double>(v_);
    }
    int64_t as_int() const { return std::get<int64_t>(v_); }
    bool as_bool() const { return std::get<bool>(v_); }
    const std::string& as_string() const { return std::get<std::string>(v_); }

    void dump(std::string& out, int indent = 0) const {
        struct V {
            std::string& out;
            int indent;
            void pad(int n) const { out.append(2 * static_cast<std::size_t>(n), ' '); }
            void operator()(std::nullptr_t) const { out += "null"; }
            void operator()(bool b) const { out += b ? "true" : "false"; }
            void operator()(int64_t i) const {
                char buf[32];
                std::snprintf(buf, sizeof buf, "%" PRId64, i);
                out += buf;
            }
            void operator()(double d) const {
                if (!std::isfinite(d)) {
                    out += d > 0 ? "\"inf\"" : (d < 0 ? "\"-inf\"" : "\"nan\"");
                    return;
                }
                char buf[40];
                std::snprintf(buf, sizeof buf, "%.12g", d);
                out += buf;
            }
            void operator()(const std::string& s) const {
                out += '"';
                for (char c : s) {
                    switch (c) {
                        case '"': out += "\\\""; break;
                        case '\\': out += "\\\\"; break;
                        case '\n': out += "\\n"; break;
                        case '\t': out += "\\t"; break;
                        default:
                            if (static_cast<unsigned char>(c) < 0x20) {
                                char buf[8];
                                std::snprintf(buf, sizeof buf, "\\u%04x", c);
                                out += buf;
                            } else {
                                out += c;
                            }
                    }
                }
                out += '"';
            }
            void operator()(const Obj& o) const {
                if (o.empty()) {
                    out += "{}";
                    return;
                }
                out += "{\n";
                std::size_t i = 0;
                for (const auto& [k, val] : o) {
                    pad(indent + 1);
                    (*this)(k);
                    out += ": ";
                    val.dump(out, indent + 1);
                    if (++i < o.size()) out += ',';
                    out += '\n';
                }
                pad(indent);
                out += '}';
            }
            void operator()(const Arr& a) const {
                if (a.empty()) {
                    out += "[]";
                    return;
                }
                out += '[';
                for (std::size_t i = 0; i < a.size(); ++i) {
                    if (i) out += ", ";
                    a[i].dump(out, indent);
                }
                out += ']';
            }
        };
        std::visit(V{out, indent}, v_);
    }

    std::string str() const {
        std::string out;
        dump(out);
        out += '\n';
        return out;
    }

private:
    std::variant<std::nullptr_t, bool, int64_t, double, std::string, Obj, Arr> v_;
};

struct TheoremReport {
    std::string check;
    std::string verdict;  // consistent | violated | hypothesis_not_met
    Json measured;
    Json tolerances;
    Json provenance;
};

/// Byte-stable JSON for a theorem report: a fixed field set, object keys
/// sorted, doubles at 12 significant digits.
inline std::string emit_report(const TheoremReport& r) {
    Json j;
    j["check"] = r.check;
    j["measured"] = r.measured;
    j["provenance"] = r.provenance;
    j["tolerances"] = r.tolerances;
    j["verdict"] = r.verdict;
    return j.str();
}

/// Field dump of every node inside the truncation shell (body and unknowns;
/// outer nodes carry boundary data, not field values).
inline void write_field_csv(std::ostream& os, const Grid& g, const std::vector<double>& value) {
    const char* names[] = {"x", "y", "z"};
    for (int a = 0; a < g.dim; ++a) {
        if (a < 3)
            os << names[a];
        else
            os << 'x' << a;
        os << ',';
    }
    os << "u\n";
    char buf[40];
    for (int64_t id = 0; id < g.nnodes; ++id) {
        if (g.node_class(id) == NodeClass::outer) continue;
        const Vec x = g.node_pos(id);
        for (int a = 0; a < g.dim; ++a) {
            std::snprintf(buf, sizeof buf, "%.12g", x[a]);
            os << buf << ',';
        }
        std::snprintf(buf, sizeof buf, "%.12g", value[id]);
        os << buf << '\n';
    }
}

}  // namespace fcap

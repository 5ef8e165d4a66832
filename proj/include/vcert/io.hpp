#pragma once

// Input documents and report serialisation for batch certification runs.
//
// Input schema (JSON):
//   mode        "bb-patch" | "bb-grid" | "matrix-family"
//   dimension   n >= 1
//   options     optional { delta, threshold, format: "text" | "structured" }
//   bb-patch:       degrees [p_1..p_n], control_points nested n deep, points of length n
//   bb-grid:        breakpoints [[0,..,1] per axis], patches [{cell, degrees, control_points}]
//   matrix-family:  columns [[n-vector, ...] per column]

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "vcert/bernstein.hpp"
#include "vcert/certify.hpp"
#include "vcert/error.hpp"
#include "vcert/generator_set.hpp"

namespace vcert {

enum class InputMode { BbPatch, BbGrid, MatrixFamily };
enum class ReportFormat { Text, Structured };

inline const char* to_string(InputMode m)
{
    switch (m) {
    case InputMode::BbPatch: return "bb-patch";
    case InputMode::BbGrid: return "bb-grid";
    case InputMode::MatrixFamily: return "matrix-family";
    }
    return "?";
}

inline const char* to_string(ReportFormat f) { return f == ReportFormat::Text ? "text" : "structured"; }

struct InputOptions {
    double delta = default_delta;
    double threshold = default_threshold;
    ReportFormat format = ReportFormat::Text;

    friend bool operator==(const InputOptions&, const InputOptions&) = default;
};

struct InputDocument {
    InputMode mode = InputMode::MatrixFamily;
    std::size_t dimension = 0;
    /// bb-patch (one cell) and bb-grid.
    PatchGrid grid;
    /// matrix-family.
    std::vector<GeneratorSet> columns;
    InputOptions options;
};

inline bool operator==(const GeneratorSet& a, const GeneratorSet& b)
{
    return a.column == b.column && a.vectors == b.vectors;
}

inline bool operator==(const InputDocument& a, const InputDocument& b)
{
    return a.mode == b.mode && a.dimension == b.dimension && a.options == b.options
        && a.grid.breakpoints() == b.grid.breakpoints() && a.grid.patches() == b.grid.patches()
        && a.columns == b.columns;
}

namespace detail {

    using json = nlohmann::ordered_json;

    inline const json& require(const json& obj, const std::string& key, const std::string& path)
    {
        auto it = obj.find(key);
        if (it == obj.end()) {
            throw ParseError(path.empty() ? key : path + "." + key, "missing required field");
        }
        return *it;
    }

    inline std::string child(const std::string& path, const std::string& key)
    {
        return path.empty() ? key : path + "." + key;
    }

    inline std::string child(const std::string& path, std::size_t index)
    {
        return path + "[" + std::to_string(index) + "]";
    }

    inline void reject_unknown(const json& obj, std::initializer_list<const char*> allowed, const std::string& path)
    {
        for (auto it = obj.begin(); it != obj.end(); ++it) {
            bool ok = false;
            for (const char* a : allowed) ok = ok || it.key() == a;
            if (!ok) throw ParseError(child(path, it.key()), "unknown field");
        }
    }

    inline double read_number(const json& v, const std::string& path)
    {
        if (!v.is_number()) throw ParseError(path, "expected a number");
        const double d = v.get<double>();
        if (!std::isfinite(d)) throw ParseError(path, "non-finite number");
        return d;
    }

    inline std::size_t read_index(const json& v, const std::string& path)
    {
        if (!v.is_number_integer() || v.get<long long>() < 0) {
            throw ParseError(path, "expected a nonnegative integer");
        }
        return v.get<std::size_t>();
    }

    inline const json& read_array(const json& v, const std::string& path)
    {
        if (!v.is_array()) throw ParseError(path, "expected an array");
        return v;
    }

    inline Vector read_vector(const json& v, std::size_t n, const std::string& path)
    {
        read_array(v, path);
        if (v.size() != n) {
            throw ParseError(path, "shape mismatch: expected " + std::to_string(n) + " coordinates, got "
                                       + std::to_string(v.size()));
        }
        Vector out(n);
        for (std::size_t i = 0; i < n; ++i) out[i] = read_number(v[i], child(path, i));
        return out;
    }

    inline std::vector<std::size_t> read_degrees(const json& v, std::size_t n, const std::string& path)
    {
        read_array(v, path);
        if (v.size() != n) {
            throw ParseError(path, "shape mismatch: expected " + std::to_string(n) + " degrees, got "
                                       + std::to_string(v.size()));
        }
        std::vector<std::size_t> out(n);
        for (std::size_t i = 0; i < n; ++i) out[i] = read_index(v[i], child(path, i));
        return out;
    }

    // Nested arrays n deep; axis k has degrees[k] + 1 entries. Row-major.
    inline void read_points(const json& v, const std::vector<std::size_t>& degrees, std::size_t axis,
                            const std::string& path, std::vector<Vector>& out)
    {
        const std::size_t n = degrees.size();
        if (axis == n) {
            out.push_back(read_vector(v, n, path));
            return;
        }
        read_array(v, path);
        if (v.size() != degrees[axis] + 1) {
            throw ParseError(path, "shape mismatch: axis " + std::to_string(axis + 1) + " of degree "
                                       + std::to_string(degrees[axis]) + " needs "
                                       + std::to_string(degrees[axis] + 1) + " entries, got "
                                       + std::to_string(v.size()));
        }
        for (std::size_t i = 0; i < v.size(); ++i) read_points(v[i], degrees, axis + 1, child(path, i), out);
    }

    inline ControlNet read_net(const json& obj, std::size_t n, const std::string& path)
    {
        auto degrees = read_degrees(require(obj, "degrees", path), n, child(path, "degrees"));
        std::vector<Vector> points;
        read_points(require(obj, "control_points", path), degrees, 0, child(path, "control_points"), points);
        return ControlNet(std::move(degrees), points);
    }

    inline json write_points(const ControlNet& net, std::size_t axis, std::size_t offset)
    {
        const std::size_t n = net.dimension();
        if (axis == n) {
            auto p = net.point(offset);
            return json(Vector(p.begin(), p.end()));
        }
        json arr = json::array();
        for (std::size_t i = 0; i <= net.degrees()[axis]; ++i) {
            arr.push_back(write_points(net, axis + 1, offset + i * net.stride(axis)));
        }
        return arr;
    }

    inline std::string fmt6(double v)
    {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.6g", v);
        return buf;
    }

    inline std::string fmt6(std::span<const double> v)
    {
        std::string out = "(";
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (i) out += ", ";
            out += fmt6(v[i]);
        }
        return out + ")";
    }

} // namespace detail

/// Parses and fully validates an input document.
inline InputDocument parse_input(const std::string& text)
{
    using detail::json;
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError("", std::string("malformed JSON: ") + e.what());
    } catch (const json::out_of_range& e) {
        throw ParseError("", std::string("non-finite number: ") + e.what());
    }
    if (!root.is_object()) throw ParseError("", "top level must be an object");

    InputDocument doc;
    const json& mode = detail::require(root, "mode", "");
    if (!mode.is_string()) throw ParseError("mode", "expected a string");
    const std::string m = mode.get<std::string>();
    if (m == "bb-patch") {
        doc.mode = InputMode::BbPatch;
        detail::reject_unknown(root, {"mode", "dimension", "options", "degrees", "control_points"}, "");
    } else if (m == "bb-grid") {
        doc.mode = InputMode::BbGrid;
        detail::reject_unknown(root, {"mode", "dimension", "options", "breakpoints", "patches"}, "");
    } else if (m == "matrix-family") {
        doc.mode = InputMode::MatrixFamily;
        detail::reject_unknown(root, {"mode", "dimension", "options", "columns"}, "");
    } else {
        throw ParseError("mode", "unknown mode \"" + m + "\"");
    }

    doc.dimension = detail::read_index(detail::require(root, "dimension", ""), "dimension");
    const std::size_t n = doc.dimension;
    if (n < 1) throw ParseError("dimension", "must be at least 1");
    if (n > 30) throw ParseError("dimension", "too large");

    if (auto it = root.find("options"); it != root.end()) {
        if (!it->is_object()) throw ParseError("options", "expected an object");
        detail::reject_unknown(*it, {"delta", "threshold", "format"}, "options");
        if (auto d = it->find("delta"); d != it->end()) {
            doc.options.delta = detail::read_number(*d, "options.delta");
            if (!(doc.options.delta > 0.0)) throw ParseError("options.delta", "must be positive");
        }
        if (auto t = it->find("threshold"); t != it->end()) {
            doc.options.threshold = detail::read_number(*t, "options.threshold");
            if (!(doc.options.threshold >= 0.0)) throw ParseError("options.threshold", "must be nonnegative");
        }
        if (auto f = it->find("format"); f != it->end()) {
            const std::string fs = f->is_string() ? f->get<std::string>() : "";
            if (fs == "text") {
                doc.options.format = ReportFormat::Text;
            } else if (fs == "structured") {
                doc.options.format = ReportFormat::Structured;
            } else {
                throw ParseError("options.format", "expected \"text\" or \"structured\"");
            }
        }
    }

    try {
        if (doc.mode == InputMode::BbPatch) {
            doc.grid = PatchGrid::single(detail::read_net(root, n, ""));
        } else if (doc.mode == InputMode::BbGrid) {
            const json& bps = detail::read_array(detail::require(root, "breakpoints", ""), "breakpoints");
            if (bps.size() != n) {
                throw ParseError("breakpoints", "shape mismatch: expected " + std::to_string(n) + " axes, got "
                                                    + std::to_string(bps.size()));
            }
            std::vector<Vector> breakpoints;
            std::vector<std::size_t> cells_along;
            for (std::size_t k = 0; k < n; ++k) {
                const std::string path = detail::child("breakpoints", k);
                const json& axis = detail::read_array(bps[k], path);
                Vector bp;
                for (std::size_t i = 0; i < axis.size(); ++i) bp.push_back(detail::read_number(axis[i], detail::child(path, i)));
                if (bp.size() < 2 || bp.front() != 0.0 || bp.back() != 1.0) {
                    throw ParseError(path, "must start at 0, end at 1 and have at least two entries");
                }
                for (std::size_t i = 0; i + 1 < bp.size(); ++i) {
                    if (!(bp[i] < bp[i + 1])) throw ParseError(detail::child(path, i + 1), "breakpoints must be strictly increasing");
                }
                cells_along.push_back(bp.size() - 1);
                breakpoints.push_back(std::move(bp));
            }
            std::size_t count = 1;
            for (auto c : cells_along) count *= c;

            const json& patches = detail::read_array(detail::require(root, "patches", ""), "patches");
            if (patches.size() != count) {
                throw ParseError("patches", "shape mismatch: grid has " + std::to_string(count) + " cells, got "
                                                + std::to_string(patches.size()) + " patches");
            }
            std::vector<std::optional<ControlNet>> nets(count);
            for (std::size_t p = 0; p < patches.size(); ++p) {
                const std::string path = detail::child("patches", p);
                const json& obj = patches[p];
                if (!obj.is_object()) throw ParseError(path, "expected an object");
                detail::reject_unknown(obj, {"cell", "degrees", "control_points"}, path);
                const std::string cpath = detail::child(path, "cell");
                const json& cell = detail::read_array(detail::require(obj, "cell", path), cpath);
                if (cell.size() != n) throw ParseError(cpath, "shape mismatch: expected " + std::to_string(n) + " indices");
                std::size_t flat = 0;
                for (std::size_t k = 0; k < n; ++k) {
                    const std::size_t c = detail::read_index(cell[k], detail::child(cpath, k));
                    if (c >= cells_along[k]) throw ParseError(detail::child(cpath, k), "cell index out of range");
                    flat = flat * cells_along[k] + c;
                }
                if (nets[flat]) throw ParseError(cpath, "duplicate cell");
                nets[flat] = detail::read_net(obj, n, path);
            }
            std::vector<ControlNet> ordered;
            for (auto& net : nets) ordered.push_back(std::move(*net));
            doc.grid = PatchGrid(std::move(breakpoints), std::move(ordered));
        } else {
            const json& cols = detail::read_array(detail::require(root, "columns", ""), "columns");
            if (cols.size() != n) {
                throw ParseError("columns", "shape mismatch: expected " + std::to_string(n) + " columns, got "
                                                + std::to_string(cols.size()));
            }
            for (std::size_t i = 0; i < n; ++i) {
                const std::string path = detail::child("columns", i);
                const json& gens = detail::read_array(cols[i], path);
                if (gens.empty()) throw ParseError(path, "column needs at least one generator");
                GeneratorSet set;
                set.column = i;
                for (std::size_t k = 0; k < gens.size(); ++k) {
                    set.vectors.push_back(detail::read_vector(gens[k], n, detail::child(path, k)));
                }
                doc.columns.push_back(std::move(set));
            }
        }
    } catch (const ParseError&) {
        throw;
    } catch (const Error& e) {
        throw ParseError("", e.what());
    }
    return doc;
}

/// Serialises a document in the input schema; parse_input inverts it.
inline std::string emit_input(const InputDocument& doc)
{
    using detail::json;
    json root;
    root["mode"] = to_string(doc.mode);
    root["dimension"] = doc.dimension;
    root["options"] = {{"delta", doc.options.delta}, {"threshold", doc.options.threshold},
                       {"format", to_string(doc.options.format)}};
    if (doc.mode == InputMode::BbPatch) {
        const ControlNet& net = doc.grid.patches().front();
        root["degrees"] = net.degrees();
        root["control_points"] = detail::write_points(net, 0, 0);
    } else if (doc.mode == InputMode::BbGrid) {
        root["breakpoints"] = doc.grid.breakpoints();
        json patches = json::array();
        for (std::size_t c = 0; c < doc.grid.cell_count(); ++c) {
            const ControlNet& net = doc.grid.patches()[c];
            json p;
            p["cell"] = doc.grid.cell_index(c);
            p["degrees"] = net.degrees();
            p["control_points"] = detail::write_points(net, 0, 0);
            patches.push_back(std::move(p));
        }
        root["patches"] = std::move(patches);
    } else {
        json cols = json::array();
        for (const auto& c : doc.columns) cols.push_back(c.vectors);
        root["columns"] = std::move(cols);
    }
    return root.dump(2) + "\n";
}

/// Dispatches to certify_map or certify_matrix_family.
inline CertificateReport run(const InputDocument& doc)
{
    const CertifyOptions opt{doc.options.delta, doc.options.threshold};
    if (doc.mode == InputMode::MatrixFamily) {
        return certify_matrix_family(doc.columns, opt);
    }
    return certify_map(doc.grid, opt);
}

/// 0 strict V-family, 1 not certified, 2 degenerate input.
inline int exit_code(const CertificateReport& rep)
{
    switch (rep.verdict) {
    case Verdict::StrictVFamily: return 0;
    case Verdict::NotCertified: return 1;
    case Verdict::Degenerate: return 2;
    }
    return 1;
}

/// Field-for-field JSON image of a report. Column and generator numbers are
/// one-based, as in the text report.
inline nlohmann::ordered_json report_to_json(const CertificateReport& rep)
{
    using detail::json;
    json j;
    j["dimension"] = rep.dimension;
    j["verdict"] = to_string(rep.verdict);
    j["provenance"] = to_string(rep.provenance);
    j["delta"] = rep.delta;
    j["threshold"] = rep.threshold;
    j["generator_counts"] = rep.generator_counts;
    j["min_generator_norms"] = rep.min_generator_norms;
    if (rep.degenerate) {
        j["degenerate"] = {{"column", rep.degenerate->column + 1}, {"norm", rep.degenerate->norm}};
    } else {
        j["degenerate"] = nullptr;
    }
    json patterns = json::array();
    for (const auto& p : rep.patterns) {
        json e;
        e["signs"] = p.pattern.signs();
        e["status"] = to_string(p.status);
        e["lp_margin"] = p.lp_margin;
        e["lp_direction"] = p.lp_direction;
        e["marginal"] = p.marginal;
        if (p.certificate) {
            e["certificate"] = {{"a", p.certificate->a}, {"epsilon", p.certificate->epsilon}};
        } else {
            e["certificate"] = nullptr;
        }
        if (p.status == PatternStatus::NotStrict) {
            json terms = json::array();
            for (const auto& t : p.witness) {
                terms.push_back({{"column", t.column + 1}, {"generator", t.generator + 1}, {"weight", t.weight}});
            }
            e["witness"] = {{"terms", std::move(terms)}, {"sum", p.witness_sum}, {"sum_norm", norm2(p.witness_sum)}};
        } else {
            e["witness"] = nullptr;
        }
        patterns.push_back(std::move(e));
    }
    j["patterns"] = std::move(patterns);
    return j;
}

inline std::string emit_text(const CertificateReport& rep)
{
    using detail::fmt6;
    std::ostringstream os;
    std::string verdict = to_string(rep.verdict);
    for (char& c : verdict) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    os << "verdict: " << verdict << "\n";
    os << "dimension: " << rep.dimension << "\n";
    os << "provenance: " << to_string(rep.provenance) << "\n";
    os << "delta: " << fmt6(rep.delta) << "  threshold: " << fmt6(rep.threshold) << "\n";
    if (rep.degenerate) {
        os << "DEGENERATE column " << rep.degenerate->column + 1 << ": generator norm " << fmt6(rep.degenerate->norm)
           << " below delta " << fmt6(rep.delta) << "\n";
        return os.str();
    }
    for (std::size_t i = 0; i < rep.generator_counts.size(); ++i) {
        os << "column " << i + 1 << ": " << rep.generator_counts[i] << " generators, min norm "
           << fmt6(rep.min_generator_norms[i]) << "\n";
    }
    char line[256];
    const int width = static_cast<int>(std::max<std::size_t>(7, 2 * rep.dimension + 1));
    std::snprintf(line, sizeof line, "%-*s  %-10s  %-12s  %-12s  %s\n", width,
                  "pattern", "status", "lp margin", "epsilon", "certificate");
    os << line;
    for (const auto& p : rep.patterns) {
        const std::string eps = p.certificate ? fmt6(p.certificate->epsilon) : "-";
        const std::string cert = p.certificate ? fmt6(p.certificate->a) : "-";
        std::snprintf(line, sizeof line, "%-*s  %-10s  %-12s  %-12s  ", width,
                      p.pattern.str().c_str(), p.status == PatternStatus::Strict ? "STRICT" : "NOT-STRICT",
                      fmt6(p.lp_margin).c_str(), eps.c_str());
        os << line << cert;
        if (p.marginal) os << "  (numerically marginal)";
        os << "\n";
    }
    for (const auto& p : rep.patterns) {
        if (p.status == PatternStatus::Strict) continue;
        os << "witness " << p.pattern.str() << ": sum = " << fmt6(p.witness_sum)
           << ", |sum| = " << fmt6(norm2(p.witness_sum)) << "\n";
        for (const auto& t : p.witness) {
            os << "  " << fmt6(t.weight) << " x " << (p.pattern[t.column] > 0 ? '+' : '-') << "column "
               << t.column + 1 << " generator " << t.generator + 1 << "\n";
        }
    }
    return os.str();
}

inline std::string emit_report(const CertificateReport& rep, ReportFormat format)
{
    if (format == ReportFormat::Text) return emit_text(rep);
    return report_to_json(rep).dump(2) + "\n";
}

} // namespace vcert

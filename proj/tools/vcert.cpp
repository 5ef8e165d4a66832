// vcert: certify global invertibility of piecewise Bernstein-Bezier maps, or
// nondegeneracy of matrix families, from a JSON input document.
//
// Exit codes: 0 strict V-family, 1 not certified, 2 degenerate input,
// 3 usage or parse error.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "vcert/io.hpp"
#include "vcert/oracle.hpp"

namespace {

constexpr int exit_usage = 3;

std::string read_all(std::istream& in)
{
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

std::string cell_label(const std::vector<std::size_t>& cell)
{
    std::string out = "(";
    for (std::size_t i = 0; i < cell.size(); ++i) {
        if (i) out += ",";
        out += std::to_string(cell[i]);
    }
    return out + ")";
}

double min_epsilon(const vcert::CertificateReport& rep)
{
    double eps = rep.patterns.empty() ? 0.0 : 1.0;
    for (const auto& p : rep.patterns) eps = std::min(eps, p.certificate ? p.certificate->epsilon : 0.0);
    return eps;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Certify global invertibility via the strict V-family test"};
    std::string input_path;
    std::optional<double> delta;
    std::optional<double> threshold;
    std::string format;
    bool per_patch = false;
    std::optional<std::size_t> oracle_trials;
    std::uint64_t seed = 0;

    app.add_option("--input", input_path, "Input document (default: standard input)");
    app.add_option("--delta", delta, "Separation threshold for generator norms")->check(CLI::PositiveNumber);
    app.add_option("--threshold", threshold, "Strictness threshold on the LP margin")->check(CLI::NonNegativeNumber);
    app.add_option("--format", format, "Report format")->check(CLI::IsMember({"text", "structured"}));
    app.add_flag("--per-patch", per_patch, "Also certify each patch on its own");
    app.add_option("--oracle", oracle_trials, "Run sampled injectivity with this many trials")->check(CLI::PositiveNumber);
    app.add_option("--seed", seed, "Seed for --oracle");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_usage;
    }

    std::string text;
    if (input_path.empty() || input_path == "-") {
        text = read_all(std::cin);
    } else {
        std::ifstream in(input_path);
        if (!in) {
            std::cerr << "vcert: cannot open " << input_path << "\n";
            return exit_usage;
        }
        text = read_all(in);
    }

    vcert::InputDocument doc;
    try {
        doc = vcert::parse_input(text);
    } catch (const vcert::ParseError& e) {
        std::cerr << "vcert: " << e.what() << "\n";
        return exit_usage;
    }
    if (delta) doc.options.delta = *delta;
    if (threshold) doc.options.threshold = *threshold;
    if (!format.empty()) doc.options.format = format == "text" ? vcert::ReportFormat::Text : vcert::ReportFormat::Structured;

    const bool is_map = doc.mode != vcert::InputMode::MatrixFamily;
    if ((per_patch || oracle_trials) && !is_map) {
        std::cerr << "vcert: --per-patch and --oracle need a bb-patch or bb-grid document; ignored\n";
    }

    vcert::CertificateReport report;
    try {
        report = vcert::run(doc);
    } catch (const vcert::Error& e) {
        std::cerr << "vcert: " << e.what() << "\n";
        return exit_usage;
    }

    const vcert::CertifyOptions opt{doc.options.delta, doc.options.threshold};
    std::vector<vcert::CertificateReport> patches;
    if (per_patch && is_map) patches = vcert::certify_patches(doc.grid, opt);

    std::optional<vcert::CollisionReport> oracle;
    if (oracle_trials && is_map) oracle = vcert::sampled_injectivity(doc.grid, *oracle_trials, seed);
    const bool violation = oracle && oracle->collided && report.certified();
    if (violation) {
        std::cerr << "vcert: certified map has a sampled collision; this indicates a numerical problem\n";
    }

    if (doc.options.format == vcert::ReportFormat::Structured) {
        auto j = vcert::report_to_json(report);
        if (per_patch && is_map) {
            auto arr = nlohmann::ordered_json::array();
            for (std::size_t c = 0; c < patches.size(); ++c) {
                arr.push_back({{"cell", doc.grid.cell_index(c)}, {"report", vcert::report_to_json(patches[c])}});
            }
            j["per_patch"] = std::move(arr);
        }
        if (oracle) {
            nlohmann::ordered_json o{{"trials", oracle->trials}, {"seed", oracle->seed}, {"collided", oracle->collided}};
            if (oracle->witness) {
                o["witness"] = {{"u", oracle->witness->u}, {"v", oracle->witness->v},
                                {"fu", oracle->witness->fu}, {"fv", oracle->witness->fv}};
            } else {
                o["witness"] = nullptr;
            }
            o["agreement"] = !violation;
            j["oracle"] = std::move(o);
        }
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << vcert::emit_report(report, vcert::ReportFormat::Text);
        for (std::size_t c = 0; c < patches.size(); ++c) {
            std::cout << "patch " << cell_label(doc.grid.cell_index(c)) << ": " << vcert::to_string(patches[c].verdict)
                      << ", min epsilon " << vcert::detail::fmt6(min_epsilon(patches[c])) << "\n";
        }
        if (oracle) {
            std::cout << "oracle: " << oracle->trials << " trials, seed " << oracle->seed << ", ";
            if (oracle->witness) {
                std::cout << "collision F" << vcert::detail::fmt6(oracle->witness->u) << " = F"
                          << vcert::detail::fmt6(oracle->witness->v) << "\n";
            } else {
                std::cout << "no collision\n";
            }
            std::cout << "oracle agreement: " << (violation ? "VIOLATION" : "consistent") << "\n";
        }
    }
    return vcert::exit_code(report);
}

// Command-line front end: reads one scenario document, runs the matching
// analysis and prints a text or JSON report.
//
// Exit codes: 0 success, 2 validation error, 3 internal assertion failure.

#include "linutil/error.hpp"
#include "linutil/report.hpp"
#include "linutil/scenario.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitInternal = 3;

struct Args {
    std::string input;
    std::string format = "text";
    std::uint64_t seed = 0;
    std::optional<int> oracle;
    bool exact = false;
    std::optional<std::string> delta;
};

linutil::cli::ScenarioDocument read_document(const std::string& path) {
    if (path.empty() || path == "-") return linutil::cli::parse_scenario(std::cin);
    std::ifstream in(path);
    if (!in) throw linutil::ValidationError("cannot open input '" + path + "'");
    return linutil::cli::parse_scenario(in);
}

int run(const std::string& command, const Args& args) {
    const linutil::cli::ScenarioDocument doc = read_document(args.input);
    if (linutil::cli::command_for(doc.kind()) != command) {
        throw linutil::ValidationError("document kind '" + std::string(linutil::cli::to_string(doc.kind())) +
                                       "' does not match command '" + command + "' (use '" +
                                       std::string(linutil::cli::command_for(doc.kind())) + "')");
    }
    linutil::cli::RunOptions options;
    options.format = args.format == "json" ? linutil::cli::OutputFormat::Json : linutil::cli::OutputFormat::Text;
    options.seed = args.seed;
    options.oracle_resolution = args.oracle;
    options.exact = args.exact;
    if (args.delta) options.delta = linutil::parse_rational(*args.delta);

    const std::string out = linutil::cli::render(linutil::cli::run_command(doc, options), options.format);
    std::cout << out;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Expected utility with state-dependent linear utility functions"};
    app.require_subcommand(1);

    Args args;
    const std::vector<std::pair<std::string, std::string>> commands{
        {"eval", "evaluate a PORA: E, Eu, CE, risk premium, attitude"},
        {"dominance", "first-order stochastic dominance between two PORAs"},
        {"spread", "mean-preserving spread and increasing-concave checks"},
        {"insure", "insurance models and the optimal monopolist contract"},
        {"almost", "Almost Linear utility: events and breakpoint risk attitudes"},
        {"ambiguity", "MIN-PORA and min-expected utility"},
        {"verify", "run the stochastic-order verifiers over a probability grid"},
    };
    for (const auto& [name, help] : commands) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("--input", args.input, "scenario file (default: stdin)");
        sub->add_option("--format", args.format, "report format")->check(CLI::IsMember({"text", "json"}));
        sub->add_option("--seed", args.seed, "seed for randomized operations");
        sub->add_option("--oracle", args.oracle, "grid resolution for the insurance oracle cross-check")
            ->check(CLI::Range(2, 100000));
        sub->add_flag("--exact", args.exact, "force the exact rational backend");
        sub->add_option("--delta", args.delta, "perturbation size at almost-linear breakpoints");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitValidation;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    try {
        return run(command, args);
    } catch (const linutil::InternalError& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternal;
    } catch (const linutil::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const linutil::PreconditionError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
}

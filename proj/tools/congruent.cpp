// congruent: decide congruent numbers constructively via Heegner points.

#include "congruent/cli.hpp"

#include "CLI11.hpp"

#include <iostream>
#include <string>

namespace {

void add_verify_flags(CLI::App* cmd, congruent::cli::Config& cfg, std::string& scale) {
    cmd->add_option("--digits", cfg.verify.digits, "Working precision in decimal digits")->check(CLI::Range(30u, 100000u));
    cmd->add_option("--terms", cfg.verify.terms, "Number of q-expansion terms (default: from the tail bound)")
        ->check(CLI::Range(std::int64_t{16}, std::int64_t{1} << 40));
    cmd->add_option("--disc", cfg.verify.discriminant, "Use this Heegner discriminant D < 0");
    cmd->add_flag("--double-first", cfg.verify.double_first, "Always build the triangle from 2P");
    cmd->add_option("--lattice-scale", scale, "Scale applied to the Heegner sum, as p/q (default 1)");
    cmd->add_option("--cache", cfg.cache_path, "Coefficient cache file");
    cmd->add_flag("--json", cfg.json, "Print the certificate as JSON");
    cmd->add_flag("--force", cfg.verify.force_attempt, "Run even when the root number is +1");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Constructive congruent number verification via Heegner points"};
    app.require_subcommand(1);

    congruent::cli::Config cfg;
    std::string scale = "1";
    std::int64_t n = 0;
    std::int64_t limit = 0;
    std::string cache;

    auto* verify = app.add_subcommand("verify", "Decide whether n is congruent and print a certificate");
    verify->add_option("n", n, "Square-free positive integer")->required();
    add_verify_flags(verify, cfg, scale);

    auto* triangle = app.add_subcommand("triangle", "Print a rational right triangle of area n");
    triangle->add_option("n", n, "Square-free positive integer")->required();
    add_verify_flags(triangle, cfg, scale);

    auto* coeffs = app.add_subcommand("coeffs", "Compute or extend the L-series coefficient cache");
    coeffs->add_option("n", n, "Square-free positive integer")->required();
    coeffs->add_option("--limit", limit, "Largest m")->required();
    coeffs->add_option("--cache", cache, "Cache file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : congruent::cli::kUsageError;
    }

    try {
        cfg.verify.lattice_scale = congruent::Rational::parse(scale);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return congruent::cli::kUsageError;
    }

    if (*verify) return congruent::cli::cmd_verify(n, cfg, std::cout, std::cerr);
    if (*triangle) return congruent::cli::cmd_triangle(n, cfg, std::cout, std::cerr);
    return congruent::cli::cmd_coeffs(n, limit, cache, std::cerr);
}

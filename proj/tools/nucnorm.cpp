#include <iostream>

#include <CLI11.hpp>

#include "nucnorm/commands.hpp"

namespace cli = nucnorm::cli;

int main(int argc, char** argv)
{
    CLI::App app{"nucnorm: randomized estimation of singular values, nuclear and "
                 "Schatten-p norms"};
    app.require_subcommand(1);

    cli::EstimateOptions est;
    auto* estimate = app.add_subcommand("estimate", "estimate the spectrum of a matrix file");
    estimate->add_option("input", est.input, "RNNM matrix file")->required();
    estimate->add_option("--b", est.block_size, "block size")->capture_default_str()->check(CLI::PositiveNumber);
    estimate->add_option("--q", est.power_iters, "power iterations")->capture_default_str();
    estimate->add_option("--seed", est.seed, "sketch seed")->capture_default_str();
    estimate->add_option("--threshold", est.threshold, "early-stop threshold, 0 disables")
        ->capture_default_str()->check(CLI::NonNegativeNumber);
    estimate->add_option("--p", est.schatten, "Schatten-p norms to report (p >= 1)")->delimiter(',');
    estimate->add_flag("--bound,!--no-bound", est.bound, "accumulate the error bound")->capture_default_str();
    estimate->add_option("--out", est.out, "values CSV");

    cli::OracleOptions orc;
    auto* oracle = app.add_subcommand("oracle", "exact singular values (one-sided Jacobi)");
    oracle->add_option("input", orc.input, "RNNM matrix file")->required();
    oracle->add_option("--out", orc.out, "values CSV");

    cli::GenOptions gen;
    auto* generate = app.add_subcommand("gen", "write a test matrix");
    generate->add_option("kind", gen.kind, "sshape | bie | spectrum")
        ->required()->check(CLI::IsMember({"sshape", "bie", "spectrum"}));
    generate->add_option("output", gen.output, "output RNNM file")->required();
    generate->add_option("--n", gen.n, "columns (sshape, bie)");
    generate->add_option("--m", gen.m, "rows (default: square)");
    generate->add_option("--seed", gen.seed, "seed")->capture_default_str();
    generate->add_option("--spec", gen.spec, "CSV of target singular values (spectrum)");

    cli::CompareOptions cmp;
    auto* compare = app.add_subcommand("compare", "per-index relative error against the oracle");
    compare->add_option("input", cmp.input, "RNNM matrix file")->required();
    compare->add_option("--b", cmp.block_size, "block size")->capture_default_str()->check(CLI::PositiveNumber);
    compare->add_option("--q", cmp.power_iters, "power iterations")->capture_default_str();
    compare->add_option("--seed", cmp.seed, "sketch seed")->capture_default_str();
    compare->add_option("--out", cmp.out, "comparison CSV");

    cli::BenchOptions bch;
    auto* bench = app.add_subcommand("bench", "time randNN against the exact oracle");
    bench->add_option("--sizes", bch.sizes, "matrix sizes")->required()->delimiter(',');
    bench->add_option("--b", bch.block_size, "block size")->capture_default_str()->check(CLI::PositiveNumber);
    bench->add_option("--q", bch.power_iters, "power iterations")->capture_default_str();
    bench->add_option("--reps", bch.reps, "repetitions (median reported)")
        ->capture_default_str()->check(CLI::PositiveNumber);
    bench->add_option("--seed", bch.seed, "base seed")->capture_default_str();
    bench->add_option("--out", bch.out, "timing CSV");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e)
    {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : cli::exit_usage;
    }

    return cli::guarded(
        [&] {
            if (*estimate) return cli::run_estimate(est, std::cout, std::cerr);
            if (*oracle) return cli::run_oracle(orc, std::cout, std::cerr);
            if (*generate) return cli::run_gen(gen, std::cout, std::cerr);
            if (*compare) return cli::run_compare(cmp, std::cout, std::cerr);
            return cli::run_bench(bch, std::cout, std::cerr);
        },
        std::cerr);
}

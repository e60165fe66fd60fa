#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli_support.hpp"
#include "nucnorm/commands.hpp"
#include "test_support.hpp"

using namespace nucnorm;
using namespace nucnorm::testing;
namespace fs = std::filesystem;

namespace
{

class CommandTest : public ::testing::Test
{
protected:
    void SetUp() override
    {
        dir_ = fs::temp_directory_path() /
               ("nucnorm_cmd_" + std::string(::testing::UnitTest::GetInstance()
                                                 ->current_test_info()
                                                 ->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    fs::path path(const std::string& name) const { return dir_ / name; }

    fs::path write(const std::string& name, const DenseMatrix& a) const
    {
        write_matrix_file(path(name), a);
        return path(name);
    }

    // run a command in-process with CSV going to `csv`; returns the report
    template <typename Fn>
    std::map<std::string, std::string> run(Fn&& fn)
    {
        std::ostringstream out, log;
        const int rc = cli::guarded([&] { return fn(out, log); }, log);
        EXPECT_EQ(rc, cli::exit_ok) << log.str();
        return parse_report(out.str());
    }

    std::vector<double> oracle_values(const fs::path& input)
    {
        cli::OracleOptions o{input, path("oracle.csv")};
        run([&](auto& out, auto& log) { return cli::run_oracle(o, out, log); });
        return read_values_csv(path("oracle.csv"));
    }

    fs::path dir_;
};

} // namespace

TEST_F(CommandTest, EstimateIdentity)
{
    const auto input = write("eye.rnnm", DenseMatrix::identity(100));
    cli::EstimateOptions o;
    o.input      = input;
    o.block_size = 10;
    o.schatten   = {2.0};
    o.out        = path("est.csv");
    const auto report = run([&](auto& out, auto& log) { return cli::run_estimate(o, out, log); });
    EXPECT_NEAR(std::stod(report.at("nuclear_norm")), 100.0, 1e-9);
    EXPECT_NEAR(std::stod(report.at("schatten_2")), 10.0, 1e-9);
    EXPECT_EQ(report.at("blocks_processed"), "10");
    EXPECT_EQ(report.at("terminated_early"), "false");
    EXPECT_GE(std::stod(report.at("t_randnn_sec")), 0.0);
    EXPECT_EQ(read_values_csv(path("est.csv")).size(), 100u);
}

TEST_F(CommandTest, SinglePanelEstimateEqualsOracleBytes)
{
    const auto input = write("a.rnnm", random_matrix(40, 30, 2));
    cli::EstimateOptions o;
    o.input      = input;
    o.block_size = 64;
    o.out        = path("est.csv");
    run([&](auto& out, auto& log) { return cli::run_estimate(o, out, log); });
    oracle_values(input);
    EXPECT_EQ(slurp(path("est.csv")), slurp(path("oracle.csv")));
}

TEST_F(CommandTest, EstimateBoundAgainstOracle)
{
    const auto input = write("s.rnnm", prescribed_spectrum_matrix(s_shaped_spectrum(400), 400, 1));
    cli::EstimateOptions o;
    o.input      = input;
    o.block_size = 32;
    o.power_iters = 2;
    o.seed       = 3;
    o.out        = path("est.csv");
    const auto report = run([&](auto& out, auto& log) { return cli::run_estimate(o, out, log); });
    auto est          = read_values_csv(path("est.csv"));
    const auto truth  = oracle_values(input);
    std::sort(est.begin(), est.end(), std::greater<>());
    double lhs = 0.0;
    for (std::size_t i = 0; i < truth.size(); ++i)
    {
        lhs += (truth[i] - est[i]) * (truth[i] - est[i]);
    }
    EXPECT_LE(std::sqrt(lhs), std::stod(report.at("bound_fro")) + 1e-10);
}

TEST_F(CommandTest, OracleDiagonalAndOrthogonal)
{
    const auto d = write("d.rnnm", DenseMatrix::diagonal(std::vector<double>{3, 2, 1}, 3, 3));
    oracle_values(d);
    EXPECT_EQ(slurp(path("oracle.csv")), "3\n2\n1\n");

    const auto q = write("q.rnnm", prescribed_spectrum_matrix({std::vector<double>(6, 1.0)}, 6, 9));
    for (double v : oracle_values(q))
    {
        EXPECT_NEAR(v, 1.0, 1e-13);
    }
}

TEST_F(CommandTest, OracleFrobeniusIdentity)
{
    const auto a     = random_matrix(25, 18, 4);
    const auto input = write("a.rnnm", a);
    double ss        = 0.0;
    for (double v : oracle_values(input))
    {
        ss += v * v;
    }
    const double fro = frobenius_norm(a.view());
    EXPECT_NEAR(ss / (fro * fro), 1.0, 1e-12);
}

TEST_F(CommandTest, GenSShapeRoundTrip)
{
    cli::GenOptions g;
    g.kind   = "sshape";
    g.n      = 50;
    g.seed   = 8;
    g.output = path("s.rnnm");
    run([&](auto& out, auto& log) { return cli::run_gen(g, out, log); });
    const auto values = oracle_values(g.output);
    const auto spec   = s_shaped_spectrum(50);
    for (std::size_t i = 0; i < 50; ++i)
    {
        // relative 1e-11, with the n*eps normwise floor for the 1e-6 plateau
        EXPECT_NEAR(values[i], spec.values[i], 1e-11 * spec.values[i] + 50 * 2.2e-16);
    }
}

TEST_F(CommandTest, GenSpectrumRankOneAndDeterministic)
{
    std::ofstream(path("spec.csv")) << "1\n0\n0\n";
    cli::GenOptions g;
    g.kind   = "spectrum";
    g.spec   = path("spec.csv");
    g.m      = 5;
    g.seed   = 4;
    g.output = path("r1.rnnm");
    run([&](auto& out, auto& log) { return cli::run_gen(g, out, log); });
    const auto values = oracle_values(g.output);
    ASSERT_EQ(values.size(), 3u);
    EXPECT_NEAR(values[0], 1.0, 1e-14);
    EXPECT_LT(values[1], 1e-15);

    const std::string first = slurp(g.output);
    run([&](auto& out, auto& log) { return cli::run_gen(g, out, log); });
    EXPECT_EQ(slurp(g.output), first);
}

TEST_F(CommandTest, GenBie)
{
    cli::GenOptions g;
    g.kind   = "bie";
    g.n      = 64;
    g.output = path("bie.rnnm");
    const auto report = run([&](auto& out, auto& log) { return cli::run_gen(g, out, log); });
    EXPECT_EQ(report.at("rows"), "64");
    EXPECT_EQ(read_matrix_file(g.output), bie_single_layer_matrix(64));
}

TEST_F(CommandTest, CompareExactAndIdentity)
{
    const auto input = write("a.rnnm", random_matrix(30, 30, 5));
    cli::CompareOptions c;
    c.input      = input;
    c.block_size = 30;
    c.out        = path("cmp.csv");
    auto report  = run([&](auto& out, auto& log) { return cli::run_compare(c, out, log); });
    EXPECT_EQ(report.at("bound_holds"), "true");
    EXPECT_LE(std::stod(report.at("max_rel_err")), 1e-11);

    std::ifstream csv(path("cmp.csv"));
    std::string header;
    std::getline(csv, header);
    EXPECT_EQ(header, "i,sigma_true,sigma_est,rel_err");

    c.input      = write("eye.rnnm", DenseMatrix::identity(40));
    c.block_size = 8;
    report       = run([&](auto& out, auto& log) { return cli::run_compare(c, out, log); });
    EXPECT_LE(std::stod(report.at("max_rel_err")), 1e-12);
    EXPECT_EQ(report.at("bound_holds"), "true");
}

TEST_F(CommandTest, CompareRelativeErrorDecreasesWithPowerIterations)
{
    // 20-seed study; the oracle is computed once and paired exactly as the
    // compare command pairs it
    const auto a      = prescribed_spectrum_matrix(s_shaped_spectrum(400), 400, 6);
    const auto truth  = svd_values(a.view());
    double mean[3]    = {0, 0, 0};
    for (std::size_t q = 0; q < 3; ++q)
    {
        for (std::uint64_t seed = 0; seed < 20; ++seed)
        {
            RandNNConfig cfg;
            cfg.block_size  = 32;
            cfg.power_iters = q;
            cfg.seed        = seed;
            auto est        = rand_nn(a.view(), cfg).values;
            std::sort(est.begin(), est.end(), std::greater<>());
            for (std::size_t i = 0; i < truth.size(); ++i)
            {
                mean[q] += cli::detail::relative_error(truth[i], est[i]) / (20.0 * 400.0);
            }
        }
    }
    EXPECT_LT(mean[1], mean[0]);
    EXPECT_LT(mean[2], mean[1]);

    // the command reports the same statistic
    cli::CompareOptions c;
    c.input       = write("s.rnnm", a);
    c.block_size  = 32;
    c.power_iters = 2;
    c.seed        = 0;
    c.out         = path("cmp.csv");
    const auto report = run([&](auto& out, auto& log) { return cli::run_compare(c, out, log); });
    RandNNConfig cfg;
    cfg.block_size = 32;
    auto est       = rand_nn(a.view(), cfg).values;
    std::sort(est.begin(), est.end(), std::greater<>());
    double one = 0.0;
    for (std::size_t i = 0; i < truth.size(); ++i)
    {
        one += cli::detail::relative_error(truth[i], est[i]) / 400.0;
    }
    EXPECT_NEAR(std::stod(report.at("mean_rel_err")), one, 1e-15);
}

TEST_F(CommandTest, BenchRowsAndTimings)
{
    cli::BenchOptions b;
    b.sizes      = {40, 70};
    b.block_size = 16;
    b.reps       = 3;
    const auto rows = cli::bench(b);
    ASSERT_EQ(rows.size(), 2u);
    for (const auto& r : rows)
    {
        EXPECT_GT(r.t_randnn, 0.0);
        EXPECT_GT(r.t_oracle, 0.0);
    }
    EXPECT_EQ(rows[1].n, 70u);

    std::ostringstream out, log;
    EXPECT_EQ(cli::run_bench(b, out, log), cli::exit_ok);
    const std::string csv = out.str();
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "n,t_randnn_sec,t_oracle_sec,speedup");
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
}

TEST_F(CommandTest, ExitCodes)
{
    std::ostringstream out, log;
    cli::EstimateOptions missing;
    missing.input = path("missing.rnnm");
    EXPECT_EQ(cli::guarded([&] { return cli::run_estimate(missing, out, log); }, log),
              cli::exit_io);

    std::ofstream(path("junk.rnnm")) << "not a matrix";
    cli::OracleOptions junk{path("junk.rnnm"), {}};
    EXPECT_EQ(cli::guarded([&] { return cli::run_oracle(junk, out, log); }, log), cli::exit_io);

    cli::GenOptions bad;
    bad.kind   = "bie";
    bad.n      = 15;
    bad.output = path("x.rnnm");
    EXPECT_EQ(cli::guarded([&] { return cli::run_gen(bad, out, log); }, log), cli::exit_usage);

    EXPECT_EQ(cli::guarded([]() -> int { throw convergence_error("stuck"); }, log),
              cli::exit_convergence);
    EXPECT_NE(log.str().find("stuck"), std::string::npos);
}

// ---------------------------------------------------------- the real binary

TEST_F(CommandTest, BinaryIsDeterministicAndScriptable)
{
    const std::string bin = NUCNORM_CLI_PATH;
    auto r = run_cli(bin, "gen sshape '" + path("s.rnnm").string() + "' --n 120 --seed 3", dir_);
    ASSERT_EQ(r.exit_code, 0);
    EXPECT_EQ(parse_report(r.out).at("cols"), "120");

    const std::string est = "estimate '" + path("s.rnnm").string() +
                            "' --b 16 --q 1 --seed 5 --p 1,2.5 --out ";
    r = run_cli(bin, est + "'" + path("v1.csv").string() + "'", dir_);
    ASSERT_EQ(r.exit_code, 0);
    const auto report = parse_report(r.out);
    EXPECT_EQ(report.at("b"), "16");
    EXPECT_EQ(report.at("schatten_1"), report.at("nuclear_norm"));
    EXPECT_TRUE(report.count("schatten_2.5"));
    ASSERT_EQ(run_cli(bin, est + "'" + path("v2.csv").string() + "'", dir_).exit_code, 0);
    EXPECT_EQ(slurp(path("v1.csv")), slurp(path("v2.csv")));

    // without --out the values go to stdout
    r = run_cli(bin, "oracle '" + path("s.rnnm").string() + "'", dir_);
    ASSERT_EQ(r.exit_code, 0);
    EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 120);

    EXPECT_EQ(run_cli(bin, "estimate '" + path("s.rnnm").string() + "' --b 0", dir_).exit_code, 2);
    EXPECT_EQ(run_cli(bin, "estimate '" + path("s.rnnm").string() + "' --bogus", dir_).exit_code, 2);
    EXPECT_EQ(run_cli(bin, "estimate '" + path("s.rnnm").string() + "' --p 0.5", dir_).exit_code, 2);
    EXPECT_EQ(run_cli(bin, "gen torus '" + path("t.rnnm").string() + "' --n 4", dir_).exit_code, 2);
    EXPECT_EQ(run_cli(bin, "oracle '" + path("nope.rnnm").string() + "'", dir_).exit_code, 3);
    EXPECT_EQ(run_cli(bin, "", dir_).exit_code, 2);
}

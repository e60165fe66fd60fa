#ifndef NUCNORM_COMMANDS_HPP
#define NUCNORM_COMMANDS_HPP

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "nucnorm/dense_matrix.hpp"
#include "nucnorm/errors.hpp"
#include "nucnorm/kernels.hpp"
#include "nucnorm/matrix_io.hpp"
#include "nucnorm/randnn.hpp"
#include "nucnorm/svd.hpp"
#include "nucnorm/testmat.hpp"

//
// Implementations of the command-line subcommands. Each command writes its
// data (CSV) to --out when given, otherwise to `out`; the key=value run report
// goes to `out` when the data went to a file and to `log` otherwise.
//
namespace nucnorm::cli
{

enum exit_code : int
{
    exit_ok          = 0,
    exit_failure     = 1,
    exit_usage       = 2,
    exit_io          = 3,
    exit_convergence = 4,
};

struct EstimateOptions
{
    std::filesystem::path input;
    std::size_t block_size = 64;
    std::size_t power_iters = 2;
    std::uint64_t seed = 0;
    double threshold = 0.0;
    std::vector<double> schatten;
    bool bound = true;
    std::optional<std::filesystem::path> out;
};

struct OracleOptions
{
    std::filesystem::path input;
    std::optional<std::filesystem::path> out;
};

struct GenOptions
{
    std::string kind; // sshape | bie | spectrum
    std::filesystem::path output;
    std::size_t n = 0;
    std::optional<std::size_t> m;
    std::uint64_t seed = 0;
    std::optional<std::filesystem::path> spec;
};

struct CompareOptions
{
    std::filesystem::path input;
    std::size_t block_size = 64;
    std::size_t power_iters = 2;
    std::uint64_t seed = 0;
    std::optional<std::filesystem::path> out;
};

struct BenchOptions
{
    std::vector<std::size_t> sizes;
    std::size_t block_size = 64;
    std::size_t power_iters = 1;
    std::size_t reps = 1;
    std::uint64_t seed = 0;
    std::optional<std::filesystem::path> out;
};

// Ordered key=value lines.
class Report
{
public:
    template <typename T>
    void add(std::string key, const T& value)
    {
        if constexpr (std::is_same_v<T, double>)
        {
            lines_.emplace_back(std::move(key), format_real(value));
        }
        else if constexpr (std::is_same_v<T, bool>)
        {
            lines_.emplace_back(std::move(key), value ? "true" : "false");
        }
        else if constexpr (std::is_arithmetic_v<T>)
        {
            lines_.emplace_back(std::move(key), std::to_string(value));
        }
        else
        {
            lines_.emplace_back(std::move(key), std::string(value));
        }
    }

    void print(std::ostream& os) const
    {
        for (const auto& [k, v] : lines_)
        {
            os << k << '=' << v << '\n';
        }
    }

private:
    std::vector<std::pair<std::string, std::string>> lines_;
};

namespace detail
{

using clock = std::chrono::steady_clock;

inline double seconds_since(clock::time_point t0)
{
    return std::chrono::duration<double>(clock::now() - t0).count();
}

// Route CSV to a file or to `out`, and the report to whichever stream is free.
template <typename WriteCsv>
void emit(const std::optional<std::filesystem::path>& path, std::ostream& out,
          std::ostream& log, Report& report, WriteCsv&& write_csv)
{
    if (path)
    {
        std::ofstream f(*path, std::ios::trunc);
        write_csv(f);
        f.flush();
        if (!f)
        {
            throw io_error("cannot write " + path->string());
        }
        report.add("csv", path->string());
        report.print(out);
    }
    else
    {
        write_csv(out);
        report.print(log);
    }
}

inline double relative_error(double truth, double estimate)
{
    const double diff = std::abs(truth - estimate);
    if (truth == 0.0)
    {
        return diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    }
    return diff / std::abs(truth);
}

} // namespace detail

inline int run_estimate(const EstimateOptions& opt, std::ostream& out, std::ostream& log)
{
    const auto t0 = detail::clock::now();
    const DenseMatrix a = read_matrix_file(opt.input);
    const double t_read = detail::seconds_since(t0);

    RandNNConfig cfg;
    cfg.block_size           = opt.block_size;
    cfg.power_iters          = opt.power_iters;
    cfg.seed                 = opt.seed;
    cfg.early_stop_threshold = opt.threshold;
    cfg.compute_bound        = opt.bound;
    for (double p : opt.schatten)
    {
        if (std::isnan(p) || p < 1.0)
        {
            throw contract_error("--p values must be >= 1");
        }
    }

    const auto t1 = detail::clock::now();
    const SpectrumEstimate est = rand_nn(a.view(), cfg);
    const double t_randnn = detail::seconds_since(t1);

    Report r;
    r.add("command", "estimate");
    r.add("input", opt.input.string());
    r.add("rows", a.rows());
    r.add("cols", a.cols());
    r.add("b", cfg.block_size);
    r.add("q", cfg.power_iters);
    r.add("seed", cfg.seed);
    r.add("threshold", cfg.early_stop_threshold);
    r.add("values_count", est.values.size());
    r.add("nuclear_norm", nuclear_norm(est));
    for (double p : opt.schatten)
    {
        r.add("schatten_" + format_real(p), schatten_p(est, p));
    }
    r.add("bound_fro", est.bound_fro ? format_real(*est.bound_fro) : std::string("none"));
    r.add("bound_comparable", est.bound_comparable());
    r.add("blocks_processed", est.blocks_processed);
    r.add("terminated_early", est.terminated_early);
    r.add("t_read_sec", t_read);
    r.add("t_randnn_sec", t_randnn);
    r.add("t_total_sec", detail::seconds_since(t0));
    detail::emit(opt.out, out, log, r,
                 [&](std::ostream& os) { write_values_csv(os, est.values); });
    return exit_ok;
}

inline int run_oracle(const OracleOptions& opt, std::ostream& out, std::ostream& log)
{
    const auto t0 = detail::clock::now();
    const DenseMatrix a = read_matrix_file(opt.input);
    const double t_read = detail::seconds_since(t0);
    const auto t1 = detail::clock::now();
    const std::vector<double> sv = svd_values(a.view());
    const double t_svd = detail::seconds_since(t1);

    double nuc = 0.0;
    for (double s : sv)
    {
        nuc += s;
    }
    Report r;
    r.add("command", "oracle");
    r.add("input", opt.input.string());
    r.add("rows", a.rows());
    r.add("cols", a.cols());
    r.add("values_count", sv.size());
    r.add("nuclear_norm", nuc);
    r.add("spectral_norm", sv.front());
    r.add("frobenius_norm", frobenius_norm(a.view()));
    r.add("t_read_sec", t_read);
    r.add("t_oracle_sec", t_svd);
    detail::emit(opt.out, out, log, r, [&](std::ostream& os) { write_values_csv(os, sv); });
    return exit_ok;
}

inline int run_gen(const GenOptions& opt, std::ostream& out, std::ostream&)
{
    DenseMatrix a;
    if (opt.kind == "sshape")
    {
        a = prescribed_spectrum_matrix(s_shaped_spectrum(opt.n), opt.m.value_or(opt.n),
                                       opt.seed);
    }
    else if (opt.kind == "bie")
    {
        if (opt.m && *opt.m != opt.n)
        {
            throw contract_error("gen bie: the matrix is square, --m must equal --n");
        }
        a = bie_single_layer_matrix(opt.n);
    }
    else if (opt.kind == "spectrum")
    {
        if (!opt.spec)
        {
            throw contract_error("gen spectrum: --spec <csv> is required");
        }
        SpectrumSpec spec{read_values_csv(*opt.spec)};
        if (spec.values.empty())
        {
            throw contract_error("gen spectrum: spec file is empty");
        }
        a = prescribed_spectrum_matrix(spec, opt.m.value_or(spec.values.size()), opt.seed);
    }
    else
    {
        throw contract_error("gen: unknown kind '" + opt.kind +
                             "' (expected sshape, bie or spectrum)");
    }
    write_matrix_file(opt.output, a);

    Report r;
    r.add("command", "gen");
    r.add("kind", opt.kind);
    r.add("rows", a.rows());
    r.add("cols", a.cols());
    r.add("seed", opt.seed);
    r.add("output", opt.output.string());
    r.print(out);
    return exit_ok;
}

inline int run_compare(const CompareOptions& opt, std::ostream& out, std::ostream& log)
{
    const DenseMatrix a = read_matrix_file(opt.input);
    RandNNConfig cfg;
    cfg.block_size  = opt.block_size;
    cfg.power_iters = opt.power_iters;
    cfg.seed        = opt.seed;

    const auto t0 = detail::clock::now();
    const SpectrumEstimate est = rand_nn(a.view(), cfg);
    const double t_randnn = detail::seconds_since(t0);
    const auto t1 = detail::clock::now();
    const std::vector<double> truth = svd_values(a.view());
    const double t_oracle = detail::seconds_since(t1);

    std::vector<double> sorted = est.values;
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    const BoundCheck check = error_bound_check(truth, est);

    std::vector<double> rel(truth.size());
    double nuc_true = 0.0, nuc_est = 0.0, rel_sum = 0.0, rel_max = 0.0;
    for (std::size_t i = 0; i < truth.size(); ++i)
    {
        rel[i] = detail::relative_error(truth[i], sorted[i]);
        nuc_true += truth[i];
        nuc_est += est.values[i];
        rel_sum += rel[i];
        rel_max = std::max(rel_max, rel[i]);
    }

    Report r;
    r.add("command", "compare");
    r.add("input", opt.input.string());
    r.add("rows", a.rows());
    r.add("cols", a.cols());
    r.add("b", cfg.block_size);
    r.add("q", cfg.power_iters);
    r.add("seed", cfg.seed);
    r.add("nuclear_norm_true", nuc_true);
    r.add("nuclear_norm_est", nuc_est);
    r.add("nuclear_norm_rel_err", detail::relative_error(nuc_true, nuc_est));
    r.add("mean_rel_err", rel_sum / double(truth.size()));
    r.add("max_rel_err", rel_max);
    r.add("lhs", check.lhs);
    r.add("bound_fro", *est.bound_fro);
    r.add("bound_holds", check.holds);
    r.add("t_randnn_sec", t_randnn);
    r.add("t_oracle_sec", t_oracle);
    detail::emit(opt.out, out, log, r, [&](std::ostream& os) {
        os << "i,sigma_true,sigma_est,rel_err\n";
        for (std::size_t i = 0; i < truth.size(); ++i)
        {
            os << (i + 1) << ',' << format_real(truth[i]) << ',' << format_real(sorted[i])
               << ',' << format_real(rel[i]) << '\n';
        }
    });
    return exit_ok;
}

struct BenchRow
{
    std::size_t n;
    double t_randnn;
    double t_oracle;
};

inline double median(std::vector<double> v)
{
    std::sort(v.begin(), v.end());
    const std::size_t h = v.size() / 2;
    return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

//
// Median wall-clock of rand_nn and of the exact Jacobi oracle on n x n
// Gaussian matrices; repetition r uses seed + r for both the matrix and the
// sketch.
//
inline std::vector<BenchRow> bench(const BenchOptions& opt)
{
    if (opt.sizes.empty() || opt.reps < 1)
    {
        throw contract_error("bench: need at least one size and reps >= 1");
    }
    std::vector<BenchRow> rows;
    for (std::size_t n : opt.sizes)
    {
        if (n < 1)
        {
            throw contract_error("bench: sizes must be >= 1");
        }
        std::vector<double> tr, to;
        for (std::size_t rep = 0; rep < opt.reps; ++rep)
        {
            SeededRng rng(opt.seed + rep);
            const DenseMatrix a = gaussian_matrix(n, n, rng);
            RandNNConfig cfg;
            cfg.block_size  = opt.block_size;
            cfg.power_iters = opt.power_iters;
            cfg.seed        = opt.seed + rep;

            auto t0 = detail::clock::now();
            const auto est = rand_nn(a.view(), cfg);
            tr.push_back(detail::seconds_since(t0));

            t0 = detail::clock::now();
            const auto sv = svd_values(a.view());
            to.push_back(detail::seconds_since(t0));
            if (est.values.size() != sv.size())
            {
                throw contract_error("bench: size mismatch");
            }
        }
        rows.push_back({n, median(tr), median(to)});
    }
    return rows;
}

inline int run_bench(const BenchOptions& opt, std::ostream& out, std::ostream& log)
{
    const auto rows = bench(opt);
    Report r;
    r.add("command", "bench");
    r.add("b", opt.block_size);
    r.add("q", opt.power_iters);
    r.add("reps", opt.reps);
    r.add("threads", kernel_threads());
    detail::emit(opt.out, out, log, r, [&](std::ostream& os) {
        os << "n,t_randnn_sec,t_oracle_sec,speedup\n";
        for (const auto& row : rows)
        {
            os << row.n << ',' << format_real(row.t_randnn) << ','
               << format_real(row.t_oracle) << ','
               << format_real(row.t_oracle / row.t_randnn) << '\n';
        }
    });
    return exit_ok;
}

//
// Runs a command and maps failures onto exit codes: 2 usage / contract,
// 3 I/O, 4 non-convergence.
//
template <typename Fn>
int guarded(Fn&& fn, std::ostream& log)
{
    try
    {
        return fn();
    }
    catch (const io_error& e)
    {
        log << "error: " << e.what() << '\n';
        return exit_io;
    }
    catch (const convergence_error& e)
    {
        log << "error: " << e.what() << '\n';
        return exit_convergence;
    }
    catch (const contract_error& e)
    {
        log << "error: " << e.what() << '\n';
        return exit_usage;
    }
    catch (const std::exception& e)
    {
        log << "error: " << e.what() << '\n';
        return exit_failure;
    }
}

} // namespace nucnorm::cli

#endif // NUCNORM_COMMANDS_HPP

#include "gwot/experiment.hpp"

#include "gwot/baselines.hpp"
#include "gwot/gw_core.hpp"
#include "gwot/instance_io.hpp"
#include "gwot/ipg.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <tuple>

namespace gwot {

namespace {

const std::vector<std::string> kKnownMethods{"ipg", "cg", "epgd", "ppa", "bapg"};

// row order of the summary tables
int method_rank(const std::string& method)
{
    static const std::vector<std::string> order{"bapg", "cg", "epgd", "ppa", "ipg"};
    const auto it = std::find(order.begin(), order.end(), method);
    return it == order.end() ? static_cast<int>(order.size()) : static_cast<int>(it - order.begin());
}

std::vector<std::string> split(const std::string& line, char sep)
{
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, sep)) out.push_back(field);
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

double parse_double(const std::string& s, const std::string& what)
{
    try {
        size_t used = 0;
        const double x = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return x;
    } catch (const std::exception&) {
        throw std::runtime_error("results file: cannot parse " + what + " from '" + s + "'");
    }
}

} // namespace

void RunConfig::validate() const
{
    if (sizes.empty()) throw std::invalid_argument("RunConfig: sizes must be nonempty");
    if (seeds < 1) throw std::invalid_argument("RunConfig: seeds must be at least 1");
    for (Index n : sizes) {
        if (n < 2) throw std::invalid_argument("RunConfig: every size must be at least 2");
    }
    if (methods.empty()) throw std::invalid_argument("RunConfig: no methods selected");
    for (const auto& m : methods) {
        if (std::find(kKnownMethods.begin(), kKnownMethods.end(), m) == kKnownMethods.end()) {
            throw std::invalid_argument("RunConfig: unknown method '" + m + "'");
        }
    }
    for (double e : epsilons) {
        if (!(e > 0.0)) throw std::invalid_argument("RunConfig: epsilons must be positive");
    }
    if (jobs < 1) throw std::invalid_argument("RunConfig: jobs must be at least 1");
    if (max_iter < 1) throw std::invalid_argument("RunConfig: max_iter must be at least 1");
    if (!(tol >= 0.0)) throw std::invalid_argument("RunConfig: tol must be nonnegative");
    if (!(p_edge > 0.0 && p_edge < 1.0)) throw std::invalid_argument("RunConfig: p_edge must lie in (0, 1)");
    if (!(eta >= 0.0 && eta < 1.0)) throw std::invalid_argument("RunConfig: eta must lie in [0, 1)");
    if (std::find(methods.begin(), methods.end(), "ipg") != methods.end()) {
        IpgConfig ipg;
        ipg.gamma_factor = gamma_factor;
        ipg.alpha = alpha;
        ipg.validate();
    }
}

bool is_entropic(const std::string& method)
{
    return method == "epgd" || method == "ppa" || method == "bapg";
}

std::vector<RunCell> expand_grid(const RunConfig& config)
{
    std::vector<RunCell> cells;
    for (Index n : config.sizes) {
        for (int seed = 0; seed < config.seeds; ++seed) {
            for (const auto& method : config.methods) {
                if (is_entropic(method)) {
                    for (double eps : config.epsilons) cells.push_back({method, eps, n, seed});
                } else {
                    cells.push_back({method, std::nullopt, n, seed});
                }
            }
        }
    }
    return cells;
}

std::uint64_t instance_seed(const RunConfig& config, Index n, int seed)
{
    return derive_seed(derive_seed(config.base_seed, static_cast<std::uint64_t>(n)),
                       static_cast<std::uint64_t>(seed));
}

std::filesystem::path instance_path(const RunConfig& config, Index n, int seed)
{
    return config.output_dir / "instances" /
           ("n" + std::to_string(n) + "_s" + std::to_string(seed) + ".gwai");
}

AlignmentInstance obtain_instance(const RunConfig& config, Index n, int seed)
{
    const auto path = instance_path(config, n, seed);
    if (std::filesystem::exists(path)) {
        AlignmentInstance inst = load_instance(path);
        if (inst.size() == n && inst.seed == instance_seed(config, n, seed) && inst.p_edge == config.p_edge &&
            inst.eta == config.eta) {
            return inst;
        }
    }
    return make_instance(n, config.p_edge, config.eta, instance_seed(config, n, seed));
}

SolveOutcome run_method(const RunCell& cell, const AlignmentInstance& inst, const RunConfig& config,
                        bool record_shadow)
{
    const Coupling pi0 = inst.p.weights() * inst.q.weights().transpose();
    SolveOutcome out;
    const auto start = std::chrono::steady_clock::now();
    try {
        if (cell.method == "ipg") {
            IpgConfig cfg;
            cfg.gamma_factor = config.gamma_factor;
            cfg.alpha = config.alpha;
            cfg.max_iter = config.max_iter;
            cfg.rel_tol = config.tol;
            cfg.record_shadow = record_shadow;
            IpgResult res = ipg_solve(inst.c1, inst.c2, inst.p, inst.q, pi0, cfg);
            out.coupling = std::move(res.coupling);
            out.trace = std::move(res.trace);
            out.failed = out.trace.status == SolverStatus::inner_failure;
            if (out.failed) out.error = "projection solve hit its iteration cap";
        } else if (cell.method == "cg") {
            BaselineResult res = cg_solve(inst.c1, inst.c2, inst.p, inst.q, pi0, config.max_iter, config.tol);
            out.coupling = std::move(res.coupling);
            out.trace = std::move(res.trace);
        } else {
            EntropicConfig cfg;
            cfg.epsilon = cell.epsilon.value();
            cfg.max_iter = config.max_iter;
            cfg.outer_tol = config.tol;
            BaselineResult res = cell.method == "epgd"  ? epgd_solve(inst.c1, inst.c2, inst.p, inst.q, pi0, cfg)
                                 : cell.method == "ppa" ? ppa_solve(inst.c1, inst.c2, inst.p, inst.q, pi0, cfg)
                                                        : bapg_solve(inst.c1, inst.c2, inst.p, inst.q, pi0, cfg);
            out.coupling = std::move(res.coupling);
            out.trace = std::move(res.trace);
            out.failed = out.trace.status == SolverStatus::failed;
            if (out.failed) out.error = "non-finite transport plan";
        }
    } catch (const std::exception& e) {
        out.failed = true;
        out.error = e.what();
    }
    out.time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
}

std::vector<ResultRow> run_sweep(const RunConfig& config, const RunObserver& observer, bool record_shadow)
{
    config.validate();
    const std::vector<RunCell> cells = expand_grid(config);
    std::vector<ResultRow> rows(cells.size());

    // instances are shared by all methods of one (n, seed)
    std::map<std::pair<Index, int>, AlignmentInstance> instances;
    for (Index n : config.sizes) {
        for (int seed = 0; seed < config.seeds; ++seed) {
            instances.emplace(std::make_pair(n, seed), obtain_instance(config, n, seed));
        }
    }

    std::mutex lock;
    std::atomic<size_t> next{0};
    auto worker = [&]() {
        for (size_t idx = next++; idx < cells.size(); idx = next++) {
            const RunCell& cell = cells[idx];
            const AlignmentInstance& inst = instances.at({cell.n, cell.seed});
            const SolveOutcome out = run_method(cell, inst, config, record_shadow);
            ResultRow row;
            row.cell = cell;
            row.failed = out.failed;
            if (!out.failed) {
                row.metrics = evaluate(out.coupling, inst, out.time_s, out.trace.iterations(), "ok");
            } else {
                row.metrics.status = "failed";
            }
            std::lock_guard<std::mutex> guard(lock);
            rows[idx] = std::move(row);
            if (observer) observer(cell, inst, out);
        }
    };

    const int workers = std::min<int>(config.jobs, static_cast<int>(std::max<size_t>(cells.size(), 1)));
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    return rows;
}

std::string format_double(double x)
{
    // shortest representation that reads back to the same double
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

std::string format_result_row(const ResultRow& row, bool omit_timing)
{
    std::string line = row.cell.method + "," + (row.cell.epsilon ? format_double(*row.cell.epsilon) : "") + "," +
                       std::to_string(row.cell.n) + "," + std::to_string(row.cell.seed) + ",";
    if (row.failed) return line + ",,,,,,failed";
    const auto& m = row.metrics;
    line += format_double(m.loss) + "," + format_double(m.sparsity) + "," + format_double(m.feasibility) + "," +
            format_double(m.accuracy) + "," + format_double(omit_timing ? 0.0 : m.time_s) + "," +
            std::to_string(m.iters) + ",ok";
    return line;
}

void write_results(const std::vector<ResultRow>& rows, const std::filesystem::path& path, bool omit_timing)
{
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << kResultsHeader << '\n';
    for (const auto& row : rows) out << format_result_row(row, omit_timing) << '\n';
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::vector<ResultRow> read_results(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string() + " for reading");
    std::string line;
    if (!std::getline(in, line) || line != kResultsHeader) {
        throw std::runtime_error(path.string() + ": missing or unexpected header");
    }
    std::vector<ResultRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = split(line, ',');
        if (f.size() != 11) throw std::runtime_error(path.string() + ": expected 11 fields in '" + line + "'");
        ResultRow row;
        row.cell.method = f[0];
        if (!f[1].empty()) row.cell.epsilon = parse_double(f[1], "epsilon");
        row.cell.n = static_cast<Index>(parse_double(f[2], "n"));
        row.cell.seed = static_cast<int>(parse_double(f[3], "seed"));
        row.failed = f[10] != "ok";
        row.metrics.status = f[10];
        if (!row.failed) {
            row.metrics.loss = parse_double(f[4], "loss");
            row.metrics.sparsity = parse_double(f[5], "sparsity");
            row.metrics.feasibility = parse_double(f[6], "feasibility");
            row.metrics.accuracy = parse_double(f[7], "accuracy");
            row.metrics.time_s = parse_double(f[8], "time_s");
            row.metrics.iters = static_cast<long>(parse_double(f[9], "iters"));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<std::filesystem::path> cmd_generate(const RunConfig& config)
{
    config.validate();
    const auto dir = config.output_dir / "instances";
    std::filesystem::create_directories(dir);
    std::vector<std::filesystem::path> written;
    for (Index n : config.sizes) {
        for (int seed = 0; seed < config.seeds; ++seed) {
            const auto path = instance_path(config, n, seed);
            save_instance(make_instance(n, config.p_edge, config.eta, instance_seed(config, n, seed)), path);
            written.push_back(path);
        }
    }
    return written;
}

std::filesystem::path cmd_run(const RunConfig& config)
{
    const auto rows = run_sweep(config);
    const auto path = config.output_dir / "results.csv";
    write_results(rows, path, config.omit_timing);
    return path;
}

std::vector<SummaryRow> summarize(const std::vector<ResultRow>& rows)
{
    using Key = std::tuple<Index, int, std::string, double, bool>;
    struct Acc {
        SummaryRow row;
        double loss = 0, sparsity = 0, feasibility = 0, accuracy = 0, time_s = 0, iters = 0;
    };
    std::map<Key, Acc> groups;
    for (const auto& r : rows) {
        const Key key{r.cell.n, method_rank(r.cell.method), r.cell.method, r.cell.epsilon.value_or(0.0),
                      r.cell.epsilon.has_value()};
        Acc& acc = groups[key];
        acc.row.method = r.cell.method;
        acc.row.epsilon = r.cell.epsilon;
        acc.row.n = r.cell.n;
        if (r.failed) {
            ++acc.row.failed;
            continue;
        }
        ++acc.row.ok;
        acc.loss += r.metrics.loss;
        acc.sparsity += r.metrics.sparsity;
        acc.feasibility += r.metrics.feasibility;
        acc.accuracy += r.metrics.accuracy;
        acc.time_s += r.metrics.time_s;
        acc.iters += static_cast<double>(r.metrics.iters);
    }
    std::vector<SummaryRow> out;
    for (auto& [key, acc] : groups) {
        SummaryRow row = acc.row;
        if (row.ok > 0) {
            const double k = static_cast<double>(row.ok);
            row.loss = acc.loss / k;
            row.sparsity = acc.sparsity / k;
            row.feasibility = acc.feasibility / k;
            row.accuracy = acc.accuracy / k;
            row.time_s = acc.time_s / k;
            row.iters = acc.iters / k;
        }
        out.push_back(std::move(row));
    }
    return out;
}

std::string render_summary_csv(const std::vector<SummaryRow>& rows)
{
    std::ostringstream out;
    out << "method,epsilon,n,ok,failed,loss,sparsity,feasibility,accuracy,time_s,iters\n";
    auto cell = [](const std::optional<double>& x) { return x ? format_double(*x) : std::string("-"); };
    for (const auto& r : rows) {
        out << r.method << ',' << (r.epsilon ? format_double(*r.epsilon) : "-") << ',' << r.n << ',' << r.ok << ','
            << r.failed << ',' << cell(r.loss) << ',' << cell(r.sparsity) << ',' << cell(r.feasibility) << ','
            << cell(r.accuracy) << ',' << cell(r.time_s) << ',' << cell(r.iters) << '\n';
    }
    return out.str();
}

std::string render_summary_text(const std::vector<SummaryRow>& rows)
{
    std::ostringstream out;
    char buf[256];
    Index current_n = -1;
    for (const auto& r : rows) {
        if (r.n != current_n) {
            current_n = r.n;
            if (out.tellp() > 0) out << '\n';
            out << "n = " << r.n << '\n';
            std::snprintf(buf, sizeof buf, "%-6s %-8s %10s %9s %12s %9s %9s %5s/%-5s\n", "method", "eps", "loss",
                          "sparsity", "feasibility", "accuracy", "time_s", "ok", "fail");
            out << buf;
        }
        char eps[32] = "-";
        if (r.epsilon) std::snprintf(eps, sizeof eps, "%g", *r.epsilon);
        if (!r.loss) {
            std::snprintf(buf, sizeof buf, "%-6s %-8s %10s %9s %12s %9s %9s %5ld/%-5ld\n", r.method.c_str(),
                          eps, "-", "-", "-", "-", "-", r.ok, r.failed);
        } else {
            std::snprintf(buf, sizeof buf, "%-6s %-8s %10.2e %9.2f %12.2e %9.2f %9.2f %5ld/%-5ld\n",
                          r.method.c_str(), eps, *r.loss, *r.sparsity, *r.feasibility, *r.accuracy,
                          *r.time_s, r.ok, r.failed);
        }
        out << buf;
    }
    return out.str();
}

std::vector<SummaryRow> cmd_summarize(const std::filesystem::path& results_file)
{
    const auto rows = summarize(read_results(results_file));
    const auto dir = results_file.parent_path();
    for (const auto& [name, text] : {std::pair{"summary.csv", render_summary_csv(rows)},
                                     std::pair{"summary.txt", render_summary_text(rows)}}) {
        std::ofstream out(dir / name, std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + (dir / name).string() + " for writing");
        out << text;
    }
    return rows;
}

} // namespace gwot

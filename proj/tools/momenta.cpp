// Command-line front end: bound / batch / export / realize.
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "momenta/bounds.hpp"
#include "momenta/report_io.hpp"

namespace {

constexpr int kExitParse = 2;
constexpr int kExitSolver = 3;
constexpr int kExitOutputDir = 4;
constexpr int kExitDimensionCap = 5;

struct RunConfig {
    std::string input = "-";
    std::string format = "graph6";
    int k_max = 2;
    int nu_max = 0;
    std::string cuts = "auto";
    int sample = 200;
    std::uint64_t seed = 0;
    std::string out = "json";
    int jobs = 1;
    double gap_tol = 1e-7;
    std::string export_dir = ".";
};

struct InputGraph {
    std::string id;
    std::string text;  // raw input line / document
    std::optional<momenta::CommutationGraph> graph;
    std::string parse_error;
};

std::string read_all(const std::string& path) {
    if (path == "-") {
        std::ostringstream buf;
        buf << std::cin.rdbuf();
        return buf.str();
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) throw momenta::ParseError("cannot open input: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::vector<InputGraph> load_graphs(const RunConfig& cfg) {
    const std::string text = read_all(cfg.input);
    std::vector<InputGraph> graphs;
    if (cfg.format == "weighted") {
        InputGraph ig;
        ig.id = "w1";
        ig.text = text;
        try {
            ig.graph = momenta::parse_weighted_edgelist(text);
        } catch (const std::exception& ex) {
            ig.parse_error = ex.what();
        }
        graphs.push_back(std::move(ig));
        return graphs;
    }
    std::istringstream in(text);
    std::string line;
    int ordinal = 0;
    while (std::getline(in, line)) {
        std::string trimmed = line;
        while (!trimmed.empty() && (trimmed.back() == '\r' || trimmed.back() == ' ')) trimmed.pop_back();
        if (trimmed.empty()) continue;
        InputGraph ig;
        ig.id = "g" + std::to_string(++ordinal);
        ig.text = trimmed;
        try {
            ig.graph = momenta::parse_graph6(trimmed);
        } catch (const std::exception& ex) {
            ig.parse_error = ex.what();
        }
        graphs.push_back(std::move(ig));
    }
    return graphs;
}

momenta::BoundOptions bound_options(const RunConfig& cfg) {
    momenta::BoundOptions opts;
    opts.k_max = cfg.k_max;
    opts.nu_max = cfg.nu_max;
    opts.cuts = cfg.cuts == "on"    ? momenta::BoundOptions::Cuts::on
                : cfg.cuts == "off" ? momenta::BoundOptions::Cuts::off
                                    : momenta::BoundOptions::Cuts::autodetect;
    opts.sample_count = cfg.sample;
    opts.seed = cfg.seed;
    opts.solve.gap_tol = cfg.gap_tol;
    if (const char* backend = std::getenv("MOMENTA_SOLVER"); backend && *backend)
        opts.solve.backend = backend;
    return opts;
}

int check_backend(const momenta::BoundOptions& opts) {
    if (!momenta::solver_registry().count(opts.solve.backend)) {
        std::cerr << "unknown solver backend: " << opts.solve.backend << "\n";
        return kExitSolver;
    }
    return 0;
}

std::vector<momenta::BoundReport> run_reports(const std::vector<InputGraph>& graphs,
                                              const momenta::BoundOptions& opts, int jobs) {
    std::vector<momenta::BoundReport> reports(graphs.size());
    std::atomic<size_t> next{0};
    auto worker = [&] {
        for (size_t i = next.fetch_add(1); i < graphs.size(); i = next.fetch_add(1)) {
            if (!graphs[i].graph) continue;
            reports[i] = momenta::full_report(*graphs[i].graph, opts);
            reports[i].id = graphs[i].id;
            reports[i].input = graphs[i].text;
        }
    };
    const int width = std::max(1, std::min<int>(jobs, static_cast<int>(graphs.size())));
    std::vector<std::thread> pool;
    for (int t = 1; t < width; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    return reports;
}

bool report_has_solver_failure(const momenta::BoundReport& r) {
    for (const auto& [k, lv] : r.theta)
        if (!lv.error.empty() || lv.status == momenta::SolveStatus::solver_failure) return true;
    return false;
}

std::string csv_header(int k_max, int nu_max) {
    std::ostringstream out;
    out << "id,n,alpha";
    for (int k = 1; k <= k_max; ++k) out << ",theta" << k;
    for (int l = 1; l <= nu_max; ++l) out << ",nu" << l;
    out << ",certified,errors";
    return out.str();
}

std::string csv_row(const InputGraph& ig, const momenta::BoundReport* rep, const RunConfig& cfg) {
    std::ostringstream out, errs;
    auto note = [&errs](const std::string& msg) {
        if (errs.tellp() > 0) errs << "; ";
        std::string clean = msg;
        for (char& c : clean)
            if (c == ',' || c == '\n') c = ';';
        errs << clean;
    };
    out << ig.id << ",";
    if (rep) {
        out << rep->n << ",";
        if (rep->alpha_available) out << rep->alpha.size;
    } else {
        out << ",";
        note("parse: " + ig.parse_error);
    }
    auto level = [&](const std::map<int, momenta::LevelResult>& m, const char* tag, int lvl) {
        out << ",";
        if (!rep) return;
        auto it = m.find(lvl);
        if (it == m.end()) return;
        if (it->second.error.empty())
            out << momenta::detail::num4(it->second.value);
        else
            note(std::string(tag) + std::to_string(lvl) + ": " + it->second.error);
    };
    for (int k = 1; k <= cfg.k_max; ++k) level(rep ? rep->theta : std::map<int, momenta::LevelResult>{}, "theta", k);
    for (int l = 1; l <= cfg.nu_max; ++l) level(rep ? rep->nu : std::map<int, momenta::LevelResult>{}, "nu", l);
    out << "," << (rep ? rep->certified : "") << "," << errs.str();
    return out.str();
}

int cmd_bound(const RunConfig& cfg) {
    const auto opts = bound_options(cfg);
    if (int rc = check_backend(opts)) return rc;
    std::vector<InputGraph> graphs;
    try {
        graphs = load_graphs(cfg);
    } catch (const std::exception& ex) {
        std::cerr << ex.what() << "\n";
        return kExitParse;
    }
    if (graphs.empty()) {
        std::cerr << "no graphs parsed\n";
        return kExitParse;
    }
    for (const auto& ig : graphs)
        if (!ig.graph) {
            std::cerr << ig.id << ": " << ig.parse_error << "\n";
            return kExitParse;
        }
    const auto reports = run_reports(graphs, opts, cfg.jobs);
    if (cfg.out == "csv") std::cout << csv_header(cfg.k_max, cfg.nu_max) << "\n";
    bool solver_trouble = false;
    for (size_t i = 0; i < reports.size(); ++i) {
        if (cfg.out == "json")
            std::cout << momenta::report_json(reports[i]) << "\n";
        else if (cfg.out == "csv")
            std::cout << csv_row(graphs[i], &reports[i], cfg) << "\n";
        else
            std::cout << momenta::report_text(reports[i]);
        solver_trouble = solver_trouble || report_has_solver_failure(reports[i]);
    }
    return solver_trouble ? kExitSolver : 0;
}

int cmd_batch(const RunConfig& cfg) {
    const auto opts = bound_options(cfg);
    if (int rc = check_backend(opts)) return rc;
    std::vector<InputGraph> graphs;
    try {
        graphs = load_graphs(cfg);
    } catch (const std::exception& ex) {
        std::cerr << ex.what() << "\n";
        return kExitParse;
    }
    if (graphs.empty()) {
        std::cerr << "no graphs parsed\n";
        return kExitParse;
    }
    const auto reports = run_reports(graphs, opts, cfg.jobs);
    std::cout << csv_header(cfg.k_max, cfg.nu_max) << "\n";
    for (size_t i = 0; i < graphs.size(); ++i)
        std::cout << csv_row(graphs[i], graphs[i].graph ? &reports[i] : nullptr, cfg) << "\n";
    return 0;
}

int cmd_export(const RunConfig& cfg) {
    std::vector<InputGraph> graphs;
    try {
        graphs = load_graphs(cfg);
    } catch (const std::exception& ex) {
        std::cerr << ex.what() << "\n";
        return kExitParse;
    }
    if (graphs.empty()) {
        std::cerr << "no graphs parsed\n";
        return kExitParse;
    }
    namespace fs = std::filesystem;
    if (!fs::is_directory(cfg.export_dir)) {
        std::cerr << "invalid output directory: " << cfg.export_dir << "\n";
        return kExitOutputDir;
    }
    for (const auto& ig : graphs) {
        if (!ig.graph) {
            std::cerr << ig.id << ": " << ig.parse_error << "\n";
            return kExitParse;
        }
        for (int k = 1; k <= std::min(cfg.k_max, std::max(1, ig.graph->size())); ++k) {
            const auto problem =
                momenta::assemble(momenta::build_layout(momenta::build_theta_index_set(*ig.graph, k), *ig.graph));
            const fs::path file = fs::path(cfg.export_dir) / (ig.id + "_k" + std::to_string(k) + ".dat-s");
            std::ofstream out(file, std::ios::binary);
            if (!out) {
                std::cerr << "cannot write " << file.string() << "\n";
                return kExitOutputDir;
            }
            out << momenta::export_sdpa(problem);
            std::cout << file.string() << "\n";
        }
    }
    return 0;
}

int cmd_realize(const RunConfig& cfg) {
    std::vector<InputGraph> graphs;
    try {
        graphs = load_graphs(cfg);
    } catch (const std::exception& ex) {
        std::cerr << ex.what() << "\n";
        return kExitParse;
    }
    if (graphs.empty()) {
        std::cerr << "no graphs parsed\n";
        return kExitParse;
    }
    for (const auto& ig : graphs) {
        if (!ig.graph) {
            std::cerr << ig.id << ": " << ig.parse_error << "\n";
            return kExitParse;
        }
        try {
            const auto strings = momenta::realize_graph(*ig.graph);
            std::cout << ig.id << ": " << strings.size() << " strings on " << ig.graph->size()
                      << " sites, d=" << ig.graph->phase_order() << "\n";
            for (const auto& s : strings) std::cout << "  " << momenta::render_weyl_string(s) << "\n";
            std::cout << "  pairwise commutation phases verified against the graph\n";
            if (cfg.sample > 0 && !strings.empty()) {
                momenta::IndependenceCertificate alpha;
                if (ig.graph->size() <= 64) alpha = momenta::independence_number(*ig.graph);
                (void)strings[0].dim();  // raises the cap error before sampling
                const auto lb = momenta::sample_lower_bound(*ig.graph, alpha, cfg.sample, cfg.seed);
                std::cout << "  best sampled objective = " << momenta::detail::num17(lb.sampled)
                          << "\n";
                std::cout << "  see-saw polished value = " << momenta::detail::num17(lb.polished)
                          << "\n";
            }
        } catch (const momenta::DimensionCapError& ex) {
            std::cerr << ig.id << ": " << ex.what()
                      << " (try fewer samples or a smaller graph)\n";
            return kExitDimensionCap;
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"momenta: dimension-free bounds for additive uncertainty relations"};
    app.require_subcommand(1);

    RunConfig cfg;
    auto add_common = [&cfg](CLI::App* sub) {
        sub->add_option("input", cfg.input, "input file (default: stdin)");
        sub->add_option("--format", cfg.format, "graph6 | weighted")
            ->check(CLI::IsMember({"graph6", "weighted"}));
        sub->add_option("--k", cfg.k_max, "top level of the theta hierarchy");
        sub->add_option("--nu-level", cfg.nu_max, "top level of the full hierarchy (0 = off)");
        sub->add_option("--cuts", cfg.cuts, "odd-hole cuts: on | off | auto")
            ->check(CLI::IsMember({"on", "off", "auto"}));
        sub->add_option("--sample", cfg.sample, "Haar samples for the lower bound");
        sub->add_option("--seed", cfg.seed, "sampling seed");
        sub->add_option("--out", cfg.out, "json | csv | text")
            ->check(CLI::IsMember({"json", "csv", "text"}));
        sub->add_option("--jobs", cfg.jobs, "parallel workers for multi-graph runs");
        sub->add_option("--gap-tol", cfg.gap_tol, "solver duality-gap tolerance");
        sub->add_option("--export-dir", cfg.export_dir, "directory for exported files");
    };

    CLI::App* bound = app.add_subcommand("bound", "certified bound report per graph");
    add_common(bound);
    CLI::App* batch = app.add_subcommand("batch", "CSV table over a one-graph-per-line corpus");
    add_common(batch);
    CLI::App* exp = app.add_subcommand("export", "write SDPA sparse files per graph and level");
    add_common(exp);
    CLI::App* realize = app.add_subcommand("realize", "operator realization and sampling report");
    add_common(realize);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    // realize only samples when asked to
    if (realize->parsed() && realize->get_option("--sample")->count() == 0) cfg.sample = 0;

    try {
        if (bound->parsed()) return cmd_bound(cfg);
        if (batch->parsed()) return cmd_batch(cfg);
        if (exp->parsed()) return cmd_export(cfg);
        if (realize->parsed()) return cmd_realize(cfg);
    } catch (const std::exception& ex) {
        std::cerr << ex.what() << "\n";
        return kExitSolver;
    }
    return 0;
}

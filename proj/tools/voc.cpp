// Command-line front end: alpha filtrations, diagrams, volume optimal
// cycles, persistence trees and the local JSON service.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "voc/alpha.hpp"
#include "voc/io.hpp"
#include "voc/service.hpp"
#include "voc/session.hpp"

namespace {

enum Exit { ok = 0, internal = 1, input = 2, unsupported = 3, numerical = 4 };

enum class Level { error, warn, info, debug };

struct Logger {
    Level level = Level::warn;
    void operator()(Level l, const std::string& msg) const {
        static const char* names[] = {"error", "warn", "info", "debug"};
        if (l <= level) std::cerr << "[" << names[static_cast<int>(l)] << "] " << msg << '\n';
    }
};

Logger logger;

struct PairArgs {
    std::optional<voc::Index> death;
    std::optional<voc::Index> birth;
    voc::PairQuery query() const { return {death, birth}; }
};

void add_pair_options(CLI::App* cmd, PairArgs& args) {
    auto* d = cmd->add_option("--death", args.death, "death index of the pair");
    auto* b = cmd->add_option("--birth", args.birth, "birth index of an essential class");
    d->excludes(b);
}

void print_counts(std::ostream& out, const voc::Filtration& f) {
    static const char* names[] = {"vertices", "edges", "triangles", "tetrahedra"};
    const auto counts = f.counts_by_dim();
    for (std::size_t q = 0; q < counts.size(); ++q) out << (q ? " " : "") << names[q] << ' ' << counts[q];
    out << '\n';
}

int run(CLI::App& app, int argc, char** argv);

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Persistent homology with volume optimal cycles"};
    return run(app, argc, argv);
}

namespace {

int run(CLI::App& app, int argc, char** argv) {
    app.require_subcommand(1);
    std::string level = "warn";
    app.add_option("--log-level", level, "error, warn, info or debug")
        ->check(CLI::IsMember({"error", "warn", "info", "debug"}));

    // build-alpha
    auto* build = app.add_subcommand("build-alpha", "alpha filtration of a point file, written as FILT v1");
    std::string points_path, out_path;
    bool weighted = false;
    std::optional<std::uint64_t> jitter_seed;
    build->add_option("points", points_path, "point file: one 'x1 .. xn [weight]' per line")->required();
    build->add_option("-o,--output", out_path, "output FILT file (default: standard output)");
    build->add_flag("--weighted", weighted, "last column holds the weight");
    build->add_option("--jitter", jitter_seed, "perturb points by at most 1e-6 with this seed");

    // pd
    auto* pd = app.add_subcommand("pd", "persistence diagram as JSON");
    std::string filt_path;
    int degree = 0;
    std::string engine = "auto";
    bool all_pairs = false;
    pd->add_option("filtration", filt_path, "FILT v1 file")->required();
    pd->add_option("-q,--degree", degree, "homology degree")->required()->check(CLI::NonNegativeNumber);
    pd->add_option("--engine", engine, "auto, reduction or mergetree")
        ->check(CLI::IsMember({"auto", "reduction", "mergetree"}));
    pd->add_flag("--all", all_pairs, "keep zero-persistence pairs");

    // volume
    auto* vol = app.add_subcommand("volume", "volume optimal cycle of a finite pair as JSON");
    PairArgs vol_pair;
    std::optional<double> radius;
    double eps = 1e-6;
    bool unbounded = false;
    std::string off_path;
    vol->add_option("filtration", filt_path, "FILT v1 file")->required();
    add_pair_options(vol, vol_pair);
    vol->add_option("--radius", radius, "initial locality radius")->check(CLI::PositiveNumber);
    vol->add_option("--eps", eps, "margin for the birth-coefficient constraint")->check(CLI::PositiveNumber);
    vol->add_flag("--unbounded", unbounded, "no locality restriction");
    vol->add_option("--off", off_path, "also write the cycle (or volume) as an OFF mesh");

    // tree
    auto* tree = app.add_subcommand("tree", "persistence tree of the codimension-one diagram as JSON");
    tree->add_option("filtration", filt_path, "FILT v1 file")->required();

    // oc
    auto* oc = app.add_subcommand("oc", "optimal cycle of a pair as JSON");
    PairArgs oc_pair;
    oc->add_option("filtration", filt_path, "FILT v1 file")->required();
    add_pair_options(oc, oc_pair);

    // serve
    auto* serve = app.add_subcommand("serve", "local read-only JSON service");
    int port = voc::service::default_port();
    std::string host = "127.0.0.1", ui_dir;
    serve->add_option("filtration", filt_path, "FILT v1 file")->required();
    serve->add_option("--port", port, std::string("port (default from ") + voc::service::kPortVariable + ")")
        ->check(CLI::Range(1, 65535));
    serve->add_option("--host", host, "address to bind");
    serve->add_option("--ui", ui_dir, "directory served under /ui");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return Exit::input;
    }
    logger.level = level == "error" ? Level::error : level == "info" ? Level::info : level == "debug" ? Level::debug : Level::warn;

    try {
        if (build->parsed()) {
            auto pc = voc::io::read_points(points_path, weighted);
            if (jitter_seed) pc = voc::jitter(std::move(pc), *jitter_seed);
            logger(Level::info, "building alpha filtration of " + std::to_string(pc.size()) + " points");
            const auto f = voc::build_alpha_filtration(pc);
            if (out_path.empty()) {
                voc::io::write_filtration(std::cout, f);
                print_counts(std::cerr, f);
            } else {
                voc::io::write_filtration(out_path, f);
                print_counts(std::cout, f);
            }
            return Exit::ok;
        }

        voc::Session session(voc::io::read_filtration(filt_path));
        logger(Level::info, "loaded " + std::to_string(session.filtration().size()) + " simplices");

        if (pd->parsed()) {
            const auto e = engine == "reduction" ? voc::Engine::reduction
                           : engine == "mergetree" ? voc::Engine::merge_tree
                                                   : voc::Engine::automatic;
            const auto pairs = session.diagram(degree, e, {all_pairs});
            std::cout << voc::io::diagram_json(degree, pairs).dump(2) << '\n';
        } else if (vol->parsed()) {
            const auto p = session.find_pair(vol_pair.query());
            voc::VolumeOptions opt;
            opt.radius = radius;
            opt.epsilon = eps;
            opt.unbounded = unbounded;
            const auto t0 = std::chrono::steady_clock::now();
            const auto ov = session.volume(p, opt);
            logger(Level::info, "volume LP solved in " +
                                    std::to_string(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()) +
                                    " s");
            std::cout << voc::io::volume_json(session.filtration(), ov).dump(2) << '\n';
            if (!off_path.empty()) {
                std::ofstream off(off_path);
                if (!off) throw voc::InputError("cannot write " + off_path);
                voc::io::write_off(off, session.filtration(), ov);
            }
        } else if (tree->parsed()) {
            std::cout << voc::io::json::parse(session.tree_json()).dump(2) << '\n';
        } else if (oc->parsed()) {
            std::cout << voc::io::json::parse(session.cycle_json(oc_pair.query())).dump(2) << '\n';
        } else if (serve->parsed()) {
            httplib::Server server;
            voc::service::bind(server, session, ui_dir);
            logger(Level::warn, "serving on http://" + host + ":" + std::to_string(port));
            if (!server.listen(host, port)) {
                logger(Level::error, "cannot listen on " + host + ":" + std::to_string(port));
                return Exit::input;
            }
        }
        return Exit::ok;
    } catch (const voc::UnsupportedPair& e) {
        logger(Level::error, e.what());
        return Exit::unsupported;
    } catch (const voc::ConditionViolation& e) {
        logger(Level::error, e.what());
        return Exit::unsupported;
    } catch (const voc::InputError& e) {
        logger(Level::error, e.what());
        return Exit::input;
    } catch (const voc::LookupError& e) {
        logger(Level::error, e.what());
        return Exit::input;
    } catch (const voc::NumericalFailure& e) {
        logger(Level::error, e.what());
        return Exit::numerical;
    } catch (const std::exception& e) {
        logger(Level::error, std::string("internal error: ") + e.what());
        return Exit::internal;
    }
}

}  // namespace

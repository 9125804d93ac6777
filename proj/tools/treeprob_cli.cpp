// treeprob: exact and sampled distributions of random spanning trees.
//
// Subcommands expose the library operations with JSON payloads on stdout;
// exit codes: 0 success, 1 input error, 2 resource cap exceeded, 3 internal.

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>

#include "treeprob/forest_classes.hpp"
#include "treeprob/json_io.hpp"
#include "treeprob/locus.hpp"
#include "treeprob/path_rotation.hpp"
#include "treeprob/rotations.hpp"
#include "treeprob/sampler.hpp"
#include "treeprob/shifts.hpp"
#include "treeprob/theta.hpp"

using namespace treeprob;

namespace {

Json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open " + path);
    Json j;
    in >> j;
    return j;
}

Graph load_graph(const std::string& path) { return graph_from_json(load_json_file(path)); }

std::vector<int> parse_int_list(const std::string& text) {
    Json j = Json::parse(text);
    std::vector<int> out;
    for (const auto& v : j) out.push_back(v.get<int>());
    return out;
}

std::vector<std::pair<int, int>> parse_edge_list(const std::string& text) {
    Json j = Json::parse(text);
    std::vector<std::pair<int, int>> out;
    for (const auto& e : j) out.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
    return out;
}

std::vector<Rational> parse_rational_list(const std::string& text) {
    return rational_list_from_json(Json::parse(text));
}

void emit(const Json& payload, const std::string& format) {
    if (format == "csv") {
        if (payload.is_object()) {
            for (const auto& [k, v] : payload.items()) {
                if (v.is_string()) std::cout << k << "," << v.get<std::string>() << "\n";
                else std::cout << k << "," << v.dump() << "\n";
            }
            return;
        }
    }
    std::cout << payload.dump(2) << "\n";
}

struct GlobalOpts {
    std::string output = "json";
    long max_trees = 20000;
    unsigned long max_perms = 3628800UL;
    std::uint64_t max_folded = 2000000ULL;
    int threads = 1;

    // Environment overrides; explicit flags win.
    void load_env() {
        if (const char* v = std::getenv("TREEPROB_MAX_TREES")) max_trees = std::atol(v);
        if (const char* v = std::getenv("TREEPROB_MAX_PERMS")) max_perms = std::stoul(v);
        if (const char* v = std::getenv("TREEPROB_MAX_FOLDED")) max_folded = std::stoull(v);
        if (const char* v = std::getenv("TREEPROB_THREADS")) threads = std::atoi(v);
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"random spanning tree distributions: exact MST probabilities, shifted and general product measures, word maps, and the permutation locus"};
    app.require_subcommand(1);
    GlobalOpts opts;
    opts.load_env();
    app.add_option("--output", opts.output, "output format: json or csv")->check(CLI::IsMember({"json", "csv"}));
    app.add_option("--max-trees", opts.max_trees, "cap on spanning tree enumeration");
    app.add_option("--max-perms", opts.max_perms, "cap on permutation sums (external formula)");
    app.add_option("--max-folded", opts.max_folded, "cap on folded permutation enumeration");
    app.add_option("--threads", opts.threads, "worker threads for sampling");

    Json payload;

    // mst-prob
    std::string g_path, tree_text, method = "internal";
    auto* mst_prob = app.add_subcommand("mst-prob", "exact MST0 probability of one spanning tree");
    mst_prob->add_option("--graph", g_path, "graph JSON file")->required();
    mst_prob->add_option("--tree", tree_text, "tree as JSON edge-index list")->required();
    mst_prob->add_option("--method", method, "internal|external|kruskal|rd|brute")
        ->check(CLI::IsMember({"internal", "external", "kruskal", "rd", "brute"}));
    mst_prob->callback([&]() {
        Graph g = load_graph(g_path);
        MstExact engine(g);
        std::vector<int> tree = parse_int_list(tree_text);
        Rational p;
        if (method == "internal") p = engine.mst_prob_internal(tree);
        else if (method == "external") p = engine.mst_prob_external(tree, opts.max_perms);
        else if (method == "kruskal") p = engine.kruskal_forest_prob(tree);
        else if (method == "rd") p = engine.reverse_delete_prob(tree);
        else p = engine.brute_force_mst_prob(tree);
        payload["prob"] = format_rational(p);
    });

    // mst-dist / ust
    std::string gd_path;
    auto* mst_dist = app.add_subcommand("mst-dist", "exact MST0 distribution over all spanning trees");
    mst_dist->add_option("--graph", gd_path, "graph JSON file")->required();
    mst_dist->callback([&]() {
        MstExact engine(load_graph(gd_path));
        payload = tree_distribution_to_json(engine.mst_distribution(opts.max_trees));
    });

    std::string ust_path;
    auto* ust = app.add_subcommand("ust", "uniform spanning tree distribution");
    ust->add_option("--graph", ust_path, "graph JSON file")->required();
    ust->callback([&]() {
        Graph g = load_graph(ust_path);
        payload["count"] = spanning_tree_count(g).get_str();
        payload["dist"] = tree_distribution_to_json(uniform_tree_distribution(g));
    });

    // path-rotate
    int pr_n = 0;
    std::string pr_left, pr_path, pr_right;
    auto* path_rotate = app.add_subcommand("path-rotate", "exact probabilities of a path-rotation tree pair in K_n");
    path_rotate->add_option("--n", pr_n, "ambient complete graph size")->required();
    path_rotate->add_option("--L", pr_left, "left tree edges, JSON pairs (attached at the first path vertex)")->required();
    path_rotate->add_option("--path", pr_path, "rotated path vertices, JSON list")->required();
    path_rotate->add_option("--R", pr_right, "right tree edges, JSON pairs (attached at the last path vertex)")->required();
    path_rotate->callback([&]() {
        PathRotationInstance inst;
        inst.n = pr_n;
        inst.path = parse_int_list(pr_path);
        inst.left_edges = parse_edge_list(pr_left);
        inst.right_edges = parse_edge_list(pr_right);
        auto [pt, ptp] = path_rotation_probs(inst, opts.max_folded);
        payload["pT"] = format_rational(pt);
        payload["pTprime"] = format_rational(ptp);
    });

    // rotate-check
    std::string rc_path, rc_t1, rc_t2, rc_beta;
    bool rc_sites = false;
    auto* rotate_check = app.add_subcommand("rotate-check", "cycle-expanding bijections and triangle rotation sites");
    rotate_check->add_option("--graph", rc_path, "graph JSON file")->required();
    rotate_check->add_option("--t1", rc_t1, "first tree (JSON edge-index list)");
    rotate_check->add_option("--t2", rc_t2, "second tree");
    rotate_check->add_option("--beta", rc_beta, "candidate bijection as JSON list (image per edge index)");
    rotate_check->add_flag("--sites", rc_sites, "list triangle-edge rotation sites instead");
    rotate_check->callback([&]() {
        Graph g = load_graph(rc_path);
        if (rc_sites) {
            Json sites = Json::array();
            for (const auto& site : triangle_rotation_sites(g)) {
                Json s;
                s["S"] = site.tree_more_likely;
                s["Sprime"] = site.tree_less_likely;
                s["triangle"] = site.triangle;
                sites.push_back(s);
            }
            payload["sites"] = sites;
            return;
        }
        if (rc_t1.empty() || rc_t2.empty())
            throw std::invalid_argument("need --t1 and --t2 (or --sites)");
        auto t1 = parse_int_list(rc_t1), t2 = parse_int_list(rc_t2);
        if (!rc_beta.empty()) {
            auto beta = parse_int_list(rc_beta);
            Expansion e = cycle_expanding_check(g, t1, t2, beta);
            payload["result"] = e == Expansion::Strict ? "strict" : e == Expansion::Weak ? "weak" : "not-expanding";
        } else {
            auto beta = find_cycle_expanding_bijection(g, t1, t2);
            if (!beta) {
                payload["found"] = false;
            } else {
                payload["found"] = true;
                payload["beta"] = *beta;
                Expansion e = cycle_expanding_check(g, t1, t2, *beta);
                payload["result"] = e == Expansion::Strict ? "strict" : "weak";
            }
        }
    });

    // shift-dist
    std::string sd_path, sd_shifts;
    auto* shift_dist = app.add_subcommand("shift-dist", "exact tree distribution for shifted-interval weights");
    shift_dist->add_option("--graph", sd_path, "graph JSON file")->required();
    shift_dist->add_option("--shifts", sd_shifts, "per-edge shifts, JSON list of rationals")->required();
    shift_dist->callback([&]() {
        Graph g = load_graph(sd_path);
        payload = tree_distribution_to_json(shift_tree_distribution(g, parse_rational_list(sd_shifts)));
    });

    // theta
    int th_r = 0, th_s = 0, th_t = 0;
    bool th_solve = false;
    std::string th_shifts;
    auto* theta_cmd = app.add_subcommand("theta", "theta-graph tree-type probabilities and UST shift solving");
    theta_cmd->add_option("--r", th_r)->required();
    theta_cmd->add_option("--s", th_s)->required();
    theta_cmd->add_option("--t", th_t)->required();
    theta_cmd->add_flag("--solve-ust", th_solve, "solve for shifts recovering UST");
    theta_cmd->add_option("--shifts", th_shifts, "per-path shifts (alpha, beta, gamma) as JSON rationals");
    theta_cmd->callback([&]() {
        std::optional<std::array<Rational, 3>> shifts;
        if (!th_shifts.empty()) {
            auto v = parse_rational_list(th_shifts);
            if (v.size() != 3) throw std::invalid_argument("need exactly 3 per-path shifts");
            shifts = std::array<Rational, 3>{v[0], v[1], v[2]};
        }
        ThetaReport rep = theta_report(th_r, th_s, th_t, shifts);
        payload["r"] = rep.r;
        payload["s"] = rep.s;
        payload["t"] = rep.t;
        payload["tree_count"] = rep.tree_count.get_str();
        auto triple = [](const std::array<Rational, 3>& a) {
            return Json::array({format_rational(a[0]), format_rational(a[1]), format_rational(a[2])});
        };
        payload["mst0_type"] = triple(rep.mst0_type);
        payload["mst0_tree"] = triple(rep.mst0_tree);
        payload["ust_type"] = triple(rep.ust_type);
        payload["ust_tree"] = format_rational(rep.ust_tree);
        if (rep.shifted_type) payload["shifted_type"] = triple(*rep.shifted_type);
        if (th_solve) {
            auto sol = solve_theta_ust_shift(th_r, th_s, th_t);
            payload["ust_shifts"] = triple(sol);
            Json approx = Json::array();
            for (const auto& v : sol) approx.push_back(v.get_d());
            payload["ust_shifts_approx"] = approx;
        }
    });

    // snowman
    std::string sn_path;
    auto* snowman = app.add_subcommand("snowman", "snowman-free test (no theta subgraph with unequal arms)");
    snowman->add_option("--graph", sn_path, "graph JSON file")->required();
    snowman->callback([&]() { payload["snowman_free"] = is_snowman_free(load_graph(sn_path)); });

    // word-dist
    std::string wd_word, wd_weights, wd_file;
    auto* word_dist = app.add_subcommand("word-dist", "distribution on orderings induced by a word map");
    word_dist->add_option("--word", wd_word, "word over symbols a..");
    word_dist->add_option("--weights", wd_weights, "per-position weights, JSON rationals (default all 1)");
    word_dist->add_option("--wordmap", wd_file, "word map JSON file");
    word_dist->callback([&]() {
        WordMap wm;
        if (!wd_file.empty()) wm = word_map_from_json(load_json_file(wd_file));
        else if (!wd_word.empty())
            wm = wd_weights.empty() ? WordMap::with_unit_weights(wd_word)
                                    : WordMap(wd_word, parse_rational_list(wd_weights));
        else throw std::invalid_argument("need --word or --wordmap");
        for (const auto& [sigma, p] : word_distribution(wm)) payload[sigma] = format_rational(p);
    });

    // draw-matrix
    std::string dm_word;
    auto* draw_cmd = app.add_subcommand("draw-matrix", "draw matrix of a word and its exact rank");
    draw_cmd->add_option("--word", dm_word, "word over symbols a..")->required();
    draw_cmd->callback([&]() {
        auto mat = draw_matrix(dm_word);
        Json rows = Json::array();
        for (const auto& row : mat) {
            Json r = Json::array();
            for (const auto& v : row) r.push_back(v.get_str());
            rows.push_back(r);
        }
        int m = 0;
        for (char c : dm_word) m = std::max(m, c - 'a' + 1);
        Json cols = Json::array();
        for (const auto& s : all_ordering_strings(m)) cols.push_back(s);
        payload["orderings"] = cols;
        payload["matrix"] = rows;
        payload["rank"] = rational_rank(mat);
    });

    // shorten
    std::string sh_word, sh_weights, sh_file;
    auto* shorten_cmd = app.add_subcommand("shorten", "Caratheodory shortening of a word map");
    shorten_cmd->add_option("--word", sh_word);
    shorten_cmd->add_option("--weights", sh_weights);
    shorten_cmd->add_option("--wordmap", sh_file);
    shorten_cmd->callback([&]() {
        WordMap wm;
        if (!sh_file.empty()) wm = word_map_from_json(load_json_file(sh_file));
        else if (!sh_word.empty())
            wm = sh_weights.empty() ? WordMap::with_unit_weights(sh_word)
                                    : WordMap(sh_word, parse_rational_list(sh_weights));
        else throw std::invalid_argument("need --word or --wordmap");
        payload = word_map_to_json(shorten_word_map(wm));
        payload["length"] = payload.at("word").get<std::string>().size();
    });

    // uniform-word
    std::string uw_method = "quadrature";
    int uw_m = 3;
    auto* uniform_cmd = app.add_subcommand("uniform-word", "words inducing the uniform distribution on orderings");
    uniform_cmd->add_option("--method", uw_method)->check(CLI::IsMember({"recursive", "quadrature"}));
    uniform_cmd->add_option("--m", uw_m, "number of symbols")->required();
    uniform_cmd->callback([&]() {
        if (uw_method == "recursive") {
            WordMap wm = uniform_word_recursive(uw_m);
            payload["word"] = wm.word;
            payload["length"] = wm.word.size();
            payload["exact"] = true;
        } else {
            UniformWord uw = uniform_word_quadrature(uw_m);
            payload["word"] = uw.word;
            payload["length"] = uw.word.size();
            payload["exact"] = uw.exact;
            if (uw.exact) {
                Json w = Json::array();
                for (const auto& v : uw.weights) w.push_back(format_rational(v));
                payload["weights"] = w;
            } else {
                Json w = Json::array();
                for (double v : uw.weights_approx) w.push_back(v);
                payload["weights_approx"] = w;
            }
        }
    });

    // universal-word
    int unv_m = 3;
    auto* universal_cmd = app.add_subcommand("universal-word", "cyclic word covering all word maps on m symbols");
    universal_cmd->add_option("--m", unv_m)->required();
    universal_cmd->callback([&]() {
        std::string w = universal_word(unv_m);
        payload["word"] = w;
        payload["length"] = w.size();
    });

    // dim-bound
    int db_m = 3;
    std::string db_word;
    bool db_stretch = false;
    auto* dim_cmd = app.add_subcommand("dim-bound", "dimension bounds for the permutation locus P_m");
    dim_cmd->add_option("--m", db_m)->required();
    dim_cmd->add_option("--word", db_word, "word for the rank lower bound");
    dim_cmd->add_flag("--stretch", db_stretch, "allow m = 6 (minutes) and m = 7 (resource-bound)");
    dim_cmd->callback([&]() {
        auto rep = dim_bounds_report(db_m, db_word.empty() ? std::nullopt : std::optional<std::string>(db_word),
                                     db_stretch);
        payload["upper"] = rep.upper.get_si();
        payload["lower"] = rep.lower;
        payload["word"] = rep.word;
    });

    // trybula
    std::string tx, ty, tz;
    auto* trybula_cmd = app.add_subcommand("trybula", "membership in the Trybula region T_3");
    trybula_cmd->add_option("--x", tx)->required();
    trybula_cmd->add_option("--y", ty)->required();
    trybula_cmd->add_option("--z", tz)->required();
    trybula_cmd->callback([&]() {
        payload["contains"] = trybula_contains(parse_rational(tx), parse_rational(ty), parse_rational(tz));
    });

    // lie-vector
    std::string lv_perm;
    int lv_m = 0;
    auto* lie_cmd = app.add_subcommand("lie-vector", "Lie shuffle basis vector F(pi)");
    lie_cmd->add_option("--perm", lv_perm, "cycle notation, e.g. \"(12)(34)\"")->required();
    lie_cmd->add_option("--m", lv_m, "number of symbols (default: largest symbol)");
    lie_cmd->callback([&]() {
        auto cycles = parse_cycles(lv_perm);
        int m = lv_m;
        for (const auto& c : cycles)
            for (int v : c) m = std::max(m, v);
        auto f = lie_shuffle_vector(cycles, m);
        Json terms = Json::array();
        for (const auto& [ord, coef] : f) {
            std::string s;
            for (int v : ord) s += std::to_string(v);
            terms.push_back(Json::array({s, static_cast<long>(coef.get_num().get_si())}));
        }
        payload["terms"] = terms;
    });

    // eo-check
    std::string eo_perm, eo_word, eo_weights;
    int eo_m = 0;
    auto* eo_cmd = app.add_subcommand("eo-check", "even/odd constraint: gradient check or residual under a word map");
    eo_cmd->add_option("--perm", eo_perm, "cycle notation for the event pairs")->required();
    eo_cmd->add_option("--m", eo_m, "number of symbols")->required();
    eo_cmd->add_option("--word", eo_word, "evaluate the (EO) residual under this word's distribution");
    eo_cmd->add_option("--weights", eo_weights);
    eo_cmd->callback([&]() {
        auto cycles = parse_cycles(eo_perm);
        if (eo_word.empty()) {
            auto rep = eo_gradient_check(cycles, eo_m);
            payload["proportional"] = rep.proportional;
            payload["lambda"] = format_rational(rep.lambda);
            payload["fd_error"] = rep.max_rel_fd_error;
            return;
        }
        WordMap wm = eo_weights.empty() ? WordMap::with_unit_weights(eo_word)
                                        : WordMap(eo_word, parse_rational_list(eo_weights));
        if (wm.symbol_count() != eo_m) throw std::invalid_argument("word symbol count != m");
        auto dist = word_distribution(wm);
        std::vector<Rational> vec;
        for (const auto& [sigma, p] : dist) vec.push_back(p);
        std::vector<EventPair> events;
        for (const auto& c : cycle_normal_form(cycles, eo_m))
            if (c.size() >= 2) events.push_back(events_from_cycle(c, eo_m));
        payload["residual"] = format_rational(eo_constraint_residual(vec, events));
    });

    // sample
    std::string smp_graph, smp_measure, smp_shifts;
    long smp_n = 100000;
    std::uint64_t smp_seed = 0;
    int smp_streams = 1;
    auto* sample_cmd = app.add_subcommand("sample", "seeded Monte Carlo MST sampling");
    sample_cmd->add_option("--graph", smp_graph)->required();
    sample_cmd->add_option("--measure", smp_measure, "measure JSON file");
    sample_cmd->add_option("--shifts", smp_shifts, "shift vector as JSON rationals");
    sample_cmd->add_option("--n", smp_n, "number of samples");
    sample_cmd->add_option("--seed", smp_seed);
    sample_cmd->add_option("--streams", smp_streams, "substream count (part of the reproducibility key)");
    sample_cmd->callback([&]() {
        Graph g = load_graph(smp_graph);
        ProductMeasureSpec spec;
        if (!smp_measure.empty()) spec = measure_from_json(load_json_file(smp_measure));
        else if (!smp_shifts.empty()) spec = shift_measure(parse_rational_list(smp_shifts));
        else throw std::invalid_argument("need --measure or --shifts");
        SamplerConfig cfg{smp_seed, smp_n, smp_streams, opts.threads};
        auto emp = sample_mst_empirical(g, spec, cfg);
        Json counts = Json::object();
        for (const auto& [tree, c] : emp.counts) counts[tree_key(tree)] = c;
        payload["counts"] = counts;
        payload["total"] = emp.total;
        payload["ties"] = emp.ties;
        if (emp.ties > 0) std::cerr << "warning: " << emp.ties << " weight ties broken by edge index\n";
    });

    // slide-test
    std::string sl_graph, sl_shifts, sl_grid;
    int sl_edge = 0;
    long sl_n = 100000;
    std::uint64_t sl_seed = 0;
    auto* slide_cmd = app.add_subcommand("slide-test", "empirical monotonicity under interval sliding");
    slide_cmd->add_option("--graph", sl_graph)->required();
    slide_cmd->add_option("--shifts", sl_shifts, "base shift vector")->required();
    slide_cmd->add_option("--edge", sl_edge, "edge index to slide")->required();
    slide_cmd->add_option("--grid", sl_grid, "slide amounts, JSON rationals")->required();
    slide_cmd->add_option("--n", sl_n);
    slide_cmd->add_option("--seed", sl_seed);
    slide_cmd->callback([&]() {
        Graph g = load_graph(sl_graph);
        SamplerConfig cfg{sl_seed, sl_n, 1, opts.threads};
        auto rep = slide_monotonicity_test(g, parse_rational_list(sl_shifts), sl_edge,
                                           parse_rational_list(sl_grid), cfg);
        payload["edge"] = rep.slid_edge;
        payload["pass"] = rep.pass;
        payload["verdict"] = rep.pass ? "PASS" : "FAIL";
        Json grid = Json::array();
        for (const auto& est : rep.grid) {
            Json point;
            point["t"] = format_rational(est.t);
            point["inclusion"] = est.incl;
            grid.push_back(point);
        }
        payload["grid"] = grid;
        payload["strict_edges"] = rep.strict_edges;
    });

    // emit-plot-data
    std::string fig, step = "1/25";
    auto* plot_cmd = app.add_subcommand("emit-plot-data", "CSV point clouds for figure-style outputs");
    plot_cmd->add_option("--figure", fig, "trybula | shiftahedron3")->required()->check(CLI::IsMember({"trybula", "shiftahedron3"}));
    plot_cmd->add_option("--step", step, "grid step for the trybula scan");
    bool plotted = false;
    plot_cmd->callback([&]() {
        plotted = true;
        if (fig == "trybula") {
            Rational h = parse_rational(step);
            std::cout << "x,y,z,in_region\n";
            for (Rational x = 0; x <= 1; x += h)
                for (Rational y = 0; y <= 1; y += h)
                    for (Rational z = 0; z <= 1; z += h)
                        std::cout << x.get_d() << "," << y.get_d() << "," << z.get_d() << ","
                                  << (trybula_contains(x, y, z) ? 1 : 0) << "\n";
        } else {
            // Vertices of the fundamental region of Sh(3) and their orbit.
            std::vector<std::array<Rational, 3>> base{
                {rat(1), rat(1), rat(1)},
                {rat(2, 3), rat(2, 3), rat(5, 3)},
                {rat(1, 3), rat(4, 3), rat(4, 3)},
                {rat(0), rat(1), rat(2)}};
            // Shifted so the coordinates sum to the shiftahedron constant.
            Rational offset = (shiftahedron_sum(3) - 3) / 3;
            std::set<std::array<double, 3>> pts;
            for (auto v : base) {
                std::array<Rational, 3> w{v[0] + offset, v[1] + offset, v[2] + offset};
                std::sort(w.begin(), w.end());
                do pts.insert({w[0].get_d(), w[1].get_d(), w[2].get_d()});
                while (std::next_permutation(w.begin(), w.end()));
            }
            std::cout << "s1,s2,s3\n";
            for (const auto& p : pts) std::cout << p[0] << "," << p[1] << "," << p[2] << "\n";
        }
    });

    // Global options (caps, output, threads) may follow the subcommand name.
    for (auto* sub : app.get_subcommands([](const CLI::App*) { return true; })) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);  // prints message and usage
        return code == 0 ? 0 : 1;
    } catch (const resource_cap_error& e) {
        std::cerr << "resource cap: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 1;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    }

    if (!plotted) emit(payload.is_null() ? Json::object() : payload, opts.output);
    return 0;
}

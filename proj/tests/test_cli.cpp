// Golden-output checks against the built CLI binary.

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include <json.hpp>

#include "treeprob/rational.hpp"

using Json = nlohmann::ordered_json;

namespace {

int failures = 0;

#define CLI_CHECK(cond)                                                       \
    do {                                                                      \
        if (!(cond)) {                                                        \
            ++failures;                                                       \
            std::cerr << "FAILED: " << #cond << " (line " << __LINE__ << ")\n"; \
        }                                                                     \
    } while (0)

struct RunResult {
    int exit_code = -1;
    std::string out;
};

RunResult run(const std::string& args) {
    std::string cmd = std::string(TREEPROB_CLI_PATH) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    RunResult res;
    if (!pipe) return res;
    std::array<char, 4096> buf{};
    size_t got;
    while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0) res.out.append(buf.data(), got);
    int status = pclose(pipe);
    res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return res;
}

std::string write_fixture(const std::string& name, const std::string& content) {
    std::string path = std::string("/tmp/treeprob_fixture_") + name;
    std::ofstream out(path);
    out << content;
    return path;
}

}  // namespace

int run_all();

int main() {
    try {
        return run_all();
    } catch (const std::exception& e) {
        std::cerr << "unhandled: " << e.what() << "\n";
        return 1;
    }
}

int run_all() {
    // Edge order chosen so that [0,1,4] is a diagonal-bearing spanning tree.
    std::string square = write_fixture(
        "square_diag.json", R"({"n": 4, "edges": [[0,1],[2,3],[1,2],[0,3],[0,2]]})");
    std::string k4 = write_fixture(
        "k4.json", R"({"n": 4, "edges": [[0,1],[0,2],[0,3],[1,2],[1,3],[2,3]]})");
    std::string theta212 = write_fixture(
        "theta212.json", R"({"n": 4, "edges": [[0,2],[2,1],[0,3],[3,1],[0,1]]})");

    {
        auto res = run("mst-prob --graph " + square + " --tree \"[0,1,4]\"");
        CLI_CHECK(res.exit_code == 0);
        CLI_CHECK(Json::parse(res.out).at("prob") == "2/15");
    }
    for (const std::string& method : {"external", "kruskal", "rd", "brute"}) {
        auto res = run("mst-prob --graph " + square + " --tree \"[0,1,4]\" --method " + method);
        CLI_CHECK(res.exit_code == 0);
        CLI_CHECK(Json::parse(res.out).at("prob") == "2/15");
    }
    {
        auto res = run("mst-dist --graph " + square);
        CLI_CHECK(res.exit_code == 0);
        Json dist = Json::parse(res.out);
        CLI_CHECK(dist.size() == 8);
        treeprob::Rational total = 0;
        int diag_trees = 0;
        for (const auto& [key, val] : dist.items()) {
            total += treeprob::parse_rational(val.get<std::string>());
            if (key.find('4') != std::string::npos && val == "2/15") ++diag_trees;
        }
        CLI_CHECK(total == 1);
        CLI_CHECK(diag_trees == 4);
    }
    {
        auto res = run("ust --graph " + square);
        CLI_CHECK(res.exit_code == 0);
        Json j = Json::parse(res.out);
        CLI_CHECK(j.at("count") == "8");
        CLI_CHECK(j.at("dist").size() == 8);
    }
    {
        auto res = run("path-rotate --n 5 --L \"[[4,0]]\" --path \"[0,1,2]\" --R \"[[2,3]]\" --max-folded 4000000");
        CLI_CHECK(res.exit_code == 0);
        Json j = Json::parse(res.out);
        CLI_CHECK(j.at("pT") == "127/15120");
        CLI_CHECK(j.at("pTprime") == "113/15120");
    }
    {
        auto res = run("rotate-check --graph " + square + " --sites");
        CLI_CHECK(res.exit_code == 0);
        CLI_CHECK(!Json::parse(res.out).at("sites").empty());
    }
    {
        auto res = run("shift-dist --graph " + square + " --shifts \"[0,0,0,0,1]\"");
        CLI_CHECK(res.exit_code == 0);
        Json j = Json::parse(res.out);
        CLI_CHECK(j.size() == 4);
        for (const auto& [key, val] : j.items()) CLI_CHECK(val == "1/4");
    }
    {
        auto res = run("theta --r 2 --s 1 --t 2 --solve-ust");
        CLI_CHECK(res.exit_code == 0);
        Json j = Json::parse(res.out);
        CLI_CHECK(j.at("tree_count") == "8");
        auto shifts = j.at("ust_shifts");
        treeprob::Rational eps = treeprob::parse_rational(shifts.at(1).get<std::string>()) -
                                 treeprob::parse_rational(shifts.at(0).get<std::string>());
        treeprob::Rational quintic = 6 * treeprob::pow_rational(eps, 5) -
                                     20 * treeprob::pow_rational(eps, 3) + 30 * eps - 1;
        CLI_CHECK(treeprob::rational_abs(quintic) < treeprob::rat(1, 1000000000L));
        CLI_CHECK(eps.get_d() > 0.03);
        CLI_CHECK(eps.get_d() < 0.04);
    }
    {
        auto res = run("snowman --graph " + theta212);
        CLI_CHECK(res.exit_code == 0);
        CLI_CHECK(Json::parse(res.out).at("snowman_free") == false);  // theta(2,1,2) has unequal arms
    }
    {
        auto res = run("word-dist --word abab --weights \"[2,1,1,2]\"");
        CLI_CHECK(res.exit_code == 0);
        Json j = Json::parse(res.out);
        CLI_CHECK(j.at("ab") == "8/9");
        CLI_CHECK(j.at("ba") == "1/9");
    }
    {
        auto res = run("draw-matrix --word abcabcba");
        CLI_CHECK(res.exit_code == 0);
        Json j = Json::parse(res.out);
        CLI_CHECK(j.at("rank") == 6);
        CLI_CHECK(j.at("matrix").at(0) == Json::array({"3", "3", "0", "0", "0", "0"}));
    }
    {
        auto res = run("shorten --word ababab");
        CLI_CHECK(res.exit_code == 0);
        Json j = Json::parse(res.out);
        CLI_CHECK(j.at("word").get<std::string>().size() <= 4);
    }
    {
        auto res = run("uniform-word --method quadrature --m 4");
        CLI_CHECK(res.exit_code == 0);
        Json j = Json::parse(res.out);
        CLI_CHECK(j.at("word") == "dcbabcbabdcbabcbabd");
        CLI_CHECK(j.at("length") == 19);
        CLI_CHECK(j.at("exact") == true);
    }
    {
        auto res = run("universal-word --m 3");
        CLI_CHECK(res.exit_code == 0);
        CLI_CHECK(Json::parse(res.out).at("length") == 37);
    }
    {
        auto res = run("dim-bound --m 3 --word abcabcba");
        CLI_CHECK(res.exit_code == 0);
        Json j = Json::parse(res.out);
        CLI_CHECK(j.at("upper") == 5);
        CLI_CHECK(j.at("lower") == 5);
    }
    {
        auto res = run("trybula --x 1/2 --y 1/2 --z 1/2");
        CLI_CHECK(res.exit_code == 0);
        CLI_CHECK(Json::parse(res.out).at("contains") == true);
    }
    {
        auto res = run("lie-vector --perm \"(12)(34)\" --m 4");
        CLI_CHECK(res.exit_code == 0);
        CLI_CHECK(Json::parse(res.out).at("terms").size() == 24);
    }
    {
        auto res = run("eo-check --perm \"(12)(34)\" --m 4");
        CLI_CHECK(res.exit_code == 0);
        CLI_CHECK(Json::parse(res.out).at("proportional") == true);
    }
    {
        auto res = run("eo-check --perm \"(12)(34)\" --m 4 --word abcdcbad");
        CLI_CHECK(res.exit_code == 0);
        CLI_CHECK(Json::parse(res.out).at("residual") == "0/1");
    }
    {
        auto res1 = run("sample --graph " + square + " --shifts \"[0,0,0,0,0]\" --n 5000 --seed 9");
        auto res2 = run("sample --graph " + square + " --shifts \"[0,0,0,0,0]\" --n 5000 --seed 9");
        CLI_CHECK(res1.exit_code == 0);
        CLI_CHECK(res1.out == res2.out);
        Json j = Json::parse(res1.out);
        CLI_CHECK(j.at("total") == 5000);
    }
    {
        auto res = run("slide-test --graph " + k4 +
                       " --shifts \"[0,0,0,0,0,0]\" --edge 0 --grid \"[0,\\\"1/4\\\",\\\"1/2\\\"]\" --n 30000 --seed 4");
        CLI_CHECK(res.exit_code == 0);
        CLI_CHECK(Json::parse(res.out).at("verdict") == "PASS");
    }
    {
        auto res = run("emit-plot-data --figure trybula --step 1/4");
        CLI_CHECK(res.exit_code == 0);
        CLI_CHECK(res.out.rfind("x,y,z,in_region", 0) == 0);
        CLI_CHECK(res.out.find("\n1,1,1,0") != std::string::npos);
    }
    {
        auto res = run("emit-plot-data --figure shiftahedron3");
        CLI_CHECK(res.exit_code == 0);
        CLI_CHECK(res.out.rfind("s1,s2,s3", 0) == 0);
    }

    {
        auto res = run("mst-prob --graph " + square + " --tree \"[0,1,4]\" --output csv");
        CLI_CHECK(res.exit_code == 0);
        CLI_CHECK(res.out == "prob,2/15\n");
    }

    // Exit codes: unknown subcommand, bad input, resource cap.
    CLI_CHECK(run("no-such-command").exit_code == 1);
    CLI_CHECK(run("mst-prob --graph /nonexistent.json --tree \"[0]\"").exit_code == 1);
    CLI_CHECK(run("mst-prob --graph " + square + " --tree \"[0,2,4]\"").exit_code == 1);
    CLI_CHECK(run("--max-trees 3 mst-dist --graph " + k4).exit_code == 2);
    {
        // Round-trip: the emitted distribution re-parses into rational form.
        auto res = run("mst-dist --graph " + k4);
        CLI_CHECK(res.exit_code == 0);
        Json j = Json::parse(res.out);
        treeprob::Rational total = 0;
        for (const auto& [key, val] : j.items()) {
            Json tree = Json::parse(key);
            CLI_CHECK(tree.is_array() && tree.size() == 3);
            total += treeprob::parse_rational(val.get<std::string>());
        }
        CLI_CHECK(total == 1);
    }

    if (failures == 0) std::cout << "all CLI checks passed\n";
    else std::cout << failures << " CLI checks failed\n";
    return failures == 0 ? 0 : 1;
}

#pragma once

#include <atomic>
#include <cmath>
#include <map>
#include <thread>

#include "treeprob/measures.hpp"
#include "treeprob/rng.hpp"
#include "treeprob/shifts.hpp"

namespace treeprob {

struct SamplerConfig {
    std::uint64_t seed = 0;
    long samples = 100000;
    int streams = 1;   // fixed stream count pins the results; threads only carry streams
    int threads = 1;
};

struct EmpiricalTreeDistribution {
    std::map<std::vector<int>, long> counts;
    long total = 0;
    long ties = 0;  // float-precision weight ties, broken by edge index

    double frequency(const std::vector<int>& tree) const {
        auto it = counts.find(tree);
        return it == counts.end() ? 0.0 : static_cast<double>(it->second) / static_cast<double>(total);
    }

    double std_error(const std::vector<int>& tree) const {
        double p = frequency(tree);
        return std::sqrt(p * (1.0 - p) / static_cast<double>(total));
    }
};

namespace detail {

inline double sample_edge_weight(const EdgeMeasure& m, SplitMix64& rng) {
    double u = rng.next_double();
    double acc = 0;
    for (const auto& a : m.atoms) {
        acc += a.mass.get_d();
        if (u < acc) return a.loc.get_d();
    }
    for (const auto& piece : m.uniforms) {
        acc += piece.mass.get_d();
        if (u < acc) return piece.lo.get_d() + rng.next_double() * Rational(piece.hi - piece.lo).get_d();
    }
    // Rounding pushed u past the last component; use it.
    if (!m.uniforms.empty()) {
        const auto& piece = m.uniforms.back();
        return piece.lo.get_d() + rng.next_double() * Rational(piece.hi - piece.lo).get_d();
    }
    return m.atoms.back().loc.get_d();
}

struct StreamTally {
    std::map<std::vector<int>, long> counts;
    long ties = 0;
};

inline StreamTally run_stream(const Graph& g, const ProductMeasureSpec& spec, std::uint64_t seed,
                              int stream, long samples) {
    SplitMix64 rng = stream_rng(seed, static_cast<std::uint64_t>(stream));
    StreamTally tally;
    const int m = g.m();
    std::vector<double> w(m);
    std::vector<int> order(m);
    for (long it = 0; it < samples; ++it) {
        for (int e = 0; e < m; ++e) w[e] = sample_edge_weight(spec.vars[e], rng);
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            if (w[a] != w[b]) return w[a] < w[b];
            return a < b;  // tie-break by edge index
        });
        for (int i = 0; i + 1 < m; ++i)
            if (w[order[i]] == w[order[i + 1]]) ++tally.ties;
        ++tally.counts[kruskal_select(g, order)];
    }
    return tally;
}

}  // namespace detail

// Seeded Kruskal sampling under an arbitrary finite product measure. Counts
// are reproducible for a fixed (seed, stream count): streams own disjoint
// substreams and are merged in stream order, however many threads carry them.
inline EmpiricalTreeDistribution sample_mst_empirical(const Graph& g, const ProductMeasureSpec& spec,
                                                      const SamplerConfig& cfg) {
    if (spec.size() != g.m()) throw std::invalid_argument("measure count != edge count");
    if (cfg.samples < 1) throw std::invalid_argument("need at least one sample");
    if (!is_connected(g)) throw std::invalid_argument("graph not connected");
    const int streams = std::max(1, cfg.streams);
    std::vector<long> quota(streams, cfg.samples / streams);
    for (long i = 0; i < cfg.samples % streams; ++i) ++quota[static_cast<size_t>(i)];

    std::vector<detail::StreamTally> tallies(streams);
    const int threads = std::max(1, std::min(cfg.threads, streams));
    if (threads == 1) {
        for (int sidx = 0; sidx < streams; ++sidx)
            tallies[sidx] = detail::run_stream(g, spec, cfg.seed, sidx, quota[sidx]);
    } else {
        std::vector<std::thread> pool;
        std::atomic<int> next{0};
        for (int t = 0; t < threads; ++t)
            pool.emplace_back([&]() {
                for (;;) {
                    int sidx = next.fetch_add(1);
                    if (sidx >= streams) return;
                    tallies[sidx] = detail::run_stream(g, spec, cfg.seed, sidx, quota[sidx]);
                }
            });
        for (auto& th : pool) th.join();
    }

    EmpiricalTreeDistribution out;
    out.total = cfg.samples;
    for (const auto& tally : tallies) {
        out.ties += tally.ties;
        for (const auto& [tree, c] : tally.counts) out.counts[tree] += c;
    }
    return out;
}

inline EmpiricalTreeDistribution sample_mst_empirical(const Graph& g, const ShiftVector& s,
                                                      const SamplerConfig& cfg) {
    return sample_mst_empirical(g, shift_measure(s), cfg);
}

// Order statistics sampling (for the permutation-level checks).
inline std::map<std::vector<int>, long> sample_order_counts(const ProductMeasureSpec& spec,
                                                            const SamplerConfig& cfg) {
    const int m = spec.size();
    std::map<std::vector<int>, long> counts;
    const int streams = std::max(1, cfg.streams);
    std::vector<long> quota(streams, cfg.samples / streams);
    for (long i = 0; i < cfg.samples % streams; ++i) ++quota[static_cast<size_t>(i)];
    std::vector<double> w(m);
    std::vector<int> order(m);
    for (int sidx = 0; sidx < streams; ++sidx) {
        SplitMix64 rng = stream_rng(cfg.seed, static_cast<std::uint64_t>(sidx));
        for (long it = 0; it < quota[sidx]; ++it) {
            for (int e = 0; e < m; ++e) w[e] = detail::sample_edge_weight(spec.vars[e], rng);
            std::iota(order.begin(), order.end(), 0);
            std::sort(order.begin(), order.end(), [&](int a, int b) {
                if (w[a] != w[b]) return w[a] < w[b];
                return a < b;
            });
            ++counts[order];
        }
    }
    return counts;
}

struct SlideEstimate {
    Rational t;                 // slide amount applied to edge k
    std::vector<double> incl;   // P(e_j in T) estimate per edge j
};

struct SlideReport {
    int slid_edge = 0;
    std::vector<SlideEstimate> grid;
    bool pass = true;                  // no 3-sigma violation of weak increase
    std::vector<int> strict_edges;     // edges whose trend strictly increased where overlap holds
};

// Empirical check of monotonicity under interval sliding: estimates
// P(e_j in T) for every j != k along the slide grid and flags decreases
// beyond 3 sigma as failures.
inline SlideReport slide_monotonicity_test(const Graph& g, const ShiftVector& base, int k,
                                           const std::vector<Rational>& t_grid,
                                           const SamplerConfig& cfg) {
    if (t_grid.size() < 3) throw std::invalid_argument("need at least 3 grid points");
    if (k < 0 || k >= g.m()) throw std::invalid_argument("bad edge index");
    SlideReport report;
    report.slid_edge = k;
    for (size_t gi = 0; gi < t_grid.size(); ++gi) {
        ShiftVector s = base;
        s[k] += t_grid[gi];
        SamplerConfig local = cfg;
        local.seed = cfg.seed + 0x9E3779B9ULL * (gi + 1);  // independent draws per grid point
        auto emp = sample_mst_empirical(g, s, local);
        SlideEstimate est;
        est.t = t_grid[gi];
        est.incl.assign(g.m(), 0.0);
        for (const auto& [tree, c] : emp.counts)
            for (int e : tree) est.incl[e] += static_cast<double>(c);
        for (auto& v : est.incl) v /= static_cast<double>(emp.total);
        report.grid.push_back(std::move(est));
    }
    const double n = static_cast<double>(cfg.samples);
    for (int j = 0; j < g.m(); ++j) {
        if (j == k) continue;
        bool strict = true;
        for (size_t gi = 0; gi + 1 < report.grid.size(); ++gi) {
            double p0 = report.grid[gi].incl[j], p1 = report.grid[gi + 1].incl[j];
            double sigma = std::sqrt(p0 * (1 - p0) / n + p1 * (1 - p1) / n);
            if (p1 < p0 - 3 * sigma) report.pass = false;
            if (p1 <= p0) strict = false;
        }
        if (strict) report.strict_edges.push_back(j);
    }
    return report;
}

}  // namespace treeprob

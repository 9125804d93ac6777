#pragma once

#include <vector>

#include "treeprob/measures.hpp"

namespace treeprob {

// Interpretation: edge i's weight is uniform on [s_i, s_i + 1].
using ShiftVector = std::vector<Rational>;

// Normalized sum for the shiftahedron. The reordering orbit of sorted
// vectors with unit-bounded gaps and this fixed sum contains the extreme
// points (1, 2, ..., m) and the center ((m+1)/2, ..., (m+1)/2).
inline Rational shiftahedron_sum(int m) { return rat(static_cast<long>(m) * (m + 1), 2); }

// Collapses gaps larger than 1 between consecutive sorted shifts (which
// cannot affect the induced order distribution) and translates the result
// into the shiftahedron. The union of the shifted intervals comes out
// connected.
inline ShiftVector closing_gaps(const ShiftVector& s) {
    if (s.empty()) return s;
    const int m = static_cast<int>(s.size());
    std::vector<int> idx(m);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return s[a] < s[b]; });
    std::vector<Rational> sorted(m);
    for (int i = 0; i < m; ++i) sorted[i] = s[idx[i]];
    for (int i = 0; i + 1 < m; ++i) {
        if (sorted[i + 1] > sorted[i] + 1) {
            Rational shift = sorted[i] + 1 - sorted[i + 1];
            for (int j = i + 1; j < m; ++j) sorted[j] += shift;
        }
    }
    Rational sum = 0;
    for (const auto& v : sorted) sum += v;
    Rational adjust = (shiftahedron_sum(m) - sum) / m;
    ShiftVector out(m);
    for (int i = 0; i < m; ++i) out[idx[i]] = sorted[i] + adjust;
    return out;
}

inline bool shiftahedron_contains(const ShiftVector& s) {
    if (s.empty()) return false;
    ShiftVector sorted = s;
    std::sort(sorted.begin(), sorted.end());
    Rational sum = 0;
    for (const auto& v : sorted) sum += v;
    if (sum != shiftahedron_sum(static_cast<int>(s.size()))) return false;
    for (size_t i = 0; i + 1 < sorted.size(); ++i)
        if (sorted[i + 1] > sorted[i] + 1) return false;
    return true;
}

inline TreeDistribution shift_tree_distribution(const Graph& g, const ShiftVector& s) {
    return tree_distribution_exact(g, shift_measure(s));
}

}  // namespace treeprob

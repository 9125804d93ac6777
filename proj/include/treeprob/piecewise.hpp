#pragma once

#include <vector>

#include "treeprob/rational.hpp"

namespace treeprob {

// Dense polynomial with rational coefficients, index = power.
using Poly = std::vector<Rational>;

inline Rational poly_eval(const Poly& p, const Rational& x) {
    Rational acc = 0;
    for (size_t i = p.size(); i-- > 0;) acc = acc * x + p[i];
    return acc;
}

inline Poly poly_antiderivative(const Poly& p) {
    Poly out(p.size() + 1, Rational(0));
    for (size_t i = 0; i < p.size(); ++i) out[i + 1] = p[i] / Rational(static_cast<long>(i + 1));
    return out;
}

inline Rational poly_definite_integral(const Poly& p, const Rational& a, const Rational& b) {
    Poly anti = poly_antiderivative(p);
    return poly_eval(anti, b) - poly_eval(anti, a);
}

inline void poly_add_inplace(Poly& p, const Poly& q) {
    if (q.size() > p.size()) p.resize(q.size(), Rational(0));
    for (size_t i = 0; i < q.size(); ++i) p[i] += q[i];
}

inline Poly poly_scale(const Poly& p, const Rational& c) {
    Poly out = p;
    for (auto& coef : out) coef *= c;
    return out;
}

inline Poly poly_mul(const Poly& p, const Poly& q) {
    if (p.empty() || q.empty()) return {};
    Poly out(p.size() + q.size() - 1, Rational(0));
    for (size_t i = 0; i < p.size(); ++i)
        for (size_t j = 0; j < q.size(); ++j) out[i + j] += p[i] * q[j];
    return out;
}

inline bool poly_is_zero(const Poly& p) {
    for (const auto& c : p)
        if (c != 0) return false;
    return true;
}

// Piecewise polynomial on a fixed breakpoint grid. Piece i lives on
// [grid[i], grid[i+1]); the final piece extends to +infinity and the function
// is identically zero below grid[0]. Values are right-continuous at
// breakpoints, which is where atom contributions jump.
struct PiecewisePoly {
    std::vector<Rational> grid;  // sorted, strictly increasing
    std::vector<Poly> pieces;    // size == grid.size()

    explicit PiecewisePoly(std::vector<Rational> g)
        : grid(std::move(g)), pieces(grid.size(), Poly{}) {}

    size_t piece_index(const Rational& x) const {
        // Largest i with grid[i] <= x; callers never evaluate below grid[0].
        size_t lo = 0, hi = grid.size();
        while (lo + 1 < hi) {
            size_t mid = (lo + hi) / 2;
            if (grid[mid] <= x) lo = mid;
            else hi = mid;
        }
        return lo;
    }

    Rational eval(const Rational& x) const {
        if (x < grid.front()) return 0;
        return poly_eval(pieces[piece_index(x)], x);
    }

    Rational total() const { return pieces.empty() ? Rational(0) : poly_eval(pieces.back(), grid.back()); }

    bool is_zero() const {
        for (const auto& p : pieces)
            if (!poly_is_zero(p)) return false;
        return true;
    }
};

}  // namespace treeprob

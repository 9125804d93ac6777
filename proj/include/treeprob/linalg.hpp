#pragma once

#include <vector>

#include "treeprob/rational.hpp"

namespace treeprob {

using Matrix = std::vector<std::vector<Rational>>;

// Exact rank via Gaussian elimination over Q.
inline int rational_rank(Matrix m) {
    if (m.empty()) return 0;
    const size_t rows = m.size(), cols = m[0].size();
    size_t row = 0;
    for (size_t col = 0; col < cols && row < rows; ++col) {
        size_t pivot = row;
        while (pivot < rows && m[pivot][col] == 0) ++pivot;
        if (pivot == rows) continue;
        std::swap(m[pivot], m[row]);
        for (size_t r = row + 1; r < rows; ++r) {
            if (m[r][col] == 0) continue;
            Rational f = m[r][col] / m[row][col];
            for (size_t c = col; c < cols; ++c) m[r][c] -= f * m[row][c];
        }
        ++row;
    }
    return static_cast<int>(row);
}

// Any nonzero kernel vector of the column system sum_j x_j * columns[j] = 0,
// or an empty vector when the columns are linearly independent.
inline std::vector<Rational> kernel_vector(const std::vector<std::vector<Rational>>& columns) {
    if (columns.empty()) return {};
    const size_t ncols = columns.size(), nrows = columns[0].size();
    Matrix m(nrows, std::vector<Rational>(ncols));
    for (size_t j = 0; j < ncols; ++j)
        for (size_t i = 0; i < nrows; ++i) m[i][j] = columns[j][i];

    std::vector<int> pivot_col_of_row;
    std::vector<bool> is_pivot(ncols, false);
    size_t row = 0;
    for (size_t col = 0; col < ncols && row < nrows; ++col) {
        size_t pivot = row;
        while (pivot < nrows && m[pivot][col] == 0) ++pivot;
        if (pivot == nrows) continue;
        std::swap(m[pivot], m[row]);
        Rational inv = m[row][col];
        for (size_t c = col; c < ncols; ++c) m[row][c] /= inv;
        for (size_t r = 0; r < nrows; ++r) {
            if (r == row || m[r][col] == 0) continue;
            Rational f = m[r][col];
            for (size_t c = col; c < ncols; ++c) m[r][c] -= f * m[row][c];
        }
        pivot_col_of_row.push_back(static_cast<int>(col));
        is_pivot[col] = true;
        ++row;
    }
    size_t free_col = ncols;
    for (size_t c = 0; c < ncols; ++c)
        if (!is_pivot[c]) { free_col = c; break; }
    if (free_col == ncols) return {};

    std::vector<Rational> x(ncols, Rational(0));
    x[free_col] = 1;
    for (size_t r = 0; r < pivot_col_of_row.size(); ++r)
        x[pivot_col_of_row[r]] = -m[r][free_col];
    return x;
}

}  // namespace treeprob

#include "charanim/edt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace charanim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// 1D squared-distance transform (lower envelope of parabolas). Samples
// with f = inf contribute no parabola.
void dt_1d(const std::vector<double>& f, std::vector<double>& d, int n) {
    std::vector<int> v(n);
    std::vector<double> z(n + 1);
    int k = -1;
    for (int q = 0; q < n; ++q) {
        if (f[q] == kInf) continue;
        if (k < 0) {
            k = 0;
            v[0] = q;
            z[0] = -kInf;
            z[1] = kInf;
            continue;
        }
        double s;
        while (true) {
            s = ((f[q] + static_cast<double>(q) * q) -
                 (f[v[k]] + static_cast<double>(v[k]) * v[k])) /
                (2.0 * q - 2.0 * v[k]);
            if (s > z[k]) break;
            --k;
        }
        ++k;
        v[k] = q;
        z[k] = s;
        z[k + 1] = kInf;
    }
    if (k < 0) {
        std::fill(d.begin(), d.begin() + n, kInf);
        return;
    }
    int j = 0;
    for (int q = 0; q < n; ++q) {
        while (z[j + 1] < q) ++j;
        const double dq = q - v[j];
        d[q] = dq * dq + f[v[j]];
    }
}

}  // namespace

std::vector<double> squared_distance_transform(const BinaryMask& mask, bool pad_border) {
    const int pad = pad_border ? 1 : 0;
    const int w = mask.width + 2 * pad, h = mask.height + 2 * pad;
    std::vector<double> grid(static_cast<size_t>(w) * h, 0.0);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const int mx = x - pad, my = y - pad;
            const bool fg = mask.in_bounds(mx, my) && mask.at(mx, my);
            grid[static_cast<size_t>(y) * w + x] = fg ? kInf : 0.0;
        }

    std::vector<double> col(h), col_out(h);
    for (int x = 0; x < w; ++x) {
        for (int y = 0; y < h; ++y) col[y] = grid[static_cast<size_t>(y) * w + x];
        dt_1d(col, col_out, h);
        for (int y = 0; y < h; ++y) grid[static_cast<size_t>(y) * w + x] = col_out[y];
    }
    std::vector<double> row(w), row_out(w);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) row[x] = grid[static_cast<size_t>(y) * w + x];
        dt_1d(row, row_out, w);
        for (int x = 0; x < w; ++x) grid[static_cast<size_t>(y) * w + x] = row_out[x];
    }

    std::vector<double> out(static_cast<size_t>(mask.width) * mask.height);
    for (int y = 0; y < mask.height; ++y)
        for (int x = 0; x < mask.width; ++x)
            out[static_cast<size_t>(y) * mask.width + x] =
                grid[static_cast<size_t>(y + pad) * w + (x + pad)];
    return out;
}

}  // namespace charanim

#pragma once

// Reference implementations and generators shared by the unit tests and
// the acceptance suite. Oracles are written as plainly as possible and do
// not call into the code they check, apart from the Frame container.

#include <cmath>
#include <cstdint>
#include <deque>
#include <random>
#include <set>
#include <vector>

#include "polypdet/frame.hpp"
#include "polypdet/geometry.hpp"
#include "polypdet/midpass.hpp"

namespace polypdet::testing {

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
}

inline Frame random_frame(std::mt19937_64& rng, int rows, int cols, double lo = 0.0, double hi = 255.0) {
    Frame f(rows, cols);
    for (double& v : f.pixels()) v = uniform(rng, lo, hi);
    return f;
}

inline BinaryImage random_binary(std::mt19937_64& rng, int rows, int cols, double density) {
    BinaryImage b(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) b(r, c) = uniform(rng, 0.0, 1.0) < density ? 1 : 0;
    return b;
}

// Reflection without edge repeat, by repeated folding.
inline int reflect(int i, int n) {
    while (i < 0 || i >= n) {
        if (i < 0) i = -i;
        if (i >= n) i = 2 * (n - 1) - i;
    }
    return i;
}

// Direct 2D sum with the outer-product kernel.
inline Frame brute_force_gaussian(const Frame& f, double sigma) {
    const int rad = static_cast<int>(std::ceil(sigma));
    std::vector<double> k(2 * rad + 1);
    double sum = 0.0;
    for (int i = -rad; i <= rad; ++i) sum += k[i + rad] = std::exp(-0.5 * i * i / (sigma * sigma));
    for (double& v : k) v /= sum;
    std::vector<int> rows(f.rows() + 2 * rad), cols(f.cols() + 2 * rad);
    for (int i = 0; i < static_cast<int>(rows.size()); ++i) rows[i] = reflect(i - rad, f.rows());
    for (int j = 0; j < static_cast<int>(cols.size()); ++j) cols[j] = reflect(j - rad, f.cols());
    Frame out(f.rows(), f.cols());
    for (int r = 0; r < f.rows(); ++r)
        for (int c = 0; c < f.cols(); ++c) {
            double acc = 0.0;
            for (int i = 0; i <= 2 * rad; ++i) {
                const int rr = rows[r + i];
                for (int j = 0; j <= 2 * rad; ++j) acc += k[i] * k[j] * f(rr, cols[c + j]);
            }
            out(r, c) = acc;
        }
    return out;
}

// Breadth-first flood fill; components as sets of (row, col).
inline std::set<std::set<std::pair<int, int>>> flood_fill_components(const BinaryImage& b, bool eight = true) {
    std::vector<std::vector<char>> seen(b.rows(), std::vector<char>(b.cols(), 0));
    std::set<std::set<std::pair<int, int>>> out;
    for (int r = 0; r < b.rows(); ++r)
        for (int c = 0; c < b.cols(); ++c) {
            if (!b(r, c) || seen[r][c]) continue;
            std::set<std::pair<int, int>> comp;
            std::deque<std::pair<int, int>> q{{r, c}};
            seen[r][c] = 1;
            while (!q.empty()) {
                auto [y, x] = q.front();
                q.pop_front();
                comp.insert({y, x});
                for (int dy = -1; dy <= 1; ++dy)
                    for (int dx = -1; dx <= 1; ++dx) {
                        if ((dy == 0 && dx == 0) || (!eight && dy != 0 && dx != 0)) continue;
                        const int ny = y + dy;
                        const int nx = x + dx;
                        if (ny < 0 || nx < 0 || ny >= b.rows() || nx >= b.cols()) continue;
                        if (!b(ny, nx) || seen[ny][nx]) continue;
                        seen[ny][nx] = 1;
                        q.push_back({ny, nx});
                    }
            }
            out.insert(std::move(comp));
        }
    return out;
}

inline std::set<std::set<std::pair<int, int>>> as_sets(const std::vector<Component>& comps) {
    std::set<std::set<std::pair<int, int>>> out;
    for (const Component& c : comps) {
        std::set<std::pair<int, int>> s;
        for (const Pixel& p : c) s.insert({p.row, p.col});
        out.insert(std::move(s));
    }
    return out;
}

// Moments by a double loop over the labeled image. Deviations are scaled by
// the size S so everything stays in integers: sum (S y - Y)^2 = S (S sum y^2 - Y^2).
struct BruteMoments {
    std::size_t size = 0;
    Point2 centroid;
    InertiaTensor inertia;
};

inline BruteMoments brute_moments(const BinaryImage& b) {
    __int128 s = 0, sx = 0, sy = 0;
    for (int r = 0; r < b.rows(); ++r)
        for (int c = 0; c < b.cols(); ++c)
            if (b(r, c)) {
                ++s;
                sx += c + 1;
                sy += r + 1;
            }
    __int128 myy = 0, mxx = 0, mxy = 0;
    for (int r = 0; r < b.rows(); ++r)
        for (int c = 0; c < b.cols(); ++c)
            if (b(r, c)) {
                const __int128 dy = s * (r + 1) - sy;
                const __int128 dx = s * (c + 1) - sx;
                myy += dy * dy;
                mxx += dx * dx;
                mxy += dx * dy;
            }
    BruteMoments m;
    m.size = static_cast<std::size_t>(s);
    const double n = static_cast<double>(s);
    m.centroid = {static_cast<double>(sx) / n, static_cast<double>(sy) / n};
    m.inertia.a00 = static_cast<double>(myy / s) / n;
    m.inertia.a11 = static_cast<double>(mxx / s) / n;
    const __int128 cxy = mxy / s;
    m.inertia.a01 = cxy == 0 ? 0.0 : -static_cast<double>(cxy) / n;
    return m;
}

// lambda_max / lambda_min from the characteristic polynomial.
inline double brute_eccentricity(const InertiaTensor& t) {
    const long double tr = static_cast<long double>(t.a00) + t.a11;
    const long double det = static_cast<long double>(t.a00) * t.a11 - static_cast<long double>(t.a01) * t.a01;
    const long double disc = std::sqrt(std::max<long double>(tr * tr - 4 * det, 0));
    const long double lmax = (tr + disc) / 2;
    const long double lmin = det / lmax;  // avoids cancellation
    if (!(lmax > 0) || lmin <= 1e-9L * lmax) return kInfiniteEccentricity;
    return static_cast<double>(lmax / lmin);
}

// A random 4-connected blob grown from the center of a rows x cols grid.
inline BinaryImage random_blob(std::mt19937_64& rng, int rows, int cols, int target) {
    BinaryImage b(rows, cols);
    std::vector<std::pair<int, int>> members{{rows / 2, cols / 2}};
    b(rows / 2, cols / 2) = 1;
    int guard = 0;
    while (static_cast<int>(members.size()) < target && guard++ < target * 50) {
        auto [r, c] = members[rng() % members.size()];
        static constexpr int kDr[] = {-1, 1, 0, 0};
        static constexpr int kDc[] = {0, 0, -1, 1};
        const int k = static_cast<int>(rng() % 4);
        const int nr = r + kDr[k];
        const int nc = c + kDc[k];
        if (nr < 0 || nc < 0 || nr >= rows || nc >= cols || b(nr, nc)) continue;
        b(nr, nc) = 1;
        members.push_back({nr, nc});
    }
    return b;
}

inline Component pixels_of(const BinaryImage& b) {
    Component out;
    for (int r = 0; r < b.rows(); ++r)
        for (int c = 0; c < b.cols(); ++c)
            if (b(r, c)) out.push_back({r, c});
    return out;
}

// Shoelace area of a closed polygon.
inline double polygon_area(const std::vector<Point2>& pts) {
    double a = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const Point2& p = pts[i];
        const Point2& q = pts[(i + 1) % pts.size()];
        a += p.x * q.y - q.x * p.y;
    }
    return std::abs(a) / 2.0;
}

}  // namespace polypdet::testing

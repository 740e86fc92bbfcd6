#include "polypdet/midpass.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "polypdet/error.hpp"

namespace polypdet {

MidpassImage midpass_filter(const Frame& f, double sigma1, double sigma2, const CircularMask& m) {
    if (!(sigma1 >= 1.0 && sigma1 < sigma2)) {
        throw ParameterError("mid-pass requires 1 <= sigma1 < sigma2, got " + std::to_string(sigma1) + ", " +
                             std::to_string(sigma2));
    }
    if (!m.fits(f)) throw DimensionError("mask does not match frame");
    const Frame narrow = gaussian_convolve(f, sigma1);
    const Frame wide = gaussian_convolve(f, sigma2);
    MidpassImage out{Frame(f.rows(), f.cols())};
    for (int r = 0; r < f.rows(); ++r) {
        for (int c = 0; c < f.cols(); ++c) {
            if (!m.contains(r, c)) continue;
            const double w = narrow(r, c) / std::max(wide(r, c), kMidpassDenominatorFloor) - 1.0;
            out.u(r, c) = w >= 0.0 ? w : 0.0;
        }
    }
    return out;
}

double segmentation_threshold(double u_max, double m_low, double m_high) {
    if (!(0.0 < m_low && m_low < m_high)) throw ParameterError("threshold bounds require 0 < M_L < M_U");
    return std::max(std::min(0.5 * u_max, m_high), m_low);
}

double segmentation_threshold(const MidpassImage& u, double m_low, double m_high) {
    return segmentation_threshold(u.u.max(), m_low, m_high);
}

BinaryImage binary_segment(const MidpassImage& u, double theta) {
    if (!(theta > 0.0)) throw ParameterError("segmentation threshold must be positive");
    BinaryImage s(u.u.rows(), u.u.cols());
    for (int r = 0; r < s.rows(); ++r)
        for (int c = 0; c < s.cols(); ++c) s(r, c) = u.u(r, c) >= theta ? 1 : 0;
    return s;
}

namespace {

class DisjointSet {
public:
    int make() {
        parent_.push_back(static_cast<int>(parent_.size()));
        return parent_.back();
    }
    int find(int x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }
    // Keeps the smaller root so that root order follows scan order.
    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (b < a) std::swap(a, b);
        parent_[b] = a;
    }

private:
    std::vector<int> parent_;
};

}  // namespace

std::vector<Component> connected_components(const BinaryImage& s, Connectivity conn) {
    const int rows = s.rows();
    const int cols = s.cols();
    std::vector<int> label(static_cast<std::size_t>(rows) * cols, -1);
    DisjointSet sets;
    const bool eight = conn == Connectivity::Eight;

    // First pass: provisional labels from already visited neighbors
    // (west, and the three northern ones under 8-connectivity).
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            if (!s(r, c)) continue;
            int current = -1;
            auto visit = [&](int nr, int nc) {
                if (nr < 0 || nc < 0 || nc >= cols) return;
                const int l = label[static_cast<std::size_t>(nr) * cols + nc];
                if (l < 0) return;
                if (current < 0) {
                    current = l;
                } else {
                    sets.unite(current, l);
                }
            };
            visit(r, c - 1);
            visit(r - 1, c);
            if (eight) {
                visit(r - 1, c - 1);
                visit(r - 1, c + 1);
            }
            if (current < 0) current = sets.make();
            label[static_cast<std::size_t>(r) * cols + c] = current;
        }
    }

    // Second pass: resolve roots and number components by first appearance.
    std::vector<int> index_of_root;
    std::vector<Component> out;
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            const int l = label[static_cast<std::size_t>(r) * cols + c];
            if (l < 0) continue;
            const int root = sets.find(l);
            if (static_cast<int>(index_of_root.size()) <= root) index_of_root.resize(root + 1, -1);
            if (index_of_root[root] < 0) {
                index_of_root[root] = static_cast<int>(out.size());
                out.emplace_back();
            }
            out[index_of_root[root]].push_back({r, c});
        }
    }
    return out;
}

Segmentation segment(const MidpassImage& u, double m_low, double m_high, Connectivity conn) {
    Segmentation seg;
    seg.theta = segmentation_threshold(u, m_low, m_high);
    seg.s = binary_segment(u, seg.theta);
    seg.components = connected_components(seg.s, conn);
    return seg;
}

}  // namespace polypdet

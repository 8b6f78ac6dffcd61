#pragma once

// Independent, deliberately naive re-implementations used as test oracles.
// None of these call into the library's numeric code.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <queue>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "savo/image.hpp"

namespace oracle {

using savo::BinaryImage;
using savo::GrayImage;

// Literal double loop over target rows i and columns j.
inline GrayImage resize_loop(const GrayImage& src, int M, int N) {
    const int P = src.height();
    const int Q = src.width();
    GrayImage out(M, N);
    for (int i = 0; i < N; ++i) {
        for (int j = 0; j < M; ++j) {
            const int si = (i * P) / N;
            const int sj = (j * Q) / M;
            out.at(j, i) = src.at(sj, si);
        }
    }
    return out;
}

// Inverse-distance weighting over the distinct corners of the enclosing cell.
inline double inverse_distance(const GrayImage& img, double x, double y) {
    // Cell corners: floor and floor + 1, clamped at the last row/column.
    std::set<std::pair<int, int>> grid;
    const int fx = static_cast<int>(x), fy = static_cast<int>(y);
    for (int ix : {fx, std::min(fx + 1, img.width() - 1)}) {
        for (int iy : {fy, std::min(fy + 1, img.height() - 1)}) grid.insert({ix, iy});
    }
    for (const auto& [ix, iy] : grid) {
        if (std::hypot(x - ix, y - iy) < 1e-9) return img.at(ix, iy);
    }
    double num = 0.0, den = 0.0;
    for (const auto& [ix, iy] : grid) {
        const double w = 1.0 / std::hypot(x - ix, y - iy);
        num += w * img.at(ix, iy);
        den += w;
    }
    return num / den;
}

// Fuzzy k-NN membership written straight from the weighted-average formula.
inline std::vector<double> fuzzy_knn(const std::vector<std::vector<double>>& protos,
                                     const std::vector<std::vector<double>>& memberships,
                                     const std::vector<double>& query, int k, double m) {
    std::vector<std::pair<double, std::size_t>> d;
    for (std::size_t t = 0; t < protos.size(); ++t) {
        double s = 0.0;
        for (std::size_t i = 0; i < query.size(); ++i) s += std::pow(query[i] - protos[t][i], 2);
        d.push_back({std::sqrt(s), t});
    }
    std::sort(d.begin(), d.end());
    d.resize(static_cast<std::size_t>(k));
    const std::size_t classes = memberships.front().size();
    std::vector<double> u(classes, 0.0);
    int zero = 0;
    for (const auto& [dist, t] : d) {
        if (dist < 1e-12) {
            ++zero;
            for (std::size_t c = 0; c < classes; ++c) u[c] += memberships[t][c];
        }
    }
    if (zero > 0) {
        for (auto& v : u) v /= zero;
        return u;
    }
    double den = 0.0;
    for (const auto& [dist, t] : d) {
        const double w = std::pow(1.0 / dist, 2.0 / (m - 1.0));
        den += w;
        for (std::size_t c = 0; c < classes; ++c) u[c] += w * memberships[t][c];
    }
    for (auto& v : u) v /= den;
    return u;
}

// Full-matrix edit distance.
template <typename S>
std::size_t levenshtein(const S& a, const S& b) {
    std::vector<std::vector<std::size_t>> D(a.size() + 1, std::vector<std::size_t>(b.size() + 1));
    for (std::size_t i = 0; i <= a.size(); ++i) D[i][0] = i;
    for (std::size_t j = 0; j <= b.size(); ++j) D[0][j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        for (std::size_t j = 1; j <= b.size(); ++j) {
            const std::size_t sub = D[i - 1][j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            D[i][j] = std::min({D[i - 1][j] + 1, D[i][j - 1] + 1, sub});
        }
    }
    return D[a.size()][b.size()];
}

inline double pairwise_mean(const std::vector<std::vector<double>>& pts) {
    double sum = 0.0;
    long pairs = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        for (std::size_t j = 0; j < pts.size(); ++j) {
            if (j <= i) continue;
            double s = 0.0;
            for (std::size_t d = 0; d < pts[i].size(); ++d) s += (pts[i][d] - pts[j][d]) * (pts[i][d] - pts[j][d]);
            sum += std::sqrt(s);
            ++pairs;
        }
    }
    return sum / static_cast<double>(pairs);
}

inline double distance(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
}

// Davies-Bouldin from labels alone (centroids recomputed here).
inline double davies_bouldin(const std::vector<std::vector<double>>& pts, const std::vector<int>& labels, int k) {
    const std::size_t dim = pts.front().size();
    std::vector<std::vector<double>> c(static_cast<std::size_t>(k), std::vector<double>(dim, 0.0));
    std::vector<int> n(static_cast<std::size_t>(k), 0);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const auto l = static_cast<std::size_t>(labels[i]);
        ++n[l];
        for (std::size_t d = 0; d < dim; ++d) c[l][d] += pts[i][d];
    }
    for (std::size_t l = 0; l < c.size(); ++l) {
        for (auto& v : c[l]) v /= n[l];
    }
    std::vector<double> S(static_cast<std::size_t>(k), 0.0);
    for (std::size_t i = 0; i < pts.size(); ++i) S[static_cast<std::size_t>(labels[i])] += distance(pts[i], c[static_cast<std::size_t>(labels[i])]);
    for (std::size_t l = 0; l < S.size(); ++l) S[l] /= n[l];
    double db = 0.0;
    for (int i = 0; i < k; ++i) {
        double worst = 0.0;
        for (int j = 0; j < k; ++j) {
            if (i == j) continue;
            worst = std::max(worst, (S[i] + S[j]) / distance(c[i], c[j]));
        }
        db += worst;
    }
    return db / k;
}

// 8-connected labelling by breadth-first flood fill; returns component sizes in
// discovery order (row-major first pixel).
inline std::vector<std::vector<savo::Point>> components(const BinaryImage& img) {
    std::vector<int> label(static_cast<std::size_t>(img.width() * img.height()), -1);
    std::vector<std::vector<savo::Point>> out;
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
            if (!img.at(x, y) || label[static_cast<std::size_t>(y * img.width() + x)] >= 0) continue;
            const int id = static_cast<int>(out.size());
            out.emplace_back();
            std::queue<savo::Point> q;
            q.push({x, y});
            label[static_cast<std::size_t>(y * img.width() + x)] = id;
            while (!q.empty()) {
                const auto p = q.front();
                q.pop();
                out.back().push_back(p);
                for (int dy = -1; dy <= 1; ++dy) {
                    for (int dx = -1; dx <= 1; ++dx) {
                        const int nx = p.x + dx, ny = p.y + dy;
                        if (nx < 0 || ny < 0 || nx >= img.width() || ny >= img.height() || !img.at(nx, ny)) continue;
                        auto& l = label[static_cast<std::size_t>(ny * img.width() + nx)];
                        if (l >= 0) continue;
                        l = id;
                        q.push({nx, ny});
                    }
                }
            }
        }
    }
    return out;
}

// Holes: background cells not reachable (4-connected) from the border, grouped 4-connected.
inline int holes(const BinaryImage& img) {
    const int w = img.width(), h = img.height();
    std::vector<int> seen(static_cast<std::size_t>(w * h), 0);
    auto fill = [&](int sx, int sy) {
        std::vector<savo::Point> stack{{sx, sy}};
        seen[static_cast<std::size_t>(sy * w + sx)] = 1;
        while (!stack.empty()) {
            const auto p = stack.back();
            stack.pop_back();
            const int nbr[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
            for (const auto& d : nbr) {
                const int nx = p.x + d[0], ny = p.y + d[1];
                if (nx < 0 || ny < 0 || nx >= w || ny >= h || img.at(nx, ny)) continue;
                auto& s = seen[static_cast<std::size_t>(ny * w + nx)];
                if (s) continue;
                s = 1;
                stack.push_back({nx, ny});
            }
        }
    };
    for (int x = 0; x < w; ++x) {
        if (!img.at(x, 0) && !seen[static_cast<std::size_t>(x)]) fill(x, 0);
        if (!img.at(x, h - 1) && !seen[static_cast<std::size_t>((h - 1) * w + x)]) fill(x, h - 1);
    }
    for (int y = 0; y < h; ++y) {
        if (!img.at(0, y) && !seen[static_cast<std::size_t>(y * w)]) fill(0, y);
        if (!img.at(w - 1, y) && !seen[static_cast<std::size_t>(y * w + w - 1)]) fill(w - 1, y);
    }
    int count = 0;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (img.at(x, y) || seen[static_cast<std::size_t>(y * w + x)]) continue;
            ++count;
            fill(x, y);
        }
    }
    return count;
}

// Reference 323-vector built from explicit per-line pixel lists.
inline std::vector<double> glyph_vector(const BinaryImage& g, int occlusions, int above, int below) {
    constexpr int S = 40;
    // Each family: list of scan lines, each a list of (x, y) in scan order.
    std::vector<std::vector<std::vector<savo::Point>>> families(4);
    for (int y = 0; y < S; ++y) {
        auto& line = families[0].emplace_back();
        for (int x = 0; x < S; ++x) line.push_back({x, y});
    }
    for (int x = 0; x < S; ++x) {
        auto& line = families[1].emplace_back();
        for (int y = 0; y < S; ++y) line.push_back({x, y});
    }
    for (int d = 0; d < 2 * S - 1; ++d) {  // main diagonals: x - y = d - 39
        auto& line = families[2].emplace_back();
        for (int y = 0; y < S; ++y) {
            const int x = d - (S - 1) + y;
            if (x >= 0 && x < S) line.push_back({x, y});
        }
    }
    for (int d = 0; d < 2 * S - 1; ++d) {  // anti diagonals: x + y = d
        auto& line = families[3].emplace_back();
        for (int y = 0; y < S; ++y) {
            const int x = d - y;
            if (x >= 0 && x < S) line.push_back({x, y});
        }
    }
    std::vector<double> proj, trans;
    for (const auto& fam : families) {
        std::vector<double> p(S, 0.0), t(S, 0.0);
        for (std::size_t l = 0; l < fam.size(); ++l) {
            const std::size_t bin = fam.size() == S ? l : l * S / fam.size();
            int ink = 0, rises = 0;
            bool prev = false;
            for (const auto& pt : fam[l]) {
                const bool cur = g.at(pt.x, pt.y) != 0;
                ink += cur;
                rises += cur && !prev;
                prev = cur;
            }
            p[bin] += ink;
            t[bin] += rises;
        }
        proj.insert(proj.end(), p.begin(), p.end());
        trans.insert(trans.end(), t.begin(), t.end());
    }
    std::vector<double> v = proj;
    v.insert(v.end(), trans.begin(), trans.end());
    v.push_back(occlusions);
    v.push_back(above);
    v.push_back(below);
    return v;
}

}  // namespace oracle

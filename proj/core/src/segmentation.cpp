#include "spraycard/segmentation.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <queue>
#include <string>

namespace spraycard {

LabelMap::label_type LabelMap::max_label() const noexcept {
    const auto px = labels_.pixels();
    const auto it = std::max_element(px.begin(), px.end());
    return std::max<label_type>(*it, kBackground);
}

namespace {

class DisjointSets {
public:
    std::uint32_t make() {
        parent_.push_back(static_cast<std::uint32_t>(parent_.size()));
        return parent_.back();
    }

    std::uint32_t find(std::uint32_t x) {
        std::uint32_t root = x;
        while (parent_[root] != root) root = parent_[root];
        while (parent_[x] != root) {
            const std::uint32_t next = parent_[x];
            parent_[x] = root;
            x = next;
        }
        return root;
    }

    void unite(std::uint32_t a, std::uint32_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (a < b) {
            parent_[b] = a;
        } else {
            parent_[a] = b;
        }
    }

private:
    std::vector<std::uint32_t> parent_;
};

}  // namespace

std::vector<Contour> find_contours(const BinaryImage& mask) {
    const int w = mask.width();
    const int h = mask.height();
    constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();

    // Pass 1: provisional labels from the already-visited half of the
    // 8-neighbourhood (W, NW, N, NE).
    Raster<std::uint32_t> prov(w, h, kNone);
    DisjointSets sets;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (!mask(x, y)) continue;
            std::uint32_t label = kNone;
            const auto visit = [&](int nx, int ny) {
                if (!mask.contains(nx, ny)) return;
                const std::uint32_t n = prov(nx, ny);
                if (n == kNone) return;
                if (label == kNone) {
                    label = n;
                } else {
                    sets.unite(label, n);
                }
            };
            visit(x - 1, y);
            visit(x - 1, y - 1);
            visit(x, y - 1);
            visit(x + 1, y - 1);
            prov(x, y) = label == kNone ? sets.make() : label;
        }
    }

    // Pass 2: resolve equivalences; final ids follow first-pixel raster order.
    std::vector<std::int32_t> final_id;
    std::vector<Contour> contours;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const std::uint32_t p = prov(x, y);
            if (p == kNone) continue;
            const std::uint32_t root = sets.find(p);
            if (root >= final_id.size()) final_id.resize(root + 1, 0);
            std::int32_t& id = final_id[root];
            if (id == 0) {
                contours.push_back(Contour{static_cast<std::int32_t>(contours.size() + 1), {}, {}});
                id = contours.back().label;
            }
            Contour& c = contours[static_cast<std::size_t>(id - 1)];
            c.pixels.push_back(Point{x, y});
            c.box.extend(x, y);
        }
    }
    return contours;
}

std::vector<Marker> ring_markers(std::span<const Contour> contours) {
    std::vector<Marker> out;
    out.reserve(contours.size());
    for (const Contour& c : contours) out.push_back(Marker{c.label, c.pixels});
    return out;
}

std::vector<Marker> core_markers(std::span<const Contour> contours, const BinaryImage& binary) {
    std::vector<Marker> out;
    out.reserve(contours.size());
    for (const Contour& c : contours) {
        Marker m{c.label, {}};
        for (const Point& p : c.pixels) {
            if (!binary.contains(p.x, p.y)) {
                throw DimensionError("core_markers: contour pixel outside the binary image");
            }
            if (binary(p.x, p.y)) m.pixels.push_back(p);
        }
        out.push_back(std::move(m));
    }
    return out;
}

namespace {

using Label = LabelMap::label_type;
constexpr Label kUnset = std::numeric_limits<Label>::min();

struct FloodEntry {
    float level;
    std::uint8_t rank;  // 0 = background, 1 = drop
    std::uint64_t order;
    std::uint32_t index;
    Label label;
};

struct LaterFirst {
    bool operator()(const FloodEntry& a, const FloodEntry& b) const noexcept {
        if (a.level != b.level) return a.level > b.level;
        if (a.rank != b.rank) return a.rank > b.rank;
        return a.order > b.order;
    }
};

constexpr std::uint8_t kQueuedBackground = 1;
constexpr std::uint8_t kQueuedDrop = 2;

}  // namespace

LabelMap watershed(const GrayImage& gray, std::span<const Marker> markers,
                   const BinaryImage& support) {
    require_same_size(gray, support, "watershed");
    const int w = gray.width();
    const int h = gray.height();

    Raster<Label> labels(w, h, kUnset);
    const auto sup = support.pixels();
    auto lab = labels.pixels();
    for (std::size_t i = 0; i < lab.size(); ++i) {
        if (!sup[i]) lab[i] = LabelMap::kBackground;
    }
    for (const Marker& m : markers) {
        if (m.label <= 0) throw ParameterError("marker labels must be positive");
        for (const Point& p : m.pixels) {
            if (!labels.contains(p.x, p.y)) {
                throw DimensionError("watershed: marker pixel outside the image");
            }
            Label& cur = labels(p.x, p.y);
            if (cur == kUnset || cur == LabelMap::kBackground) {
                cur = m.label;
            } else if (cur > 0 && cur != m.label) {
                cur = LabelMap::kRidge;
            }
        }
    }

    std::vector<std::uint8_t> queued(lab.size(), 0);
    std::priority_queue<FloodEntry, std::vector<FloodEntry>, LaterFirst> open;
    std::uint64_t order = 0;
    const auto gpx = gray.pixels();

    // A pixel may sit in the queue twice: once for the background and once
    // for the first drop that reaches it. Whichever pops first decides.
    const auto enqueue_neighbours = [&](int x, int y, Label label) {
        const std::uint8_t flag = label > 0 ? kQueuedDrop : kQueuedBackground;
        const auto push = [&](int nx, int ny) {
            if (!labels.contains(nx, ny)) return;
            const std::size_t n = labels.index(nx, ny);
            if (lab[n] != kUnset || (queued[n] & flag)) return;
            queued[n] |= flag;
            open.push(FloodEntry{gpx[n], static_cast<std::uint8_t>(label > 0 ? 1 : 0), order++,
                                 static_cast<std::uint32_t>(n), label});
        };
        push(x, y - 1);
        push(x - 1, y);
        push(x + 1, y);
        push(x, y + 1);
    };

    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (labels(x, y) == LabelMap::kBackground) enqueue_neighbours(x, y, LabelMap::kBackground);
        }
    }
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const Label l = labels(x, y);
            if (l > 0) enqueue_neighbours(x, y, l);
        }
    }

    while (!open.empty()) {
        const FloodEntry e = open.top();
        open.pop();
        if (lab[e.index] != kUnset) continue;
        const int x = static_cast<int>(e.index % static_cast<std::uint32_t>(w));
        const int y = static_cast<int>(e.index / static_cast<std::uint32_t>(w));

        Label seen = 0;
        bool contested = false;
        const auto look = [&](int nx, int ny) {
            if (!labels.contains(nx, ny)) return;
            const Label n = labels(nx, ny);
            if (n <= 0) return;
            if (seen == 0) {
                seen = n;
            } else if (n != seen) {
                contested = true;
            }
        };
        look(x, y - 1);
        look(x - 1, y);
        look(x + 1, y);
        look(x, y + 1);

        if (contested) {
            lab[e.index] = LabelMap::kRidge;
            continue;
        }
        lab[e.index] = e.label;
        enqueue_neighbours(x, y, e.label);
    }

    for (auto& l : lab) {
        if (l == kUnset) l = LabelMap::kBackground;
    }
    return LabelMap(std::move(labels));
}

std::vector<DropSegment> extract_segments(const LabelMap& labels, std::int64_t min_area_px) {
    const Label max_label = labels.max_label();
    struct Accum {
        std::int64_t area = 0;
        double sx = 0.0;
        double sy = 0.0;
        BoundingBox box;
    };
    std::vector<Accum> acc(static_cast<std::size_t>(max_label) + 1);
    for (int y = 0; y < labels.height(); ++y) {
        for (int x = 0; x < labels.width(); ++x) {
            const Label l = labels(x, y);
            if (l <= 0) continue;
            Accum& a = acc[static_cast<std::size_t>(l)];
            ++a.area;
            a.sx += x;
            a.sy += y;
            a.box.extend(x, y);
        }
    }

    std::vector<DropSegment> out;
    for (Label l = 1; l <= max_label; ++l) {
        const Accum& a = acc[static_cast<std::size_t>(l)];
        if (a.area == 0 || a.area < min_area_px) continue;
        const auto n = static_cast<double>(a.area);
        out.push_back(DropSegment{l, a.area, a.sx / n, a.sy / n, a.box});
    }
    return out;
}

}  // namespace spraycard

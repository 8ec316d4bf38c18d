#include "mrwp/zones.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <deque>
#include <stdexcept>
#include <string>

#include "mrwp/stationary.hpp"

namespace mrwp {

namespace {

constexpr std::size_t kMaxStoredViolations = 64;

std::vector<std::uint8_t> extended_suburb_mask(const ZoneMap& z)
{
    // Multi-source BFS from suburb cells; grid steps times ell is the Manhattan distance between SW corners.
    const int cells = z.cell_count();
    std::vector<int> dist(static_cast<std::size_t>(cells), -1);
    std::deque<int> queue;
    for (int id = 0; id < cells; ++id) {
        if (!z.is_central(id)) {
            dist[static_cast<std::size_t>(id)] = 0;
            queue.push_back(id);
        }
    }
    while (!queue.empty()) {
        const int id = queue.front();
        queue.pop_front();
        for (int nb : z.neighbors(id)) {
            if (dist[static_cast<std::size_t>(nb)] < 0) {
                dist[static_cast<std::size_t>(nb)] = dist[static_cast<std::size_t>(id)] + 1;
                queue.push_back(nb);
            }
        }
    }
    std::vector<std::uint8_t> mask(static_cast<std::size_t>(cells), 0);
    for (int id = 0; id < cells; ++id) {
        const int d = dist[static_cast<std::size_t>(id)];
        mask[static_cast<std::size_t>(id)] = (d >= 0 && d * z.ell() <= 2.0 * z.S()) ? 1 : 0;
    }
    return mask;
}

} // namespace

double central_threshold(std::int64_t n) { return 3.0 / 8.0 * log_n(n) / static_cast<double>(n); }

double suburb_diameter_bound(double L, double ell, std::int64_t n)
{
    return 1.5 * L * L * L * log_n(n) / (ell * ell * static_cast<double>(n));
}

ZoneMap::ZoneMap(int m, double L, std::int64_t n, std::vector<CellLabel> labels, std::vector<double> probabilities)
    : m_(m), L_(L), ell_(L / m), n_(n), labels_(std::move(labels)), probabilities_(std::move(probabilities))
{
    const auto cells = static_cast<std::size_t>(m) * static_cast<std::size_t>(m);
    if (m < 1 || labels_.size() != cells || probabilities_.size() != cells) {
        throw std::invalid_argument("ZoneMap: label and probability grids must be m x m");
    }
    cz_size_ = static_cast<int>(std::count(labels_.begin(), labels_.end(), CellLabel::Central));
    S_ = suburb_diameter_bound(L_, ell_, n_);
    extended_ = extended_suburb_mask(*this);
}

Rect ZoneMap::cell_rect(int id) const
{
    const Point sw = sw_corner(id);
    return {sw.x, sw.y, sw.x + ell_, sw.y + ell_};
}

Rect ZoneMap::core(int id) const
{
    const Point sw = sw_corner(id);
    const double a = ell_ / 3.0;
    return {sw.x + a, sw.y + a, sw.x + 2.0 * a, sw.y + 2.0 * a};
}

int ZoneMap::cell_of(Point p) const
{
    const int col = std::clamp(static_cast<int>(std::floor(p.x / ell_)), 0, m_ - 1);
    const int row = std::clamp(static_cast<int>(std::floor(p.y / ell_)), 0, m_ - 1);
    return id(row, col);
}

std::vector<int> ZoneMap::neighbors(int id_) const
{
    std::vector<int> out;
    out.reserve(4);
    const int r = row_of(id_);
    const int c = col_of(id_);
    if (r > 0) out.push_back(id(r - 1, c));
    if (r + 1 < m_) out.push_back(id(r + 1, c));
    if (c > 0) out.push_back(id(r, c - 1));
    if (c + 1 < m_) out.push_back(id(r, c + 1));
    return out;
}

ZoneMap build_zone_map(const WorldParams& p)
{
    p.validate();
    if (p.R > std::sqrt(2.0) * p.L) {
        throw std::invalid_argument("build_zone_map: requires R <= sqrt(2) L");
    }
    const double root5 = std::sqrt(5.0);
    const int m = static_cast<int>(std::ceil(root5 * p.L / p.R));
    if (m < 1) {
        throw std::invalid_argument("build_zone_map: degenerate grid");
    }
    const double ell = p.L / m;
    if (ell < p.R / (1.0 + root5) || ell > p.R / root5) {
        throw std::invalid_argument("build_zone_map: no tiling cell side in [R/(1+sqrt 5), R/sqrt 5] for m = " +
                                    std::to_string(m));
    }
    const double threshold = central_threshold(p.n);
    const auto cells = static_cast<std::size_t>(m) * static_cast<std::size_t>(m);
    std::vector<CellLabel> labels(cells);
    std::vector<double> probs(cells);
    for (int r = 0; r < m; ++r) {
        for (int c = 0; c < m; ++c) {
            // The far edge of the last cell is snapped to L so the closed form never sees x0 + ell > L.
            const double x0 = std::min(c * ell, p.L - ell);
            const double y0 = std::min(r * ell, p.L - ell);
            const double prob = cell_probability({x0, y0}, ell, p.L);
            const auto k = static_cast<std::size_t>(r * m + c);
            probs[k] = prob;
            labels[k] = prob >= threshold ? CellLabel::Central : CellLabel::Suburb;
        }
    }
    return ZoneMap(m, p.L, p.n, std::move(labels), std::move(probs));
}

CellSet CellSet::central_zone(const ZoneMap& z)
{
    CellSet s = empty(z);
    for (int id = 0; id < z.cell_count(); ++id) {
        if (z.is_central(id)) {
            s.insert(id);
        }
    }
    return s;
}

std::size_t CellSet::size() const { return static_cast<std::size_t>(std::count(member.begin(), member.end(), 1)); }

CellSet boundary(const CellSet& B, const ZoneMap& z)
{
    if (B.member.size() != static_cast<std::size_t>(z.cell_count())) {
        throw std::invalid_argument("boundary: cell set does not match the zone map");
    }
    CellSet out = CellSet::empty(z);
    for (int id = 0; id < z.cell_count(); ++id) {
        if (!B.contains(id)) {
            continue;
        }
        if (!z.is_central(id)) {
            throw std::invalid_argument("boundary: B contains suburb cell " + std::to_string(id));
        }
        for (int nb : z.neighbors(id)) {
            if (z.is_central(nb) && !B.contains(nb)) {
                out.insert(nb);
            }
        }
    }
    return out;
}

RowColumnCounts cz_row_column_counts(const ZoneMap& z)
{
    RowColumnCounts out;
    out.bound = z.m() / std::sqrt(2.0);
    for (int i = 0; i < z.m(); ++i) {
        bool row_hit = false;
        bool col_hit = false;
        for (int j = 0; j < z.m(); ++j) {
            row_hit = row_hit || z.is_central(z.id(i, j));
            col_hit = col_hit || z.is_central(z.id(j, i));
        }
        out.rows += row_hit ? 1 : 0;
        out.columns += col_hit ? 1 : 0;
    }
    return out;
}

namespace {

bool expansion_holds(std::size_t boundary_size, std::size_t b, std::size_t cz)
{
    const std::size_t smaller = std::min(b, cz - b);
    return boundary_size * boundary_size >= smaller;
}

void record(ExpansionReport& report, const std::vector<int>& cells, std::size_t bsize, std::size_t cz)
{
    ++report.violation_count;
    if (report.violations.size() < kMaxStoredViolations) {
        const std::size_t smaller = std::min(cells.size(), cz - cells.size());
        report.violations.push_back({cells, bsize, std::sqrt(static_cast<double>(smaller))});
    }
}

ExpansionReport exhaustive_expansion(const ZoneMap& z)
{
    std::vector<int> cz;
    for (int id = 0; id < z.cell_count(); ++id) {
        if (z.is_central(id)) {
            cz.push_back(id);
        }
    }
    const std::size_t k = cz.size();
    if (k > 20) {
        throw std::invalid_argument("check_expansion: exhaustive mode needs |CZ| <= 20");
    }
    std::vector<int> local(static_cast<std::size_t>(z.cell_count()), -1);
    for (std::size_t i = 0; i < k; ++i) {
        local[static_cast<std::size_t>(cz[i])] = static_cast<int>(i);
    }
    std::vector<std::uint32_t> adjacency(k, 0);
    for (std::size_t i = 0; i < k; ++i) {
        for (int nb : z.neighbors(cz[i])) {
            if (const int j = local[static_cast<std::size_t>(nb)]; j >= 0) {
                adjacency[i] |= std::uint32_t{1} << j;
            }
        }
    }

    ExpansionReport report;
    if (k < 2) {
        return report;
    }
    const std::uint32_t full = (std::uint32_t{1} << k) - 1;
    for (std::uint32_t mask = 1; mask < full; ++mask) {
        std::uint32_t reach = 0;
        for (std::uint32_t rest = mask; rest != 0; rest &= rest - 1) {
            reach |= adjacency[static_cast<std::size_t>(std::countr_zero(rest))];
        }
        const auto bsize = static_cast<std::size_t>(std::popcount(reach & ~mask & full));
        const auto b = static_cast<std::size_t>(std::popcount(mask));
        ++report.subsets_checked;
        if (!expansion_holds(bsize, b, k)) {
            std::vector<int> cells;
            for (std::uint32_t rest = mask; rest != 0; rest &= rest - 1) {
                cells.push_back(cz[static_cast<std::size_t>(std::countr_zero(rest))]);
            }
            record(report, cells, bsize, k);
        }
    }
    return report;
}

/// Mix of random subset shapes: Bernoulli scatter, BFS blobs, rectangles and half-planes.
CellSet random_subset(const ZoneMap& z, const std::vector<int>& cz, RngStream& rng, std::int64_t shape)
{
    CellSet B = CellSet::empty(z);
    const int m = z.m();
    switch (shape % 4) {
    case 0: {
        const double p = rng.uniform();
        for (int id : cz) {
            if (rng.uniform() < p) B.insert(id);
        }
        break;
    }
    case 1: {
        const auto target = 1 + rng.below(cz.size());
        std::deque<int> queue{cz[rng.below(cz.size())]};
        B.insert(queue.front());
        std::size_t count = 1;
        while (!queue.empty() && count < target) {
            const int id = queue.front();
            queue.pop_front();
            for (int nb : z.neighbors(id)) {
                if (count < target && z.is_central(nb) && !B.contains(nb)) {
                    B.insert(nb);
                    queue.push_back(nb);
                    ++count;
                }
            }
        }
        break;
    }
    case 2: {
        const auto um = static_cast<std::uint64_t>(m);
        int r0 = static_cast<int>(rng.below(um)), r1 = static_cast<int>(rng.below(um));
        int c0 = static_cast<int>(rng.below(um)), c1 = static_cast<int>(rng.below(um));
        if (r0 > r1) std::swap(r0, r1);
        if (c0 > c1) std::swap(c0, c1);
        for (int id : cz) {
            const int r = z.row_of(id), c = z.col_of(id);
            if (r >= r0 && r <= r1 && c >= c0 && c <= c1) B.insert(id);
        }
        break;
    }
    default: {
        const double angle = rng.uniform(0.0, 2.0 * 3.141592653589793);
        const double ca = std::cos(angle), sa = std::sin(angle);
        const double offset = rng.uniform(-0.75, 0.75) * m;
        const double centre = 0.5 * (m - 1);
        for (int id : cz) {
            if ((z.col_of(id) - centre) * ca + (z.row_of(id) - centre) * sa < offset) B.insert(id);
        }
        break;
    }
    }
    return B;
}

ExpansionReport random_expansion(const ZoneMap& z, std::int64_t samples, std::uint64_t seed)
{
    std::vector<int> cz;
    for (int id = 0; id < z.cell_count(); ++id) {
        if (z.is_central(id)) {
            cz.push_back(id);
        }
    }
    ExpansionReport report;
    if (cz.size() < 2) {
        return report;
    }
    RngStream rng = derive_substream(seed, 0x5eed);
    for (std::int64_t draw = 0; report.subsets_checked < samples; ++draw) {
        const CellSet B = random_subset(z, cz, rng, draw);
        const std::size_t b = B.size();
        if (b == 0 || b == cz.size()) {
            continue;
        }
        const std::size_t bsize = boundary(B, z).size();
        ++report.subsets_checked;
        if (!expansion_holds(bsize, b, cz.size())) {
            std::vector<int> cells;
            for (int id : cz) {
                if (B.contains(id)) cells.push_back(id);
            }
            record(report, cells, bsize, cz.size());
        }
    }
    return report;
}

} // namespace

ExpansionReport check_expansion(const ZoneMap& z, ExpansionMode mode)
{
    if (mode.kind == ExpansionMode::Kind::Exhaustive) {
        return exhaustive_expansion(z);
    }
    return random_expansion(z, mode.samples, mode.seed);
}

std::vector<SuburbViolation> check_suburb_diameter(const ZoneMap& z, double limit)
{
    std::vector<SuburbViolation> out;
    const double half = 0.5 * z.L();
    for (int id = 0; id < z.cell_count(); ++id) {
        if (z.is_central(id)) {
            continue;
        }
        const Rect r = z.cell_rect(id);
        // Distance of the cell's farthest point from the corner of its quadrant, per axis.
        const double cx = 0.5 * (r.x0 + r.x1);
        const double cy = 0.5 * (r.y0 + r.y1);
        const double x_extent = cx <= half ? r.x1 : z.L() - r.x0;
        const double y_extent = cy <= half ? r.y1 : z.L() - r.y0;
        if (x_extent > limit || y_extent > limit) {
            out.push_back({id, x_extent, y_extent, limit});
        }
    }
    return out;
}

} // namespace mrwp

#include "conefact/partition.hpp"

#include "conefact/lp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace conefact {

namespace {

struct Lifted {
    std::vector<std::vector<double>> unique_pts; // lifted (x, 1)
    std::vector<std::vector<int>> members;       // original indices per unique point
    int dim = 0;
};

Lifted collapse_and_lift(const std::vector<std::vector<double>>& points) {
    if (points.empty())
        throw std::invalid_argument("halfspace_subsets: ground set is empty");
    if (points.size() > 64)
        throw std::invalid_argument("halfspace_subsets: more than 64 points unsupported");
    Lifted out;
    out.dim = static_cast<int>(points[0].size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (static_cast<int>(points[i].size()) != out.dim)
            throw std::invalid_argument("halfspace_subsets: ragged point set");
        int found = -1;
        for (std::size_t u = 0; u < out.unique_pts.size(); ++u) {
            double d2 = 0.0;
            for (int k = 0; k < out.dim; ++k) {
                double d = out.unique_pts[u][k] - points[i][k];
                d2 += d * d;
            }
            if (d2 <= 1e-24) {
                found = static_cast<int>(u);
                break;
            }
        }
        if (found < 0) {
            std::vector<double> lift = points[i];
            lift.push_back(1.0);
            out.unique_pts.push_back(std::move(lift));
            out.members.push_back({static_cast<int>(i)});
        } else {
            out.members[found].push_back(static_cast<int>(i));
        }
    }
    return out;
}

// Feasibility of { w : sign_u * <lift_u, w> >= 1 for all settled u }.
// The margin-1 form is exact for open cells because the system is
// homogeneous in w.
std::optional<std::vector<double>> cell_witness(const Lifted& l,
                                                const std::vector<int>& signs) {
    std::vector<std::vector<double>> rows;
    std::vector<double> rhs;
    const int n = l.dim + 1;
    for (std::size_t u = 0; u < signs.size(); ++u) {
        std::vector<double> row(n);
        for (int k = 0; k < n; ++k)
            row[k] = signs[u] * l.unique_pts[u][k];
        rows.push_back(std::move(row));
        rhs.push_back(1.0);
    }
    std::vector<double> zero(n, 0.0);
    LpResult r = lp_solve(zero, rows, rhs);
    if (r.status == LpStatus::Infeasible)
        return std::nullopt;
    return r.point;
}

std::uint64_t binom(int n, int k) {
    if (k < 0 || k > n)
        return 0;
    std::uint64_t r = 1;
    for (int i = 1; i <= k; ++i)
        r = r * static_cast<std::uint64_t>(n - k + i) / i;
    return r;
}

} // namespace

std::vector<SubsetWitness> halfspace_subsets(const std::vector<std::vector<double>>& points) {
    Lifted l = collapse_and_lift(points);
    const int q = static_cast<int>(l.unique_pts.size());

    // Incremental cell enumeration of the central arrangement
    // {w : <lift_u, w> = 0}, one unique point at a time.
    std::vector<std::vector<int>> cells = {{}};
    for (int u = 0; u < q; ++u) {
        std::vector<std::vector<int>> grown;
        for (const auto& cell : cells) {
            for (int sign : {+1, -1}) {
                std::vector<int> ext = cell;
                ext.push_back(sign);
                if (cell_witness(l, ext).has_value())
                    grown.push_back(std::move(ext));
            }
        }
        cells = std::move(grown);
    }

    std::vector<SubsetWitness> out;
    std::set<std::uint64_t> seen;
    for (const auto& cell : cells) {
        std::optional<std::vector<double>> w = cell_witness(l, cell);
        if (!w)
            continue;
        SubsetWitness sw;
        for (int u = 0; u < q; ++u)
            if (cell[u] > 0)
                for (int idx : l.members[u])
                    sw.mask |= 1ULL << idx;
        if (!seen.insert(sw.mask).second)
            continue;
        Halfspace h;
        h.a.assign(w->begin(), w->end() - 1);
        h.b = -w->back();
        double n = 0.0;
        for (double v : h.a)
            n += v * v;
        if (n <= 1e-20) {
            // all-plus or all-minus cell with a constant witness; realize it
            // with a genuine halfspace instead
            h.a.assign(static_cast<std::size_t>(l.dim), 0.0);
            h.a[0] = 1.0;
            double lo = 1e300, hi = -1e300;
            for (const auto& p : l.unique_pts) {
                lo = std::min(lo, p[0]);
                hi = std::max(hi, p[0]);
            }
            h.b = sw.mask ? lo - 1.0 : hi + 1.0;
        }
        sw.halfspaces.push_back(std::move(h));
        out.push_back(std::move(sw));
    }

    // Classical dichotomy count: 2 * sum_{j<=D} C(q-1, j).
    std::uint64_t bound = 0;
    for (int j = 0; j <= std::min(l.dim, q - 1); ++j)
        bound += binom(q - 1, j);
    bound *= 2;
    if (out.size() > bound)
        throw std::logic_error("halfspace_subsets: enumeration exceeded the dichotomy bound");
    return out;
}

PolyhedronSubsetStream::PolyhedronSubsetStream(const std::vector<std::vector<double>>& points,
                                               int k2)
    : k2_(k2) {
    if (k2 < 1)
        throw std::invalid_argument("polyhedron_subsets: k2 must be >= 1");
    base_ = halfspace_subsets(points);
    family_ = base_;
    for (const auto& s : family_)
        seen_.insert(s.mask);
    level_begin_ = 0;
}

bool PolyhedronSubsetStream::advance_level() {
    if (level_ >= k2_)
        return false;
    std::size_t prev_begin = (level_ == 1) ? 0 : level_begin_;
    std::size_t prev_end = family_.size();
    std::vector<SubsetWitness> fresh;
    for (std::size_t i = prev_begin; i < prev_end; ++i) {
        for (const auto& h : base_) {
            std::uint64_t inter = family_[i].mask & h.mask;
            if (seen_.count(inter))
                continue;
            seen_.insert(inter);
            SubsetWitness sw;
            sw.mask = inter;
            sw.halfspaces = family_[i].halfspaces;
            sw.halfspaces.push_back(h.halfspaces.front());
            fresh.push_back(std::move(sw));
        }
    }
    ++level_;
    if (fresh.empty())
        return advance_level(); // closure may stabilize before depth k2
    level_begin_ = family_.size();
    for (auto& s : fresh)
        family_.push_back(std::move(s));
    return true;
}

std::optional<SubsetWitness> PolyhedronSubsetStream::next() {
    while (cursor_ >= family_.size()) {
        if (!advance_level())
            return std::nullopt;
    }
    return family_[cursor_++];
}

std::vector<SubsetWitness> PolyhedronSubsetStream::drain() {
    std::vector<SubsetWitness> out;
    while (auto s = next())
        out.push_back(std::move(*s));
    return out;
}

PartitionStream::PartitionStream(const std::vector<std::vector<double>>& points, int k1,
                                 int k2, PartitionOrder) {
    if (k1 < 1)
        throw std::invalid_argument("enumerate_partitions: k1 must be >= 1");
    m_ = static_cast<int>(points.size());
    PolyhedronSubsetStream subsets(points, k2);
    subsets_ = subsets.drain();
    full_mask_ = (m_ == 64) ? ~0ULL : ((1ULL << m_) - 1);
    k1_eff_ = std::min<int>(k1, m_);
}

PolyPartition PartitionStream::assemble(const std::vector<int>& chosen) const {
    PolyPartition part;
    part.ground_size = m_;
    std::uint64_t covered = 0;
    for (int idx : chosen) {
        std::uint64_t piece = subsets_[idx].mask & ~covered;
        covered |= subsets_[idx].mask;
        std::vector<int> members;
        for (int i = 0; i < m_; ++i)
            if (piece & (1ULL << i))
                members.push_back(i);
        part.parts.push_back(std::move(members));
        HPolyhedron poly(static_cast<int>(subsets_[idx].halfspaces.front().a.size()));
        for (const auto& h : subsets_[idx].halfspaces)
            poly.add(Halfspace{h.a, h.b});
        part.inducing_polyhedra.push_back(std::move(poly));
    }
    // every emission must be a genuine partition
    std::uint64_t seen_union = 0;
    for (const auto& p : part.parts) {
        std::uint64_t mask = 0;
        for (int i : p)
            mask |= 1ULL << i;
        if (p.empty() || (mask & seen_union))
            throw std::logic_error("PartitionStream: emitted parts are not disjoint/nonempty");
        seen_union |= mask;
    }
    if (seen_union != full_mask_)
        throw std::logic_error("PartitionStream: emitted parts do not cover the ground set");
    return part;
}

void PartitionStream::dfs(int target, int depth, std::uint64_t covered,
                          std::vector<int>& chosen, std::vector<PolyPartition>& out) {
    if (depth == target) {
        if (covered != full_mask_)
            return;
        std::vector<std::uint64_t> key;
        std::uint64_t cov = 0;
        for (int idx : chosen) {
            key.push_back(subsets_[idx].mask & ~cov);
            cov |= subsets_[idx].mask;
        }
        std::sort(key.begin(), key.end());
        if (!emitted_.insert(key).second)
            return;
        out.push_back(assemble(chosen));
        ++emitted_count_;
        return;
    }
    for (std::size_t s = 0; s < subsets_.size(); ++s) {
        std::uint64_t fresh = subsets_[s].mask & ~covered;
        if (!fresh)
            continue; // empty part; the same partition appears at a smaller depth
        chosen.push_back(static_cast<int>(s));
        dfs(target, depth + 1, covered | subsets_[s].mask, chosen, out);
        chosen.pop_back();
    }
}

std::vector<PolyPartition> PartitionStream::partitions_with_parts(int parts) {
    std::vector<PolyPartition> out;
    if (parts < 1 || parts > k1_eff_)
        return out;
    std::vector<int> chosen;
    dfs(parts, 0, 0, chosen, out);
    // Lemma 7 cap: never more than (#subsets)^k1 distinct emissions.
    long double cap = std::pow(static_cast<long double>(subsets_.size()),
                               static_cast<long double>(k1_eff_));
    if (static_cast<long double>(emitted_count_) > cap)
        throw std::logic_error("PartitionStream: emission count exceeds the Lemma bound");
    return out;
}

std::optional<PolyPartition> PartitionStream::next() {
    while (pending_cursor_ >= pending_.size()) {
        if (current_parts_ >= k1_eff_)
            return std::nullopt;
        ++current_parts_;
        pending_ = partitions_with_parts(current_parts_);
        pending_cursor_ = 0;
    }
    return pending_[pending_cursor_++];
}

} // namespace conefact

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mr_transform.hpp"

namespace mrfv
{
    enum class NodeKind : std::uint8_t
    {
        absent,
        leaf,
        internal,
        virtual_leaf
    };

    inline const char* to_string(NodeKind k)
    {
        switch (k)
        {
        case NodeKind::leaf:
            return "leaf";
        case NodeKind::internal:
            return "internal";
        case NodeKind::virtual_leaf:
            return "virtual";
        case NodeKind::absent:
            break;
        }
        return "absent";
    }

    struct NodeKey
    {
        int level  = 0;
        long index = 0;

        friend bool operator==(const NodeKey&, const NodeKey&) = default;
    };

    /// Dynamic graded tree over levels 0..L of a dyadic grid with n0 roots.
    ///
    /// Nodes are addressed by (level, index); per level storage is dense but
    /// every per-step pass walks occupancy lists only. Children of (l, i) are
    /// (l+1, 2i) (spatially left) and (l+1, 2i+1).
    ///
    /// Gradedness kept here: every real node (l, i), l >= 1, has the real
    /// nodes (l-1, i/2 + d), |d| <= g (g = 2 by default), which contains its parent, so sibling
    /// pairs coexist, levels of adjacent leaves differ by at most one and the
    /// two cousins on each side of any leaf exist as real or virtual nodes,
    /// the virtual ones predicted directly from real parents.
    class GradedTree
    {
      public:
        /// `grading` is the reach g of the coarse neighbourhood: a real node
        /// (l, i) needs the real nodes (l-1, i/2 + d), |d| <= g.
        GradedTree(long n0, int max_level, Boundary bc, double u_max, int grading = 2)
            : m_n0(n0)
            , m_L(max_level)
            , m_bc(bc)
            , m_u_max(u_max)
            , m_grade(grading)
        {
            if (n0 < 1 || max_level < 0 || max_level > 24)
            {
                throw ConfigError("graded tree needs n0 >= 1 and 0 <= L <= 24");
            }
            if (grading < 1 || grading > 2)
            {
                throw ConfigError("grading reach must be 1 or 2");
            }
            const auto levels = static_cast<std::size_t>(max_level + 1);
            m_kind.resize(levels);
            m_avg.resize(levels);
            m_det.resize(levels);
            m_flags.resize(levels);
            m_internal.resize(levels);
            for (int l = 0; l <= max_level; ++l)
            {
                const auto n = static_cast<std::size_t>(size(l));
                m_kind[static_cast<std::size_t>(l)].assign(n, NodeKind::absent);
                m_avg[static_cast<std::size_t>(l)].assign(n, 0.0);
                m_det[static_cast<std::size_t>(l)].assign(n, 0.0);
                m_flags[static_cast<std::size_t>(l)].assign(n, 0);
            }
            for (long r = 0; r < n0; ++r)
            {
                m_kind[0][static_cast<std::size_t>(r)] = NodeKind::leaf;
            }
            rebuild_index();
        }

        // ---------------------------------------------------------------
        // Geometry and access.

        [[nodiscard]] long roots() const
        {
            return m_n0;
        }

        [[nodiscard]] int max_level() const
        {
            return m_L;
        }

        [[nodiscard]] Boundary boundary() const
        {
            return m_bc;
        }

        [[nodiscard]] int grading() const
        {
            return m_grade;
        }

        [[nodiscard]] long size(int level) const
        {
            return m_n0 << level;
        }

        [[nodiscard]] long finest_cells() const
        {
            return size(m_L);
        }

        [[nodiscard]] NodeKind kind(int l, long i) const
        {
            return m_kind[static_cast<std::size_t>(l)][static_cast<std::size_t>(i)];
        }

        [[nodiscard]] bool is_real(int l, long i) const
        {
            const NodeKind k = kind(l, i);
            return k == NodeKind::leaf || k == NodeKind::internal;
        }

        [[nodiscard]] double average(int l, long i) const
        {
            return m_avg[static_cast<std::size_t>(l)][static_cast<std::size_t>(i)];
        }

        [[nodiscard]] double& average(int l, long i)
        {
            return m_avg[static_cast<std::size_t>(l)][static_cast<std::size_t>(i)];
        }

        [[nodiscard]] double detail(int l, long i) const
        {
            return m_det[static_cast<std::size_t>(l)][static_cast<std::size_t>(i)];
        }

        [[nodiscard]] bool deletable(int l, long i) const
        {
            return (flags(l, i) & deletable_bit) != 0;
        }

        [[nodiscard]] bool pinned(int l, long i) const
        {
            return (flags(l, i) & pinned_bit) != 0;
        }

        /// Real leaves ordered left to right.
        [[nodiscard]] const std::vector<NodeKey>& leaves() const
        {
            return m_leaves;
        }

        [[nodiscard]] const std::vector<NodeKey>& virtual_leaves() const
        {
            return m_virtual;
        }

        /// Internal nodes of level l, in no particular order.
        [[nodiscard]] const std::vector<long>& internal_nodes(int l) const
        {
            return m_internal[static_cast<std::size_t>(l)];
        }

        [[nodiscard]] std::size_t leaf_count() const
        {
            return m_leaves.size();
        }

        [[nodiscard]] std::size_t real_node_count() const
        {
            std::size_t n = m_leaves.size();
            for (const auto& r : m_internal)
            {
                n += r.size();
            }
            return n;
        }

        /// Cousin index at offset d, or -1 outside a non-periodic domain.
        [[nodiscard]] long neighbour(int l, long i, long d) const
        {
            const long n = size(l);
            long k       = i + d;
            if (m_bc == Boundary::periodic)
            {
                k %= n;
                return k < 0 ? k + n : k;
            }
            return (k < 0 || k >= n) ? -1 : k;
        }

        // ---------------------------------------------------------------
        // Construction.

        /// Builds the initial tree from exact level-L cell averages. A node
        /// gets children when its own detail, its children's detail or any
        /// deeper detail reaches the level tolerance; the nodes listed in
        /// `pinned` are always present and never removed.
        void initialize(const std::vector<double>& fine, const std::vector<NodeKey>& pinned, const std::vector<double>& tol)
        {
            if (static_cast<long>(fine.size()) != finest_cells() || static_cast<int>(tol.size()) != m_L + 1)
            {
                throw std::invalid_argument("initialize: fine data or tolerance vector has wrong length");
            }
            for (int l = 0; l <= m_L; ++l)
            {
                std::fill(m_kind[static_cast<std::size_t>(l)].begin(), m_kind[static_cast<std::size_t>(l)].end(), NodeKind::absent);
                std::fill(m_flags[static_cast<std::size_t>(l)].begin(), m_flags[static_cast<std::size_t>(l)].end(), 0);
            }
            m_virtual.clear();

            // exact averages and details on every level
            m_avg[static_cast<std::size_t>(m_L)] = fine;
            for (int l = m_L - 1; l >= 0; --l)
            {
                auto& p       = m_avg[static_cast<std::size_t>(l)];
                const auto& c = m_avg[static_cast<std::size_t>(l + 1)];
                for (std::size_t k = 0; k < p.size(); ++k)
                {
                    p[k] = project(c[2 * k], c[2 * k + 1]);
                }
            }
            m_exact_mode = true;
            for (int l = 1; l <= m_L; ++l)
            {
                for (long k = 0; k < size(l - 1); ++k)
                {
                    set_pair_detail(l, k);
                }
            }

            // needs[l][i]: node (l, i) must carry children
            std::vector<std::vector<std::uint8_t>> needs(static_cast<std::size_t>(m_L + 1));
            needs[static_cast<std::size_t>(m_L)].assign(static_cast<std::size_t>(finest_cells()), 0);
            for (int l = m_L - 1; l >= 0; --l)
            {
                auto& nl       = needs[static_cast<std::size_t>(l)];
                const auto& nc = needs[static_cast<std::size_t>(l + 1)];
                nl.assign(static_cast<std::size_t>(size(l)), 0);
                for (long i = 0; i < size(l); ++i)
                {
                    const bool own      = l >= 1 && std::abs(detail(l, i)) >= tol[static_cast<std::size_t>(l)];
                    const bool children = std::abs(detail(l + 1, 2 * i)) >= tol[static_cast<std::size_t>(l + 1)];
                    nl[static_cast<std::size_t>(i)] = own || children || nc[static_cast<std::size_t>(2 * i)] || nc[static_cast<std::size_t>(2 * i + 1)];
                }
            }

            for (long r = 0; r < m_n0; ++r)
            {
                m_kind[0][static_cast<std::size_t>(r)] = NodeKind::leaf;
            }
            for (int l = 0; l < m_L; ++l)
            {
                for (long i = 0; i < size(l); ++i)
                {
                    if (needs[static_cast<std::size_t>(l)][static_cast<std::size_t>(i)] && is_real(l, i))
                    {
                        ensure_real(l + 1, 2 * i);
                    }
                }
            }
            for (const NodeKey& c : pinned)
            {
                if (c.level < 0 || c.level > m_L)
                {
                    throw std::invalid_argument("initialize: pinned node level out of range");
                }
                const long k = neighbour(c.level, c.index, 0);
                if (k >= 0)
                {
                    ensure_real(c.level, k);
                    m_flags[static_cast<std::size_t>(c.level)][static_cast<std::size_t>(k)] |= pinned_bit;
                }
            }
            m_exact_mode = false;
            rebuild_index();
            analyse(tol);
            build_virtual();
        }

        /// One adaptation pass after the leaves were evolved: projection,
        /// details, coarsening, refinement, grading, virtual leaves. With
        /// `with_virtual` false the virtual leaves are left for a later
        /// build_virtual_leaves() call.
        void update(const std::vector<double>& tol, bool with_virtual = true)
        {
            clear_virtual();
            analyse(tol);
            coarsen();
            refine();
            relink_leaves();
            index_internal();
            if (with_virtual)
            {
                build_virtual();
            }
        }

        /// Materializes the virtual leaves if they are not present.
        void build_virtual_leaves()
        {
            if (!m_virtual_built)
            {
                build_virtual();
            }
        }

        /// Prediction of the two children of a real node from it and its
        /// same-level neighbours; the value a virtual child receives.
        [[nodiscard]] std::pair<double, double> predicted_children(int l, long i) const
        {
            return predict(average(l, i), cousin_average(l, i, -1), cousin_average(l, i, 1));
        }

        /// Recomputes internal averages and details without changing the structure.
        void refresh(const std::vector<double>& tol)
        {
            clear_virtual();
            analyse(tol);
            build_virtual();
        }

        /// Splits a leaf (and whatever grading requires); test and tooling hook.
        void split_leaf(int l, long i)
        {
            if (kind(l, i) != NodeKind::leaf || l >= m_L)
            {
                return;
            }
            clear_virtual();
            split(l, i);
            rebuild_index();
            build_virtual();
        }

        /// Removes the children of (l, i) if they are leaves and gradedness
        /// allows it. Returns whether the tree changed.
        bool merge_children(int l, long i)
        {
            clear_virtual();
            const bool ok = can_merge(l, i);
            if (ok)
            {
                merge(l, i);
            }
            rebuild_index();
            build_virtual();
            return ok;
        }

        // ---------------------------------------------------------------
        // Views.

        /// Level-L averages: real nodes keep their values, everything else
        /// is predicted with zero details.
        [[nodiscard]] std::vector<double> reconstruct() const
        {
            std::vector<double> cur(static_cast<std::size_t>(m_n0));
            for (long r = 0; r < m_n0; ++r)
            {
                cur[static_cast<std::size_t>(r)] = average(0, r);
            }
            for (int l = 1; l <= m_L; ++l)
            {
                const long np = size(l - 1);
                std::vector<double> next(static_cast<std::size_t>(2 * np));
                for (long k = 0; k < np; ++k)
                {
                    std::pair<double, double> c;
                    if (is_real(l, 2 * k))
                    {
                        c = {average(l, 2 * k), average(l, 2 * k + 1)};
                    }
                    else
                    {
                        c = predict(cur[static_cast<std::size_t>(k)], cur[static_cast<std::size_t>(cousin_index(k, -1, np, m_bc))],
                                    cur[static_cast<std::size_t>(cousin_index(k, 1, np, m_bc))]);
                    }
                    next[static_cast<std::size_t>(2 * k)]     = c.first;
                    next[static_cast<std::size_t>(2 * k + 1)] = c.second;
                }
                cur = std::move(next);
            }
            return cur;
        }

        /// Structural audit of all gradedness clauses and of the leaf
        /// partition. Returns an empty string when everything holds.
        [[nodiscard]] std::string audit() const
        {
            std::ostringstream err;
            for (long r = 0; r < m_n0; ++r)
            {
                if (!is_real(0, r))
                {
                    err << "root " << r << " missing\n";
                }
            }
            for (int l = 0; l <= m_L; ++l)
            {
                for (long i = 0; i < size(l); ++i)
                {
                    const NodeKind k = kind(l, i);
                    if (k == NodeKind::absent)
                    {
                        continue;
                    }
                    if (l >= 1 && !is_real(l - 1, i / 2) && k != NodeKind::virtual_leaf)
                    {
                        err << "(" << l << "," << i << ") has no real parent\n";
                    }
                    if (k == NodeKind::virtual_leaf)
                    {
                        if (l == 0 || kind(l - 1, i / 2) != NodeKind::leaf)
                        {
                            err << "virtual (" << l << "," << i << ") not below a real leaf\n";
                        }
                        continue;
                    }
                    if (l >= 1 && !is_real(l, i ^ 1))
                    {
                        err << "(" << l << "," << i << ") has no brother\n";
                    }
                    const bool has_children = l < m_L && is_real(l + 1, 2 * i);
                    if ((k == NodeKind::leaf) == has_children)
                    {
                        err << "(" << l << "," << i << ") kind inconsistent with children\n";
                    }
                    if (l >= 1)
                    {
                        for (long d = -m_grade; d <= m_grade; ++d)
                        {
                            const long q = neighbour(l - 1, i / 2, d);
                            if (q >= 0 && !is_real(l - 1, q))
                            {
                                err << "(" << l << "," << i << ") lacks coarse neighbour (" << l - 1 << "," << q << ")\n";
                            }
                        }
                    }
                    if (k == NodeKind::leaf)
                    {
                        for (long d : {-2L, -1L, 1L, 2L})
                        {
                            const long q = neighbour(l, i, d);
                            if (q >= 0 && kind(l, q) == NodeKind::absent)
                            {
                                err << "leaf (" << l << "," << i << ") lacks cousin " << d << "\n";
                            }
                        }
                    }
                }
            }
            long pos = 0;
            for (const NodeKey& k : m_leaves)
            {
                if (k.index << (m_L - k.level) != pos)
                {
                    err << "leaves do not tile the domain at fine position " << pos << "\n";
                    break;
                }
                pos += 1L << (m_L - k.level);
            }
            if (pos != finest_cells())
            {
                err << "leaves cover " << pos << " of " << finest_cells() << " fine cells\n";
            }
            return err.str();
        }

      private:
        static constexpr std::uint8_t deletable_bit = 1;
        static constexpr std::uint8_t pinned_bit    = 2;

        [[nodiscard]] std::uint8_t flags(int l, long i) const
        {
            return m_flags[static_cast<std::size_t>(l)][static_cast<std::size_t>(i)];
        }

        void set_kind(int l, long i, NodeKind k)
        {
            m_kind[static_cast<std::size_t>(l)][static_cast<std::size_t>(i)] = k;
        }

        /// Average of the cousin at offset d on level l; edge cells repeat
        /// on non-periodic domains.
        [[nodiscard]] double cousin_average(int l, long i, long d) const
        {
            const long j = cousin_index(i, d, size(l), m_bc);
            return (m_exact_mode || is_real(l, j)) ? average(l, j) : value(l, j);
        }

        /// Real average, or the zero-detail prediction through the ancestors.
        /// Walks down from the roots with a five-cell window around the target.
        [[nodiscard]] double value(int l, long i) const
        {
            if (l == 0 || is_real(l, i))
            {
                return average(l, i);
            }
            long idx[5];
            double val[5];
            long q = i >> l;
            for (int d = 0; d < 5; ++d)
            {
                idx[d] = cousin_index(q, d - 2, size(0), m_bc);
                val[d] = average(0, idx[d]);
            }
            const auto lookup = [&](long j) {
                int k = 0;
                while (idx[k] != j)
                {
                    ++k;
                }
                return val[k];
            };
            for (int a = 1; a <= l; ++a)
            {
                q = i >> (l - a);
                const long n = size(a);
                long nidx[5];
                double nval[5];
                for (int d = 0; d < 5; ++d)
                {
                    const long j = cousin_index(q, d - 2, n, m_bc);
                    nidx[d]      = j;
                    if (is_real(a, j))
                    {
                        nval[d] = average(a, j);
                        continue;
                    }
                    const long p  = j / 2;
                    const long nl = size(a - 1);
                    const auto c  = predict(lookup(p), lookup(cousin_index(p, -1, nl, m_bc)), lookup(cousin_index(p, 1, nl, m_bc)));
                    nval[d]       = (j & 1) ? c.second : c.first;
                }
                std::copy(nidx, nidx + 5, idx);
                std::copy(nval, nval + 5, val);
            }
            return val[2];
        }

        void set_pair_detail(int l, long k)
        {
            const double d = average(l, 2 * k) - predicted_children(l - 1, k).first;
            m_det[static_cast<std::size_t>(l)][static_cast<std::size_t>(2 * k)]     = d;
            m_det[static_cast<std::size_t>(l)][static_cast<std::size_t>(2 * k + 1)] = -d;
        }

        /// Makes (l, k) a real node, creating ancestors and the coarse
        /// neighbourhood first. New children get exact values during
        /// initialization and bounded predictions otherwise.
        void ensure_real(int l, long k)
        {
            if (is_real(l, k))
            {
                return;
            }
            const long p = k / 2;
            for (long d = -m_grade; d <= m_grade; ++d)
            {
                const long q = neighbour(l - 1, p, d);
                if (q >= 0)
                {
                    ensure_real(l - 1, q);
                }
            }
            create_children(l - 1, p);
        }

        void create_children(int l, long p)
        {
            if (kind(l, p) != NodeKind::leaf)
            {
                return;
            }
            if (!m_exact_mode)
            {
                const auto [a, b] = predict_bounded(average(l, p), cousin_average(l, p, -1), cousin_average(l, p, 1), m_u_max);
                average(l + 1, 2 * p)     = a;
                average(l + 1, 2 * p + 1) = b;
                m_det[static_cast<std::size_t>(l + 1)][static_cast<std::size_t>(2 * p)]     = 0.0;
                m_det[static_cast<std::size_t>(l + 1)][static_cast<std::size_t>(2 * p + 1)] = 0.0;
            }
            m_flags[static_cast<std::size_t>(l + 1)][static_cast<std::size_t>(2 * p)]     = deletable_bit;
            m_flags[static_cast<std::size_t>(l + 1)][static_cast<std::size_t>(2 * p + 1)] = deletable_bit;
            set_kind(l, p, NodeKind::internal);
            set_kind(l + 1, 2 * p, NodeKind::leaf);
            set_kind(l + 1, 2 * p + 1, NodeKind::leaf);
        }

        void split(int l, long i)
        {
            for (long d = -m_grade; d <= m_grade; ++d)
            {
                const long q = neighbour(l, i, d);
                if (q >= 0)
                {
                    ensure_real(l, q);
                }
            }
            create_children(l, i);
        }

        [[nodiscard]] bool can_merge(int l, long i) const
        {
            if (l >= m_L || kind(l, i) != NodeKind::internal)
            {
                return false;
            }
            const long a = 2 * i;
            if (kind(l + 1, a) != NodeKind::leaf || kind(l + 1, a + 1) != NodeKind::leaf || pinned(l + 1, a) || pinned(l + 1, a + 1))
            {
                return false;
            }
            // children of nearby internal nodes still need the pair
            for (long d = -m_grade; d <= 1 + m_grade; ++d)
            {
                const long q = neighbour(l + 1, a, d);
                if (q >= 0 && kind(l + 1, q) == NodeKind::internal)
                {
                    return false;
                }
            }
            return true;
        }

        void merge(int l, long i)
        {
            set_kind(l + 1, 2 * i, NodeKind::absent);
            set_kind(l + 1, 2 * i + 1, NodeKind::absent);
            m_flags[static_cast<std::size_t>(l + 1)][static_cast<std::size_t>(2 * i)]     = 0;
            m_flags[static_cast<std::size_t>(l + 1)][static_cast<std::size_t>(2 * i + 1)] = 0;
            set_kind(l, i, NodeKind::leaf);
        }

        void clear_virtual()
        {
            for (const NodeKey& v : m_virtual)
            {
                set_kind(v.level, v.index, NodeKind::absent);
            }
            m_virtual.clear();
            m_virtual_built = false;
        }

        /// Bottom-up pass: projection, details and deletable flags.
        void analyse(const std::vector<double>& tol)
        {
            for (long r = 0; r < m_n0; ++r)
            {
                m_flags[0][static_cast<std::size_t>(r)] |= deletable_bit;
            }
            for (int l = m_L - 1; l >= 0; --l)
            {
                const auto ul = static_cast<std::size_t>(l);
                auto& p       = m_avg[ul];
                const auto& c = m_avg[ul + 1];
                for (long i : m_internal[ul])
                {
                    const auto k = static_cast<std::size_t>(i);
                    p[k]         = project(c[2 * k], c[2 * k + 1]);
                }
                const double t = tol[ul + 1];
                auto& f        = m_flags[ul + 1];
                auto& det      = m_det[ul + 1];
                for (long i : m_internal[ul])
                {
                    const auto k    = static_cast<std::size_t>(i);
                    const double d  = c[2 * k] - predicted_children(l, i).first;
                    det[2 * k]      = d;
                    det[2 * k + 1]  = -d;
                    const auto del  = static_cast<std::uint8_t>(std::abs(d) < t ? deletable_bit : 0);
                    f[2 * k]        = static_cast<std::uint8_t>((f[2 * k] & pinned_bit) | del);
                    f[2 * k + 1]    = static_cast<std::uint8_t>((f[2 * k + 1] & pinned_bit) | del);
                }
            }
        }

        void coarsen()
        {
            for (int l = 0; l < m_L; ++l)
            {
                for (long i : m_internal[static_cast<std::size_t>(l)])
                {
                    if (deletable(l, i) && deletable(l + 1, 2 * i) && can_merge(l, i))
                    {
                        merge(l, i);
                    }
                }
            }
        }

        void refine()
        {
            m_split_queue.clear();
            for (const NodeKey& k : m_leaves)
            {
                if (k.level < m_L && !deletable(k.level, k.index))
                {
                    m_split_queue.push_back(k);
                }
            }
            for (const NodeKey& k : m_split_queue)
            {
                if (kind(k.level, k.index) == NodeKind::leaf)
                {
                    split(k.level, k.index);
                }
            }
        }

        void rebuild_index()
        {
            m_leaves.clear();
            for (long r = 0; r < m_n0; ++r)
            {
                collect_leaves(m_leaves, 0, r);
            }
            index_internal();
        }

        /// New ordered leaf list from the previous one after one coarsening
        /// and refinement pass: merges are at most one level deep.
        void relink_leaves()
        {
            m_scratch.clear();
            for (const NodeKey& k : m_leaves)
            {
                switch (kind(k.level, k.index))
                {
                case NodeKind::leaf:
                    m_scratch.push_back(k);
                    break;
                case NodeKind::internal:
                    collect_leaves(m_scratch, k.level, k.index);
                    break;
                default:
                    if ((k.index & 1) == 0)
                    {
                        m_scratch.push_back({k.level - 1, k.index / 2});
                    }
                    break;
                }
            }
            std::swap(m_leaves, m_scratch);
        }

        /// Internal nodes per level, derived from the leaves.
        void index_internal()
        {
            for (auto& v : m_internal)
            {
                v.clear();
            }
            for (const NodeKey& k : m_leaves)
            {
                if (k.level > 0 && (k.index & 1) == 0)
                {
                    m_internal[static_cast<std::size_t>(k.level - 1)].push_back(k.index / 2);
                }
            }
            for (int l = m_L - 1; l >= 1; --l)
            {
                for (long i : m_internal[static_cast<std::size_t>(l)])
                {
                    if ((i & 1) == 0)
                    {
                        m_internal[static_cast<std::size_t>(l - 1)].push_back(i / 2);
                    }
                }
            }
        }

        void collect_leaves(std::vector<NodeKey>& out, int l, long i) const
        {
            if (kind(l, i) == NodeKind::internal)
            {
                collect_leaves(out, l + 1, 2 * i);
                collect_leaves(out, l + 1, 2 * i + 1);
                return;
            }
            out.push_back({l, i});
        }

        /// Whether a leaf within two positions in leaf order is coarser;
        /// only then can a same-level cousin be missing.
        [[nodiscard]] bool near_coarser(std::size_t k) const
        {
            const std::size_t n = m_leaves.size();
            const int l         = m_leaves[k].level;
            if (n < 5)
            {
                return true;
            }
            const bool periodic = m_bc == Boundary::periodic;
            for (std::size_t d = 1; d <= 2; ++d)
            {
                if (k + d < n ? m_leaves[k + d].level < l : (periodic && m_leaves[k + d - n].level < l))
                {
                    return true;
                }
                if (k >= d ? m_leaves[k - d].level < l : (periodic && m_leaves[k + n - d].level < l))
                {
                    return true;
                }
            }
            return false;
        }

        void build_virtual()
        {
            for (std::size_t j = 0; j < m_leaves.size(); ++j)
            {
                const NodeKey leaf = m_leaves[j];
                if (leaf.level == 0 || !near_coarser(j))
                {
                    continue;
                }
                for (long d : {-2L, -1L, 1L, 2L})
                {
                    const long q = neighbour(leaf.level, leaf.index, d);
                    if (q < 0 || kind(leaf.level, q) != NodeKind::absent)
                    {
                        continue;
                    }
                    const long p      = q / 2;
                    const auto [a, b] = predicted_children(leaf.level - 1, p);
                    average(leaf.level, q) = (q & 1) ? b : a;
                    set_kind(leaf.level, q, NodeKind::virtual_leaf);
                    m_virtual.push_back({leaf.level, q});
                }
            }
            m_virtual_built = true;
        }

        long m_n0;
        int m_L;
        Boundary m_bc;
        double m_u_max;
        int m_grade;
        bool m_exact_mode    = false;
        bool m_virtual_built = false;
        std::vector<std::vector<NodeKind>> m_kind;
        std::vector<std::vector<double>> m_avg;
        std::vector<std::vector<double>> m_det;
        std::vector<std::vector<std::uint8_t>> m_flags;
        std::vector<std::vector<long>> m_internal;
        std::vector<NodeKey> m_leaves;
        std::vector<NodeKey> m_virtual;
        std::vector<NodeKey> m_split_queue;
        std::vector<NodeKey> m_scratch;
    };
}

#include "gerbecalc/index_map.hpp"

namespace gerbecalc {

IndexMap identity_map(int arity) {
    IndexMap f;
    f.arity_in = f.arity_out = arity;
    f.blocks.resize(arity);
    for (int s = 0; s < arity; ++s) f.blocks[s] = {{s, false}};
    return f;
}

IndexMap projection_map(int arity_in, const std::vector<int>& slots) {
    IndexMap f;
    f.arity_in = arity_in;
    f.arity_out = static_cast<int>(slots.size());
    for (int s : slots) {
        GC_CHECK(0 <= s && s < arity_in, "projection_map: slot out of range");
        f.blocks.push_back({{s, false}});
    }
    return f;
}

IndexMap face_map(int q, int k) {
    GC_CHECK(q >= 1 && 0 <= k && k <= q, "face_map: bad (q, k)");
    IndexMap f;
    f.arity_in = q;
    f.arity_out = q - 1;
    if (k == 0) {
        for (int s = 1; s < q; ++s) f.blocks.push_back({{s, false}});
    } else if (k == q) {
        for (int s = 0; s < q - 1; ++s) f.blocks.push_back({{s, false}});
    } else {
        for (int s = 0; s < q - 1; ++s) {
            if (s == k - 1)
                f.blocks.push_back({{s, false}, {s + 1, false}});
            else if (s < k - 1)
                f.blocks.push_back({{s, false}});
            else
                f.blocks.push_back({{s + 1, false}});
        }
    }
    return f;
}

IndexMap compose_maps(const IndexMap& first, const IndexMap& second) {
    GC_CHECK(first.arity_out == second.arity_in,
             "compose_maps: arity mismatch (", first.arity_out, " vs ",
             second.arity_in, ")");
    IndexMap f;
    f.arity_in = first.arity_in;
    f.arity_out = second.arity_out;
    f.blocks.resize(second.arity_out);
    for (int s = 0; s < second.arity_out; ++s) {
        for (const auto& [j, inv] : second.blocks[s]) {
            const auto& sub = first.blocks[j];
            if (!inv) {
                for (const auto& fac : sub) f.blocks[s].push_back(fac);
            } else {
                // (a b)^{-1} = b^{-1} a^{-1}: reverse and flip.
                for (auto it = sub.rbegin(); it != sub.rend(); ++it)
                    f.blocks[s].emplace_back(it->first, !it->second);
            }
        }
    }
    return f;
}

std::vector<GroupElement> apply_point(const IndexMap& f,
                                      const std::vector<GroupElement>& pt) {
    GC_CHECK(static_cast<int>(pt.size()) == f.arity_in,
             "apply_point: arity mismatch");
    std::vector<GroupElement> out;
    out.reserve(f.arity_out);
    for (const auto& block : f.blocks) {
        GC_CHECK(!block.empty(), "apply_point: empty block");
        GroupElement acc;
        bool started = false;
        for (const auto& [j, inv] : block) {
            GroupElement fac = inv ? group_inv(pt[j]) : pt[j];
            acc = started ? group_mul(acc, fac) : fac;
            started = true;
        }
        out.push_back(acc);
    }
    return out;
}

std::vector<Mat> apply_tangent(const IndexMap& f,
                               const std::vector<GroupElement>& pt,
                               const std::vector<Mat>& v) {
    GC_CHECK(pt.size() == v.size() &&
                 static_cast<int>(pt.size()) == f.arity_in,
             "apply_tangent: arity mismatch");
    std::vector<Mat> out;
    out.reserve(f.arity_out);
    for (const auto& block : f.blocks) {
        GC_CHECK(!block.empty(), "apply_tangent: empty block");
        const int m = static_cast<int>(block.size());
        // Factor values and factor derivatives, d(g^{-1}) = -g^{-1} v g^{-1}.
        std::vector<Mat> val(m), der(m);
        for (int t = 0; t < m; ++t) {
            const auto& [j, inv] = block[t];
            if (!inv) {
                val[t] = pt[j].m;
                der[t] = v[j];
            } else {
                const Mat gi = group_inv(pt[j]).m;
                val[t] = gi;
                der[t] = -gi * v[j] * gi;
            }
        }
        // Leibniz rule over the product; slots may carry different ambient
        // sizes, so the identity factors are sized per block.
        const int n = static_cast<int>(pt[block[0].first].m.rows());
        std::vector<Mat> prefix(m + 1), suffix(m + 1);
        prefix[0] = Mat::Identity(n, n);
        for (int t = 0; t < m; ++t) prefix[t + 1] = prefix[t] * val[t];
        suffix[m] = Mat::Identity(n, n);
        for (int t = m - 1; t >= 0; --t) suffix[t] = val[t] * suffix[t + 1];
        Mat d = Mat::Zero(n, n);
        for (int t = 0; t < m; ++t) d += prefix[t] * der[t] * suffix[t + 1];
        out.push_back(d);
    }
    return out;
}

}  // namespace gerbecalc

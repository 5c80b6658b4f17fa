#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <vector>

namespace catinfo {

// A subset of a table's variables as a bitmask over variable indices.
// Tables are capped at 32 variables, which keeps subsets cheap and makes
// every subset iteration deterministic (ascending variable index).
using VarSet = std::uint32_t;

inline int vs_size(VarSet s) { return std::popcount(s); }
inline bool vs_contains(VarSet s, int var) { return (s >> var) & 1u; }
inline VarSet vs_single(int var) { return VarSet{1} << var; }

inline std::vector<int> vs_indices(VarSet s)
{
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(vs_size(s)));
    for (VarSet m = s; m != 0; m &= m - 1)
        out.push_back(std::countr_zero(m));
    return out;
}

// All nonempty subsets of `s`, ascending as masks.
inline std::vector<VarSet> vs_subsets(VarSet s)
{
    std::vector<VarSet> out;
    for (VarSet sub = s; sub != 0; sub = (sub - 1) & s)
        out.push_back(sub);
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace catinfo

#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace qgp {

// Collapse map for a depth-n expansion over base order r: picks[j-1] is the
// highlighted row of column j, constrained to 1..r+2j-2. The full map count
// is prod_j (r+2j-2).
struct CollapseMap {
    int r = 1;
    int n = 1;
    std::vector<int> picks;  // 1-based rows, picks.size() == n

    void validate() const;
    bool operator==(const CollapseMap& o) const = default;
};

// Collapse map plus the time-label assignment: col_time[j-1] is the label
// shown above column j (labels are r+2, r+4, ..., r+2n; identity initially).
struct BoardState {
    CollapseMap map;
    std::vector<int> col_time;

    static BoardState initial(const CollapseMap& m);
    bool operator==(const BoardState& o) const = default;
};

std::uint64_t map_count(int r, int n);
std::vector<CollapseMap> enumerate_maps(int r, int n, std::uint64_t cap = 10'000'000);

// A move at boundary j (1 <= j <= n-1) is enabled when picks[j] < picks[j-1]
// (0-based). It swaps the two picks, relabels rows r+2j-1 <-> r+2j+1 and
// r+2j <-> r+2j+2 in every later column, and swaps the two time labels.
bool move_enabled(const BoardState& s, int j);
BoardState apply_move(const BoardState& s, int j);  // throws when not enabled

// Upper echelon: no later column picks a strictly higher row than an earlier
// column, i.e. picks are nondecreasing (ties allowed).
bool is_echelon(const CollapseMap& m);

struct EchelonResult {
    CollapseMap canonical;
    std::vector<int> col_time;
    int moves = 0;
};

// Deterministic normalization: repeatedly apply the move at the smallest
// enabled boundary. Budget default n^2 (r+2n); exhausting it throws.
EchelonResult to_echelon(const CollapseMap& m, int budget = 0);
// Same endpoint reached through a uniformly random enabled move each step.
EchelonResult to_echelon_randomized(const CollapseMap& m, std::mt19937_64& rng, int budget = 0);

struct ClassMember {
    CollapseMap map;
    std::vector<int> col_time;
};

struct EchelonClass {
    CollapseMap canonical;
    std::vector<ClassMember> members;
};

std::vector<EchelonClass> equivalence_classes(int r, int n, std::uint64_t cap = 10'000'000,
                                              int budget = 0);

std::uint64_t count_echelon(int r, int n, std::uint64_t cap = 10'000'000);
std::uint64_t echelon_bound(int r, int n);        // 2^(r+3n-2)
std::uint64_t partition_count(int n);             // P_1 = 1, P_n = 1 + sum P_i
std::uint64_t binomial(std::uint64_t n, std::uint64_t k);

// Time-label chain t_r >= t_{c1} >= ... >= t_{cn} of the member's integration
// simplex; c_p = sigma(r+2p) recovered from col_time.
std::vector<int> domain_chain(const BoardState& s);
std::string domain_chain_string(const BoardState& s);

}  // namespace qgp

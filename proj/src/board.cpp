#include "qgp/board.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <sstream>

#include "qgp/errors.hpp"

namespace qgp {

void CollapseMap::validate() const {
    if (r < 1 || n < 1) throw ValidationError("CollapseMap: need r >= 1 and n >= 1");
    if (static_cast<int>(picks.size()) != n)
        throw ValidationError("CollapseMap: picks must have n entries");
    for (int j = 1; j <= n; ++j) {
        const int p = picks[static_cast<std::size_t>(j - 1)];
        if (p < 1 || p > r + 2 * j - 2)
            throw ValidationError("CollapseMap: column " + std::to_string(j) + " pick " +
                                  std::to_string(p) + " outside 1.." +
                                  std::to_string(r + 2 * j - 2));
    }
}

BoardState BoardState::initial(const CollapseMap& m) {
    m.validate();
    BoardState s{m, {}};
    s.col_time.resize(static_cast<std::size_t>(m.n));
    for (int j = 1; j <= m.n; ++j) s.col_time[static_cast<std::size_t>(j - 1)] = m.r + 2 * j;
    return s;
}

std::uint64_t map_count(int r, int n) {
    std::uint64_t c = 1;
    for (int j = 1; j <= n; ++j) c *= static_cast<std::uint64_t>(r + 2 * j - 2);
    return c;
}

std::vector<CollapseMap> enumerate_maps(int r, int n, std::uint64_t cap) {
    if (r < 1 || n < 1) throw ValidationError("enumerate_maps: need r >= 1 and n >= 1");
    const std::uint64_t count = map_count(r, n);
    if (count > cap)
        throw ResourceError("enumerate_maps: " + std::to_string(count) +
                                " maps exceed cap " + std::to_string(cap),
                            count * sizeof(CollapseMap));
    std::vector<CollapseMap> out;
    out.reserve(count);
    CollapseMap m{r, n, std::vector<int>(static_cast<std::size_t>(n), 1)};
    // Odometer in lexicographic order, last column fastest.
    while (true) {
        out.push_back(m);
        int j = n - 1;
        while (j >= 0) {
            if (m.picks[static_cast<std::size_t>(j)] < r + 2 * (j + 1) - 2) {
                ++m.picks[static_cast<std::size_t>(j)];
                break;
            }
            m.picks[static_cast<std::size_t>(j)] = 1;
            --j;
        }
        if (j < 0) break;
    }
    return out;
}

bool move_enabled(const BoardState& s, int j) {
    if (j < 1 || j >= s.map.n) return false;
    return s.map.picks[static_cast<std::size_t>(j)] < s.map.picks[static_cast<std::size_t>(j - 1)];
}

BoardState apply_move(const BoardState& s, int j) {
    if (j < 1 || j >= s.map.n)
        throw ValidationError("apply_move: boundary " + std::to_string(j) + " outside 1.." +
                              std::to_string(s.map.n - 1));
    if (!move_enabled(s, j))
        throw ValidationError("apply_move: move at boundary " + std::to_string(j) +
                              " not enabled (needs picks[j+1] < picks[j])");
    BoardState out = s;
    const int r = s.map.r;
    std::swap(out.map.picks[static_cast<std::size_t>(j - 1)],
              out.map.picks[static_cast<std::size_t>(j)]);
    // Later columns referencing the swapped row pairs follow them.
    const int ra = r + 2 * j - 1, rb = r + 2 * j + 1;  // odd pair
    const int rc = r + 2 * j, rd = r + 2 * j + 2;      // even pair
    for (int c = j + 2; c <= s.map.n; ++c) {
        int& p = out.map.picks[static_cast<std::size_t>(c - 1)];
        if (p == ra)
            p = rb;
        else if (p == rb)
            p = ra;
        else if (p == rc)
            p = rd;
        else if (p == rd)
            p = rc;
    }
    std::swap(out.col_time[static_cast<std::size_t>(j - 1)],
              out.col_time[static_cast<std::size_t>(j)]);
    out.map.validate();
    return out;
}

bool is_echelon(const CollapseMap& m) {
    for (std::size_t j = 1; j < m.picks.size(); ++j)
        if (m.picks[j] < m.picks[j - 1]) return false;
    return true;
}

namespace {

int default_budget(const CollapseMap& m) { return m.n * m.n * (m.r + 2 * m.n); }

EchelonResult run_moves(const CollapseMap& m, int budget,
                        const std::function<int(const BoardState&)>& choose) {
    if (budget <= 0) budget = default_budget(m);
    BoardState s = BoardState::initial(m);
    int moves = 0;
    while (!is_echelon(s.map)) {
        if (moves >= budget)
            throw NumericalError("to_echelon: move budget " + std::to_string(budget) +
                                 " exhausted; canonicalization failed");
        s = apply_move(s, choose(s));
        ++moves;
    }
    return EchelonResult{s.map, s.col_time, moves};
}

}  // namespace

EchelonResult to_echelon(const CollapseMap& m, int budget) {
    return run_moves(m, budget, [](const BoardState& s) {
        for (int j = 1; j < s.map.n; ++j)
            if (move_enabled(s, j)) return j;
        throw NumericalError("to_echelon: no enabled move on a non-echelon map");
    });
}

EchelonResult to_echelon_randomized(const CollapseMap& m, std::mt19937_64& rng, int budget) {
    return run_moves(m, budget, [&rng](const BoardState& s) {
        std::vector<int> enabled;
        for (int j = 1; j < s.map.n; ++j)
            if (move_enabled(s, j)) enabled.push_back(j);
        if (enabled.empty())
            throw NumericalError("to_echelon: no enabled move on a non-echelon map");
        std::uniform_int_distribution<std::size_t> pick(0, enabled.size() - 1);
        return enabled[pick(rng)];
    });
}

std::vector<EchelonClass> equivalence_classes(int r, int n, std::uint64_t cap, int budget) {
    const auto maps = enumerate_maps(r, n, cap);
    std::map<std::vector<int>, EchelonClass> classes;
    for (const auto& m : maps) {
        const EchelonResult res = to_echelon(m, budget);
        auto& cls = classes[res.canonical.picks];
        if (cls.members.empty()) cls.canonical = res.canonical;
        cls.members.push_back(ClassMember{m, res.col_time});
    }
    std::vector<EchelonClass> out;
    out.reserve(classes.size());
    for (auto& [_, cls] : classes) out.push_back(std::move(cls));
    return out;
}

std::uint64_t count_echelon(int r, int n, std::uint64_t cap) {
    const auto maps = enumerate_maps(r, n, cap);
    std::uint64_t c = 0;
    for (const auto& m : maps) c += is_echelon(m) ? 1 : 0;
    return c;
}

std::uint64_t echelon_bound(int r, int n) {
    const int e = r + 3 * n - 2;
    if (e >= 64) throw ValidationError("echelon_bound: exponent too large");
    return std::uint64_t{1} << e;
}

std::uint64_t partition_count(int n) {
    if (n < 1) throw ValidationError("partition_count: n must be >= 1");
    std::vector<std::uint64_t> P(static_cast<std::size_t>(n) + 1, 0);
    P[1] = 1;
    for (int m = 2; m <= n; ++m) {
        std::uint64_t s = 1;
        for (int i = 1; i < m; ++i) s += P[static_cast<std::size_t>(i)];
        P[static_cast<std::size_t>(m)] = s;
    }
    return P[static_cast<std::size_t>(n)];
}

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
    if (k > n) return 0;
    k = std::min(k, n - k);
    std::uint64_t c = 1;
    for (std::uint64_t i = 0; i < k; ++i) c = c * (n - i) / (i + 1);
    return c;
}

std::vector<int> domain_chain(const BoardState& s) {
    // col_time[p-1] = sigma^{-1}(r+2p); the chain lists sigma(r+2p).
    const int r = s.map.r, n = s.map.n;
    std::vector<int> sigma_of(static_cast<std::size_t>(n));
    for (int p = 1; p <= n; ++p) {
        const int label = s.col_time[static_cast<std::size_t>(p - 1)];
        const int pos = (label - r) / 2;  // label = r+2*pos
        sigma_of[static_cast<std::size_t>(pos - 1)] = r + 2 * p;
    }
    return sigma_of;
}

std::string domain_chain_string(const BoardState& s) {
    const auto chain = domain_chain(s);
    std::ostringstream os;
    os << "t" << s.map.r;
    for (int label : chain) os << ">=t" << label;
    return os.str();
}

}  // namespace qgp

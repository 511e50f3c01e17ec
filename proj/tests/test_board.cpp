#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "dense_oracle.hpp"
#include "qgp/board.hpp"
#include "qgp/bounds.hpp"
#include "qgp/errors.hpp"
#include "qgp/kernels.hpp"

using namespace qgp;
namespace oc = qgp::oracle;

TEST_CASE("map enumeration and counting") {
    CHECK(map_count(1, 1) == 1);
    CHECK(map_count(1, 2) == 3);
    CHECK(map_count(2, 3) == 48);
    CHECK(map_count(3, 4) == 945);

    const auto maps = enumerate_maps(2, 3);
    CHECK(maps.size() == 48);
    std::set<std::vector<int>> uniq;
    for (const auto& m : maps) {
        m.validate();
        uniq.insert(m.picks);
    }
    CHECK(uniq.size() == 48);
    CHECK(std::is_sorted(maps.begin(), maps.end(),
                         [](const CollapseMap& a, const CollapseMap& b) {
                             return a.picks < b.picks;
                         }));
    CHECK_THROWS_AS(enumerate_maps(3, 4, 100), ResourceError);
    CHECK_THROWS_AS((CollapseMap{1, 2, {1, 4}}.validate()), ValidationError);
}

TEST_CASE("move enabling and the r=1 dead end") {
    // r=1: picks[0] = 1 always, so no move is ever enabled at boundary 1.
    for (const auto& m : enumerate_maps(1, 2)) {
        const BoardState s = BoardState::initial(m);
        CHECK(!move_enabled(s, 1));
        CHECK_THROWS_AS(apply_move(s, 1), ValidationError);
    }
}

TEST_CASE("single move at r=2, n=2") {
    const CollapseMap m{2, 2, {2, 1}};
    BoardState s = BoardState::initial(m);
    REQUIRE(move_enabled(s, 1));
    const BoardState out = apply_move(s, 1);
    CHECK(out.map.picks == std::vector<int>{1, 2});
    CHECK(out.col_time == std::vector<int>{6, 4});
}

TEST_CASE("row relabeling in later columns, hand-worked r=2, n=3 cases") {
    // Move at boundary 1 swaps rows 3<->5 and 4<->6 in column 3.
    auto moved = [](std::vector<int> picks) {
        const BoardState out = apply_move(BoardState::initial(CollapseMap{2, 3, picks}), 1);
        return out;
    };
    CHECK(moved({2, 1, 3}).map.picks == std::vector<int>{1, 2, 5});
    CHECK(moved({2, 1, 4}).map.picks == std::vector<int>{1, 2, 6});
    CHECK(moved({2, 1, 5}).map.picks == std::vector<int>{1, 2, 3});
    CHECK(moved({2, 1, 6}).map.picks == std::vector<int>{1, 2, 4});
    CHECK(moved({2, 1, 1}).map.picks == std::vector<int>{1, 2, 1});
    CHECK(moved({2, 1, 2}).map.picks == std::vector<int>{1, 2, 2});
    CHECK(moved({2, 1, 3}).col_time == std::vector<int>{6, 4, 8});

    // Move at boundary 2 has no later columns to relabel.
    const BoardState out = apply_move(BoardState::initial(CollapseMap{2, 3, {1, 4, 2}}), 2);
    CHECK(out.map.picks == std::vector<int>{1, 2, 4});
    CHECK(out.col_time == std::vector<int>{4, 8, 6});
}

TEST_CASE("echelon recognition") {
    CHECK(is_echelon(CollapseMap{1, 3, {1, 2, 4}}));   // the displayed example
    CHECK(!is_echelon(CollapseMap{2, 2, {2, 1}}));
    CHECK(is_echelon(CollapseMap{5, 1, {3}}));
    CHECK(is_echelon(CollapseMap{2, 3, {1, 1, 1}}));   // ties allowed
    CHECK(!is_echelon(CollapseMap{1, 3, {1, 3, 2}}));
}

TEST_CASE("to_echelon terminates, fixes echelon maps, and is confluent") {
    SUBCASE("already echelon: zero moves, identity time labels") {
        const CollapseMap m{2, 3, {1, 2, 2}};
        const EchelonResult res = to_echelon(m);
        CHECK(res.canonical == m);
        CHECK(res.moves == 0);
        CHECK(res.col_time == std::vector<int>{4, 6, 8});
    }
    SUBCASE("single swap") {
        const EchelonResult res = to_echelon(CollapseMap{2, 2, {2, 1}});
        CHECK(res.canonical.picks == std::vector<int>{1, 2});
        CHECK(res.col_time == std::vector<int>{6, 4});
        CHECK(res.moves == 1);
    }
    SUBCASE("exhaustive small boards: termination and randomized confluence") {
        std::mt19937_64 rng(99);
        for (int r : {1, 2, 3}) {
            for (int n : {1, 2, 3}) {
                for (const auto& m : enumerate_maps(r, n)) {
                    const EchelonResult det = to_echelon(m);
                    CHECK(is_echelon(det.canonical));
                    for (int trial = 0; trial < 10; ++trial) {
                        const EchelonResult rnd = to_echelon_randomized(m, rng);
                        CHECK(rnd.canonical == det.canonical);
                        CHECK(rnd.col_time == det.col_time);
                    }
                }
            }
        }
    }
}

TEST_CASE("equivalence classes partition the map set") {
    for (int r : {1, 2, 3}) {
        for (int n : {1, 2, 3}) {
            const auto classes = equivalence_classes(r, n);
            std::uint64_t total = 0;
            for (const auto& c : classes) {
                total += c.members.size();
                CHECK(is_echelon(c.canonical));
                // sigma distinctness within a class
                std::set<std::vector<int>> sigmas;
                for (const auto& mem : c.members) sigmas.insert(mem.col_time);
                CHECK(sigmas.size() == c.members.size());
            }
            CHECK(total == map_count(r, n));
            CHECK(classes.size() == count_echelon(r, n));
        }
    }
    // r=1, n=2: three maps, all echelon, three singleton classes
    const auto cls = equivalence_classes(1, 2);
    CHECK(cls.size() == 3);
    for (const auto& c : cls) CHECK(c.members.size() == 1);
}

TEST_CASE("echelon counts against the lemma bound and the partition cross-check") {
    for (int r : {1, 2, 3}) {
        for (int n : {1, 2, 3, 4}) {
            const std::uint64_t cnt = count_echelon(r, n);
            CHECK(cnt <= echelon_bound(r, n));
            // two-step partition argument upper bound P_n sum_i C(r+2n-2, i)
            std::uint64_t binom_sum = 0;
            for (int i = 1; i <= n; ++i)
                binom_sum += binomial(static_cast<std::uint64_t>(r + 2 * n - 2),
                                      static_cast<std::uint64_t>(i));
            CHECK(cnt <= partition_count(n) * binom_sum);
            CHECK(partition_count(n) * binom_sum <= echelon_bound(r, n));
        }
    }
    CHECK(count_echelon(1, 1) == 1);
    CHECK(count_echelon(3, 2) <= 128);
}

TEST_CASE("partition counts") {
    CHECK(partition_count(1) == 1);
    CHECK(partition_count(2) == 2);
    CHECK(partition_count(3) == 4);
    for (int n = 1; n <= 20; ++n) {
        CHECK(partition_count(n) <= (std::uint64_t{1} << n));
        if (n >= 2) {
            std::uint64_t s = 1;
            for (int i = 1; i < n; ++i) s += partition_count(i);
            CHECK(partition_count(n) == s);
        }
        CHECK(partition_count(n) == (std::uint64_t{1} << (n - 1)));
    }
}

TEST_CASE("product formula as a gamma-function ratio") {
    for (int r : {2, 4, 6}) {  // even r: exact integer identity
        for (int n : {1, 2, 3, 4}) {
            std::uint64_t gamma_form = 1;
            for (int j = 0; j < n; ++j)
                gamma_form *= static_cast<std::uint64_t>(r / 2 + j);
            CHECK(map_count(r, n) == (std::uint64_t{1} << n) * gamma_form);
        }
    }
    for (int r : {1, 3}) {  // odd r via log-gamma
        for (int n : {1, 2, 3, 4}) {
            const double lg = n * std::log(2.0) + std::lgamma(r / 2.0 + n) -
                              std::lgamma(r / 2.0);
            CHECK(std::abs(std::exp(lg) - static_cast<double>(map_count(r, n))) <=
                  1e-12 * static_cast<double>(map_count(r, n)));
        }
    }
}

TEST_CASE("domain chains are the time-ordering simplices") {
    const CollapseMap m{2, 2, {2, 1}};
    const BoardState init = BoardState::initial(m);
    CHECK(domain_chain_string(init) == "t2>=t4>=t6");
    const BoardState moved = apply_move(init, 1);
    CHECK(domain_chain(moved) == std::vector<int>{6, 4});
    CHECK(domain_chain_string(moved) == "t2>=t6>=t4");
}

namespace {

// Symmetrize a kernel over permutations of the n slot pairs
// (r+2j-1, r+2j), j = 1..n, leaving slots 1..r fixed. This is the symmetry of
// the terminal kernel that the integrand-equality argument uses.
SeparableKernel block_symmetrize(const SeparableKernel& k, int r, int n) {
    std::vector<int> perm(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;
    SeparableKernel out{k.grid, k.order, {}};
    do {
        for (const auto& t : k.terms) {
            KernelTerm nt;
            nt.coeff = t.coeff;
            nt.f.resize(t.f.size());
            nt.g.resize(t.g.size());
            for (int s = 0; s < r; ++s) {
                nt.f[static_cast<std::size_t>(s)] = t.f[static_cast<std::size_t>(s)];
                nt.g[static_cast<std::size_t>(s)] = t.g[static_cast<std::size_t>(s)];
            }
            for (int b = 0; b < n; ++b) {
                const int src = perm[static_cast<std::size_t>(b)];
                for (int off = 0; off < 2; ++off) {
                    nt.f[static_cast<std::size_t>(r + 2 * b + off)] =
                        t.f[static_cast<std::size_t>(r + 2 * src + off)];
                    nt.g[static_cast<std::size_t>(r + 2 * b + off)] =
                        t.g[static_cast<std::size_t>(r + 2 * src + off)];
                }
            }
            out.terms.push_back(std::move(nt));
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    const double nrm = kernel_norm(out, 0.0);
    for (auto& t : out.terms) t.coeff /= nrm;
    return out;
}

}  // namespace

TEST_CASE("acceptable moves preserve the Duhamel integrand at matched times") {
    // For every class member (mu, sigma): J(v; mu) evaluated with the column
    // time values v equals J(w; canonical) where w reassigns the values along
    // the tracked time labels. Checked densely at the output order.
    GridSpec g{1, 16, 2.0 * 3.14159265358979323846};
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> uni(0.05, 0.35);

    for (const auto& [r, n] :
         std::vector<std::pair<int, int>>{{2, 2}, {1, 3}, {2, 3}}) {
        SeparableKernel base = random_separable_kernel(g, r + 2 * n, 2, rng, 2.0);
        const SeparableKernel sym = block_symmetrize(base, r, n);

        std::vector<double> v(static_cast<std::size_t>(n));
        double t_here = 1.0;
        for (auto& x : v) t_here -= uni(rng), x = t_here;  // decreasing values
        const double t_r = 1.0;
        std::vector<double> base_times{t_r};
        for (double x : v) base_times.push_back(x);

        auto times_for = [&](const std::vector<int>& col_time) {
            std::vector<double> times{t_r};
            for (int p = 0; p < n; ++p) {
                const int label = col_time[static_cast<std::size_t>(p)];
                times.push_back(v[static_cast<std::size_t>((label - r) / 2 - 1)]);
            }
            return times;
        };

        for (const auto& cls : equivalence_classes(r, n)) {
            if (cls.members.size() < 2) continue;
            for (const auto& mem : cls.members) {
                if (mem.map == cls.canonical) continue;
                const SeparableKernel ja =
                    duhamel_integrand(sym, mem.map.picks, base_times);
                const SeparableKernel jb =
                    duhamel_integrand(sym, cls.canonical.picks, times_for(mem.col_time));
                const double diff = oc::dense_max_diff(oc::materialize(ja, 1u << 26),
                                                       oc::materialize(jb, 1u << 26));
                CAPTURE(r);
                CAPTURE(n);
                CAPTURE(mem.map.picks);
                CHECK(diff < 1e-9);
            }
        }
    }
}

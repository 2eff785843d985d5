#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gwc/errors.hpp"
#include "gwc/exact_engine.hpp"
#include "gwc/genealogy.hpp"
#include "gwc/rng.hpp"

using namespace gwc;

namespace {

const model_spec binary = validate({{2, 1.0}}, {{1, 1.0}});
const model_spec mixed = validate({{1, 0.5}, {2, 0.5}}, {{1, 0.5}, {2, 0.5}});

std::uint64_t total(const genealogy_state& s)
{
    std::uint64_t sum = 0;
    for (const auto& f : s.founders) {
        sum += f.count;
    }
    return sum;
}

} // namespace

TEST_CASE("Philox4x32-10 known answers")
{
    using ctr = philox4x32::counter_type;
    CHECK(philox4x32::generate(ctr{0, 0, 0, 0}, {0, 0}) == ctr{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
    CHECK(philox4x32::generate(ctr{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
          ctr{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
    CHECK(philox4x32::generate(ctr{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
          ctr{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("streams are reproducible and distinct")
{
    philox4x32 a(5, 0), b(5, 0), c(5, 1);
    bool differs = false;
    for (int k = 0; k < 16; ++k) {
        const auto x = a();
        CHECK(x == b());
        differs = differs || x != c();
    }
    CHECK(differs);
}

TEST_CASE("deterministic tree populations")
{
    const auto s1 = simulate(binary, 1, 0, 1);
    CHECK(s1.population() == 2);
    const auto s2 = simulate(binary, 2, 0, 1);
    CHECK(s2.population() == 6);
    const auto s3 = simulate(binary, 3, 1, 1);
    CHECK(s3.population() == 14);
    // Tracking from generation 1: two native founders of size 4 each, then immigrant cohorts.
    CHECK(s3.tracked_natives == 2);
    CHECK(total(s3) == 14);
    CHECK(quenched_prob(s2, 2) == doctest::Approx(7.0 / 15.0).epsilon(1e-15));
}

TEST_CASE("population identity and growth on random trees")
{
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        for (int m = 0; m < 6; ++m) {
            const auto s = simulate(mixed, 6, m, seed);
            CHECK(total(s) == s.population());
            CHECK(s.population() >= 6);
        }
    }
}

TEST_CASE("quenched probability is nonincreasing in m on a fixed tree")
{
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto tree = simulate_full(mixed, 7, seed);
        double prev = 1.0;
        for (int m = 0; m < 7; ++m) {
            const double p = quenched_prob(tree, 2, m);
            CHECK(p <= prev + 1e-15);
            CHECK(p >= 0.0);
            prev = p;
        }
    }
}

TEST_CASE("count-mode and full-ancestry states agree")
{
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        philox4x32 a(seed, 0), b(seed, 0);
        const auto tree = simulate_full(mixed, 6, a);
        const auto state = simulate(mixed, 6, 2, b);
        CHECK(tree.founder_state(2).population() == state.population());
    }
}

TEST_CASE("sample too large")
{
    const auto s = simulate(binary, 1, 0, 1);
    try {
        quenched_prob(s, 3);
        FAIL("expected SampleTooLarge");
    } catch (const error& e) {
        CHECK(e.kind() == error_kind::sample_too_large);
    }
}

TEST_CASE("sampled coalescence frequencies match the quenched probability")
{
    const auto tree = simulate_full(mixed, 6, 17);
    const int draws = 100000;
    for (int m : {0, 2, 4}) {
        philox4x32 rng(123, static_cast<std::uint64_t>(m));
        int hits = 0;
        for (int d = 0; d < draws; ++d) {
            const auto x = sample_coalescence(tree, 2, rng);
            hits += x && *x >= m;
        }
        const double p = quenched_prob(tree, 2, m);
        const double freq = static_cast<double>(hits) / draws;
        const double se = std::sqrt(std::max(p * (1 - p), 1e-12) / draws);
        CHECK(std::abs(freq - p) <= 3.0 * se + 1e-12);
    }
}

TEST_CASE("annealed estimate on the deterministic tree is exact")
{
    const auto est = annealed_estimate(binary, 2, 2, 0, 1000, 9);
    CHECK(est.mean == doctest::Approx(7.0 / 15.0).epsilon(1e-14));
    CHECK(est.std_error == 0.0);
    const auto direct = direct_sample_estimate(binary, 2, 2, 0, 40000, 9);
    CHECK(std::abs(direct.mean - 7.0 / 15.0) <= 3.0 * direct.std_error);
}

TEST_CASE("annealed estimate agrees with the exact engine")
{
    const auto model = validate({{1, 0.5}, {2, 0.5}}, {{1, 1.0}});
    const auto est = annealed_estimate(model, 4, 2, 1, 100000, 2);
    const double exact = prob_tail(make_query(model, 4, 2), 1);
    CHECK(std::abs(est.mean - exact) <= 3.0 * est.std_error);
}

TEST_CASE("estimates are deterministic for a seed, independent of thread count")
{
    sim_limits one;
    one.threads = 1;
    sim_limits four;
    four.threads = 4;
    const auto a = annealed_estimate(mixed, 6, 2, 1, 2000, 77, one);
    const auto b = annealed_estimate(mixed, 6, 2, 1, 2000, 77, four);
    CHECK(a.mean == b.mean);
    CHECK(a.std_error == b.std_error);
    const auto c = annealed_estimate(mixed, 6, 2, 1, 2000, 78, one);
    CHECK(a.mean != c.mean);
}

TEST_CASE("population cap raises ResourceLimit")
{
    sim_limits tiny;
    tiny.population_cap = 100;
    try {
        simulate_full(binary, 10, 1, tiny);
        FAIL("expected ResourceLimit");
    } catch (const error& e) {
        CHECK(e.kind() == error_kind::resource_limit);
    }
}

TEST_CASE("martingale samples")
{
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const auto s = sample_martingales(mixed, 8, seed);
        CHECK(s.v < s.x * s.x);
        CHECK(s.x > 0.0);
    }
    const auto det = sample_martingales(binary, 5, 1);
    CHECK(det.x == doctest::Approx(expected_x(binary, 5)).epsilon(1e-14));
    CHECK(det.v == doctest::Approx(expected_v(binary, 5)).epsilon(1e-14));
}

TEST_CASE("limit law on the deterministic tree")
{
    const auto r = limit_law_estimate(binary, 0, 20, 100, 1);
    CHECK(std::abs(r.estimate.mean - 1.0 / 3.0) <= 1e-5);
    CHECK(r.horizon_remainder == doctest::Approx(std::pow(2.0, -20)));
}

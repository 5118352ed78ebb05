#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <numeric>
#include <random>

#include "polycycle/graphic.hpp"

using namespace polycycle::graphic;

TEST_CASE("graphic number and Cherkas stability")
{
    CHECK(graphic_number({2.0, 3.0, 0.5}) == doctest::Approx(3.0));
    CHECK(stability({2.0, 2.0, 2.0}) == Stability::stable);
    CHECK(stability({0.5, 0.5, 0.5}) == Stability::unstable);
    CHECK(stability({2.0, 0.5, 1.0}) == Stability::undetermined);
    CHECK_THROWS_AS(graphic_number({1.0, -2.0}), std::invalid_argument);
    CHECK(ratio_from_eigenvalues(-3.0, 1.5) == doctest::Approx(2.0));
    CHECK_THROWS_AS(ratio_from_eigenvalues(3.0, 1.5), std::invalid_argument);
}

TEST_CASE("partial products carry the R_0 = 1/R_1 convention")
{
    const auto plan = delta_for_permutation({2.0, 0.25}, {1, 2});
    REQUIRE(plan.partial_products.size() == 3);
    CHECK(plan.partial_products[1] == doctest::Approx(2.0));
    CHECK(plan.partial_products[0] == doctest::Approx(0.5));
    CHECK(plan.partial_products[2] == doctest::Approx(0.5));
    CHECK(plan.delta == 2);  // 0.5 -> 2 -> 0.5 alternates twice
}

TEST_CASE("delta examples")
{
    CHECK(delta_max({1.0, 1.0, 1.0}).delta == 0);
    CHECK(delta_max({2.0, 1.0 / 3.0, 4.0}).delta == 3);
    // a single ratio > 1: R_0 < 1 < R_1, one alternation
    CHECK(delta_max({2.0}).delta == 1);
}

TEST_CASE("delta_max ties break to the lexicographically first permutation")
{
    const auto plan = delta_max({1.0, 1.0, 1.0});
    const std::vector<int> id = {1, 2, 3};
    CHECK(plan.permutation == id);
}

TEST_CASE("delta_max agrees with a definitional recomputation")
{
    std::mt19937 rng(12345);
    std::uniform_real_distribution<double> logr(std::log(0.2), std::log(5.0));
    std::uniform_int_distribution<int> nn(1, 6);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = nn(rng);
        std::vector<double> ratios(n);
        for (auto& r : ratios) r = std::exp(logr(rng));

        // independent brute force
        std::vector<int> sigma(n);
        std::iota(sigma.begin(), sigma.end(), 1);
        int best = -1;
        do {
            std::vector<double> prods(n + 1);
            double p = 1;
            for (int i = 1; i <= n; ++i) {
                p *= ratios[sigma[i - 1] - 1];
                prods[i] = p;
            }
            prods[0] = 1.0 / prods[1];
            int cnt = 0;
            for (int i = 1; i <= n; ++i) {
                const double a = prods[i] - 1, b = prods[i - 1] - 1;
                if (std::abs(a) > kUnitTol && std::abs(b) > kUnitTol && a * b < 0)
                    ++cnt;
            }
            best = std::max(best, cnt);
        } while (std::next_permutation(sigma.begin(), sigma.end()));

        CHECK(delta_max(ratios).delta == best);
    }
}

TEST_CASE("CH-conditions")
{
    const auto bad = check_ch_conditions({2.0, 0.5});
    CHECK_FALSE(bad.pass);
    CHECK(bad.witness == std::vector<int>{1, 2});

    CHECK(check_ch_conditions({2.0, 3.0, 5.0}).pass);
    CHECK_FALSE(check_ch_conditions({1.0, 2.0, 3.0}).pass);  // singleton r=1
}

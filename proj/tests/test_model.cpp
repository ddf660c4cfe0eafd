#include <catch2/catch_amalgamated.hpp>

#include "quadopo/model.hpp"

#include <cmath>
#include <random>

using namespace quadopo;

TEST_CASE("validate accepts the reference parameter set") {
    const SystemParams p = symmetric_params(0.01, 400.0, 10.0, 1.0);
    REQUIRE_NOTHROW(validate(p));
}

TEST_CASE("validate rejects nonpositive loss rates") {
    SystemParams p = symmetric_params(0.01, 400.0, 10.0, 1.0);
    p.gamma[2] = 0.0;
    REQUIRE_THROWS_AS(validate(p), DomainError);
    REQUIRE_THROWS_WITH(validate(p), Catch::Matchers::ContainsSubstring("gamma3"));

    p = symmetric_params(0.01, 400.0, 10.0, 1.0);
    p.kappa[0] = -1.0;
    REQUIRE_THROWS_AS(validate(p), DomainError);
    REQUIRE_THROWS_WITH(validate(p), Catch::Matchers::ContainsSubstring("kappa1"));
}

TEST_CASE("validate rejects negative couplings and drives") {
    SystemParams p = symmetric_params(0.01, 400.0, 10.0, 1.0);
    p.chi[1] = -1.0;
    REQUIRE_THROWS_AS(validate(p), DomainError);
    REQUIRE_THROWS_WITH(validate(p), Catch::Matchers::ContainsSubstring("chi2"));

    p = symmetric_params(0.01, 400.0, 10.0, 1.0);
    p.eps[3] = -0.5;
    REQUIRE_THROWS_AS(validate(p), DomainError);

    // zero coupling and zero drive are allowed
    REQUIRE_NOTHROW(validate(symmetric_params(0.0, 0.0, 10.0, 1.0)));
}

TEST_CASE("threshold amplitude closed form") {
    REQUIRE(threshold_pump(symmetric_params(0.01, 0.0, 10.0, 1.0)) == 500.0);
    REQUIRE(threshold_pump(symmetric_params(1.0, 0.0, 2.0, 1.0)) == 1.0);
    REQUIRE(threshold_pump(symmetric_params(0.5, 0.0, 1.0, 1.0)) == 1.0);
}

TEST_CASE("threshold requires symmetric parameters and nonzero coupling") {
    SystemParams p = symmetric_params(0.01, 400.0, 10.0, 1.0);
    p.kappa[1] = 2.0;
    REQUIRE_THROWS_AS(threshold_pump(p), SymmetryError);
    REQUIRE_THROWS_AS(threshold_pump(symmetric_params(0.0, 0.0, 10.0, 1.0)), DomainError);
}

TEST_CASE("threshold scaling laws") {
    std::mt19937 rng(41);
    std::uniform_real_distribution<double> u(0.2, 3.0);
    for (int k = 0; k < 20; ++k) {
        const double chi = u(rng), gamma = u(rng), kappa = u(rng), s = u(rng);
        const double base = threshold_pump(symmetric_params(chi, 0.0, gamma, kappa));
        const double loss_scaled =
            threshold_pump(symmetric_params(chi, 0.0, s * gamma, s * kappa));
        const double chi_scaled =
            threshold_pump(symmetric_params(s * chi, 0.0, gamma, kappa));
        REQUIRE_THAT(loss_scaled, Catch::Matchers::WithinRel(s * s * base, 1e-14));
        REQUIRE_THAT(chi_scaled, Catch::Matchers::WithinRel(base / s, 1e-14));
    }
}

TEST_CASE("pump-to-pair table is the 4-cycle") {
    constexpr auto& tab = CouplingTopology::pump_to_pair;
    REQUIRE(tab[0] == std::pair<int, int>(0, 1));
    REQUIRE(tab[1] == std::pair<int, int>(1, 2));
    REQUIRE(tab[2] == std::pair<int, int>(2, 3));
    REQUIRE(tab[3] == std::pair<int, int>(3, 0));
}

TEST_CASE("per-mode process list matches the pump table") {
    int pump_uses[4] = {0, 0, 0, 0};
    for (int l = 0; l < 4; ++l) {
        const auto procs = CouplingTopology::processes_for_low(l);
        REQUIRE(procs.size() == 2);
        for (const auto& [pump, partner] : procs) {
            ++pump_uses[pump];
            const auto& pair = CouplingTopology::pump_to_pair[static_cast<std::size_t>(pump)];
            const bool forward = pair.first == l && pair.second == partner;
            const bool backward = pair.second == l && pair.first == partner;
            REQUIRE((forward || backward));
        }
    }
    // each listing counts a pump once per low mode it touches: twice overall
    for (int pm = 0; pm < 4; ++pm) REQUIRE(pump_uses[pm] == 2);
}

TEST_CASE("symmetry predicate is exact equality per family") {
    SystemParams p = symmetric_params(0.01, 400.0, 10.0, 1.0);
    REQUIRE(is_symmetric(p));
    p.eps[2] = std::nextafter(p.eps[2], 1e300);
    REQUIRE_FALSE(is_symmetric(p));
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "netham/acceptance.hpp"

#include <iostream>

using namespace netham;

TEST_CASE("verification suite is green end to end") {
    AcceptanceOptions opt;
    opt.fixture_dir = NETHAM_FIXTURE_DIR;
    opt.seed = 1;
    auto results = run_acceptance("all", opt);
    std::cout << format_results(results);
    REQUIRE(results.size() == 11);
    for (const auto& r : results) {
        CAPTURE(r.id);
        CAPTURE(r.detail);
        CHECK(r.pass);
    }
}

TEST_CASE("unknown suite names are rejected") {
    AcceptanceOptions opt;
    opt.fixture_dir = NETHAM_FIXTURE_DIR;
    CHECK_THROWS_AS(run_acceptance("no-such-suite", opt),
                    std::invalid_argument);
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <stdexcept>

#include "crevsim/baseline.hpp"

using namespace crevsim;

TEST_CASE("revoke appends once; duplicates are no-ops") {
    GlobalCrl crl;
    CHECK(crl.revoke(CertificateId{"V8"}));
    CHECK(crl.revoke(CertificateId{"V25"}));
    CHECK_FALSE(crl.revoke(CertificateId{"V8"}));
    CHECK(crl.entries().size() == 2);
    CHECK(crl.version() == 2);
    CHECK(crl.entries().front().value == "V8");  // append-only, no reordering
}

TEST_CASE("lookup cost is the scan depth, full length on a miss") {
    GlobalCrl crl;
    CHECK(crl.lookup(CertificateId{"V1"}).scan_cost == 0);  // empty list

    for (int i = 1; i <= 100; ++i) {
        crl.revoke(CertificateId{"V" + std::to_string(i)});
    }
    auto front = crl.lookup(CertificateId{"V1"});
    CHECK(front.found);
    CHECK(front.scan_cost == 1);
    auto back = crl.lookup(CertificateId{"V100"});
    CHECK(back.scan_cost == 100);
    auto miss = crl.lookup(CertificateId{"V999"});
    CHECK_FALSE(miss.found);
    CHECK(miss.scan_cost == 100);

    // Unlike the cluster list, lookups never reorder anything.
    CHECK(crl.entries().front().value == "V1");
}

TEST_CASE("size follows the configured entry size") {
    GlobalCrl crl;
    crl.set_entry_size_bytes(100);
    for (int i = 0; i < 25000; ++i) {
        crl.revoke(CertificateId{"C" + std::to_string(i)});
    }
    CHECK(crl.size_bytes() == 2'500'000);
}

TEST_CASE("distribution time scales with size over the bandwidth") {
    DistributionModel m{4000, 0};
    CHECK(distribution_time_s(2'500'000, m) == doctest::Approx(625.0));
    CHECK(distribution_time_s(1016, m) == doctest::Approx(0.254));
    CHECK(distribution_time_s(0, m) == doctest::Approx(0.0));

    DistributionModel overhead{4000, 1.5};
    CHECK(distribution_time_s(0, overhead) == doctest::Approx(1.5));
    // Strictly increasing in size.
    CHECK(distribution_time_s(4001, m) > distribution_time_s(4000, m));
}

TEST_CASE("a non-positive bandwidth is rejected") {
    GlobalCrl crl;
    crl.revoke(CertificateId{"V1"});
    CHECK_THROWS_AS(crl_distribution_time_s(crl, {0, 0}),
                    std::invalid_argument);
    CHECK_THROWS_AS(distribution_time_s(10, {-1, 0}), std::invalid_argument);
}

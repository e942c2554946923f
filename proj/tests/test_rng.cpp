#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "mmfp/rng.hpp"

using namespace mmfp;

TEST_CASE("same seed gives identical streams") {
    Rng a(42), b(42);
    for (int i = 0; i < 64; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("derive is deterministic and decorrelates streams") {
    Rng a = Rng::derive(7, 3);
    Rng b = Rng::derive(7, 3);
    Rng c = Rng::derive(7, 4);
    bool any_diff = false;
    for (int i = 0; i < 64; ++i) {
        auto ua = a.next_u64();
        CHECK(ua == b.next_u64());
        if (ua != c.next_u64()) any_diff = true;
    }
    CHECK(any_diff);
}

TEST_CASE("uniform stays in bounds and has the right mean") {
    Rng rng(1);
    double sum = 0.0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        double u = rng.uniform();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        sum += u;
    }
    CHECK(std::abs(sum / n - 0.5) < 0.01);

    Rng rng2(2);
    for (int i = 0; i < 1000; ++i) {
        double u = rng2.uniform(-3.0, 5.0);
        CHECK(u >= -3.0);
        CHECK(u < 5.0);
    }
}

TEST_CASE("uniform_int stays in range and covers every value") {
    Rng rng(9);
    std::vector<int> counts(7, 0);
    for (int i = 0; i < 7000; ++i) {
        int k = rng.uniform_int(7);
        REQUIRE(k >= 0);
        REQUIRE(k < 7);
        ++counts[k];
    }
    for (int c : counts) CHECK(c > 0);
}

TEST_CASE("normal draws have near-standard moments") {
    Rng rng(3);
    const int n = 100000;
    double sum = 0.0, sumsq = 0.0;
    for (int i = 0; i < n; ++i) {
        double x = rng.normal();
        sum += x;
        sumsq += x * x;
    }
    double mean = sum / n;
    double var = sumsq / n - mean * mean;
    CHECK(std::abs(mean) < 0.02);
    CHECK(std::abs(var - 1.0) < 0.05);
}

TEST_CASE("normal_vec matches repeated normal calls") {
    Rng a(11), b(11);
    auto v = a.normal_vec(9);
    for (double x : v) CHECK(x == b.normal());
}

TEST_CASE("shuffle permutes and is reproducible") {
    std::vector<int> v(100);
    std::iota(v.begin(), v.end(), 0);
    Rng a(5);
    a.shuffle(v);
    auto first = v;

    std::vector<int> sorted = v;
    std::sort(sorted.begin(), sorted.end());
    for (int i = 0; i < 100; ++i) CHECK(sorted[i] == i);
    CHECK(first != sorted); // identity permutation is astronomically unlikely

    std::vector<int> w(100);
    std::iota(w.begin(), w.end(), 0);
    Rng b(5);
    b.shuffle(w);
    CHECK(w == first);
}

TEST_CASE("fnv1a64 matches the reference vectors") {
    CHECK(fnv1a64("", 0) == 0xcbf29ce484222325ULL);
    CHECK(fnv1a64("a", 1) == 0xaf63dc4c8601ec8cULL);
    CHECK(fnv1a64("foobar", 6) == 0x85944171f73967e8ULL);
}

TEST_CASE("fnv1a64 chains across chunks") {
    const char* s = "split point";
    auto whole = fnv1a64(s, std::strlen(s));
    auto part = fnv1a64(s + 5, std::strlen(s) - 5, fnv1a64(s, 5));
    CHECK(whole == part);
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <map>

#include "cor/algebra.hpp"
#include "cor/complexity.hpp"
#include "cor/rng.hpp"

using namespace cor;

namespace {

// brute-force permutation membership: d1 equals d2 iff some permutation of
// d1's parts reproduces d2's part sequence
bool permutation_oracle(const DegradationLabel& d1, const DegradationLabel& d2) {
    auto a = d1.parts();
    auto b = d2.parts();
    if (a.size() != b.size()) return false;
    std::sort(a.begin(), a.end());
    do {
        if (a == b) return true;
    } while (std::next_permutation(a.begin(), a.end()));
    return false;
}

DegradationLabel random_label(Rng& rng, int max_order = 4) {
    const auto& reg = symbol_registry();
    int order = 1 + static_cast<int>(rng.next_below(max_order));
    std::vector<std::string> parts;
    for (int i = 0; i < order; ++i)
        parts.push_back(reg[rng.next_below(reg.size())].name);
    return DegradationLabel(parts);
}

}  // namespace

TEST_CASE("combine concatenates part sequences") {
    auto hs = DegradationLabel::parse("haze+snow");
    auto n = DegradationLabel::parse("noise15");
    auto combined = combine(hs, n);
    CHECK(combined.text() == "haze+snow+noise15");
    CHECK(combined.order() == 3);
}

TEST_CASE("combine(rain, haze) equals haze+rain under permutation equality") {
    auto rh = combine(DegradationLabel::parse("rain"), DegradationLabel::parse("haze"));
    CHECK(equals(rh, DegradationLabel::parse("haze+rain")));
}

TEST_CASE("order is additive under combine") {
    Rng rng(42);
    for (int i = 0; i < 100; ++i) {
        auto a = random_label(rng);
        auto b = random_label(rng);
        CHECK(combine(a, b).order() == a.order() + b.order());
    }
}

TEST_CASE("combine is commutative and associative up to permutation equality") {
    Rng rng(43);
    for (int i = 0; i < 50; ++i) {
        auto a = random_label(rng, 3);
        auto b = random_label(rng, 3);
        auto c = random_label(rng, 2);
        CHECK(equals(combine(a, b), combine(b, a)));
        CHECK(equals(combine(combine(a, b), c), combine(a, combine(b, c))));
    }
}

TEST_CASE("equality matches the brute-force permutation oracle") {
    Rng rng(44);
    for (int i = 0; i < 200; ++i) {
        auto a = random_label(rng, 3);
        auto b = random_label(rng, 3);
        CHECK(equals(a, b) == permutation_oracle(a, b));
    }
}

TEST_CASE("equality is an equivalence relation") {
    Rng rng(45);
    std::vector<DegradationLabel> labels;
    for (int i = 0; i < 60; ++i) labels.push_back(random_label(rng, 3));
    for (const auto& a : labels) CHECK(equals(a, a));
    for (size_t i = 0; i < labels.size(); ++i)
        for (size_t j = i + 1; j < labels.size(); ++j) {
            CHECK(equals(labels[i], labels[j]) == equals(labels[j], labels[i]));
            for (size_t k = 0; k < labels.size(); ++k)
                if (equals(labels[i], labels[j]) && equals(labels[j], labels[k]))
                    CHECK(equals(labels[i], labels[k]));
        }
}

TEST_CASE("multiset semantics distinguishes multiplicity") {
    CHECK_FALSE(equals(DegradationLabel::parse("rain"), DegradationLabel::parse("rain+rain")));
}

TEST_CASE("empty labels are rejected") {
    CHECK_THROWS(DegradationLabel(std::vector<std::string>{}));
}

TEST_CASE("parsing accepts any permutation") {
    CHECK(DegradationLabel::parse("rain+haze").canonical_key() ==
          DegradationLabel::parse("haze+rain").canonical_key());
}

TEST_CASE("decompose: overlapping bases admit no exact cover") {
    auto d = DegradationLabel::parse("low+haze+rain");
    BasisSet bases({DegradationLabel::parse("rain+haze"), DegradationLabel::parse("low+haze")});
    CHECK_FALSE(decompose(d, bases).has_value());
}

TEST_CASE("decompose prefers the fewest parts") {
    auto d = DegradationLabel::parse("low+haze+rain");
    BasisSet bases({DegradationLabel::parse("low"), DegradationLabel::parse("rain"),
                    DegradationLabel::parse("haze"), DegradationLabel::parse("rain+haze"),
                    DegradationLabel::parse("low+haze")});
    auto cover = decompose(d, bases);
    REQUIRE(cover.has_value());
    REQUIRE(cover->size() == 2);
    // two 2-part covers exist ({haze+low, rain} and {haze+rain, low}); the
    // lexicographic tie-break on key sequences selects the first
    std::vector<std::string> keys;
    for (const auto& part : *cover) keys.push_back(part.canonical_key());
    CHECK(keys == std::vector<std::string>{"haze+low", "rain"});
}

TEST_CASE("decompose handles the identity cover") {
    auto d = DegradationLabel::parse("haze");
    BasisSet bases({d});
    auto cover = decompose(d, bases);
    REQUIRE(cover.has_value());
    REQUIRE(cover->size() == 1);
    CHECK(equals(cover->front(), d));
}

TEST_CASE("decompose results recombine to the input and are minimal") {
    Rng rng(46);
    for (int trial = 0; trial < 30; ++trial) {
        // random label of order <= 5 over 4 symbols, full 2-order basis set
        const auto& reg = symbol_registry();
        int order = 1 + static_cast<int>(rng.next_below(5));
        std::vector<std::string> parts;
        for (int i = 0; i < order; ++i) parts.push_back(reg[rng.next_below(4)].name);
        DegradationLabel d(parts);
        BasisSet bases = enumerate_bases(4, 2);
        auto cover = decompose(d, bases);
        REQUIRE(cover.has_value());
        DegradationLabel recombined = cover->front();
        for (size_t i = 1; i < cover->size(); ++i)
            recombined = combine(recombined, (*cover)[i]);
        CHECK(equals(recombined, d));
        // bases are distinct-symbol sets, so the minimal part count is
        // max(highest symbol multiplicity, ceil(order / 2))
        std::map<std::string, int> counts;
        for (const auto& p : parts) ++counts[p];
        int max_count = 0;
        for (const auto& [k, v] : counts) max_count = std::max(max_count, v);
        CHECK(cover->size() == static_cast<size_t>(std::max(max_count, (order + 1) / 2)));
    }
}

TEST_CASE("enumerate_bases cardinality matches phi") {
    CHECK(enumerate_bases(3, 1).size() == 3);
    CHECK(enumerate_bases(3, 2).size() == 6);
    CHECK(enumerate_bases(4, 4).size() == 15);
    for (int n = 1; n <= 7; ++n)
        for (int k = 1; k <= n; ++k)
            CHECK(enumerate_bases(n, k).size() == static_cast<size_t>(phi(n, k)));
}

TEST_CASE("enumerate_bases rejects invalid k") {
    CHECK_THROWS(enumerate_bases(3, 0));
    CHECK_THROWS(enumerate_bases(3, 4));
}

TEST_CASE("basis sets deduplicate under permutation equality") {
    BasisSet set;
    set.insert(DegradationLabel::parse("rain+haze"));
    set.insert(DegradationLabel::parse("haze+rain"));
    CHECK(set.size() == 1);
    CHECK(set.max_order() == 2);
}

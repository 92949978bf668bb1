#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include "cor/complexity.hpp"

using namespace cor;

TEST_CASE("phi by direct summation") {
    CHECK(phi(3, 2) == 6);  // 3 + 3
    CHECK(phi(3, 1) == 3);
    for (int n = 1; n <= 20; ++n) {
        CHECK(phi(n, 1) == static_cast<uint128>(n));
        CHECK(phi(n, n) == (static_cast<uint128>(1) << n) - 1);
    }
}

TEST_CASE("phi rejects out-of-range arguments") {
    CHECK_THROWS(phi(3, 0));
    CHECK_THROWS(phi(3, 4));
    CHECK_THROWS(phi(65, 1));
}

TEST_CASE("training ratio closed forms and monotonicity") {
    for (int n = 1; n <= 20; ++n) {
        CHECK(training_ratio(n, 1) == Ratio(1, 1));
        CHECK(training_ratio(n, n) ==
              Ratio((static_cast<uint128>(1) << n) - 1, static_cast<uint128>(n)));
        for (int k = 1; k < n; ++k) CHECK(training_ratio(n, k + 1) > training_ratio(n, k));
    }
    CHECK(training_ratio(5, 5) == Ratio(31, 5));
}

TEST_CASE("varphi by direct summation") {
    CHECK(varphi(3, 1) == 12);  // 3*1 + 3*2 + 1*3
    for (int n = 1; n <= 20; ++n) {
        CHECK(varphi(n, n) == (static_cast<uint128>(1) << n) - 1);
        // sum t*C(n,t) = n * 2^(n-1)
        CHECK(varphi(n, 1) == static_cast<uint128>(n) * (static_cast<uint128>(1) << (n - 1)));
    }
    // brute-force cross-check of the k=1 identity
    for (int n = 1; n <= 12; ++n) {
        uint128 brute = 0;
        for (int t = 1; t <= n; ++t) brute += binomial(n, t) * static_cast<uint128>(t);
        CHECK(varphi(n, 1) == brute);
    }
}

TEST_CASE("inference ratio closed forms and monotonicity") {
    for (int n = 1; n <= 20; ++n) {
        CHECK(inference_ratio(n, n) == Ratio(1, 1));
        CHECK(inference_ratio(n, 1) ==
              Ratio(static_cast<uint128>(n) * (static_cast<uint128>(1) << (n - 1)),
                    (static_cast<uint128>(1) << n) - 1));
        for (int k = 1; k < n; ++k)
            CHECK(inference_ratio(n, k + 1) < inference_ratio(n, k));
    }
    CHECK(inference_ratio(3, 1) == Ratio(12, 7));
}

TEST_CASE("ratios are stored in lowest terms") {
    Ratio r(12, 8);
    CHECK(r.num == 3);
    CHECK(r.den == 2);
    CHECK_THROWS(Ratio(1, 0));
}

TEST_CASE("u128 decimal printing") {
    CHECK(u128_to_string(0) == "0");
    CHECK(u128_to_string(1048575) == "1048575");
    uint128 big = (static_cast<uint128>(1) << 100);
    CHECK(u128_to_string(big) == "1267650600228229401496703205376");
}

TEST_CASE("emit_curves writes the documented CSV") {
    auto path = (std::filesystem::temp_directory_path() / "curves_n20.csv").string();
    emit_curves(20, path);
    std::ifstream in(path);
    REQUIRE(in.good());
    std::string header;
    std::getline(in, header);
    CHECK(header == "k,tr_exact_num,tr_exact_den,tr_float,ir_exact_num,ir_exact_den,ir_float");
    std::vector<double> tr_col, ir_col;
    std::string line;
    while (std::getline(in, line)) {
        std::stringstream ss(line);
        std::string field;
        std::vector<std::string> fields;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        REQUIRE(fields.size() == 7);
        tr_col.push_back(std::stod(fields[3]));
        ir_col.push_back(std::stod(fields[6]));
    }
    REQUIRE(tr_col.size() == 20);
    CHECK(tr_col.front() == doctest::Approx(1.0));
    CHECK(tr_col.back() == doctest::Approx(52428.75));  // (2^20 - 1)/20
    CHECK(ir_col.back() == doctest::Approx(1.0));
    for (size_t i = 1; i < tr_col.size(); ++i) {
        CHECK(tr_col[i] > tr_col[i - 1]);
        CHECK(ir_col[i] < ir_col[i - 1]);
    }
    std::filesystem::remove(path);
}

TEST_CASE("emit_curves rejects bad arguments") {
    CHECK_THROWS(emit_curves(1, "x.csv"));
    CHECK_THROWS(emit_curves(5, "/nonexistent/dir/x.csv"));
}

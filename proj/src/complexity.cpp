#include "cor/complexity.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <stdexcept>
#include <vector>

namespace cor {

std::string u128_to_string(uint128 v) {
    if (v == 0) return "0";
    std::string s;
    while (v > 0) {
        s.push_back(static_cast<char>('0' + static_cast<int>(v % 10)));
        v /= 10;
    }
    return std::string(s.rbegin(), s.rend());
}

namespace {

uint128 gcd128(uint128 a, uint128 b) {
    while (b != 0) {
        uint128 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

void check_range(int n, int k, const char* who) {
    if (k < 1 || n < k || n > 64)
        throw std::invalid_argument(std::string(who) + ": need 1 <= k <= n <= 64");
}

}  // namespace

Ratio::Ratio(uint128 n, uint128 d) : num(n), den(d) {
    if (den == 0) throw std::invalid_argument("Ratio: zero denominator");
    uint128 g = gcd128(num == 0 ? den : num, den);
    num /= g;
    den /= g;
}

double Ratio::to_double() const {
    return static_cast<double>(num) / static_cast<double>(den);
}

uint128 binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    uint128 result = 1;
    for (int i = 1; i <= k; ++i) {
        result = result * static_cast<uint128>(n - k + i);
        result /= static_cast<uint128>(i);  // exact: C(n-k+i, i) is integral
    }
    return result;
}

uint128 phi(int n, int k) {
    check_range(n, k, "phi");
    uint128 sum = 0;
    for (int t = 1; t <= k; ++t) sum += binomial(n, t);
    return sum;
}

Ratio training_ratio(int n, int k) {
    check_range(n, k, "training_ratio");
    return Ratio(phi(n, k), static_cast<uint128>(n));
}

uint128 varphi(int n, int k) {
    check_range(n, k, "varphi");
    uint128 sum = 0;
    for (int t = 1; t <= n; ++t) {
        uint128 ceil_tk = static_cast<uint128>((t + k - 1) / k);
        sum += binomial(n, t) * ceil_tk;
    }
    return sum;
}

Ratio inference_ratio(int n, int k) {
    check_range(n, k, "inference_ratio");
    uint128 pow2n_minus1 = (static_cast<uint128>(1) << n) - 1;
    return Ratio(varphi(n, k), pow2n_minus1);
}

void emit_curves(int n, const std::string& path) {
    if (n < 2) throw std::invalid_argument("emit_curves: need n >= 2");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("emit_curves: cannot write " + path);
    out << std::setprecision(17);
    out << "k,tr_exact_num,tr_exact_den,tr_float,ir_exact_num,ir_exact_den,ir_float\n";
    for (int k = 1; k <= n; ++k) {
        Ratio tr = training_ratio(n, k);
        Ratio ir = inference_ratio(n, k);
        out << k << ',' << u128_to_string(tr.num) << ',' << u128_to_string(tr.den)
            << ',' << tr.to_double() << ',' << u128_to_string(ir.num) << ','
            << u128_to_string(ir.den) << ',' << ir.to_double() << '\n';
    }
    if (!out) throw std::runtime_error("emit_curves: write failed for " + path);
}

}  // namespace cor

#pragma once

#include <cstdint>
#include <string>

namespace cor {

using uint128 = unsigned __int128;

std::string u128_to_string(uint128 v);

// Exact rational, kept in lowest terms. All complexity-ratio arithmetic is
// integer-only; doubles appear solely in CSV convenience columns.
struct Ratio {
    uint128 num = 0;
    uint128 den = 1;

    Ratio() = default;
    Ratio(uint128 n, uint128 d);

    double to_double() const;
    friend bool operator==(const Ratio& a, const Ratio& b) {
        return a.num == b.num && a.den == b.den;
    }
    friend bool operator<(const Ratio& a, const Ratio& b) {
        return a.num * b.den < b.num * a.den;
    }
    friend bool operator>(const Ratio& a, const Ratio& b) { return b < a; }
};

uint128 binomial(int n, int k);

// number of bases a k-order model trains on, given n isolated degradations
uint128 phi(int n, int k);            // sum_{t=1..k} C(n,t)
Ratio training_ratio(int n, int k);   // phi(n,k)/n
uint128 varphi(int n, int k);         // sum_{t=1..n} C(n,t)*ceil(t/k)
Ratio inference_ratio(int n, int k);  // varphi(n,k)/(2^n-1)

// CSV with columns k, tr_exact_num, tr_exact_den, tr_float, ir_exact_num,
// ir_exact_den, ir_float for k = 1..n.
void emit_curves(int n, const std::string& path);

}  // namespace cor

#include "cor/algebra.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <stdexcept>

namespace cor {

const std::vector<SymbolInfo>& symbol_registry() {
    static const std::vector<SymbolInfo> registry = {
        {"low", 0},  {"haze", 1},    {"rain", 2},    {"snow", 3},
        {"noise15", 4}, {"noise25", 5}, {"noise50", 6},
    };
    return registry;
}

bool is_registered_symbol(const std::string& name) {
    for (const auto& s : symbol_registry())
        if (s.name == name) return true;
    return false;
}

int composition_rank(const std::string& name) {
    for (const auto& s : symbol_registry())
        if (s.name == name) return s.composition_rank;
    throw std::invalid_argument("unknown degradation symbol: " + name);
}

DegradationLabel::DegradationLabel(std::vector<std::string> parts)
    : parts_(std::move(parts)) {
    if (parts_.empty())
        throw std::invalid_argument("DegradationLabel: empty label");
    for (const auto& p : parts_)
        if (!is_registered_symbol(p))
            throw std::invalid_argument("DegradationLabel: unknown symbol '" + p + "'");
    auto sorted = parts_;
    std::sort(sorted.begin(), sorted.end());
    std::ostringstream os;
    for (size_t i = 0; i < sorted.size(); ++i) {
        if (i) os << '+';
        os << sorted[i];
    }
    key_ = os.str();
}

DegradationLabel DegradationLabel::parse(const std::string& text) {
    std::vector<std::string> parts;
    std::string cur;
    for (char ch : text) {
        if (ch == '+') {
            parts.push_back(cur);
            cur.clear();
        } else if (!std::isspace(static_cast<unsigned char>(ch))) {
            cur.push_back(ch);
        }
    }
    parts.push_back(cur);
    return DegradationLabel(parts);
}

std::string DegradationLabel::text() const {
    std::ostringstream os;
    for (size_t i = 0; i < parts_.size(); ++i) {
        if (i) os << '+';
        os << parts_[i];
    }
    return os.str();
}

std::vector<std::string> DegradationLabel::composition_order() const {
    auto out = parts_;
    std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        return composition_rank(a) < composition_rank(b);
    });
    return out;
}

DegradationLabel combine(const DegradationLabel& a, const DegradationLabel& b) {
    auto parts = a.parts();
    parts.insert(parts.end(), b.parts().begin(), b.parts().end());
    return DegradationLabel(parts);
}

BasisSet::BasisSet(const std::vector<DegradationLabel>& labels) {
    for (const auto& l : labels) insert(l);
}

void BasisSet::insert(const DegradationLabel& label) {
    auto it = std::lower_bound(members_.begin(), members_.end(), label);
    if (it != members_.end() && *it == label) return;
    members_.insert(it, label);
}

bool BasisSet::contains(const DegradationLabel& label) const {
    return std::binary_search(members_.begin(), members_.end(), label);
}

int BasisSet::max_order() const {
    int m = 0;
    for (const auto& l : members_) m = std::max(m, l.order());
    return m;
}

namespace {

using Multiset = std::map<std::string, int>;

Multiset to_multiset(const DegradationLabel& l) {
    Multiset m;
    for (const auto& p : l.parts()) ++m[p];
    return m;
}

bool subtract(Multiset& from, const Multiset& what) {
    for (const auto& [k, v] : what) {
        auto it = from.find(k);
        if (it == from.end() || it->second < v) return false;
    }
    for (const auto& [k, v] : what) {
        auto it = from.find(k);
        it->second -= v;
        if (it->second == 0) from.erase(it);
    }
    return true;
}

void add_back(Multiset& to, const Multiset& what) {
    for (const auto& [k, v] : what) to[k] += v;
}

struct Search {
    const std::vector<DegradationLabel>& bases;
    std::vector<Multiset> base_sets;
    std::optional<std::vector<size_t>> best;

    void dfs(Multiset& remaining, std::vector<size_t>& chosen, size_t min_index) {
        if (remaining.empty()) {
            if (!best || chosen.size() < best->size() ||
                (chosen.size() == best->size() && key_seq(chosen) < key_seq(*best)))
                best = chosen;
            return;
        }
        if (best && chosen.size() + 1 > best->size()) return;
        // bases are pre-sorted by canonical key; allowing repeats means the
        // search restarts from min_index, not min_index+1
        for (size_t i = min_index; i < bases.size(); ++i) {
            if (!subtract(remaining, base_sets[i])) continue;
            chosen.push_back(i);
            dfs(remaining, chosen, i);
            chosen.pop_back();
            add_back(remaining, base_sets[i]);
        }
    }

    std::vector<std::string> key_seq(const std::vector<size_t>& idx) const {
        std::vector<std::string> out;
        for (size_t i : idx) out.push_back(bases[i].canonical_key());
        return out;
    }
};

}  // namespace

std::optional<std::vector<DegradationLabel>> decompose(const DegradationLabel& d,
                                                       const BasisSet& bases) {
    Search s{bases.members(), {}, std::nullopt};
    for (const auto& b : s.bases) s.base_sets.push_back(to_multiset(b));
    Multiset remaining = to_multiset(d);
    std::vector<size_t> chosen;
    s.dfs(remaining, chosen, 0);
    if (!s.best) return std::nullopt;
    std::vector<DegradationLabel> out;
    for (size_t i : *s.best) out.push_back(s.bases[i]);
    return out;
}

BasisSet enumerate_bases(const std::vector<std::string>& symbols, int k) {
    const int n = static_cast<int>(symbols.size());
    if (k < 1 || k > n)
        throw std::invalid_argument("enumerate_bases: need 1 <= k <= n");
    BasisSet out;
    for (uint32_t mask = 1; mask < (1u << n); ++mask) {
        if (__builtin_popcount(mask) > k) continue;
        std::vector<std::string> parts;
        for (int i = 0; i < n; ++i)
            if (mask & (1u << i)) parts.push_back(symbols[i]);
        out.insert(DegradationLabel(parts));
    }
    return out;
}

BasisSet enumerate_bases(int n_isolated, int k) {
    const auto& reg = symbol_registry();
    if (n_isolated < 1 || n_isolated > static_cast<int>(reg.size()))
        throw std::invalid_argument("enumerate_bases: n out of registry range");
    std::vector<std::string> symbols;
    for (int i = 0; i < n_isolated; ++i) symbols.push_back(reg[i].name);
    return enumerate_bases(symbols, k);
}

}  // namespace cor

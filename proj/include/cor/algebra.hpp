#pragma once

#include <optional>
#include <string>
#include <vector>

namespace cor {

// Registered isolated degradations. Composition rank orders the canonical
// physical layering: illumination, then atmosphere, then precipitation,
// then sensor noise.
struct SymbolInfo {
    std::string name;
    int composition_rank;
};

const std::vector<SymbolInfo>& symbol_registry();
bool is_registered_symbol(const std::string& name);
int composition_rank(const std::string& name);

// Ordered sequence of symbols with multiset equality ("a+b" == "b+a",
// duplicates counted). Never empty.
class DegradationLabel {
  public:
    explicit DegradationLabel(std::vector<std::string> parts);
    static DegradationLabel parse(const std::string& text);  // "haze+rain+noise15"

    const std::vector<std::string>& parts() const { return parts_; }
    int order() const { return static_cast<int>(parts_.size()); }
    // sorted parts joined with '+'; labels are equal iff keys are equal
    const std::string& canonical_key() const { return key_; }
    std::string text() const;  // parts in original sequence

    // parts sorted by composition rank, innermost first
    std::vector<std::string> composition_order() const;

    friend bool operator==(const DegradationLabel& a, const DegradationLabel& b) {
        return a.key_ == b.key_;
    }
    friend bool operator<(const DegradationLabel& a, const DegradationLabel& b) {
        return a.key_ < b.key_;
    }

  private:
    std::vector<std::string> parts_;
    std::string key_;
};

DegradationLabel combine(const DegradationLabel& a, const DegradationLabel& b);

inline bool equals(const DegradationLabel& a, const DegradationLabel& b) { return a == b; }

// Set of bases, deduplicated under multiset equality, kept sorted by
// canonical key.
class BasisSet {
  public:
    BasisSet() = default;
    explicit BasisSet(const std::vector<DegradationLabel>& labels);

    void insert(const DegradationLabel& label);
    bool contains(const DegradationLabel& label) const;
    const std::vector<DegradationLabel>& members() const { return members_; }
    int max_order() const;
    size_t size() const { return members_.size(); }

  private:
    std::vector<DegradationLabel> members_;
};

// Exact cover of d by members of `bases` with the fewest parts; ties broken
// by lexicographically earliest sequence of canonical keys. Exhaustive, fine
// for order(d) <= 6. nullopt when no cover exists.
std::optional<std::vector<DegradationLabel>> decompose(const DegradationLabel& d,
                                                       const BasisSet& bases);

// All subsets of size 1..k of the first n registry symbols, as labels.
BasisSet enumerate_bases(int n_isolated, int k);
BasisSet enumerate_bases(const std::vector<std::string>& symbols, int k);

}  // namespace cor

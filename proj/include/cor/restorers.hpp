#pragma once

#include <string>

#include "cor/algebra.hpp"
#include "cor/image.hpp"
#include "cor/synthesis.hpp"

namespace cor {

enum class RestorerMode { Oracle, Classical };

// One restorer per registered basis. Oracle mode inverts the recorded
// synthesis parameters exactly; classical mode runs handcrafted blind
// restorers. A composite basis is handled in one call by addressing its
// components in reverse composition order.
class RestorerRegistry {
  public:
    RestorerRegistry(RestorerMode mode, BasisSet bases);

    RestorerMode mode() const { return mode_; }
    const BasisSet& bases() const { return bases_; }
    bool has(const DegradationLabel& basis) const { return bases_.contains(basis); }

    // Single-shot restore. Oracle mode requires a record containing the
    // basis among its remaining components; the record is not updated.
    Image restore(const Image& img, const DegradationLabel& basis,
                  const SynthesisRecord* context = nullptr) const;

    // Oracle removal that also deletes the inverted components from the
    // record, so chained calls stay consistent.
    std::pair<Image, SynthesisRecord> oracle_remove(const Image& img,
                                                    const DegradationLabel& basis,
                                                    const SynthesisRecord& record) const;

  private:
    RestorerMode mode_;
    BasisSet bases_;
};

// PSNR between the image after a removal step and the re-synthesized image
// carrying only the remaining components. +inf means zero coupling.
double coupling_gap(const Image& clean, const SynthesisRecord& record_remaining,
                    const Image& after_removal, const DegradationLabel& remaining);

// Classical blind restorers, one per 1-order basis. Deterministic.
Image classical_denoise(const Image& img, double sigma_hint = 25.0);
Image classical_dehaze(const Image& img);
Image classical_derain(const Image& img);
Image classical_desnow(const Image& img);
Image classical_delowlight(const Image& img);

// Dispatch by symbol name ("noise15" picks denoise with sigma 15, ...).
Image classical_restore_symbol(const Image& img, const std::string& symbol);

}  // namespace cor

#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "savo/shaping.hpp"

/// Fuzzy k-nearest-neighbour classification against a labelled prototype store.
namespace savo::recognition {

using shaping::GlyphClass;

struct Prototype {
    std::vector<double> features;
    /// One value per store class; sums to 1.
    std::vector<double> memberships;
};

struct PrototypeStore {
    std::vector<GlyphClass> classes;  // index = class id
    std::vector<Prototype> prototypes;

    std::size_t dim() const noexcept { return prototypes.empty() ? 0 : prototypes.front().features.size(); }
};

struct LabeledSample {
    std::vector<double> features;
    GlyphClass label;
};

/// Crisp memberships; class ids follow (letter, form) order.
PrototypeStore build_store(std::span<const LabeledSample> samples);

struct KnnParams {
    int k = 10;
    double m = 2.0;
    /// Distance exponent in the weights 1 / d^exponent; defaults to 2 / (m - 1).
    std::optional<double> exponent;

    double weight_exponent() const noexcept { return exponent.value_or(2.0 / (m - 1.0)); }
};

/// Neighbours sorted by (distance, prototype index).
std::vector<std::size_t> nearest_prototypes(std::span<const double> query, const PrototypeStore& store, int k);

/// Inverse-distance weighted average of the k nearest prototypes' membership rows.
/// Neighbours at zero distance (< 1e-12) decide alone, averaged among themselves.
std::vector<double> knn_membership(std::span<const double> query, const PrototypeStore& store,
                                   const KnnParams& params = {});

struct RankedClass {
    int class_id = 0;
    GlyphClass glyph;
    double membership = 0.0;
};

/// All store classes by descending membership (ties by class id).
std::vector<RankedClass> classify(std::span<const double> query, const PrototypeStore& store,
                                  const KnnParams& params = {});

std::string store_to_json(const PrototypeStore& store);
PrototypeStore store_from_json(const std::string& text);

}  // namespace savo::recognition

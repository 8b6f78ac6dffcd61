#include "savo/recognition.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include <nlohmann/json.hpp>

#include "savo/error.hpp"
#include "savo/utf8.hpp"

namespace savo::recognition {

namespace {

constexpr double kZeroDistance = 1e-12;

void validate_query(std::span<const double> query, const PrototypeStore& store, const KnnParams& params) {
    if (store.prototypes.empty()) throw Error(ErrorCode::EmptyStore, "prototype store is empty");
    if (params.k < 1 || static_cast<std::size_t>(params.k) > store.prototypes.size()) {
        throw Error(ErrorCode::BadK, "k must lie in [1, prototype count]");
    }
    if (!(params.m > 1.0)) throw Error(ErrorCode::BadFuzzifier, "fuzzifier must be > 1");
    if (query.size() != store.dim()) throw Error(ErrorCode::DimensionMismatch, "query length differs from store");
}

}  // namespace

PrototypeStore build_store(std::span<const LabeledSample> samples) {
    if (samples.empty()) throw Error(ErrorCode::EmptyInput, "no samples");
    PrototypeStore store;
    std::map<GlyphClass, int> ids;
    for (const auto& s : samples) ids.emplace(s.label, 0);
    for (auto& [cls, id] : ids) {
        id = static_cast<int>(store.classes.size());
        store.classes.push_back(cls);
    }
    const std::size_t dim = samples.front().features.size();
    for (const auto& s : samples) {
        if (s.features.size() != dim) throw Error(ErrorCode::DimensionMismatch, "samples differ in length");
        Prototype p;
        p.features = s.features;
        p.memberships.assign(store.classes.size(), 0.0);
        p.memberships[static_cast<std::size_t>(ids.at(s.label))] = 1.0;
        store.prototypes.push_back(std::move(p));
    }
    return store;
}

std::vector<std::size_t> nearest_prototypes(std::span<const double> query, const PrototypeStore& store, int k) {
    std::vector<std::pair<double, std::size_t>> dist;
    dist.reserve(store.prototypes.size());
    for (std::size_t i = 0; i < store.prototypes.size(); ++i) {
        const auto& f = store.prototypes[i].features;
        double s = 0.0;
        for (std::size_t d = 0; d < f.size(); ++d) s += (query[d] - f[d]) * (query[d] - f[d]);
        dist.emplace_back(s, i);
    }
    const auto kk = std::min(static_cast<std::size_t>(k), dist.size());
    std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(kk), dist.end());
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < kk; ++i) out.push_back(dist[i].second);
    return out;
}

std::vector<double> knn_membership(std::span<const double> query, const PrototypeStore& store,
                                   const KnnParams& params) {
    validate_query(query, store, params);
    const auto nearest = nearest_prototypes(query, store, params.k);
    const std::size_t classes = store.classes.size();
    std::vector<double> u(classes, 0.0);

    std::vector<double> dist;
    for (auto idx : nearest) {
        const auto& f = store.prototypes[idx].features;
        double s = 0.0;
        for (std::size_t d = 0; d < f.size(); ++d) s += (query[d] - f[d]) * (query[d] - f[d]);
        dist.push_back(std::sqrt(s));
    }

    std::size_t hits = 0;
    for (std::size_t t = 0; t < nearest.size(); ++t) {
        if (dist[t] >= kZeroDistance) continue;
        ++hits;
        const auto& row = store.prototypes[nearest[t]].memberships;
        for (std::size_t c = 0; c < classes; ++c) u[c] += row[c];
    }
    if (hits > 0) {
        for (auto& v : u) v /= static_cast<double>(hits);
        return u;
    }

    const double exponent = params.weight_exponent();
    double total = 0.0;
    for (std::size_t t = 0; t < nearest.size(); ++t) {
        const double w = std::pow(1.0 / dist[t], exponent);
        total += w;
        const auto& row = store.prototypes[nearest[t]].memberships;
        for (std::size_t c = 0; c < classes; ++c) u[c] += w * row[c];
    }
    for (auto& v : u) v /= total;
    return u;
}

std::vector<RankedClass> classify(std::span<const double> query, const PrototypeStore& store,
                                  const KnnParams& params) {
    const auto u = knn_membership(query, store, params);
    std::vector<RankedClass> ranked;
    ranked.reserve(u.size());
    for (std::size_t c = 0; c < u.size(); ++c) {
        ranked.push_back(RankedClass{static_cast<int>(c), store.classes[c], u[c]});
    }
    std::stable_sort(ranked.begin(), ranked.end(), [](const RankedClass& a, const RankedClass& b) {
        return a.membership > b.membership;
    });
    return ranked;
}

std::string store_to_json(const PrototypeStore& store) {
    nlohmann::json j;
    j["version"] = "1";
    auto& classes = j["classes"] = nlohmann::json::array();
    for (std::size_t i = 0; i < store.classes.size(); ++i) {
        classes.push_back({{"id", i},
                           {"letter", utf8::encode(store.classes[i].letter)},
                           {"form", shaping::to_string(store.classes[i].form)}});
    }
    auto& protos = j["prototypes"] = nlohmann::json::array();
    for (const auto& p : store.prototypes) {
        protos.push_back({{"features", p.features}, {"memberships", p.memberships}});
    }
    return j.dump();
}

PrototypeStore store_from_json(const std::string& text) {
    try {
        auto j = nlohmann::json::parse(text);
        if (j.at("version").get<std::string>() != "1") throw Error(ErrorCode::MalformedInput, "unsupported store version");
        PrototypeStore store;
        for (const auto& c : j.at("classes")) {
            const auto letter = utf8::decode(c.at("letter").get<std::string>());
            const auto form = shaping::form_from_string(c.at("form").get<std::string>());
            if (letter.size() != 1 || !form) throw Error(ErrorCode::MalformedInput, "bad class entry");
            if (c.at("id").get<std::size_t>() != store.classes.size()) {
                throw Error(ErrorCode::MalformedInput, "class ids must be dense and ordered");
            }
            store.classes.push_back({letter.front(), *form});
        }
        for (const auto& p : j.at("prototypes")) {
            Prototype proto{p.at("features").get<std::vector<double>>(), p.at("memberships").get<std::vector<double>>()};
            if (proto.memberships.size() != store.classes.size()) {
                throw Error(ErrorCode::MalformedInput, "membership row length differs from class count");
            }
            if (!store.prototypes.empty() && proto.features.size() != store.dim()) {
                throw Error(ErrorCode::MalformedInput, "prototype feature lengths differ");
            }
            store.prototypes.push_back(std::move(proto));
        }
        return store;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::MalformedInput, std::string("bad store JSON: ") + e.what());
    }
}

}  // namespace savo::recognition

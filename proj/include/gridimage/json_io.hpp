#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "gridimage/bounds.hpp"
#include "gridimage/explorer.hpp"
#include "gridimage/image.hpp"
#include "gridimage/normalize.hpp"

// JSON views of every result type the tools print. Set/column/row indices
// are 1-based on the wire (matching the text formats' A1, A2, ... naming);
// the in-memory API stays 0-based throughout.

namespace gridimage {

namespace detail {

inline std::vector<int> to_one_based(const std::vector<int>& xs) {
    std::vector<int> out;
    out.reserve(xs.size());
    for (int x : xs) out.push_back(x + 1);
    return out;
}

inline std::vector<int> from_one_based(const std::vector<int>& xs) {
    std::vector<int> out;
    out.reserve(xs.size());
    for (int x : xs) {
        if (x < 1) throw ValueError("indices on the wire are 1-based");
        out.push_back(x - 1);
    }
    return out;
}

} // namespace detail

inline void to_json(nlohmann::json& j, const ResidueSet& s) {
    j = nlohmann::json{{"p", s.modulus().value()}, {"members", s.members()}};
}

inline ResidueSet residue_set_from_json(const nlohmann::json& j,
                                        std::uint32_t prime_cap = kDefaultPrimeCap) {
    const PrimeModulus mod(j.at("p").get<std::uint32_t>(), prime_cap);
    ResidueSet s(mod);
    for (const auto& r : j.at("members")) s.insert(r.get<std::uint32_t>());
    return s;
}

inline void to_json(nlohmann::json& j, const GridFamily& g) {
    std::vector<std::vector<std::uint32_t>> sets;
    sets.reserve(static_cast<std::size_t>(g.arity()));
    for (int i = 0; i < g.arity(); ++i) sets.push_back(g.set(i).members());
    j = nlohmann::json{{"p", g.modulus().value()}, {"sets", sets}};
}

inline GridFamily grid_from_json(const nlohmann::json& j,
                                 std::uint32_t prime_cap = kDefaultPrimeCap) {
    const PrimeModulus mod(j.at("p").get<std::uint32_t>(), prime_cap);
    std::vector<ResidueSet> sets;
    for (const auto& members : j.at("sets")) {
        ResidueSet s(mod);
        for (const auto& r : members) s.insert(r.get<std::uint32_t>());
        sets.push_back(s);
    }
    return GridFamily(mod, std::move(sets));
}

inline void to_json(nlohmann::json& j, const MatrixFp& m) {
    j = nlohmann::json{{"p", m.modulus().value()}, {"rows", m.row_vectors()}};
}

inline MatrixFp matrix_from_json(const nlohmann::json& j,
                                 std::uint32_t prime_cap = kDefaultPrimeCap) {
    const PrimeModulus mod(j.at("p").get<std::uint32_t>(), prime_cap);
    return MatrixFp::from_rows(mod,
                               j.at("rows").get<std::vector<std::vector<std::uint32_t>>>());
}

inline void to_json(nlohmann::json& j, const Precondition& p) {
    j = nlohmann::json{{"name", p.name}, {"holds", p.holds}, {"detail", p.detail}};
}

inline Precondition precondition_from_json(const nlohmann::json& j) {
    return {j.at("name").get<std::string>(), j.at("holds").get<bool>(),
            j.at("detail").get<std::string>()};
}

inline Theorem theorem_from_name(const std::string& name) {
    for (Theorem t : {Theorem::CauchyDavenport, Theorem::MainTheorem, Theorem::StarLemma,
                      Theorem::LargeK, Theorem::Cover, Theorem::None}) {
        if (theorem_name(t) == name) return t;
    }
    throw ValueError("unknown theorem tag: " + name);
}

inline void to_json(nlohmann::json& j, const BoundReport& r) {
    j = nlohmann::json{{"theorem", theorem_name(r.theorem)},
                       {"applicable", r.applicable},
                       {"reason", r.reason},
                       {"value", nullptr},
                       {"preconditions", r.preconditions},
                       {"candidates", r.candidates}};
    if (r.value) j["value"] = *r.value;
}

inline BoundReport bound_report_from_json(const nlohmann::json& j) {
    BoundReport r;
    r.theorem = theorem_from_name(j.at("theorem").get<std::string>());
    r.applicable = j.at("applicable").get<bool>();
    r.reason = j.at("reason").get<std::string>();
    if (!j.at("value").is_null()) r.value = j.at("value").get<std::int64_t>();
    for (const auto& p : j.at("preconditions")) r.preconditions.push_back(precondition_from_json(p));
    for (const auto& c : j.at("candidates")) r.candidates.push_back(bound_report_from_json(c));
    return r;
}

inline void to_json(nlohmann::json& j, const KernelDescription& k) {
    j = nlohmann::json{{"basis", k.basis},
                       {"min_support_vector", nullptr},
                       {"support", detail::to_one_based(k.support)},
                       {"co_support", detail::to_one_based(k.co_support)}};
    if (k.min_support_vector) j["min_support_vector"] = *k.min_support_vector;
}

inline void to_json(nlohmann::json& j, const TransformRecord& rec) {
    if (const auto* sw = std::get_if<ColumnSwapRecord>(&rec)) {
        j = nlohmann::json{{"op", "column_swap"}, {"i", sw->i + 1}, {"j", sw->j + 1}};
    } else if (const auto* rm = std::get_if<RowMultiplierRecord>(&rec)) {
        j = nlohmann::json{{"op", "row_multiplier"}, {"matrix", rm->multiplier}};
    } else {
        const auto& cs = std::get<ColumnScaleRecord>(rec);
        j = nlohmann::json{{"op", "column_scale"}, {"column", cs.column + 1},
                           {"scalar", cs.scalar}};
    }
}

inline TransformRecord transform_record_from_json(const nlohmann::json& j,
                                                  std::uint32_t prime_cap = kDefaultPrimeCap) {
    const std::string op = j.at("op").get<std::string>();
    if (op == "column_swap") {
        return ColumnSwapRecord{j.at("i").get<int>() - 1, j.at("j").get<int>() - 1};
    }
    if (op == "row_multiplier") {
        return RowMultiplierRecord{matrix_from_json(j.at("matrix"), prime_cap)};
    }
    if (op == "column_scale") {
        return ColumnScaleRecord{j.at("column").get<int>() - 1,
                                 j.at("scalar").get<std::uint32_t>()};
    }
    throw ValueError("unknown transform op: " + op);
}

inline void to_json(nlohmann::json& j, const NormalizationResult& r) {
    j = nlohmann::json{{"canonical", r.canonical},
                       {"transformed_grid", r.transformed_grid},
                       {"first_column_ones", detail::to_one_based(r.first_column_ones)},
                       {"transcript", r.transcript},
                       {"kernel_vector", r.kernel_vector()}};
}

inline NormalizationResult normalization_from_json(const nlohmann::json& j,
                                                   std::uint32_t prime_cap = kDefaultPrimeCap) {
    NormalizationResult r{matrix_from_json(j.at("canonical"), prime_cap),
                          grid_from_json(j.at("transformed_grid"), prime_cap),
                          detail::from_one_based(j.at("first_column_ones").get<std::vector<int>>()),
                          {}};
    for (const auto& rec : j.at("transcript")) {
        r.transcript.push_back(transform_record_from_json(rec, prime_cap));
    }
    return r;
}

/// {p, m, size, points} with points omitted above the threshold.
inline nlohmann::json image_to_json(const ImageSet& img, std::int64_t max_points = 10'000) {
    nlohmann::json j{{"p", img.modulus().value()},
                     {"m", img.dim()},
                     {"cells", img.cells()},
                     {"size", img.size()}};
    if (img.size() <= max_points) {
        j["points"] = img.indices();
    }
    return j;
}

inline ImageSet image_from_json(const nlohmann::json& j, std::uint64_t cap = kDefaultCellCap,
                                std::uint32_t prime_cap = kDefaultPrimeCap) {
    ImageSet img(PrimeModulus(j.at("p").get<std::uint32_t>(), prime_cap), j.at("m").get<int>(),
                 cap);
    if (j.contains("points")) {
        for (const auto& idx : j.at("points")) img.set(idx.get<std::uint64_t>());
    }
    return img;
}

inline void to_json(nlohmann::json& j, const ExtremalRecord& r) {
    j = nlohmann::json{{"grid", r.grid},
                       {"image_size", r.image_size},
                       {"bound", r.bound},
                       {"tight", r.tight}};
}

inline ExtremalRecord extremal_from_json(const nlohmann::json& j,
                                         std::uint32_t prime_cap = kDefaultPrimeCap) {
    return {grid_from_json(j.at("grid"), prime_cap), j.at("image_size").get<std::int64_t>(),
            bound_report_from_json(j.at("bound")), j.at("tight").get<bool>()};
}

inline void to_json(nlohmann::json& j, const ConjectureReport& r) {
    j = nlohmann::json{{"p", r.mod.value()},
                       {"k", r.k},
                       {"interval_image", r.interval_image},
                       {"theorem_bound", r.theorem_bound},
                       {"search_min", r.search_min},
                       {"exhaustive_min", nullptr},
                       {"gap_interval_vs_bound", r.gap_interval_vs_bound},
                       {"gap_search_vs_interval", r.gap_search_vs_interval},
                       {"iterations", r.iterations},
                       {"seed", r.seed}};
    if (r.exhaustive_min) j["exhaustive_min"] = *r.exhaustive_min;
}

inline ConjectureReport conjecture_from_json(const nlohmann::json& j,
                                             std::uint32_t prime_cap = kDefaultPrimeCap) {
    ConjectureReport r{PrimeModulus(j.at("p").get<std::uint32_t>(), prime_cap)};
    r.k = j.at("k").get<std::int64_t>();
    r.interval_image = j.at("interval_image").get<std::int64_t>();
    r.theorem_bound = j.at("theorem_bound").get<std::int64_t>();
    r.search_min = j.at("search_min").get<std::int64_t>();
    if (!j.at("exhaustive_min").is_null()) {
        r.exhaustive_min = j.at("exhaustive_min").get<std::int64_t>();
    }
    r.gap_interval_vs_bound = j.at("gap_interval_vs_bound").get<std::int64_t>();
    r.gap_search_vs_interval = j.at("gap_search_vs_interval").get<std::int64_t>();
    r.iterations = j.at("iterations").get<std::int64_t>();
    r.seed = j.at("seed").get<std::uint64_t>();
    return r;
}

inline void to_json(nlohmann::json& j, const SearchCheckpoint& c) {
    j = nlohmann::json{{"position", c.position},
                       {"best_size", c.best_size},
                       {"best_index", c.best_index},
                       {"best_masks", c.best_masks}};
}

inline SearchCheckpoint checkpoint_from_json(const nlohmann::json& j) {
    return {j.at("position").get<std::uint64_t>(), j.at("best_size").get<std::int64_t>(),
            j.at("best_index").get<std::uint64_t>(),
            j.at("best_masks").get<std::vector<std::uint64_t>>()};
}

} // namespace gridimage

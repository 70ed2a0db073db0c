#pragma once

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <string>

#include <json.hpp>

#include "lgt/eliminate.hpp"
#include "lgt/gauss.hpp"
#include "lgt/unitary_group.hpp"

namespace lgt {

using nlohmann::json;

inline std::string fnv1a_hex(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
    return buf;
}

inline json to_json(const EliminationReport& r) {
    json j;
    j["transform_kind"] =
        r.kind == TransformKind::MatterRemoval ? "matter_removal" : "gauge_removal_1d";
    j["unitarity_residual"] = r.unitarity_residual;
    j["decoupling_residual"] = r.decoupling_residual;
    j["constraint_residual_after"] = r.constraint_residual_after;
    j["leakage"] = r.leakage;
    j["mass_constant"] = r.mass_constant;
    j["spectrum_before"] = r.spectrum_before;
    j["spectrum_after"] = r.spectrum_after;
    j["max_abs_deviation"] = r.max_abs_deviation;
    j["max_gap_error"] = r.max_gap_error;
    j["headroom_ok"] = r.headroom_ok;
    j["tolerance"] = r.tol;
    j["pass"] = r.pass;
    return j;
}

inline json to_json(const U2EliminationReport& r) {
    json j = to_json(r.base);
    j["gauss_digit_check"] = r.gauss_digit_check;
    j["order_reversal_deviation"] = r.order_reversal_deviation;
    j["conjugation_deviation"] = r.conjugation_deviation;
    return j;
}

inline json to_json(const CartanData& cd) {
    json j;
    j["group"] = cd.group == GroupKind::U ? "U" : "SU";
    j["n"] = cd.n;
    json gens = json::array();
    for (const auto& t : cd.generators) {
        json rows = json::array();
        for (int r = 0; r < t.rows(); ++r) {
            json row = json::array();
            for (int c = 0; c < t.cols(); ++c) row.push_back(t(r, c));
            rows.push_back(row);
        }
        gens.push_back(rows);
    }
    j["generators"] = gens;
    json lam = json::array();
    for (int r = 0; r < cd.lambda.rows(); ++r) {
        json row = json::array();
        for (int c = 0; c < cd.lambda.cols(); ++c) row.push_back(cd.lambda(r, c));
        lam.push_back(row);
    }
    j["lambda"] = lam;
    if (cd.lambda_prime.size()) {
        json lp = json::array();
        for (int r = 0; r < cd.lambda_prime.rows(); ++r) {
            json row = json::array();
            for (int c = 0; c < cd.lambda_prime.cols(); ++c) row.push_back(cd.lambda_prime(r, c));
            lp.push_back(row);
        }
        j["lambda_prime"] = lp;
    }
    return j;
}

inline json to_json(const SectorTable& t) {
    json rows = json::array();
    for (const auto& row : t.rows) {
        json r;
        json key = json::array();
        for (long long k : row.key_twice) key.push_back(k / 2.0);
        r["assignment"] = key;
        r["dimension"] = row.dimension;
        rows.push_back(r);
    }
    json j;
    j["sectors"] = rows;
    j["total_dimension"] = t.total_dimension();
    j["sector_count"] = t.rows.size();
    return j;
}

inline json to_json(const EmbedReport& r) {
    json j;
    j["physical_dim"] = r.physical_dim;
    j["inner_product_deviation"] = r.inner_product_deviation;
    j["matrix_element_deviation"] = r.matrix_element_deviation;
    j["zero_phase_block_deviation"] = r.zero_phase_block_deviation;
    j["tolerance"] = r.tol;
    j["pass"] = r.pass;
    return j;
}

inline json to_json(const Su3IdentityReport& r) {
    json j;
    j["spectrum_in_01"] = r.spectrum_ok;
    j["occupation_identity"] = r.identity_ok;
    j["generators_commute"] = r.commute_ok;
    j["consistent_configurations"] = r.consistent_count;
    j["pass"] = r.pass;
    return j;
}

// index, eigenvalue_before, eigenvalue_after (shift applied), abs_diff;
// 17 significant digits for loss-free diffing.
inline void write_spectra_csv(const std::string& path, const std::vector<double>& before,
                              const std::vector<double>& after, double shift_after) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw Error("cannot open " + path + " for writing");
    std::fprintf(f, "index,eigenvalue_before,eigenvalue_after,abs_diff\n");
    const size_t n = std::min(before.size(), after.size());
    for (size_t i = 0; i < n; ++i) {
        const double a = before[i];
        const double b = after[i] + shift_after;
        std::fprintf(f, "%zu,%.17g,%.17g,%.17g\n", i, a, b, std::abs(a - b));
    }
    std::fclose(f);
}

inline void write_json_file(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open " + path + " for writing");
    out << j.dump(2) << "\n";
}

} // namespace lgt

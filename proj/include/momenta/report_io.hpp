#pragma once

#include <cstdio>
#include <sstream>
#include <string>

#include "momenta/bounds.hpp"

namespace momenta {

namespace detail {

inline std::string num17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::string num4(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return buf;
}

inline std::string json_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof(buf), "\\u%04x", c);
                    out += buf;
                } else {
                    out += c;
                }
        }
    }
    return out;
}

inline void json_levels(std::ostringstream& out, const char* key, const char* level_key,
                        const std::map<int, LevelResult>& levels) {
    out << "\"" << key << "\":[";
    bool first = true;
    for (const auto& [k, lv] : levels) {
        if (!first) out << ",";
        first = false;
        out << "{\"" << level_key << "\":" << k;
        if (lv.error.empty()) {
            out << ",\"value\":" << num17(lv.value) << ",\"status\":\"" << to_string(lv.status)
                << "\",\"block\":" << lv.block_size << ",\"iterations\":" << lv.iterations;
        } else {
            out << ",\"error\":\"" << json_escape(lv.error) << "\"";
        }
        out << "}";
    }
    out << "]";
}

}  // namespace detail

/// JSON dump of one solver result: value, gap, status, eigenvalue floor.
inline std::string solution_json(const SdpSolution& s) {
    std::ostringstream out;
    out << "{\"value\":" << detail::num17(s.primal_value)
        << ",\"dual\":" << detail::num17(s.dual_value) << ",\"gap\":" << detail::num17(s.gap)
        << ",\"status\":\"" << to_string(s.status)
        << "\",\"min_eigenvalue\":" << detail::num17(s.min_eigenvalue)
        << ",\"iterations\":" << s.iterations;
    if (!s.message.empty()) out << ",\"message\":\"" << detail::json_escape(s.message) << "\"";
    out << "}";
    return out.str();
}

/// Stable single-line JSON (schema momenta.report.v1, 17 significant digits).
inline std::string report_json(const BoundReport& r) {
    std::ostringstream out;
    out << "{\"schema\":\"momenta.report.v1\"";
    out << ",\"id\":\"" << detail::json_escape(r.id) << "\"";
    out << ",\"input\":\"" << detail::json_escape(r.input) << "\"";
    out << ",\"n\":" << r.n << ",\"d\":" << r.d;
    if (r.alpha_available) {
        out << ",\"alpha\":" << r.alpha.size << ",\"alpha_witness\":[";
        for (size_t t = 0; t < r.alpha.witness.size(); ++t)
            out << (t ? "," : "") << r.alpha.witness[t];
        out << "]";
    } else {
        out << ",\"alpha\":null";
    }
    out << ",\"lower_bound\":{";
    if (r.sampling_available)
        out << "\"sampled\":" << detail::num17(r.sampled_value)
            << ",\"polished\":" << detail::num17(r.polished_value) << ",";
    if (!r.sampling_note.empty())
        out << "\"note\":\"" << detail::json_escape(r.sampling_note) << "\",";
    out << "\"value\":" << detail::num17(r.lower_bound) << "}";
    out << ",";
    detail::json_levels(out, "theta", "k", r.theta);
    out << ",";
    detail::json_levels(out, "theta_cut", "k", r.theta_cut);
    out << ",";
    detail::json_levels(out, "nu", "level", r.nu);
    out << ",\"cuts\":[";
    for (size_t h = 0; h < r.cuts_applied.size(); ++h) {
        if (h) out << ",";
        out << "[";
        for (size_t t = 0; t < r.cuts_applied[h].vertices.size(); ++t)
            out << (t ? "," : "") << r.cuts_applied[h].vertices[t];
        out << "]";
    }
    out << "]";
    if (r.rank_available) {
        out << ",\"rank\":{\"outer\":" << r.rank.outer_rank << ",\"inner\":" << r.rank.inner_rank
            << ",\"loop\":" << (r.rank.loop_detected ? "true" : "false") << "}";
    } else {
        out << ",\"rank\":null";
    }
    out << ",\"certified\":\"" << r.certified << "\"";
    out << ",\"beta_lb\":" << detail::num17(r.beta_lb);
    out << ",\"beta_ub\":" << detail::num17(r.beta_ub);
    out << ",\"uncertainty_constant\":" << detail::num17(r.uncertainty_constant);
    out << ",\"embedded_block\":" << r.embedded_block;
    out << "}";
    return out.str();
}

/// Table-style CSV: id, n, alpha, theta_1..theta_k, certified, errors.
inline std::string report_csv_header(const BoundReport& r) {
    std::ostringstream out;
    out << "id,n,alpha";
    for (const auto& [k, lv] : r.theta) out << ",theta" << k;
    for (const auto& [l, lv] : r.nu) out << ",nu" << l;
    out << ",certified,errors";
    return out.str();
}

inline std::string report_csv_row(const BoundReport& r) {
    std::ostringstream out, errs;
    out << r.id << "," << r.n << ",";
    if (r.alpha_available) out << r.alpha.size;
    auto emit = [&](const char* tag, int lvl, const LevelResult& lv) {
        out << ",";
        if (lv.error.empty()) {
            out << detail::num4(lv.value);
        } else {
            if (errs.tellp() > 0) errs << "; ";
            errs << tag << lvl << ": " << lv.error;
        }
    };
    for (const auto& [k, lv] : r.theta) emit("theta", k, lv);
    for (const auto& [l, lv] : r.nu) emit("nu", l, lv);
    out << "," << r.certified << ",";
    std::string e = errs.str();
    for (char& c : e)
        if (c == ',') c = ';';
    out << e;
    return out.str();
}

inline std::string report_text(const BoundReport& r) {
    std::ostringstream out;
    out << "graph " << r.id << " (n=" << r.n << ", d=" << r.d << ")\n";
    if (r.alpha_available) {
        out << "  alpha = " << r.alpha.size << "  witness = {";
        for (size_t t = 0; t < r.alpha.witness.size(); ++t)
            out << (t ? "," : "") << r.alpha.witness[t];
        out << "}\n";
    }
    if (r.sampling_available)
        out << "  sampled = " << detail::num17(r.sampled_value)
            << "  polished = " << detail::num17(r.polished_value) << "\n";
    if (!r.sampling_note.empty()) out << "  sampling skipped: " << r.sampling_note << "\n";
    for (const auto& [k, lv] : r.theta) {
        out << "  theta_" << k << " = ";
        if (lv.error.empty())
            out << detail::num17(lv.value) << "  [" << to_string(lv.status) << ", block "
                << lv.block_size << "]";
        else
            out << "error: " << lv.error;
        out << "\n";
    }
    for (const auto& [k, lv] : r.theta_cut) {
        out << "  theta_" << k << "+cuts = ";
        if (lv.error.empty())
            out << detail::num17(lv.value);
        else
            out << "error: " << lv.error;
        out << "\n";
    }
    for (const auto& [l, lv] : r.nu) {
        out << "  nu_" << l << " = ";
        if (lv.error.empty())
            out << detail::num17(lv.value);
        else
            out << "error: " << lv.error;
        out << "\n";
    }
    if (!r.cuts_applied.empty()) out << "  odd holes used: " << r.cuts_applied.size() << "\n";
    if (r.rank_available)
        out << "  rank: outer " << r.rank.outer_rank << " vs inner " << r.rank.inner_rank
            << (r.rank.loop_detected ? " (rank loop)" : "") << "\n";
    out << "  beta in [" << detail::num17(r.beta_lb) << ", " << detail::num17(r.beta_ub) << "]"
        << "  certified: " << r.certified << "\n";
    out << "  uncertainty constant n - beta_ub = " << detail::num17(r.uncertainty_constant) << "\n";
    return out.str();
}

}  // namespace momenta

#pragma once

#include "qsi/addmap.hpp"
#include "qsi/pathexpr.hpp"
#include "qsi/poly.hpp"

#include <json.hpp>

#include <fstream>
#include <string>

namespace qsi {

using Json = nlohmann::json;

inline Json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("parse error", "cannot open '" + path + "'");
    Json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        fail("parse error", std::string("invalid JSON in '") + path + "': " + e.what());
    }
    return j;
}

// ---------------------------------------------------------------------------
// quivers: {"vertices": [...], "arrows": [{"id","from","to"}, ...]}

inline Quiver parse_quiver_json(const Json& j) {
    if (!j.is_object() || !j.contains("vertices") || !j.contains("arrows"))
        fail("parse error", "quiver JSON needs 'vertices' and 'arrows'");
    std::vector<std::string> vertices;
    for (const auto& v : j.at("vertices")) vertices.push_back(v.get<std::string>());
    std::vector<std::tuple<std::string, std::string, std::string>> arrows;
    for (const auto& a : j.at("arrows"))
        arrows.emplace_back(a.at("id").get<std::string>(), a.at("from").get<std::string>(),
                            a.at("to").get<std::string>());
    return validate_quiver(std::move(vertices), std::move(arrows));
}

inline Json render_quiver_json(const Quiver& q) {
    Json j;
    j["vertices"] = q.vertices();
    j["arrows"] = Json::array();
    for (int a = 0; a < q.num_arrows(); ++a)
        j["arrows"].push_back({{"id", q.arrow_name(a)},
                               {"from", q.vertex_name(q.source(a))},
                               {"to", q.vertex_name(q.target(a))}});
    return j;
}

// ---------------------------------------------------------------------------
// flag formats: dimension vectors "v:n,..." and A-degrees "a:m,..."
// (omitted entries are zero)

namespace detail {

inline std::vector<std::pair<std::string, long long>> parse_flag_pairs(const std::string& flag) {
    std::vector<std::pair<std::string, long long>> out;
    std::size_t i = 0;
    while (i < flag.size()) {
        std::size_t comma = flag.find(',', i);
        if (comma == std::string::npos) comma = flag.size();
        std::string item = flag.substr(i, comma - i);
        std::size_t colon = item.find(':');
        if (colon == std::string::npos)
            fail("parse error", "expected 'id:count' in '" + item + "'");
        try {
            out.emplace_back(item.substr(0, colon), std::stoll(item.substr(colon + 1)));
        } catch (const std::exception&) {
            fail("parse error", "invalid count in '" + item + "'");
        }
        i = comma + 1;
    }
    return out;
}

}  // namespace detail

inline DimVector parse_dimvector_flag(const Quiver& q, const std::string& flag) {
    DimVector d = DimVector::zeros(q.num_vertices());
    for (const auto& [id, n] : detail::parse_flag_pairs(flag)) {
        if (n < 0) fail("parse error", "negative dimension for vertex '" + id + "'");
        d[q.vertex_index(id)] = n;
    }
    return d;
}

inline ADegree parse_adegree_flag(const Quiver& q, const std::string& flag) {
    ADegree d = ADegree::zeros(q.num_arrows());
    for (const auto& [id, n] : detail::parse_flag_pairs(flag)) {
        if (n < 0) fail("parse error", "negative degree for arrow '" + id + "'");
        d[q.arrow_index(id)] = n;
    }
    return d;
}

inline std::string dimvector_flag(const Quiver& q, const DimVector& d) {
    std::string s;
    for (int v = 0; v < q.num_vertices(); ++v) {
        if (v) s += ",";
        s += q.vertex_name(v) + ":" + std::to_string(d[v]);
    }
    return s;
}

inline std::string adegree_flag(const Quiver& q, const ADegree& d) {
    std::string s;
    for (int a = 0; a < q.num_arrows(); ++a) {
        if (a) s += ",";
        s += q.arrow_name(a) + ":" + std::to_string(d[a]);
    }
    return s;
}

// ---------------------------------------------------------------------------
// maps in add(Q):
// {"source": {"v": mult}, "target": {"v": mult}, "entries": [[expr, ...], ...]}
// entries are source-slot-major over the canonical slot layout; "0" denotes
// the zero combination

inline AddMap parse_addmap_json(const Quiver& q, const Json& j) {
    if (!j.is_object() || !j.contains("source") || !j.contains("target") || !j.contains("entries"))
        fail("parse error", "map JSON needs 'source', 'target', 'entries'");
    auto parse_mult = [&](const Json& m) {
        DimVector d = DimVector::zeros(q.num_vertices());
        for (auto it = m.begin(); it != m.end(); ++it) {
            long long n = it.value().get<long long>();
            if (n < 0) fail("parse error", "negative multiplicity");
            d[q.vertex_index(it.key())] = n;
        }
        return d;
    };
    std::vector<int> src = canonical_slots(q, parse_mult(j.at("source")));
    std::vector<int> tgt = canonical_slots(q, parse_mult(j.at("target")));
    const auto& rows = j.at("entries");
    if (rows.size() != src.size())
        fail("parse error", "entries must have one row per source slot (source-slot-major)");
    AddMap m = zero_addmap(q, src, tgt);
    for (std::size_t s = 0; s < src.size(); ++s) {
        if (rows[s].size() != tgt.size())
            fail("parse error", "entry row " + std::to_string(s) + " has the wrong width");
        for (std::size_t t = 0; t < tgt.size(); ++t) {
            std::string expr = rows[s][t].get<std::string>();
            if (expr == "0" || expr.empty()) continue;
            PathComb pc = parse_path_expr(q, expr);
            if (pc.source != src[s] || pc.target != tgt[t])
                fail("endpoint mismatch",
                     "entry (" + std::to_string(s) + "," + std::to_string(t) +
                         ") does not run between its slot vertices");
            m.entries[s][t] = std::move(pc);
        }
    }
    return m;
}

inline Json render_addmap_json(const AddMap& m0) {
    // the format describes slots by multiplicities, so order them canonically
    AddMap m = canonicalize_slots(m0);
    Json src = Json::object(), tgt = Json::object();
    DimVector a = m.source_mult(), b = m.target_mult();
    for (int v = 0; v < m.quiver.num_vertices(); ++v) {
        if (a[v]) src[m.quiver.vertex_name(v)] = a[v];
        if (b[v]) tgt[m.quiver.vertex_name(v)] = b[v];
    }
    Json rows = Json::array();
    for (int s = 0; s < m.num_source_slots(); ++s) {
        Json row = Json::array();
        for (int t = 0; t < m.num_target_slots(); ++t)
            row.push_back(comb_str(m.quiver, m.entries[s][t]));
        rows.push_back(std::move(row));
    }
    return Json{{"source", src}, {"target", tgt}, {"entries", rows}};
}

// ---------------------------------------------------------------------------
// points: {"arrow": [["n/d", ...], ...], ...}; omitted arrows are zero

inline RepPoint parse_point_json(const Ambient& amb, const Json& j) {
    RepPoint p = zero_point(amb);
    if (!j.is_object()) fail("parse error", "point JSON must be an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        const int a = amb.quiver.arrow_index(it.key());
        RatMatrix& m = p.mats[a];
        const Json& rows = it.value();
        if (static_cast<int>(rows.size()) != m.rows)
            fail("shape mismatch", "matrix for arrow '" + it.key() + "' has wrong row count");
        for (int r = 0; r < m.rows; ++r) {
            if (static_cast<int>(rows[r].size()) != m.cols)
                fail("shape mismatch", "matrix for arrow '" + it.key() + "' has wrong column count");
            for (int c = 0; c < m.cols; ++c) m.at(r, c) = parse_rat(rows[r][c].get<std::string>());
        }
    }
    return p;
}

inline Json render_point_json(const Ambient& amb, const RepPoint& p) {
    Json j = Json::object();
    for (int a = 0; a < amb.quiver.num_arrows(); ++a) {
        Json rows = Json::array();
        for (int r = 0; r < p.mats[a].rows; ++r) {
            Json row = Json::array();
            for (int c = 0; c < p.mats[a].cols; ++c) row.push_back(rat_str(p.mats[a].at(r, c)));
            rows.push_back(std::move(row));
        }
        j[amb.quiver.arrow_name(a)] = std::move(rows);
    }
    return j;
}

}  // namespace qsi

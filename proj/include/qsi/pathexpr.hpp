#pragma once

#include "qsi/quiver.hpp"

#include <cctype>
#include <string>

namespace qsi {

/// Parses a path expression over Q into a PathComb. Grammar:
///   expr     := ['+'|'-'] term (('+'|'-') term)*
///   term     := [rational '*']? path
///   path     := 'e_' vertexId | arrowId ('.' arrowId)*
///   rational := int ['/' posint]
/// Identifiers are [A-Za-z0-9_]+; 'e_<vertex>' takes precedence over an arrow
/// of the same name. Endpoints are inferred and must agree across terms.
inline PathComb parse_path_expr(const Quiver& q, const std::string& text) {
    std::size_t i = 0;
    auto skip_ws = [&] {
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    };
    auto is_ident = [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
    };
    auto parse_ident = [&]() -> std::string {
        skip_ws();
        std::size_t b = i;
        while (i < text.size() && is_ident(text[i])) ++i;
        if (i == b) fail("parse error", "expected identifier at offset " + std::to_string(b));
        return text.substr(b, i - b);
    };

    PathComb out;
    bool have_endpoints = false;
    skip_ws();
    bool neg = false;
    if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
        neg = text[i] == '-';
        ++i;
    }
    for (;;) {
        skip_ws();
        if (i >= text.size()) fail("parse error", "expected term at offset " + std::to_string(i));
        Rat coeff = 1;
        // optional rational followed by '*'
        if (std::isdigit(static_cast<unsigned char>(text[i]))) {
            std::size_t save = i;
            std::size_t b = i;
            while (i < text.size() &&
                   (std::isdigit(static_cast<unsigned char>(text[i])) || text[i] == '/'))
                ++i;
            std::size_t after_num = i;
            skip_ws();
            if (i < text.size() && text[i] == '*') {
                coeff = parse_rat(text.substr(b, after_num - b));
                ++i;
            } else {
                // identifiers may start with a digit; backtrack
                i = save;
            }
        }
        // path
        skip_ws();
        Path p;
        std::string first = parse_ident();
        if (first.rfind("e_", 0) == 0 && q.find_vertex(first.substr(2)).has_value()) {
            p = trivial_path(*q.find_vertex(first.substr(2)));
        } else {
            std::vector<int> arrows{q.arrow_index(first)};
            skip_ws();
            while (i < text.size() && text[i] == '.') {
                ++i;
                arrows.push_back(q.arrow_index(parse_ident()));
                skip_ws();
            }
            p = make_path(q, arrows);  // validates composability
        }
        if (!have_endpoints) {
            out.source = p.source;
            out.target = p.target;
            have_endpoints = true;
        } else if (out.source != p.source || out.target != p.target) {
            fail("endpoint mismatch", "mixed endpoints across terms of a path expression");
        }
        out.terms.emplace_back(std::move(p), neg ? Rat(-coeff) : coeff);
        skip_ws();
        if (i >= text.size()) break;
        if (text[i] == '+' || text[i] == '-') {
            neg = text[i] == '-';
            ++i;
        } else {
            fail("parse error", "unexpected character at offset " + std::to_string(i));
        }
    }
    comb_normalize(out);
    return out;
}

}  // namespace qsi

#include "usconf/eval.hpp"
#include "usconf/io.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace usconf {

const char* to_string(PatchRole role) {
    switch (role) {
    case PatchRole::A: return "A";
    case PatchRole::B: return "B";
    case PatchRole::C: return "C";
    }
    return "?";
}

const char* to_string(PatchKind kind) {
    return kind == PatchKind::reverberation ? "reverberation" : "shadow";
}

double patch_median(const ImageGrid& map, const PatchSpec& patch) {
    const Rect& r = patch.rect;
    if (!r.inside(map.height(), map.width()))
        throw std::invalid_argument("patch_median: patch outside map bounds or empty");
    std::vector<float> values;
    values.reserve(static_cast<size_t>(r.rows()) * r.cols());
    for (int i = r.row0; i < r.row1; ++i)
        for (int j = r.col0; j < r.col1; ++j) values.push_back(map.at(i, j));
    const size_t n = values.size();
    const size_t mid = n / 2;
    std::nth_element(values.begin(), values.begin() + mid, values.end());
    const double upper = values[mid];
    if (n % 2 == 1) return upper;
    const double lower = *std::max_element(values.begin(), values.begin() + mid);
    return 0.5 * (lower + upper);
}

bool OrderingReport::all_pass() const {
    return std::all_of(triples.begin(), triples.end(),
                       [](const TripleResult& t) { return t.all_pass(); });
}

OrderingReport check_orderings(const ImageGrid& intensity, const ImageGrid& structural,
                               const std::vector<PatchSpec>& patches, double margin,
                               double closeness) {
    if (!intensity.same_shape(structural))
        throw std::invalid_argument("check_orderings: map dimensions mismatch");

    OrderingReport report;
    report.margin = margin;
    report.closeness = closeness;
    for (PatchKind kind : {PatchKind::reverberation, PatchKind::shadow}) {
        std::array<std::vector<const PatchSpec*>, 3> byrole;
        for (const PatchSpec& p : patches)
            if (p.kind == kind) byrole[static_cast<size_t>(p.role)].push_back(&p);
        const size_t n = byrole[0].size();
        if (n != byrole[1].size() || n != byrole[2].size())
            throw std::invalid_argument(std::string("check_orderings: incomplete (A,B,C) triple for kind ") +
                                        to_string(kind));
        for (size_t t = 0; t < n; ++t) {
            const PatchSpec& a = *byrole[0][t];
            const PatchSpec& b = *byrole[1][t];
            const PatchSpec& c = *byrole[2][t];
            if (b.rect.row0 != c.rect.row0 || b.rect.row1 != c.rect.row1)
                throw std::invalid_argument("check_orderings: B and C patches must share the row range");
            TripleResult res;
            res.kind = kind;
            res.intensity_a = patch_median(intensity, a);
            res.intensity_b = patch_median(intensity, b);
            res.intensity_c = patch_median(intensity, c);
            res.structural_a = patch_median(structural, a);
            res.structural_b = patch_median(structural, b);
            res.structural_c = patch_median(structural, c);
            res.intensity_ordering =
                res.intensity_a > res.intensity_c && res.intensity_c > res.intensity_b;
            res.structural_gap =
                res.structural_b + margin <= std::min(res.structural_a, res.structural_c);
            res.structural_closeness = std::abs(res.structural_a - res.structural_c) <= closeness;
            report.triples.push_back(res);
        }
    }
    if (report.triples.empty())
        throw std::invalid_argument("check_orderings: no complete (A,B,C) triple found");
    return report;
}

std::string OrderingReport::to_csv() const {
    std::ostringstream out;
    out << "triple,kind,predicate,value_a,value_b,value_c,threshold,pass\n";
    int idx = 0;
    for (const TripleResult& t : triples) {
        out << idx << ',' << to_string(t.kind) << ",intensity_ordering," << t.intensity_a << ','
            << t.intensity_b << ',' << t.intensity_c << ",," << (t.intensity_ordering ? 1 : 0)
            << '\n';
        out << idx << ',' << to_string(t.kind) << ",structural_gap," << t.structural_a << ','
            << t.structural_b << ',' << t.structural_c << ',' << margin << ','
            << (t.structural_gap ? 1 : 0) << '\n';
        out << idx << ',' << to_string(t.kind) << ",structural_closeness," << t.structural_a << ','
            << t.structural_b << ',' << t.structural_c << ',' << closeness << ','
            << (t.structural_closeness ? 1 : 0) << '\n';
        ++idx;
    }
    return out.str();
}

namespace {

PatchRole parse_role(const std::string& s) {
    if (s == "A") return PatchRole::A;
    if (s == "B") return PatchRole::B;
    if (s == "C") return PatchRole::C;
    throw std::invalid_argument("patches: unknown role '" + s + "'");
}

PatchKind parse_kind(const std::string& s) {
    if (s == "reverberation") return PatchKind::reverberation;
    if (s == "shadow") return PatchKind::shadow;
    throw std::invalid_argument("patches: unknown kind '" + s + "'");
}

} // namespace

std::vector<PatchSpec> load_patches_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open patches file '" + path + "'");
    std::vector<PatchSpec> out;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (first) {
            first = false;
            if (line.rfind("role,", 0) == 0) continue; // header
        }
        std::istringstream ls(line);
        std::string role, kind, field;
        PatchSpec p;
        if (!std::getline(ls, role, ',') || !std::getline(ls, kind, ','))
            throw std::invalid_argument("patches: malformed line '" + line + "'");
        p.role = parse_role(role);
        p.kind = parse_kind(kind);
        int* coords[4] = {&p.rect.row0, &p.rect.col0, &p.rect.row1, &p.rect.col1};
        for (int* c : coords) {
            if (!std::getline(ls, field, ','))
                throw std::invalid_argument("patches: malformed line '" + line + "'");
            *c = std::stoi(field);
        }
        out.push_back(p);
    }
    return out;
}

void save_patches_csv(const std::vector<PatchSpec>& patches, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw io_error("cannot write patches file '" + path + "'");
    out << "role,kind,row0,col0,row1,col1\n";
    for (const PatchSpec& p : patches)
        out << to_string(p.role) << ',' << to_string(p.kind) << ',' << p.rect.row0 << ','
            << p.rect.col0 << ',' << p.rect.row1 << ',' << p.rect.col1 << '\n';
    if (!out) throw io_error("write failed for '" + path + "'");
}

} // namespace usconf

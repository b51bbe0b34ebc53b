#include "nlpt_io/io.hpp"

#include "nlpt/error.hpp"

#include <openssl/evp.h>

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

namespace nlpt::io {

namespace {

static_assert(std::endian::native == std::endian::little, "grid files store little-endian float64");

template <class T>
T get(const json& doc, const char* key, const std::string& where)
{
    if (!doc.is_object() || !doc.contains(key)) throw InputError(where + ": missing field '" + key + "'");
    try {
        return doc.at(key).get<T>();
    } catch (const json::exception& e) {
        throw InputError(where + ": field '" + key + "' has the wrong type");
    }
}

std::vector<double> numbers(const json& arr, const std::string& where)
{
    if (!arr.is_array()) throw InputError(where + ": expected an array of numbers");
    std::vector<double> out;
    out.reserve(arr.size());
    for (const auto& v : arr) {
        if (v.is_null()) out.push_back(std::numeric_limits<double>::quiet_NaN());
        else if (v.is_number()) out.push_back(v.get<double>());
        else throw InputError(where + ": expected an array of numbers");
    }
    return out;
}

BoxDomain domain_from(const json& lower, const json& upper, double margin, const std::string& where)
{
    try {
        return BoxDomain(numbers(lower, where + ".lower"), numbers(upper, where + ".upper"), margin);
    } catch (const InvalidParameter& e) {
        throw InputError(where + ": " + e.what());
    }
}

json matrix_rows(const SymMat& a)
{
    json rows = json::array();
    for (std::size_t i = 0; i < a.dim(); ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < a.dim(); ++j) row.push_back(a(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json coefficient_to_json(const CoefficientField& f)
{
    return {{"grid_shape", f.grid().resolution()}, {"values", f.values()}};
}

CoefficientField coefficient_from_json(const json& doc, const BoxDomain& domain, const std::string& where)
{
    if (!doc.is_object()) throw InputError(where + ": expected an object");
    if (doc.contains("constant")) {
        const json& c = doc.at("constant");
        if (c.is_number()) return CoefficientField::constant(domain, c.get<double>());
        auto v = numbers(c, where + ".constant");
        if (v.empty()) throw InputError(where + ": empty constant");
        return CoefficientField::constant(domain, std::move(v));
    }
    const auto shape = get<std::vector<std::size_t>>(doc, "grid_shape", where);
    auto values = numbers(doc.contains("values") ? doc.at("values") : json(), where + ".values");
    if (shape.size() != domain.dim()) throw InputError(where + ": grid_shape must have one entry per domain axis");
    std::size_t nodes = 1;
    for (auto s : shape) {
        if (s < 2) throw InputError(where + ": grid_shape entries must be >= 2");
        nodes *= s;
    }
    if (values.empty() || values.size() % nodes != 0)
        throw InputError(where + ": values length must be a positive multiple of prod(grid_shape)");
    for (double v : values)
        if (!std::isfinite(v)) throw InputError(where + ": non-finite coefficient value");
    const std::size_t comps = values.size() / nodes;
    return CoefficientField(Grid(domain, shape), comps, std::move(values));
}

}  // namespace

std::string base64_encode(const void* data, std::size_t bytes)
{
    std::string out(4 * ((bytes + 2) / 3) + 1, '\0');
    const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                                  static_cast<const unsigned char*>(data), static_cast<int>(bytes));
    out.resize(static_cast<std::size_t>(n));
    return out;
}

std::vector<unsigned char> base64_decode(const std::string& text)
{
    std::string clean;
    clean.reserve(text.size());
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) clean.push_back(c);
    if (clean.size() % 4 != 0) throw InputError("base64: length is not a multiple of 4");
    std::vector<unsigned char> out(clean.size() / 4 * 3);
    if (clean.empty()) return out;
    const int n = EVP_DecodeBlock(out.data(), reinterpret_cast<const unsigned char*>(clean.data()),
                                  static_cast<int>(clean.size()));
    if (n < 0) throw InputError("base64: invalid characters");
    std::size_t pad = 0;
    if (clean.back() == '=') ++pad;
    if (clean.size() > 1 && clean[clean.size() - 2] == '=') ++pad;
    out.resize(static_cast<std::size_t>(n) - pad);
    return out;
}

json grid_to_json(const GridFunction& u, bool inline_values)
{
    const Grid& g = u.grid();
    json doc{{"dims", g.dim()},
             {"lower", g.domain().lower},
             {"upper", g.domain().upper},
             {"resolution", g.resolution()}};
    if (g.domain().margin > 0.0) doc["margin"] = g.domain().margin;
    if (inline_values) {
        doc["encoding"] = "inline";
        doc["data"] = u.values();
        if (u.has_mask()) doc["mask"] = u.mask();
    } else {
        doc["encoding"] = "base64";
        doc["data"] = base64_encode(u.values().data(), u.values().size() * sizeof(double));
        if (u.has_mask()) doc["mask"] = base64_encode(u.mask().data(), u.mask().size());
    }
    return doc;
}

GridFunction grid_from_json(const json& doc)
{
    const std::string where = "grid";
    const auto dims = get<std::size_t>(doc, "dims", where);
    const auto res = get<std::vector<std::size_t>>(doc, "resolution", where);
    if (dims == 0 || res.size() != dims) throw InputError("grid: resolution must have dims entries");
    for (auto r : res)
        if (r < 2) throw InputError("grid: resolution entries must be >= 2");
    const double margin = doc.contains("margin") ? get<double>(doc, "margin", where) : 0.0;
    const BoxDomain dom = domain_from(doc.value("lower", json()), doc.value("upper", json()), margin, where);
    if (dom.dim() != dims) throw InputError("grid: lower/upper must have dims entries");
    const Grid grid(dom, res);

    const std::string enc = doc.contains("encoding") ? get<std::string>(doc, "encoding", where) : "inline";
    std::vector<double> values;
    std::vector<std::uint8_t> mask;
    if (enc == "base64") {
        const auto raw = base64_decode(get<std::string>(doc, "data", where));
        if (raw.size() != grid.size() * sizeof(double))
            throw InputError("grid: data holds " + std::to_string(raw.size()) + " bytes, expected " +
                             std::to_string(grid.size() * sizeof(double)));
        values.resize(grid.size());
        std::memcpy(values.data(), raw.data(), raw.size());
        if (doc.contains("mask")) {
            const auto m = base64_decode(get<std::string>(doc, "mask", where));
            mask.assign(m.begin(), m.end());
        }
    } else if (enc == "inline") {
        values = numbers(doc.value("data", json()), "grid.data");
        if (doc.contains("mask")) mask = get<std::vector<std::uint8_t>>(doc, "mask", where);
    } else {
        throw InputError("grid: unknown encoding '" + enc + "'");
    }
    if (values.size() != grid.size()) throw InputError("grid: data length does not match resolution");
    if (!mask.empty() && mask.size() != grid.size()) throw InputError("grid: mask length does not match resolution");
    GridFunction u(grid, std::move(values), std::move(mask));
    try {
        u.require_finite();
    } catch (const InvalidParameter& e) {
        throw InputError(std::string("grid: ") + e.what());
    }
    return u;
}

json parse_json_file(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw InputError(path.string() + ": malformed JSON (" + e.what() + ")");
    }
}

void write_json(const std::filesystem::path& path, const json& doc)
{
    std::ofstream out(path);
    if (!out) throw InputError("cannot write " + path.string());
    out << doc.dump(2) << '\n';
}

GridFunction read_grid(const std::filesystem::path& path) { return grid_from_json(parse_json_file(path)); }

void write_grid(const std::filesystem::path& path, const GridFunction& u) { write_json(path, grid_to_json(u)); }

OperatorSpec operator_from_json(const json& doc)
{
    const std::string where = "operator spec";
    const auto kind = get<std::string>(doc, "kind", where);
    const auto kinds = builtin_kinds();
    if (std::find(kinds.begin(), kinds.end(), kind) == kinds.end())
        throw InputError(where + ": unknown kind '" + kind + "'");
    OperatorParams p;
    p.n = get<std::size_t>(doc, "dim", where);
    if (p.n == 0) throw InputError(where + ": dim must be positive");
    const json& dom = doc.contains("domain") ? doc.at("domain") : json();
    if (!dom.is_object()) throw InputError(where + ": missing domain object");
    p.domain = domain_from(dom.value("lower", json()), dom.value("upper", json()),
                           dom.contains("margin") ? get<double>(dom, "margin", where + ".domain") : 0.0,
                           where + ".domain");
    if (doc.contains("coefficients")) {
        const json& coeffs = doc.at("coefficients");
        if (!coeffs.is_object()) throw InputError(where + ": coefficients must be an object");
        for (const auto& [name, c] : coeffs.items())
            p.fields[name] = coefficient_from_json(c, p.domain, where + ".coefficients." + name);
    }
    if (doc.contains("params")) {
        const json& params = doc.at("params");
        if (!params.is_object()) throw InputError(where + ": params must be an object");
        for (const auto& [name, v] : params.items()) {
            if (name == "profile") {
                try {
                    p.profile = MonotoneTable(numbers(v.value("knots", json()), where + ".params.profile.knots"),
                                              numbers(v.value("values", json()), where + ".params.profile.values"));
                } catch (const InvalidParameter& e) {
                    throw InputError(where + ": " + e.what());
                }
            } else if (v.is_number()) {
                p.scalars[name] = v.get<double>();
            } else {
                throw InputError(where + ": param '" + name + "' must be a number");
            }
        }
    }
    OperatorSpec op;
    try {
        op = make_builtin(kind, p);
    } catch (const InvalidParameter& e) {
        throw InputError(where + ": " + e.what());
    }
    if (doc.contains("label")) op.label = get<std::string>(doc, "label", where);
    return op;
}

OperatorSpec read_operator_spec(const std::filesystem::path& path)
{
    return operator_from_json(parse_json_file(path));
}

json operator_params_to_json(const std::string& kind, const std::string& label, const OperatorParams& params)
{
    json doc{{"kind", kind},
             {"label", label},
             {"dim", params.n},
             {"domain", {{"lower", params.domain.lower}, {"upper", params.domain.upper}}}};
    if (params.domain.margin > 0.0) doc["domain"]["margin"] = params.domain.margin;
    json coeffs = json::object();
    for (const auto& [name, f] : params.fields) coeffs[name] = coefficient_to_json(f);
    doc["coefficients"] = std::move(coeffs);
    json ps = json::object();
    for (const auto& [name, v] : params.scalars) ps[name] = v;
    if (params.profile) ps["profile"] = {{"knots", params.profile->knots()}, {"values", params.profile->values()}};
    doc["params"] = std::move(ps);
    return doc;
}

json to_json(const Jet& j) { return {{"r", j.r}, {"a", matrix_rows(j.a)}}; }

json to_json(const ContinuityWitness& w)
{
    return {{"x", w.x},         {"y", w.y},         {"jet", to_json(w.jet)},    {"translate", to_json(w.translate)},
            {"eta", w.eta},     {"delta", w.delta}, {"value_x", w.value_x},     {"value_y", w.value_y}};
}

json to_json(const ContinuityCertificate& c)
{
    json rows = json::array();
    for (const auto& r : c.rows) {
        json row{{"eta", r.eta}, {"delta", optional_number(r.delta)}, {"halvings", r.halvings}, {"suspect", r.suspect}};
        for (const auto& [k, v] : r.extras) row[k] = v;
        rows.push_back(std::move(row));
    }
    json deltas = json::array();
    for (const auto& r : c.rows) deltas.push_back(optional_number(r.delta));
    return {{"map_label", c.map_label},
            {"criterion", c.criterion},
            {"eta_grid", c.eta_grid()},
            {"delta_for_eta", std::move(deltas)},
            {"rows", std::move(rows)},
            {"samples",
             {{"pairs", c.budget.pairs},
              {"jets_per_pair", c.budget.jets_per_pair},
              {"max_halvings", c.budget.max_halvings},
              {"cells", c.cells},
              {"evaluations", c.evaluations}}},
            {"seed", c.seed},
            {"verdict", to_string(c.verdict)},
            {"witness", c.witness ? to_json(*c.witness) : json(nullptr)}};
}

json to_json(const PairWitness& w)
{
    return {{"x", w.x},
            {"y", w.y},
            {"jet", to_json(w.jet)},
            {"translate", w.translate ? to_json(*w.translate) : json(nullptr)},
            {"value", w.value},
            {"detail", w.detail}};
}

json to_json(const PairCertificate& c)
{
    json conds = json::array();
    for (const auto& k : c.conditions)
        conds.push_back({{"name", k.name},
                         {"applicable", k.applicable},
                         {"verdict", to_string(k.verdict)},
                         {"samples", k.samples},
                         {"witness", k.witness ? to_json(*k.witness) : json(nullptr)}});
    return {{"label", c.label},
            {"pass", c.pass()},
            {"conditions", std::move(conds)},
            {"rc", c.rc ? to_json(*c.rc) : json(nullptr)},
            {"phi_continuity", c.phi_continuity ? to_json(*c.phi_continuity) : json(nullptr)}};
}

json to_json(const CorrespondenceReport& r)
{
    json ex = json::array();
    for (const auto& m : r.examples)
        ex.push_back({{"x", m.x}, {"jet", to_json(m.jet)}, {"f", m.f}, {"interior", m.interior}, {"super", m.super}});
    return {{"samples", r.samples}, {"skipped", r.skipped}, {"mismatches", r.mismatches}, {"pass", r.pass()},
            {"examples", std::move(ex)}};
}

json to_json(const FailureWitness& w)
{
    return {{"N", w.n},       {"k", w.k},         {"level", w.level},
            {"a", w.a},       {"b", w.b},         {"matrix", matrix_rows(w.matrix)},
            {"gap", w.gap},   {"phase_error", w.phase_error}};
}

json to_json(const SlagCertificate& c)
{
    json table = json::array();
    for (const auto& r : c.table)
        table.push_back({{"eta", r.eta},
                         {"target", r.target},
                         {"delta", r.delta},
                         {"validated", r.validated},
                         {"violations", r.violations}});
    json witnesses = json::array();
    for (const auto& w : c.witnesses)
        witnesses.push_back({{"crossing", w.crossing},
                             {"point", w.point},
                             {"h_point", w.h_point},
                             {"above", w.above},
                             {"block", to_json(w.block)}});
    json doc{{"N", c.n},
             {"special_values", c.partition.special_values},
             {"h_min", c.h_min},
             {"h_max", c.h_max},
             {"interval_index_of_range", c.interval ? json(*c.interval) : json(nullptr)},
             {"crossed_k", c.crossed_k ? json(*c.crossed_k) : json(nullptr)},
             {"C", c.bound.bounded ? json(c.bound.c) : json(nullptr)},
             {"epsilon", c.epsilon},
             {"lipschitz", c.lipschitz},
             {"verdict", to_string(c.continuity.verdict)},
             {"continuity", to_json(c.continuity)}};
    if (c.witnesses.empty()) {
        doc["eta_delta_table"] = std::move(table);
        doc["witness"] = nullptr;
    } else {
        doc["eta_delta_table"] = json::array();
        doc["witness"] = witnesses.front();
        doc["witness_sequence"] = std::move(witnesses);
    }
    return doc;
}

json to_json(const GridReport& r)
{
    json fails = json::array();
    for (const auto& f : r.failures)
        fails.push_back({{"node", f.node}, {"x", f.x}, {"value", f.value}, {"detail", f.detail}});
    return {{"pass", r.pass},       {"checked", r.checked},   {"failure_count", r.failure_count},
            {"failures", fails},    {"tolerance", r.tolerance}, {"caveat", r.caveat}};
}

json to_json(const ComparisonVerdict& v)
{
    json pre = json::array();
    for (const auto& p : v.preconditions) pre.push_back(to_json(p));
    json viol = json::array();
    for (const auto& f : v.violations) viol.push_back({{"node", f.node}, {"x", f.x}, {"value", f.value}});
    return {{"pass", v.pass},
            {"precondition_ok", v.precondition_ok},
            {"precondition_failed", v.precondition_failed.empty() ? json(nullptr) : json(v.precondition_failed)},
            {"preconditions", std::move(pre)},
            {"boundary_ok", v.boundary_ok},
            {"violations", std::move(viol)},
            {"max_violation", v.max_violation},
            {"tolerance", v.tolerance},
            {"theorem_contradiction", v.theorem_contradiction},
            {"caveat", v.caveat}};
}

}  // namespace nlpt::io

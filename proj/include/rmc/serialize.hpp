// serialize.hpp — JSON file formats: fields, spread sets, vector-code
// registries, equivalence witnesses, classification checkpoints. Every file
// records the modulus in use so results reproduce byte-for-byte.
#pragma once

#include <fstream>

#include <json.hpp>

#include "rmc/classify.hpp"

namespace rmc {

using nlohmann::json;

inline json field_to_json(const Field& f) {
    return json{{"p", f.characteristic()}, {"d", f.degree()}, {"modulus", f.modulus()}};
}

inline FieldPtr field_from_json(const json& j) {
    if (!j.contains("p") || !j.contains("d") || !j.contains("modulus"))
        throw FormatError("field object requires p, d, modulus");
    return Field::make(j.at("p").get<uint32_t>(), j.at("d").get<uint32_t>(),
                       j.at("modulus").get<std::vector<uint32_t>>());
}

inline json mat_to_json(const Mat& m) { return json(m.entries()); }

inline Mat mat_from_json(const FieldPtr& f, uint32_t rows, uint32_t cols, const json& j) {
    auto entries = j.get<std::vector<uint32_t>>();
    if (entries.size() != size_t(rows) * cols) throw FormatError("matrix entry count mismatch");
    return Mat(f, rows, cols, std::move(entries));
}

// --------------------------------------------------------------------------
// spread-set files

inline json spread_set_to_json(const MatrixCode& c) {
    const auto& ctx = c.context();
    json basis = json::array();
    for (const auto& b : c.basis()) basis.push_back(mat_to_json(b));
    return json{{"format", "rmc-spread-set"},
                {"version", 1},
                {"field", field_to_json(*ctx->big_field())},
                {"subfield_order", ctx->q()},
                {"n", ctx->n()},
                {"s", ctx->s()},
                {"basis", basis}};
}

inline MatrixCode spread_set_from_json(const json& j) {
    if (j.value("format", "") != "rmc-spread-set") throw FormatError("not a spread-set file");
    if (j.value("version", 0) != 1) throw FormatError("unsupported spread-set version");
    FieldPtr big = field_from_json(j.at("field"));
    uint64_t q = j.at("subfield_order").get<uint64_t>();
    uint32_t n = j.at("n").get<uint32_t>();
    uint32_t s = j.at("s").get<uint32_t>();
    big->check_subfield_order(q);
    if (big->size() != [&] {
            uint64_t t = 1;
            for (uint32_t i = 0; i < s; ++i) t *= q;
            return t;
        }())
        throw FormatError("field size does not match q^s");
    uint32_t p = big->characteristic();
    uint32_t e = 0;
    uint64_t t = q;
    while (t % p == 0) { t /= p; ++e; }
    auto ctx = std::make_shared<CodeContext>(big, Field::make(p, e), n);
    std::vector<Mat> basis;
    for (const auto& bj : j.at("basis")) basis.push_back(mat_from_json(big, n, n, bj));
    return MatrixCode(ctx, std::move(basis));
}

// --------------------------------------------------------------------------
// witnesses

inline json matrix_witness_to_json(const MatrixCode& c, const MatrixEquivWitness& w) {
    return json{{"format", "rmc-equiv-witness"},
                {"version", 1},
                {"field", field_to_json(*c.context()->big_field())},
                {"n", c.context()->n()},
                {"rho", w.rho.j},
                {"X", mat_to_json(w.x)},
                {"Y", mat_to_json(w.y)}};
}

inline json vector_witness_to_json(const VectorEquivWitness& w) {
    return json{{"format", "rmc-vector-witness"},
                {"version", 1},
                {"rho", w.rho.j},
                {"k", w.q.rows()},
                {"Q", mat_to_json(w.q)}};
}

// --------------------------------------------------------------------------
// vector-code registries

inline json registry_to_json(const std::vector<VectorCode>& reg, const ContextPtr& ctx) {
    json classes = json::array();
    for (size_t i = 0; i < reg.size(); ++i) {
        classes.push_back(json{{"label", i},
                               {"length", reg[i].length()},
                               {"dim", reg[i].dim()},
                               {"generator", reg[i].generator_entries()}});
    }
    return json{{"format", "rmc-vclass-registry"},
                {"version", 1},
                {"field", field_to_json(*ctx->big_field())},
                {"subfield_order", ctx->q()},
                {"classes", classes}};
}

inline std::vector<VectorCode> registry_from_json(const json& j, const ContextPtr& ctx) {
    if (j.value("format", "") != "rmc-vclass-registry") throw FormatError("not a registry file");
    if (j.value("version", 0) != 1) throw FormatError("unsupported registry version");
    FieldPtr big = field_from_json(j.at("field"));
    if (!big->same_field(*ctx->big_field())) throw FormatError("registry field mismatch");
    std::vector<VectorCode> out;
    for (const auto& cj : j.at("classes")) {
        uint32_t len = cj.at("length").get<uint32_t>();
        uint32_t dim = cj.at("dim").get<uint32_t>();
        auto gen = cj.at("generator").get<std::vector<uint32_t>>();
        if (gen.size() != size_t(len) * dim) throw FormatError("generator entry count mismatch");
        std::vector<std::vector<uint32_t>> rows(dim, std::vector<uint32_t>(len));
        for (uint32_t r = 0; r < dim; ++r)
            for (uint32_t c = 0; c < len; ++c) rows[r][c] = gen[size_t(r) * len + c];
        out.emplace_back(ctx->big_field(), ctx->q(), len, rows);
    }
    return out;
}

// --------------------------------------------------------------------------
// checkpoints

inline json stats_to_json(const StepStats& s) {
    return json{{"k", s.k},
                {"candidates", s.candidates},
                {"survivors", s.survivors},
                {"new_keys", s.new_keys},
                {"key_hits", s.key_hits},
                {"equiv_tests", s.equiv_tests},
                {"equiv_true", s.equiv_true},
                {"classes", s.classes},
                {"seconds", s.seconds}};
}

inline StepStats stats_from_json(const json& j) {
    StepStats s;
    s.k = j.at("k").get<uint32_t>();
    s.candidates = j.at("candidates").get<uint64_t>();
    s.survivors = j.at("survivors").get<uint64_t>();
    s.new_keys = j.at("new_keys").get<uint64_t>();
    s.key_hits = j.at("key_hits").get<uint64_t>();
    s.equiv_tests = j.at("equiv_tests").get<uint64_t>();
    s.equiv_true = j.at("equiv_true").get<uint64_t>();
    s.classes = j.at("classes").get<uint64_t>();
    s.seconds = j.at("seconds").get<double>();
    return s;
}

inline json checkpoint_to_json(const ClassificationState& st) {
    json reps = json::array();
    for (const auto& c : st.reps) {
        json basis = json::array();
        for (const auto& b : c.basis()) basis.push_back(mat_to_json(b));
        reps.push_back(std::move(basis));
    }
    json keys = json::array();
    for (const auto& k : st.keys) keys.push_back(json{{"ranks", k.ranks}, {"vlabel", k.vlabel}});
    json steps = json::array();
    for (const auto& s : st.steps) steps.push_back(stats_to_json(s));
    return json{{"format", "rmc-checkpoint"},
                {"version", 1},
                {"field", field_to_json(*st.ctx->big_field())},
                {"subfield_order", st.ctx->q()},
                {"n", st.ctx->n()},
                {"s", st.ctx->s()},
                {"m", st.m},
                {"k", st.k},
                {"reps", reps},
                {"keys", keys},
                {"registry", registry_to_json(st.registry, st.ctx)},
                {"steps", steps}};
}

inline ClassificationState checkpoint_from_json(const json& j) {
    if (j.value("format", "") != "rmc-checkpoint") throw FormatError("not a checkpoint file");
    if (j.value("version", 0) != 1) throw FormatError("unsupported checkpoint version");
    ClassificationState st;
    FieldPtr big = field_from_json(j.at("field"));
    uint64_t q = j.at("subfield_order").get<uint64_t>();
    uint32_t n = j.at("n").get<uint32_t>();
    uint32_t p = big->characteristic();
    uint32_t e = 0;
    uint64_t t = q;
    while (t % p == 0) { t /= p; ++e; }
    if (t != 1) throw FormatError("subfield order is not a power of the characteristic");
    st.ctx = std::make_shared<CodeContext>(big, Field::make(p, e), n);
    st.m = j.at("m").get<uint32_t>();
    st.k = j.at("k").get<uint32_t>();
    for (const auto& rj : j.at("reps")) {
        std::vector<Mat> basis;
        for (const auto& bj : rj) basis.push_back(mat_from_json(big, n, n, bj));
        st.reps.emplace_back(st.ctx, std::move(basis));
    }
    for (const auto& kj : j.at("keys"))
        st.keys.push_back(InvariantKey{kj.at("ranks").get<std::string>(), kj.at("vlabel").get<int32_t>()});
    if (st.keys.size() != st.reps.size()) throw FormatError("keys/reps length mismatch");
    st.registry = registry_from_json(j.at("registry"), st.ctx);
    for (const auto& sj : j.at("steps")) st.steps.push_back(stats_from_json(sj));
    return st;
}

// --------------------------------------------------------------------------
// file helpers

inline json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw FormatError("malformed JSON in " + path + ": " + e.what());
    }
}

inline void save_json_file(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw FormatError("cannot write " + path);
    out << j.dump(1) << "\n";
}

inline void checkpoint_save(const ClassificationState& st, const std::string& path) {
    save_json_file(path, checkpoint_to_json(st));
}
inline ClassificationState checkpoint_load(const std::string& path) {
    try {
        return checkpoint_from_json(load_json_file(path));
    } catch (const json::exception& e) {
        throw FormatError(std::string("corrupt checkpoint: ") + e.what());
    }
}

}  // namespace rmc

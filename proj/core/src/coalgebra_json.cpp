#include <json.hpp>

#include "sct/coalgebra.hpp"
#include "sct/error.hpp"

namespace sct {

using nlohmann::json;

namespace {

[[noreturn]] void format_error(const std::string& msg) { throw Error(ErrorKind::FormatError, msg); }

const json& field(const json& obj, const char* key, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end())
        format_error(where + ": missing field '" + key + "'");
    return *it;
}

std::string string_field(const json& obj, const char* key, const std::string& where) {
    const json& v = field(obj, key, where);
    if (!v.is_string())
        format_error(where + ": field '" + key + "' must be a string");
    return v.get<std::string>();
}

void only_fields(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
    for (const auto& [key, _] : obj.items()) {
        bool ok = false;
        for (const char* a : allowed)
            ok = ok || key == a;
        if (!ok)
            format_error(where + ": unknown field '" + key + "'");
    }
}

Polarity parse_pol(const json& obj, const std::string& where) {
    std::string p = string_field(obj, "pol", where);
    if (p == "in")
        return Polarity::In;
    if (p == "out")
        return Polarity::Out;
    format_error(where + ": polarity must be \"in\" or \"out\", got \"" + p + "\"");
}

// Arity problems are left to validate_coalgebra.
State parse_state(const std::string& id, const json& obj) {
    const std::string where = "state '" + id + "'";
    if (!obj.is_object())
        format_error(where + " must be an object");
    std::string op = string_field(obj, "op", where);
    State st;
    if (op == "com") {
        only_fields(obj, {"op", "pol", "data", "cont"}, where);
        st.label = label::Com{parse_pol(obj, where)};
        if (obj.contains("data"))
            st.transitions.emplace(TransitionKey::data(), string_field(obj, "data", where));
        if (obj.contains("cont"))
            st.transitions.emplace(TransitionKey::star(), string_field(obj, "cont", where));
    } else if (op == "branch") {
        only_fields(obj, {"op", "pol", "cont"}, where);
        label::Branch b{parse_pol(obj, where), {}};
        if (obj.contains("cont")) {
            const json& arms = obj["cont"];
            if (!arms.is_object())
                format_error(where + ": branch 'cont' must map labels to states");
            for (const auto& [l, tgt] : arms.items()) {
                if (!tgt.is_string())
                    format_error(where + ": arm '" + l + "' must name a state");
                b.labels.insert(l);
                st.transitions.emplace(TransitionKey::arm(l), tgt.get<std::string>());
            }
        }
        st.label = std::move(b);
    } else if (op == "end") {
        only_fields(obj, {"op"}, where);
        st.label = label::End{};
    } else if (op == "bsc") {
        only_fields(obj, {"op", "type"}, where);
        st.label = label::Bsc{string_field(obj, "type", where)};
    } else if (op == "par") {
        only_fields(obj, {"op", "cont"}, where);
        st.label = label::Par{};
        if (obj.contains("cont"))
            st.transitions.emplace(TransitionKey::star(), string_field(obj, "cont", where));
    } else {
        format_error(where + ": unknown op \"" + op + "\"");
    }
    return st;
}

} // namespace

RawCoalgebra raw_coalgebra_from_json(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        format_error(std::string("malformed JSON: ") + e.what());
    }
    if (!doc.is_object())
        format_error("top level must be an object");
    only_fields(doc, {"basic_order", "states"}, "top level");

    RawCoalgebra raw;
    if (doc.contains("basic_order")) {
        const json& bo = doc["basic_order"];
        if (!bo.is_array())
            format_error("basic_order must be an array of pairs");
        std::vector<BasicTypePreorder::Pair> pairs;
        for (const json& p : bo) {
            if (!p.is_array() || p.size() != 2 || !p[0].is_string() || !p[1].is_string())
                format_error("basic_order entries must be [\"a\", \"b\"] string pairs");
            pairs.emplace_back(p[0].get<std::string>(), p[1].get<std::string>());
        }
        raw.basic_order = BasicTypePreorder::from_pairs(pairs);
    }
    const json& states = field(doc, "states", "top level");
    if (!states.is_object())
        format_error("'states' must be an object");
    for (const auto& [id, obj] : states.items())
        raw.states.emplace(id, parse_state(id, obj));
    return raw;
}

SessionCoalgebra coalgebra_from_json(std::string_view text) { return validate_coalgebra(raw_coalgebra_from_json(text)); }

std::string coalgebra_to_json(const SessionCoalgebra& c, int indent) {
    json doc = json::object();
    json order = json::array();
    for (const auto& [a, b] : c.basic_order().serializable_pairs())
        order.push_back({a, b});
    doc["basic_order"] = std::move(order);
    json states = json::object();
    for (const auto& [id, st] : c.states()) {
        json s = json::object();
        s["op"] = std::string(to_string(op_of(st.label)));
        if (auto pol = polarity_of(st.label))
            s["pol"] = std::string(to_string(*pol));
        if (auto* b = std::get_if<label::Bsc>(&st.label))
            s["type"] = b->type;
        switch (op_of(st.label)) {
        case Op::Com:
            s["data"] = st.transitions.at(TransitionKey::data());
            s["cont"] = st.transitions.at(TransitionKey::star());
            break;
        case Op::Par: s["cont"] = st.transitions.at(TransitionKey::star()); break;
        case Op::Branch: {
            json arms = json::object();
            for (const auto& [key, tgt] : st.transitions)
                arms[key.label] = tgt;
            s["cont"] = std::move(arms);
            break;
        }
        default: break;
        }
        states[id] = std::move(s);
    }
    doc["states"] = std::move(states);
    return doc.dump(indent);
}

} // namespace sct

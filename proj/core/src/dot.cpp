#include <sstream>

#include "sct/coalgebra.hpp"
#include "sct/error.hpp"

namespace sct {

namespace {

std::string quote(std::string_view s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\')
            out += '\\';
        out += c;
    }
    return out + "\"";
}

std::string node_label(const StateLabel& l) {
    if (auto* b = std::get_if<label::Branch>(&l))
        return b->pol == Polarity::In ? "&" : "⊕";
    return to_string(l);
}

const char* node_shape(Op op) {
    switch (op) {
    case Op::Bsc: return "box";
    case Op::End: return "doublecircle";
    case Op::Par: return "diamond";
    default: return "circle";
    }
}

} // namespace

std::string to_dot(const SessionCoalgebra& c, const std::optional<std::set<StateId>>& roots) {
    std::set<StateId> shown;
    if (roots) {
        for (const auto& r : *roots) {
            auto reach = generated_subcoalgebra(c, r);
            shown.insert(reach.begin(), reach.end());
        }
    } else {
        for (const auto& [id, _] : c.states())
            shown.insert(id);
    }

    std::ostringstream os;
    os << "digraph coalgebra {\n";
    os << "  rankdir=LR;\n";
    os << "  node [fontname=\"Helvetica\"];\n";
    for (const auto& id : shown) {
        const State& st = c.state(id);
        os << "  " << quote(id) << " [label=" << quote(node_label(st.label) + "\n" + id)
           << ", shape=" << node_shape(op_of(st.label));
        if (roots && roots->contains(id))
            os << ", penwidth=2, color=red";
        os << "];\n";
    }
    for (const auto& id : shown) {
        for (const auto& [key, tgt] : c.transitions(id)) {
            os << "  " << quote(id) << " -> " << quote(tgt);
            if (key.is_data())
                os << " [style=dashed, color=blue]";
            else if (key.kind == TransitionKey::Kind::Label)
                os << " [label=" << quote(key.label) << "]";
            os << ";\n";
        }
    }
    os << "}\n";
    return os.str();
}

} // namespace sct

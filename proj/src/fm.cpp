#include "varsel/fm.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace varsel::fm {

Expr::Ptr Expr::variable(std::string id) {
    auto e = std::make_shared<Expr>();
    e->op_ = Op::Var;
    e->var_ = std::move(id);
    return e;
}

Expr::Ptr Expr::negation(Ptr operand) {
    auto e = std::make_shared<Expr>();
    e->op_ = Op::Not;
    e->lhs_ = std::move(operand);
    return e;
}

Expr::Ptr Expr::conjunction(Ptr lhs, Ptr rhs) {
    auto e = std::make_shared<Expr>();
    e->op_ = Op::And;
    e->lhs_ = std::move(lhs);
    e->rhs_ = std::move(rhs);
    return e;
}

Expr::Ptr Expr::disjunction(Ptr lhs, Ptr rhs) {
    auto e = std::make_shared<Expr>();
    e->op_ = Op::Or;
    e->lhs_ = std::move(lhs);
    e->rhs_ = std::move(rhs);
    return e;
}

Expr::Ptr Expr::implication(Ptr lhs, Ptr rhs) {
    auto e = std::make_shared<Expr>();
    e->op_ = Op::Implies;
    e->lhs_ = std::move(lhs);
    e->rhs_ = std::move(rhs);
    return e;
}

bool Expr::eval(const std::set<std::string>& selected) const {
    switch (op_) {
        case Op::Var:
            return selected.count(var_) != 0;
        case Op::Not:
            return !lhs_->eval(selected);
        case Op::And:
            return lhs_->eval(selected) && rhs_->eval(selected);
        case Op::Or:
            return lhs_->eval(selected) || rhs_->eval(selected);
        case Op::Implies:
            return !lhs_->eval(selected) || rhs_->eval(selected);
    }
    return false;
}

// Precedence: ! > & > | > =>. Parenthesize a child whose operator binds
// looser than (or, for the right-associative =>, equal to) its parent.
static int precedence(Expr::Op op) {
    switch (op) {
        case Expr::Op::Var: return 4;
        case Expr::Op::Not: return 3;
        case Expr::Op::And: return 2;
        case Expr::Op::Or: return 1;
        case Expr::Op::Implies: return 0;
    }
    return 0;
}

static void print(const Expr& e, std::ostringstream& out, int parent_prec) {
    int prec = precedence(e.op());
    bool parens = prec < parent_prec;
    if (parens) out << '(';
    switch (e.op()) {
        case Expr::Op::Var:
            out << e.var();
            break;
        case Expr::Op::Not:
            out << '!';
            print(*e.lhs(), out, prec + 1);
            break;
        case Expr::Op::And:
            print(*e.lhs(), out, prec);
            out << " & ";
            print(*e.rhs(), out, prec + 1);
            break;
        case Expr::Op::Or:
            print(*e.lhs(), out, prec);
            out << " | ";
            print(*e.rhs(), out, prec + 1);
            break;
        case Expr::Op::Implies:
            print(*e.lhs(), out, prec + 1);
            out << " => ";
            print(*e.rhs(), out, prec);
            break;
    }
    if (parens) out << ')';
}

std::string Expr::to_string() const {
    std::ostringstream out;
    print(*this, out, 0);
    return out.str();
}

void Expr::collect_vars(std::set<std::string>& out) const {
    if (op_ == Op::Var) {
        out.insert(var_);
        return;
    }
    if (lhs_) lhs_->collect_vars(out);
    if (rhs_) rhs_->collect_vars(out);
}

const Feature* FeatureModel::find(const std::string& id) const {
    for (const auto& f : features)
        if (f.id == id) return &f;
    return nullptr;
}

const std::string& FeatureModel::root_id() const {
    for (const auto& f : features)
        if (!f.parent) return f.id;
    throw Error("NO_ROOT", "feature model has no root");
}

ValidationResult validate_model(const FeatureModel& model) {
    ValidationResult result;
    auto flag = [&](std::string code, std::string subject, std::string detail) {
        result.violations.push_back(
            {std::move(code), std::move(subject), std::move(detail)});
    };

    std::map<std::string, const Feature*> by_id;
    for (const auto& f : model.features) {
        if (!by_id.emplace(f.id, &f).second)
            flag("DUPLICATE_ID", f.id, "feature id declared twice");
    }

    int roots = 0;
    for (const auto& f : model.features) {
        if (!f.parent) {
            ++roots;
            continue;
        }
        if (!by_id.count(*f.parent))
            flag("BAD_PARENT", f.id, "parent '" + *f.parent + "' does not exist");
    }
    if (roots == 0 && !model.features.empty())
        flag("NO_ROOT", "", "every feature has a parent");
    if (roots > 1) flag("MULTIPLE_ROOTS", "", "more than one parentless feature");
    if (model.features.empty()) flag("NO_ROOT", "", "model has no features");

    // Cycle check by walking parent links with a step bound.
    for (const auto& f : model.features) {
        const Feature* cur = &f;
        size_t steps = 0;
        while (cur->parent) {
            auto it = by_id.find(*cur->parent);
            if (it == by_id.end()) break;
            cur = it->second;
            if (++steps > model.features.size()) {
                flag("CYCLE", f.id, "parent chain does not reach a root");
                break;
            }
        }
    }

    std::map<std::string, int> group_membership;
    for (const auto& g : model.groups) {
        std::string subject = g.parent;
        if (!by_id.count(g.parent))
            flag("BAD_GROUP", subject, "group parent does not exist");
        if (g.children.size() < 2)
            flag("GROUP_TOO_SMALL", subject, "group needs at least 2 children");
        for (const auto& child : g.children) {
            auto it = by_id.find(child);
            if (it == by_id.end()) {
                flag("BAD_GROUP", subject, "group child '" + child + "' does not exist");
                continue;
            }
            if (it->second->variability != Variability::Grouped)
                flag("GROUP_CHILD_NOT_GROUPED", child,
                     "group member must have GROUPED variability");
            if (!it->second->parent || *it->second->parent != g.parent)
                flag("GROUP_CHILD_WRONG_PARENT", child,
                     "group member's parent must be the group owner");
            if (++group_membership[child] > 1)
                flag("FEATURE_IN_TWO_GROUPS", child,
                     "feature belongs to more than one group");
        }
    }

    for (const auto& f : model.features) {
        if (f.variability == Variability::Grouped && group_membership[f.id] == 0)
            flag("GROUPED_NOT_IN_GROUP", f.id,
                 "GROUPED feature is not a member of any group");
    }

    for (const auto& c : model.constraints) {
        std::set<std::string> vars;
        c.formula->collect_vars(vars);
        for (const auto& v : vars)
            if (!by_id.count(v))
                flag("UNKNOWN_REF", v, "constraint references unknown feature");
    }

    return result;
}

ValidationResult validate_configuration(const FeatureModel& model,
                                        const Configuration& config) {
    for (const auto& id : config.selected)
        if (!model.find(id))
            throw Error("UNKNOWN_FEATURE",
                        "configuration selects unknown feature '" + id + "'");

    ValidationResult result;
    auto flag = [&](std::string code, std::string subject, std::string detail) {
        result.violations.push_back(
            {std::move(code), std::move(subject), std::move(detail)});
    };
    const auto& sel = config.selected;
    auto selected = [&](const std::string& id) { return sel.count(id) != 0; };

    if (!selected(model.root_id()))
        flag("ROOT_NOT_SELECTED", model.root_id(), "root must be selected");

    std::set<std::string> grouped;
    for (const auto& g : model.groups)
        for (const auto& c : g.children) grouped.insert(c);

    for (const auto& f : model.features) {
        if (f.parent && selected(f.id) && !selected(*f.parent))
            flag("PARENT_NOT_SELECTED", f.id,
                 "selected feature's parent '" + *f.parent + "' is unselected");
        if (f.variability == Variability::Mandatory && f.parent &&
            selected(*f.parent) && !selected(f.id))
            flag("MISSING_MANDATORY", f.id,
                 "mandatory child of selected '" + *f.parent + "' is unselected");
    }

    for (const auto& g : model.groups) {
        if (!selected(g.parent)) continue;
        size_t chosen = 0;
        for (const auto& c : g.children) chosen += selected(c) ? 1 : 0;
        if (g.kind == GroupKind::Alternative && chosen != 1)
            flag("ALTERNATIVE_VIOLATION", g.parent,
                 "alternative group requires exactly one selected child");
        if (g.kind == GroupKind::Or && chosen == 0)
            flag("OR_VIOLATION", g.parent,
                 "or group requires at least one selected child");
    }

    for (size_t i = 0; i < model.constraints.size(); ++i) {
        if (!model.constraints[i].formula->eval(sel))
            flag("CONSTRAINT_VIOLATED", model.constraints[i].formula->to_string(),
                 "constraint evaluates to false");
    }

    return result;
}

std::vector<Configuration> enumerate_configurations(const FeatureModel& model,
                                                    int cap) {
    const size_t n = model.features.size();
    if (cap <= 0 || n > static_cast<size_t>(cap))
        throw Error("MODEL_TOO_LARGE",
                    "model has " + std::to_string(n) + " features, cap is " +
                        std::to_string(cap));

    std::vector<std::string> ids;
    ids.reserve(n);
    for (const auto& f : model.features) ids.push_back(f.id);

    std::vector<Configuration> valid;
    for (uint64_t mask = 0; mask < (uint64_t{1} << n); ++mask) {
        Configuration c;
        for (size_t i = 0; i < n; ++i)
            if (mask & (uint64_t{1} << i)) c.selected.insert(ids[i]);
        if (validate_configuration(model, c).ok()) valid.push_back(std::move(c));
    }

    std::sort(valid.begin(), valid.end(),
              [](const Configuration& a, const Configuration& b) {
                  return std::lexicographical_compare(
                      a.selected.begin(), a.selected.end(), b.selected.begin(),
                      b.selected.end());
              });
    return valid;
}

static std::string dot_escape(const std::string& s) {
    std::string out;
    for (char ch : s) {
        if (ch == '"' || ch == '\\') out.push_back('\\');
        out.push_back(ch);
    }
    return out;
}

std::string to_dot(const FeatureModel& model, const Configuration* highlight) {
    {
        auto mv = validate_model(model);
        if (!mv.ok())
            throw Error("INVALID_MODEL", "cannot render an invalid model");
    }
    if (highlight && !validate_configuration(model, *highlight).ok())
        throw Error("INVALID_HIGHLIGHT",
                    "highlight configuration fails validation");

    std::map<std::string, const Group*> group_of_child;
    for (const auto& g : model.groups)
        for (const auto& c : g.children) group_of_child[c] = &g;

    std::ostringstream out;
    out << "digraph feature_model {\n";
    out << "  rankdir=TB;\n";
    out << "  node [shape=box, fontname=\"Helvetica\"];\n";
    for (const auto& f : model.features) {
        out << "  \"" << dot_escape(f.id) << "\" [label=\""
            << dot_escape(f.display_name);
        switch (f.variability) {
            case Variability::Mandatory: out << "\\n(mandatory)"; break;
            case Variability::Optional: out << "\\n(optional)"; break;
            case Variability::Grouped: break;
        }
        out << "\"";
        if (highlight && highlight->selected.count(f.id))
            out << ", style=filled, fillcolor=\"#9fd4a3\"";
        out << "];\n";
    }
    for (const auto& f : model.features) {
        if (!f.parent) continue;
        out << "  \"" << dot_escape(*f.parent) << "\" -> \"" << dot_escape(f.id)
            << "\"";
        auto it = group_of_child.find(f.id);
        if (it != group_of_child.end()) {
            out << " [label=\""
                << (it->second->kind == GroupKind::Or ? "or" : "alt") << "\"]";
        }
        out << ";\n";
    }
    out << "}\n";
    return out.str();
}

}  // namespace varsel::fm

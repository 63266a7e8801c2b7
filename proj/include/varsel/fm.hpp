#pragma once

#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "varsel/error.hpp"

namespace varsel::fm {

enum class Variability { Mandatory, Optional, Grouped };
enum class GroupKind { Or, Alternative };

struct Feature {
    std::string id;
    std::string display_name;  // defaults to id
    Variability variability = Variability::Optional;
    std::optional<std::string> parent;  // absent only for the root
};

struct Group {
    std::string parent;
    GroupKind kind = GroupKind::Or;
    std::vector<std::string> children;  // ordered
};

// Propositional formula over feature identifiers.
class Expr {
public:
    enum class Op { Var, Not, And, Or, Implies };

    using Ptr = std::shared_ptr<const Expr>;

    static Ptr variable(std::string id);
    static Ptr negation(Ptr operand);
    static Ptr conjunction(Ptr lhs, Ptr rhs);
    static Ptr disjunction(Ptr lhs, Ptr rhs);
    static Ptr implication(Ptr lhs, Ptr rhs);

    Op op() const { return op_; }
    const std::string& var() const { return var_; }
    const Ptr& lhs() const { return lhs_; }
    const Ptr& rhs() const { return rhs_; }

    // Closed-world evaluation: a feature not in `selected` is false.
    bool eval(const std::set<std::string>& selected) const;

    // Canonical text form using !, &, |, => with minimal parentheses.
    std::string to_string() const;

    // All feature identifiers referenced by the formula.
    void collect_vars(std::set<std::string>& out) const;

private:
    Op op_ = Op::Var;
    std::string var_;
    Ptr lhs_, rhs_;
};

struct Constraint {
    Expr::Ptr formula;
};

struct FeatureModel {
    std::vector<Feature> features;
    std::vector<Group> groups;
    std::vector<Constraint> constraints;

    const Feature* find(const std::string& id) const;
    // Requires a model that passed validate_model.
    const std::string& root_id() const;
};

struct Configuration {
    std::set<std::string> selected;
};

struct Violation {
    std::string code;     // GROUP_TOO_SMALL, CYCLE, MISSING_MANDATORY, ...
    std::string subject;  // offending feature/group id
    std::string detail;
};

struct ValidationResult {
    std::vector<Violation> violations;
    bool ok() const { return violations.empty(); }
};

// Structural invariants: unique ids, single root, acyclic parent links,
// group arity/variability agreement, constraint references.
ValidationResult validate_model(const FeatureModel& model);

// Tree + group + constraint rules for one selection. Throws
// Error(UNKNOWN_FEATURE) when the configuration references an unknown id.
ValidationResult validate_configuration(const FeatureModel& model,
                                        const Configuration& config);

// Every VALID configuration, ordered lexicographically by sorted selected
// ids. Throws Error(MODEL_TOO_LARGE) when feature count exceeds `cap`.
std::vector<Configuration> enumerate_configurations(const FeatureModel& model,
                                                    int cap = 24);

// Graphviz rendering; deterministic byte-for-byte. Throws
// Error(INVALID_HIGHLIGHT) when the highlight fails validation.
std::string to_dot(const FeatureModel& model,
                   const Configuration* highlight = nullptr);

}  // namespace varsel::fm

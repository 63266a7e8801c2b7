#include "varsel/fm_dsl.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>
#include <tuple>
#include <vector>

namespace varsel::fm_dsl {

using fm::Expr;
using fm::Feature;
using fm::FeatureModel;
using fm::Group;
using fm::GroupKind;
using fm::Variability;

namespace {

struct Token {
    enum class Kind { Ident, Not, And, Or, Implies, LParen, RParen, End };
    Kind kind;
    std::string text;
    int column;  // 1-based
};

std::vector<Token> lex_expr(const std::string& s, int line) {
    std::vector<Token> tokens;
    size_t i = 0;
    auto fail = [&](const std::string& msg) {
        throw ParseError("SYNTAX", {line, static_cast<int>(i) + 1}, msg);
    };
    while (i < s.size()) {
        char c = s[i];
        int col = static_cast<int>(i) + 1;
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
        } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            size_t start = i;
            while (i < s.size() && (std::isalnum(static_cast<unsigned char>(s[i])) ||
                                    s[i] == '_'))
                ++i;
            tokens.push_back({Token::Kind::Ident, s.substr(start, i - start), col});
        } else if (c == '!') {
            tokens.push_back({Token::Kind::Not, "!", col});
            ++i;
        } else if (c == '&') {
            tokens.push_back({Token::Kind::And, "&", col});
            ++i;
        } else if (c == '|') {
            tokens.push_back({Token::Kind::Or, "|", col});
            ++i;
        } else if (c == '=' && i + 1 < s.size() && s[i + 1] == '>') {
            tokens.push_back({Token::Kind::Implies, "=>", col});
            i += 2;
        } else if (c == '(') {
            tokens.push_back({Token::Kind::LParen, "(", col});
            ++i;
        } else if (c == ')') {
            tokens.push_back({Token::Kind::RParen, ")", col});
            ++i;
        } else {
            fail(std::string("unexpected character '") + c + "' in constraint");
        }
    }
    tokens.push_back({Token::Kind::End, "", static_cast<int>(s.size()) + 1});
    return tokens;
}

class ExprParser {
public:
    ExprParser(std::vector<Token> tokens, int line, int base_column)
        : tokens_(std::move(tokens)), line_(line), base_(base_column) {}

    Expr::Ptr parse() {
        auto e = implies();
        expect(Token::Kind::End, "end of constraint");
        return e;
    }

private:
    const Token& peek() const { return tokens_[pos_]; }
    Token next() { return tokens_[pos_++]; }

    [[noreturn]] void fail(const Token& t, const std::string& expected) {
        throw ParseError("SYNTAX", {line_, base_ + t.column - 1},
                         "expected " + expected);
    }

    void expect(Token::Kind k, const std::string& what) {
        if (peek().kind != k) fail(peek(), what);
        next();
    }

    Expr::Ptr implies() {
        auto lhs = disjunction();
        if (peek().kind == Token::Kind::Implies) {
            next();
            return Expr::implication(lhs, implies());
        }
        return lhs;
    }

    Expr::Ptr disjunction() {
        auto e = conjunction();
        while (peek().kind == Token::Kind::Or) {
            next();
            e = Expr::disjunction(e, conjunction());
        }
        return e;
    }

    Expr::Ptr conjunction() {
        auto e = unary();
        while (peek().kind == Token::Kind::And) {
            next();
            e = Expr::conjunction(e, unary());
        }
        return e;
    }

    Expr::Ptr unary() {
        const Token& t = peek();
        switch (t.kind) {
            case Token::Kind::Not:
                next();
                return Expr::negation(unary());
            case Token::Kind::LParen: {
                next();
                auto e = implies();
                expect(Token::Kind::RParen, "')'");
                return e;
            }
            case Token::Kind::Ident:
                return Expr::variable(next().text);
            default:
                fail(t, "feature identifier, '!' or '('");
        }
    }

    std::vector<Token> tokens_;
    size_t pos_ = 0;
    int line_;
    int base_;
};

bool valid_identifier(const std::string& s) {
    if (s.empty()) return false;
    if (!std::isalpha(static_cast<unsigned char>(s[0])) && s[0] != '_') return false;
    return std::all_of(s.begin(), s.end(), [](unsigned char c) {
        return std::isalnum(c) || c == '_';
    });
}

struct OpenGroup {
    int level;
    GroupKind kind;
    std::string parent;
    std::vector<std::string> children;
    int line;  // of the opening brace
};

}  // namespace

FeatureModel parse(const std::string& text) {
    FeatureModel model;
    std::map<std::string, int> seen;  // id -> declaring line

    // Parent context per indent level: either a feature awaiting children or
    // an open group block.
    struct Frame {
        int level;
        std::string feature;  // empty for group frames
    };
    std::vector<Frame> feature_stack;
    std::vector<OpenGroup> group_stack;
    std::vector<std::pair<Expr::Ptr, SourceSpan>> constraints;

    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        if (!raw.empty() && raw.back() == '\r') raw.pop_back();

        size_t hash = raw.find('#');
        std::string line = hash == std::string::npos ? raw : raw.substr(0, hash);

        size_t indent = 0;
        while (indent < line.size() && line[indent] == ' ') ++indent;
        if (indent < line.size() && line[indent] == '\t')
            throw ParseError("SYNTAX", {line_no, static_cast<int>(indent) + 1},
                             "tabs are not allowed for indentation");
        std::string body = line.substr(indent);
        while (!body.empty() && std::isspace(static_cast<unsigned char>(body.back())))
            body.pop_back();
        if (body.empty()) continue;
        if (indent % 2 != 0)
            throw ParseError("SYNTAX", {line_no, static_cast<int>(indent) + 1},
                             "indentation must be a multiple of 2 spaces");
        int level = static_cast<int>(indent) / 2;
        int col = static_cast<int>(indent) + 1;

        // Close finished feature scopes. Scopes inside an open group may only
        // unwind down to the group's child level.
        int floor_level =
            group_stack.empty() ? 0 : group_stack.back().level + 1;
        while (!feature_stack.empty() && feature_stack.back().level >= level &&
               feature_stack.back().level >= floor_level)
            feature_stack.pop_back();

        if (body == "}") {
            if (group_stack.empty() || group_stack.back().level != level)
                throw ParseError("SYNTAX", {line_no, col}, "unmatched '}'");
            OpenGroup g = group_stack.back();
            group_stack.pop_back();
            if (g.children.size() < 2)
                throw ParseError("BAD_GROUP", {g.line, 1},
                                 "group needs at least 2 children");
            model.groups.push_back({g.parent, g.kind, g.children});
            continue;
        }

        std::istringstream words(body);
        std::string word;
        words >> word;

        if (word == "feature") {
            std::string id, vis;
            words >> id >> vis;
            if (!valid_identifier(id))
                throw ParseError("SYNTAX", {line_no, col},
                                 "expected feature identifier");
            std::string trailing;
            if (words >> trailing)
                throw ParseError("SYNTAX", {line_no, col},
                                 "unexpected trailing text after feature");
            if (seen.count(id))
                throw ParseError("DUPLICATE_ID", {line_no, col},
                                 "feature '" + id + "' already declared on line " +
                                     std::to_string(seen[id]));
            seen[id] = line_no;

            bool in_group =
                !group_stack.empty() && level == group_stack.back().level + 1;
            Feature f;
            f.id = id;
            f.display_name = id;
            if (in_group) {
                if (!vis.empty())
                    throw ParseError("SYNTAX", {line_no, col},
                                     "group members carry no variability keyword");
                f.variability = Variability::Grouped;
                f.parent = group_stack.back().parent;
                group_stack.back().children.push_back(id);
            } else {
                if (vis == "mandatory")
                    f.variability = Variability::Mandatory;
                else if (vis == "optional" || vis.empty())
                    f.variability = Variability::Optional;
                else
                    throw ParseError("SYNTAX", {line_no, col},
                                     "expected 'mandatory' or 'optional', got '" +
                                         vis + "'");
                if (level == 0) {
                    if (!model.features.empty())
                        throw ParseError("SYNTAX", {line_no, col},
                                         "only one root feature is allowed");
                } else {
                    if (feature_stack.empty() ||
                        feature_stack.back().level != level - 1)
                        throw ParseError("SYNTAX", {line_no, col},
                                         "feature has no parent at this indent");
                    f.parent = feature_stack.back().feature;
                }
            }
            model.features.push_back(f);
            feature_stack.push_back({level, id});
        } else if (word == "or" || word == "alt") {
            std::string brace;
            words >> brace;
            std::string trailing;
            if (brace != "{" || (words >> trailing))
                throw ParseError("SYNTAX", {line_no, col},
                                 "expected '" + word + " {'");
            if (feature_stack.empty() || feature_stack.back().level != level - 1)
                throw ParseError("SYNTAX", {line_no, col},
                                 "group block has no parent feature");
            group_stack.push_back({level,
                                   word == "or" ? GroupKind::Or
                                                : GroupKind::Alternative,
                                   feature_stack.back().feature,
                                   {},
                                   line_no});
        } else if (word == "constraint") {
            std::string expr_text = body.substr(std::string("constraint").size());
            int base = col + static_cast<int>(std::string("constraint").size());
            auto tokens = lex_expr(expr_text, line_no);
            if (tokens.size() == 1)
                throw ParseError("SYNTAX", {line_no, col}, "empty constraint");
            ExprParser p(std::move(tokens), line_no, base);
            constraints.push_back({p.parse(), {line_no, col}});
        } else {
            throw ParseError("SYNTAX", {line_no, col},
                             "expected 'feature', 'or', 'alt', 'constraint' or '}'");
        }
    }

    if (!group_stack.empty())
        throw ParseError("SYNTAX", {line_no + 1, 1},
                         "unclosed group opened on line " +
                             std::to_string(group_stack.back().line));
    if (model.features.empty())
        throw ParseError("SYNTAX", {1, 1}, "model declares no features");

    for (auto& [expr, span] : constraints) {
        std::set<std::string> vars;
        expr->collect_vars(vars);
        for (const auto& v : vars)
            if (!seen.count(v))
                throw ParseError("UNKNOWN_REF", span,
                                 "constraint references unknown feature '" + v +
                                     "'");
        model.constraints.push_back({expr});
    }

    return model;
}

FeatureModel parse_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error("FILE_NOT_FOUND", "cannot open feature model file " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

namespace {

void serialize_feature(const FeatureModel& model, const std::string& id,
                       int level, std::ostringstream& out) {
    const Feature* f = model.find(id);
    std::string indent(static_cast<size_t>(level) * 2, ' ');
    out << indent << "feature " << f->id;
    switch (f->variability) {
        case Variability::Mandatory: out << " mandatory"; break;
        case Variability::Optional: out << " optional"; break;
        case Variability::Grouped: break;
    }
    out << "\n";

    std::set<std::string> grouped;
    for (const auto& g : model.groups)
        if (g.parent == id)
            for (const auto& c : g.children) grouped.insert(c);

    for (const auto& child : model.features)
        if (child.parent && *child.parent == id && !grouped.count(child.id))
            serialize_feature(model, child.id, level + 1, out);

    for (const auto& g : model.groups) {
        if (g.parent != id) continue;
        out << indent << "  " << (g.kind == GroupKind::Or ? "or" : "alt")
            << " {\n";
        for (const auto& c : g.children)
            serialize_feature(model, c, level + 2, out);
        out << indent << "  }\n";
    }
}

}  // namespace

std::string serialize(const FeatureModel& model) {
    auto valid = fm::validate_model(model);
    if (!valid.ok())
        throw Error("INVALID_MODEL", "cannot serialize an invalid model");
    std::ostringstream out;
    serialize_feature(model, model.root_id(), 0, out);
    for (const auto& c : model.constraints)
        out << "constraint " << c.formula->to_string() << "\n";
    return out.str();
}

bool structurally_equal(const FeatureModel& a, const FeatureModel& b) {
    auto feature_key = [](const Feature& f) {
        return std::tuple(f.id, f.parent.value_or(""), static_cast<int>(f.variability));
    };
    std::vector<std::tuple<std::string, std::string, int>> fa, fb;
    for (const auto& f : a.features) fa.push_back(feature_key(f));
    for (const auto& f : b.features) fb.push_back(feature_key(f));
    std::sort(fa.begin(), fa.end());
    std::sort(fb.begin(), fb.end());
    if (fa != fb) return false;

    auto group_key = [](const Group& g) {
        return std::tuple(g.parent, static_cast<int>(g.kind), g.children);
    };
    std::vector<std::tuple<std::string, int, std::vector<std::string>>> ga, gb;
    for (const auto& g : a.groups) ga.push_back(group_key(g));
    for (const auto& g : b.groups) gb.push_back(group_key(g));
    std::sort(ga.begin(), ga.end());
    std::sort(gb.begin(), gb.end());
    if (ga != gb) return false;

    std::vector<std::string> ca, cb;
    for (const auto& c : a.constraints) ca.push_back(c.formula->to_string());
    for (const auto& c : b.constraints) cb.push_back(c.formula->to_string());
    std::sort(ca.begin(), ca.end());
    std::sort(cb.begin(), cb.end());
    return ca == cb;
}

}  // namespace varsel::fm_dsl

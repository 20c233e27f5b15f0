#include <cstdlib>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "riskloop/model.hpp"

namespace riskloop::model {
namespace {

enum class TokenKind {
    Word,    // keyword, identifier or unit
    String,  // quoted name
    Number,
    Cmp,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Colon,
    Comma,
    End,
};

struct Token {
    TokenKind kind = TokenKind::End;
    std::string text;  // word text or decoded string content
    double number = 0.0;
    Comparator cmp = Comparator::Less;
    int line = 1;
    int column = 1;
};

struct LexError {
    std::string message;
    int line = 1;
    int column = 1;
};

bool is_word_start(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
}

bool is_word_char(char c) {
    return is_word_start(c) || (c >= '0' && c <= '9') || c == '/' || c == '^' || c == '%';
}

bool is_digit(char c) { return c >= '0' && c <= '9'; }

class Lexer {
public:
    explicit Lexer(std::string_view text) : text_(text) {}

    bool run(std::vector<Token>& tokens, LexError& error) {
        while (true) {
            skip_space_and_comments();
            if (pos_ >= text_.size()) break;
            const int line = line_;
            const int col = column_;
            const char c = text_[pos_];
            if (c == '"') {
                std::string content;
                if (!lex_string(content, error)) return false;
                tokens.push_back({TokenKind::String, content, 0.0, Comparator::Less, line, col});
            } else if (is_digit(c) || ((c == '-' || c == '+') && pos_ + 1 < text_.size() &&
                                       (is_digit(text_[pos_ + 1]) || text_[pos_ + 1] == '.')) ||
                       (c == '.' && pos_ + 1 < text_.size() && is_digit(text_[pos_ + 1]))) {
                double value = 0.0;
                if (!lex_number(value, error)) return false;
                tokens.push_back({TokenKind::Number, "", value, Comparator::Less, line, col});
            } else if (is_word_start(c)) {
                std::string word;
                while (pos_ < text_.size() && is_word_char(text_[pos_])) {
                    word.push_back(text_[pos_]);
                    advance();
                }
                tokens.push_back({TokenKind::Word, word, 0.0, Comparator::Less, line, col});
            } else if (c == '<' || c == '>') {
                Comparator cmp = c == '<' ? Comparator::Less : Comparator::Greater;
                advance();
                if (pos_ < text_.size() && text_[pos_] == '=') {
                    cmp = cmp == Comparator::Less ? Comparator::LessEq : Comparator::GreaterEq;
                    advance();
                }
                tokens.push_back({TokenKind::Cmp, "", 0.0, cmp, line, col});
            } else {
                TokenKind kind;
                switch (c) {
                    case '{': kind = TokenKind::LBrace; break;
                    case '}': kind = TokenKind::RBrace; break;
                    case '[': kind = TokenKind::LBracket; break;
                    case ']': kind = TokenKind::RBracket; break;
                    case ':': kind = TokenKind::Colon; break;
                    case ',': kind = TokenKind::Comma; break;
                    default:
                        error = {std::string("unexpected character '") + c + "'", line, col};
                        return false;
                }
                advance();
                tokens.push_back({kind, "", 0.0, Comparator::Less, line, col});
            }
        }
        tokens.push_back({TokenKind::End, "", 0.0, Comparator::Less, line_, column_});
        return true;
    }

private:
    void advance() {
        if (text_[pos_] == '\n') {
            ++line_;
            column_ = 1;
        } else {
            ++column_;
        }
        ++pos_;
    }

    void skip_space_and_comments() {
        while (pos_ < text_.size()) {
            const char c = text_[pos_];
            if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                advance();
            } else if (c == '#') {
                while (pos_ < text_.size() && text_[pos_] != '\n') advance();
            } else {
                break;
            }
        }
    }

    bool lex_string(std::string& out, LexError& error) {
        const int line = line_;
        const int col = column_;
        advance();  // opening quote
        while (pos_ < text_.size()) {
            const char c = text_[pos_];
            if (c == '"') {
                advance();
                return true;
            }
            if (c == '\n') break;
            if (c == '\\') {
                advance();
                if (pos_ >= text_.size()) break;
                const char esc = text_[pos_];
                if (esc == '"' || esc == '\\') {
                    out.push_back(esc);
                    advance();
                } else {
                    error = {"unknown escape sequence in string", line_, column_};
                    return false;
                }
            } else {
                out.push_back(c);
                advance();
            }
        }
        error = {"unterminated string", line, col};
        return false;
    }

    bool lex_number(double& out, LexError& error) {
        std::string raw;
        auto take = [&] {
            raw.push_back(text_[pos_]);
            advance();
        };
        if (text_[pos_] == '-' || text_[pos_] == '+') take();
        while (pos_ < text_.size() && is_digit(text_[pos_])) take();
        if (pos_ < text_.size() && text_[pos_] == '.') {
            take();
            while (pos_ < text_.size() && is_digit(text_[pos_])) take();
        }
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            take();
            if (pos_ < text_.size() && (text_[pos_] == '-' || text_[pos_] == '+')) take();
            if (pos_ >= text_.size() || !is_digit(text_[pos_])) {
                error = {"malformed number", line_, column_};
                return false;
            }
            while (pos_ < text_.size() && is_digit(text_[pos_])) take();
        }
        char* end = nullptr;
        out = std::strtod(raw.c_str(), &end);
        if (end == raw.c_str() || *end != '\0') {
            error = {"malformed number '" + raw + "'", line_, column_};
            return false;
        }
        return true;
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int column_ = 1;
};

const std::set<std::string>& keywords() {
    static const std::set<std::string> kw = {
        "model",    "situation",  "event",    "goal",     "indicator", "feature",
        "exposes",  "impacts",    "refines",  "constraint", "likelihood", "severity",
        "evidence", "boolean",    "continuous", "discrete", "AND",      "OR",
    };
    return kw;
}

struct Located {
    std::string name;
    int line = 0;
    int column = 0;
};

// Reference sites recorded during parsing for the resolution pass.
struct References {
    std::vector<Located> exposes;  // event names
    std::vector<Located> impacts;  // goal names
    std::vector<Located> refines;  // parent goal names
};

class Parser {
public:
    Parser(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

    ParseResult run() {
        ParseResult result;
        RiskModel model;
        if (!parse_model(model)) {
            result.diagnostics = std::move(diags_);
            return result;
        }
        resolve(model);
        if (has_errors(diags_)) {
            result.diagnostics = std::move(diags_);
            return result;
        }
        result.model = std::move(model);
        result.diagnostics = std::move(diags_);
        return result;
    }

private:
    const Token& peek() const { return tokens_[pos_]; }
    const Token& get() { return tokens_[pos_ == tokens_.size() - 1 ? pos_ : pos_++]; }

    bool is_keyword(const Token& t, const char* word) const {
        return t.kind == TokenKind::Word && t.text == word;
    }

    void syntax_error(const Token& at, std::string message) {
        diags_.push_back({Severity::Error, std::move(message), "", at.line, at.column});
    }

    bool expect_keyword(const char* word) {
        const Token& t = get();
        if (!is_keyword(t, word)) {
            syntax_error(t, std::string("expected '") + word + "'");
            return false;
        }
        return true;
    }

    bool expect(TokenKind kind, const char* what) {
        const Token& t = get();
        if (t.kind != kind) {
            syntax_error(t, std::string("expected ") + what);
            return false;
        }
        return true;
    }

    bool expect_string(std::string& out, int* line = nullptr, int* column = nullptr) {
        const Token& t = get();
        if (t.kind != TokenKind::String) {
            syntax_error(t, "expected quoted name");
            return false;
        }
        out = t.text;
        if (line) *line = t.line;
        if (column) *column = t.column;
        return true;
    }

    bool expect_number(double& out) {
        const Token& t = get();
        if (t.kind != TokenKind::Number) {
            syntax_error(t, "expected number");
            return false;
        }
        out = t.number;
        return true;
    }

    bool expect_cmp(Comparator& out) {
        const Token& t = get();
        if (t.kind != TokenKind::Cmp) {
            syntax_error(t, "expected comparator (<, <=, >, >=)");
            return false;
        }
        out = t.cmp;
        return true;
    }

    // A unit is a word that is not one of the structural keywords.
    std::string maybe_unit() {
        const Token& t = peek();
        if (t.kind == TokenKind::Word && !keywords().count(t.text)) {
            ++pos_;
            return t.text;
        }
        return "";
    }

    bool parse_model(RiskModel& model) {
        if (!expect_keyword("model")) return false;
        if (!expect_string(model.name)) return false;
        if (!expect(TokenKind::LBrace, "'{'")) return false;
        while (true) {
            const Token& t = peek();
            if (t.kind == TokenKind::RBrace) {
                ++pos_;
                break;
            }
            if (is_keyword(t, "situation")) {
                if (!parse_situation(model)) return false;
            } else if (is_keyword(t, "event")) {
                if (!parse_event(model)) return false;
            } else if (is_keyword(t, "goal")) {
                if (!parse_goal(model)) return false;
            } else {
                syntax_error(t, "expected 'situation', 'event', 'goal' or '}'");
                return false;
            }
        }
        const Token& t = get();
        if (t.kind != TokenKind::End) {
            syntax_error(t, "unexpected trailing input after model");
            return false;
        }
        return true;
    }

    bool parse_situation(RiskModel& model) {
        ++pos_;  // 'situation'
        Situation situation;
        Located loc;
        if (!expect_string(situation.name, &loc.line, &loc.column)) return false;
        loc.name = situation.name;
        situation_decls_.push_back(loc);
        if (!expect(TokenKind::LBrace, "'{'")) return false;
        while (true) {
            const Token& t = peek();
            if (t.kind == TokenKind::RBrace) {
                ++pos_;
                break;
            }
            if (is_keyword(t, "indicator")) {
                if (!parse_indicator(situation)) return false;
            } else if (is_keyword(t, "feature")) {
                if (!parse_feature(situation)) return false;
            } else if (is_keyword(t, "exposes")) {
                ++pos_;
                Located ref;
                std::string event;
                if (!expect_string(event, &ref.line, &ref.column)) return false;
                ref.name = event;
                refs_.exposes.push_back(ref);
                situation.exposes.push_back(event);
            } else {
                syntax_error(t, "expected 'indicator', 'feature', 'exposes' or '}'");
                return false;
            }
        }
        model.situations.push_back(std::move(situation));
        return true;
    }

    bool parse_indicator(Situation& situation) {
        ++pos_;  // 'indicator'
        Indicator indicator;
        if (!expect_string(indicator.name)) return false;
        if (!expect(TokenKind::Colon, "':'")) return false;
        const Token& t = peek();
        if (is_keyword(t, "boolean")) {
            ++pos_;
            indicator.kind = BooleanIndicator{};
        } else if (t.kind == TokenKind::Cmp) {
            ThresholdIndicator threshold;
            if (!expect_cmp(threshold.cmp)) return false;
            if (!expect_number(threshold.bound)) return false;
            threshold.unit = maybe_unit();
            indicator.kind = threshold;
        } else {
            syntax_error(t, "expected 'boolean' or comparator after ':'");
            return false;
        }
        situation.indicators.push_back(std::move(indicator));
        return true;
    }

    bool parse_feature(Situation& situation) {
        ++pos_;  // 'feature'
        DomainFeature feature;
        Located loc;
        if (!expect_string(feature.name, &loc.line, &loc.column)) return false;
        loc.name = feature.name;
        if (!expect(TokenKind::Colon, "':'")) return false;
        const Token& t = peek();
        if (is_keyword(t, "continuous")) {
            ++pos_;
            ContinuousDomain domain;
            if (!expect(TokenKind::LBracket, "'['")) return false;
            if (!expect_number(domain.lo)) return false;
            if (!expect(TokenKind::Comma, "','")) return false;
            if (!expect_number(domain.hi)) return false;
            if (!expect(TokenKind::RBracket, "']'")) return false;
            domain.unit = maybe_unit();
            feature.domain = domain;
        } else if (is_keyword(t, "discrete")) {
            ++pos_;
            DiscreteDomain domain;
            if (!expect(TokenKind::LBrace, "'{'")) return false;
            while (true) {
                std::string category;
                if (!expect_string(category)) return false;
                domain.categories.push_back(category);
                const Token& sep = peek();
                if (sep.kind == TokenKind::Comma) {
                    ++pos_;
                    continue;
                }
                break;
            }
            if (!expect(TokenKind::RBrace, "'}'")) return false;
            feature.domain = domain;
        } else {
            syntax_error(t, "expected 'continuous' or 'discrete' after ':'");
            return false;
        }
        for (const auto& existing : situation.features) {
            if (existing.name == feature.name) {
                diags_.push_back({Severity::Error,
                                  "duplicate feature name \"" + feature.name + "\" in situation",
                                  situation.name, loc.line, loc.column});
                return false;
            }
        }
        situation.features.push_back(std::move(feature));
        return true;
    }

    bool parse_event(RiskModel& model) {
        ++pos_;  // 'event'
        Event event;
        Located loc;
        if (!expect_string(event.name, &loc.line, &loc.column)) return false;
        loc.name = event.name;
        event_decls_.push_back(loc);
        if (!expect(TokenKind::LBrace, "'{'")) return false;
        if (!expect_keyword("constraint")) return false;
        if (!expect(TokenKind::Colon, "':'")) return false;
        const Token& metric = get();
        if (metric.kind != TokenKind::Word) {
            syntax_error(metric, "expected metric identifier");
            return false;
        }
        event.constraint.metric = metric.text;
        if (!expect_cmp(event.constraint.cmp)) return false;
        const Token& bound = peek();
        if (bound.kind == TokenKind::Number) {
            ++pos_;
            LiteralBound literal{bound.number, ""};
            literal.unit = maybe_unit();
            event.constraint.bound = literal;
        } else if (bound.kind == TokenKind::Word && !keywords().count(bound.text)) {
            ++pos_;
            event.constraint.bound = SymbolicBound{bound.text};
        } else {
            syntax_error(bound, "expected numeric or symbolic constraint bound");
            return false;
        }
        while (true) {
            const Token& t = peek();
            if (t.kind == TokenKind::RBrace) {
                ++pos_;
                break;
            }
            if (is_keyword(t, "likelihood")) {
                ++pos_;
                if (!expect_number(event.likelihood)) return false;
            } else if (is_keyword(t, "impacts")) {
                ++pos_;
                Impact impact;
                Located ref;
                if (!expect_string(impact.goal, &ref.line, &ref.column)) return false;
                ref.name = impact.goal;
                refs_.impacts.push_back(ref);
                if (is_keyword(peek(), "severity")) {
                    ++pos_;
                    if (!expect_number(impact.severity)) return false;
                }
                event.impacts.push_back(std::move(impact));
            } else if (is_keyword(t, "evidence")) {
                ++pos_;
                std::string id;
                if (!expect_string(id)) return false;
                event.provenance = id;
            } else {
                syntax_error(t, "expected 'likelihood', 'impacts', 'evidence' or '}'");
                return false;
            }
        }
        model.events.push_back(std::move(event));
        return true;
    }

    bool parse_goal(RiskModel& model) {
        ++pos_;  // 'goal'
        Goal goal;
        Located loc;
        if (!expect_string(goal.name, &loc.line, &loc.column)) return false;
        loc.name = goal.name;
        goal_decls_.push_back(loc);
        if (!expect(TokenKind::LBrace, "'{'")) return false;
        if (is_keyword(peek(), "refines")) {
            ++pos_;
            Located ref;
            std::string parent;
            if (!expect_string(parent, &ref.line, &ref.column)) return false;
            ref.name = parent;
            refs_.refines.push_back(ref);
            goal.refines = parent;
        }
        const Token& op = peek();
        if (is_keyword(op, "AND")) {
            ++pos_;
            goal.refinement = Refinement::And;
        } else if (is_keyword(op, "OR")) {
            ++pos_;
            goal.refinement = Refinement::Or;
        }
        if (!expect(TokenKind::RBrace, "'}'")) return false;
        model.goals.push_back(std::move(goal));
        return true;
    }

    void check_duplicates(const std::vector<Located>& decls, const char* kind) {
        std::set<std::string> seen;
        for (const auto& decl : decls) {
            if (!seen.insert(decl.name).second) {
                diags_.push_back({Severity::Error,
                                  std::string("duplicate ") + kind + " name \"" + decl.name + "\"",
                                  decl.name, decl.line, decl.column});
            }
        }
    }

    void resolve(const RiskModel& model) {
        check_duplicates(situation_decls_, "situation");
        check_duplicates(event_decls_, "event");
        check_duplicates(goal_decls_, "goal");
        for (const auto& ref : refs_.exposes) {
            if (!model.find_event(ref.name)) {
                diags_.push_back({Severity::Error,
                                  "exposes references unknown event \"" + ref.name + "\"",
                                  ref.name, ref.line, ref.column});
            }
        }
        for (const auto& ref : refs_.impacts) {
            if (!model.find_goal(ref.name)) {
                diags_.push_back({Severity::Error,
                                  "impacts references unknown goal \"" + ref.name + "\"",
                                  ref.name, ref.line, ref.column});
            }
        }
        for (const auto& ref : refs_.refines) {
            if (!model.find_goal(ref.name)) {
                diags_.push_back({Severity::Error,
                                  "refines references unknown goal \"" + ref.name + "\"",
                                  ref.name, ref.line, ref.column});
            }
        }
        if (has_errors(diags_)) return;
        // Cycle check along parent pointers.
        std::map<std::string, int> state;  // 0 unvisited, 1 on stack, 2 done
        for (const auto& goal : model.goals) {
            const Goal* cur = &goal;
            std::vector<const Goal*> stack;
            while (cur && state[cur->name] == 0) {
                state[cur->name] = 1;
                stack.push_back(cur);
                cur = cur->refines ? model.find_goal(*cur->refines) : nullptr;
            }
            if (cur && state[cur->name] == 1) {
                Located loc;
                for (const auto& decl : goal_decls_) {
                    if (decl.name == cur->name) loc = decl;
                }
                diags_.push_back({Severity::Error,
                                  "cyclic refinement through goal \"" + cur->name + "\"",
                                  cur->name, loc.line, loc.column});
            }
            for (const Goal* g : stack) state[g->name] = 2;
        }
    }

    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
    std::vector<Diagnostic> diags_;
    std::vector<Located> situation_decls_;
    std::vector<Located> event_decls_;
    std::vector<Located> goal_decls_;
    References refs_;
};

}  // namespace

ParseResult parse_model(std::string_view text) {
    std::vector<Token> tokens;
    LexError lex_error;
    Lexer lexer(text);
    if (!lexer.run(tokens, lex_error)) {
        ParseResult result;
        result.diagnostics.push_back(
            {Severity::Error, lex_error.message, "", lex_error.line, lex_error.column});
        return result;
    }
    return Parser(std::move(tokens)).run();
}

}  // namespace riskloop::model

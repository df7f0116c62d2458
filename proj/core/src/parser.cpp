#include "synlang/parser.hpp"

#include <charconv>
#include <cstdint>
#include <string>

#include "synlang/token.hpp"

namespace synlang {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

// Strips one symmetric pair of double quotes, if present.
std::string_view unquote(std::string_view s) {
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') {
        return s.substr(1, s.size() - 2);
    }
    return s;
}

bool is_digit(char c) {
    return c >= '0' && c <= '9';
}

std::optional<double> parse_float(std::string_view text) {
    std::string buf;
    if (!text.empty() && text.front() == '.') {
        buf = "0";
    }
    buf += text;
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(buf.data(), buf.data() + buf.size(), value);
    if (ec != std::errc{} || ptr != buf.data() + buf.size()) return std::nullopt;
    return value;
}

struct ClauseSplit {
    std::string_view explanation;
    std::optional<double> confidence;
};

// Splits a trailing "(confidence=<float>)" off an already-trimmed logical
// item text. Exactly one clause is consumed, so appending one during
// formatting reparses to the original text.
ClauseSplit split_confidence_clause(std::string_view text) {
    if (text.empty() || text.back() != ')') return {text, std::nullopt};
    const std::size_t open = text.rfind("(confidence=");
    if (open == std::string_view::npos) return {text, std::nullopt};
    const std::string_view inner = text.substr(open + 12, text.size() - open - 13);
    std::size_t p = 0;
    while (p < inner.size() && is_digit(inner[p])) ++p;
    if (p >= inner.size() || inner[p] != '.') return {text, std::nullopt};
    ++p;
    const std::size_t frac = p;
    while (p < inner.size() && is_digit(inner[p])) ++p;
    if (p == frac || p != inner.size()) return {text, std::nullopt};
    const auto value = parse_float(inner);
    if (!value) return {text, std::nullopt};
    return {trim(text.substr(0, open)), value};
}

struct Line {
    std::size_t first = 0;      // token range [first, last)
    std::size_t last = 0;
    std::size_t sig = SIZE_MAX;  // first non-trivia token index, SIZE_MAX if blank
    std::size_t content_end = 0;  // byte offset just before the newline
    int line_no = 1;
};

std::vector<Line> split_lines(const std::vector<Token>& tokens, std::string_view source) {
    std::vector<Line> lines;
    Line cur;
    cur.content_end = source.size();
    bool open = false;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        const Token& t = tokens[i];
        if (!open) {
            cur = Line{};
            cur.first = i;
            cur.line_no = t.span.begin.line;
            cur.content_end = source.size();
            open = true;
        }
        if (t.kind == TokenKind::Newline) {
            cur.last = i + 1;
            cur.content_end = t.offset;
            lines.push_back(cur);
            open = false;
        } else if (cur.sig == SIZE_MAX && t.kind != TokenKind::Whitespace) {
            cur.sig = i;
        }
    }
    if (open) {
        cur.last = tokens.size();
        lines.push_back(cur);
    }
    return lines;
}

bool is_line_marker(TokenKind kind) {
    switch (kind) {
        case TokenKind::TaskMarker:
        case TokenKind::AgentMarker:
        case TokenKind::ContextFence:
        case TokenKind::QueryMarker:
        case TokenKind::FactorMarker:
        case TokenKind::SubfactorMarker:
        case TokenKind::TraceKeyword:
        case TokenKind::TraceFeKeyword:
        case TokenKind::FeelKeyword:
        case TokenKind::ResponseKeyword:
        case TokenKind::ModKeyword:
        case TokenKind::OnlyKeyword:
        case TokenKind::PreferKeyword:
        case TokenKind::SoftExcludeMarker:
        case TokenKind::HardExcludeMarker:
        case TokenKind::CommentMarker:
        case TokenKind::CotKeyword:
        case TokenKind::CtxKeyword:
        case TokenKind::Dash:
        case TokenKind::RBrace:
            return true;
        default:
            return false;
    }
}

// Grammar section order enforced in strict mode.
enum class Section { Prefix = 0, Factors = 1, Meta = 2, Controls = 3, Coordination = 4 };

std::string_view section_name(Section s) {
    switch (s) {
        case Section::Prefix: return "prefix";
        case Section::Factors: return "factor";
        case Section::Meta: return "metadata";
        case Section::Controls: return "control";
        case Section::Coordination: return "coordination";
    }
    return "?";
}

// Which logical element a continuation line extends.
enum class Carrier { None, Query, Factor, Item, Control, Cot };

struct PendingItem {
    std::string label;
    std::string raw;  // joined logical text, clause not yet split off
    Span span;
};

class BlockParser {
  public:
    BlockParser(std::string_view source, const std::vector<Token>& tokens, ParseMode mode)
        : src_(source), tokens_(tokens), mode_(mode) {}

    ParseResult parse(const std::vector<Line>& lines, std::size_t lo, std::size_t hi) {
        std::size_t begin = lo;
        std::size_t end = hi;
        while (begin < end && lines[begin].sig == SIZE_MAX) ++begin;
        while (end > begin && lines[end - 1].sig == SIZE_MAX) --end;
        if (begin < end) {
            block_.span = {{lines[begin].line_no, 1}, {lines[end - 1].line_no + 1, 1}};
        }
        for (std::size_t i = begin; i < end; ++i) {
            handle_line(lines[i]);
        }
        finish();
        ParseResult result;
        result.diagnostics = std::move(diags_);
        if (prefix_complete_ && !has_errors(result.diagnostics)) {
            result.block = std::move(block_);
        }
        return result;
    }

  private:
    std::string_view src_;
    const std::vector<Token>& tokens_;
    ParseMode mode_;

    Block block_;
    std::vector<Diagnostic> diags_;

    int prefix_ = 0;  // 0 task, 1 agent, 2 context, 3 query, 4 done
    bool prefix_complete_ = false;
    Section section_ = Section::Prefix;
    Carrier carrier_ = Carrier::None;

    bool seen_depth2_ = false;
    bool in_trace_fe_ = false;
    bool trace_fe_header_seen_ = false;
    std::size_t trace_fe_items_since_header_ = 0;
    bool in_ctx_ = false;
    std::vector<PendingItem> trace_fe_pending_;
    std::vector<PendingItem> ctx_pending_;

    bool cot_seen_ = false;
    bool ctx_seen_ = false;
    std::string cot_id_, cot_target_, cot_raw_desc_, ctx_id_;
    Span cot_span_{}, ctx_span_{};

    TokenKind last_sig_kind_ = TokenKind::Newline;

    bool strict() const { return mode_ == ParseMode::Strict; }

    void error(std::string code, std::string message, Span span) {
        diags_.push_back({Severity::Error, std::move(code), std::move(message), span});
    }

    Span line_span(const Line& line) const {
        const Token& t = tokens_[line.sig == SIZE_MAX ? line.first : line.sig];
        return {t.span.begin, {line.line_no, t.span.begin.column + 1}};
    }

    std::string_view line_text_from(std::size_t offset, const Line& line) const {
        return trim(src_.substr(offset, line.content_end - offset));
    }

    // First token of the given kind within the line, or nullptr.
    const Token* find_token(const Line& line, TokenKind kind, std::size_t from) const {
        for (std::size_t i = from; i < line.last; ++i) {
            if (tokens_[i].kind == kind) return &tokens_[i];
        }
        return nullptr;
    }

    bool has_stray_text(const Line& line, std::size_t from) const {
        return find_token(line, TokenKind::Text, from) != nullptr;
    }

    void append_joined(std::string& target, std::string_view more) {
        if (more.empty()) return;
        if (!target.empty()) target += ' ';
        target += more;
    }

    void handle_line(const Line& line) {
        if (line.sig == SIZE_MAX) {
            handle_blank(line);
            return;
        }
        const Token& sig = tokens_[line.sig];

        if (prefix_ < 4) {
            if (handle_prefix(line, sig)) {
                last_sig_kind_ = sig.kind;
                return;
            }
            // Fell through with remaining prefix elements reported missing.
        }

        if (!is_line_marker(sig.kind)) {
            handle_continuation(line, sig);
            return;
        }

        if (in_ctx_ && sig.kind != TokenKind::Dash && sig.kind != TokenKind::RBrace) {
            error("E-SYN-009", "unterminated CTX block: expected '}' before this line",
                  line_span(line));
            in_ctx_ = false;
        }
        if (in_trace_fe_ && sig.kind != TokenKind::Dash) {
            close_trace_fe(line);
        }

        switch (sig.kind) {
            case TokenKind::FactorMarker:
            case TokenKind::SubfactorMarker:
                handle_factor(line, sig);
                break;
            case TokenKind::FeelKeyword:
                handle_feel(line, sig);
                break;
            case TokenKind::TraceKeyword:
                handle_trace(line, sig);
                break;
            case TokenKind::TraceFeKeyword:
                handle_trace_fe_header(line, sig);
                break;
            case TokenKind::ResponseKeyword:
                handle_response(line, sig);
                break;
            case TokenKind::ModKeyword:
                handle_control(line, sig, ControlKind::Mod);
                break;
            case TokenKind::OnlyKeyword:
                handle_control(line, sig, ControlKind::Only);
                break;
            case TokenKind::PreferKeyword:
                handle_control(line, sig, ControlKind::Prefer);
                break;
            case TokenKind::SoftExcludeMarker:
                handle_control(line, sig, ControlKind::SoftExclude);
                break;
            case TokenKind::HardExcludeMarker:
                handle_control(line, sig, ControlKind::HardExclude);
                break;
            case TokenKind::CommentMarker:
                handle_control(line, sig, ControlKind::Comment);
                break;
            case TokenKind::CotKeyword:
                handle_cot(line, sig);
                break;
            case TokenKind::CtxKeyword:
                handle_ctx(line, sig);
                break;
            case TokenKind::Dash:
                handle_item(line, sig);
                break;
            case TokenKind::RBrace:
                handle_rbrace(line, sig);
                break;
            case TokenKind::TaskMarker:
                error("E-SYN-021", "unexpected task line inside a block", sig.span);
                carrier_ = Carrier::None;
                break;
            default:
                error("E-SYN-007", "unexpected line", sig.span);
                carrier_ = Carrier::None;
                break;
        }
        last_sig_kind_ = sig.kind;
    }

    void handle_blank(const Line& line) {
        if (strict()) {
            const bool after_meta_or_control =
                last_sig_kind_ == TokenKind::FeelKeyword ||
                last_sig_kind_ == TokenKind::TraceKeyword ||
                last_sig_kind_ == TokenKind::ResponseKeyword ||
                last_sig_kind_ == TokenKind::ModKeyword ||
                last_sig_kind_ == TokenKind::OnlyKeyword ||
                last_sig_kind_ == TokenKind::PreferKeyword ||
                last_sig_kind_ == TokenKind::SoftExcludeMarker ||
                last_sig_kind_ == TokenKind::HardExcludeMarker ||
                last_sig_kind_ == TokenKind::CommentMarker ||
                last_sig_kind_ == TokenKind::RBrace ||
                (last_sig_kind_ == TokenKind::Dash && !in_ctx_);
            if (!after_meta_or_control) {
                error("E-SYN-022", "blank line not allowed here", line_span(line));
            }
        }
        carrier_ = Carrier::None;
    }

    // Returns true when the line was consumed as a prefix element.
    bool handle_prefix(const Line& line, const Token& sig) {
        static constexpr TokenKind kExpected[4] = {
            TokenKind::TaskMarker, TokenKind::AgentMarker, TokenKind::ContextFence,
            TokenKind::QueryMarker};
        static constexpr std::string_view kNames[4] = {
            "task line (#IDENTIFIER)", "agent line (@IDENTIFIER)",
            "context line (=== text ===)", "query line (> text)"};
        while (prefix_ < 4) {
            if (sig.kind == kExpected[prefix_]) {
                switch (prefix_) {
                    case 0: consume_task(line, sig); break;
                    case 1: consume_agent(line, sig); break;
                    case 2: consume_context(line, sig); break;
                    case 3: consume_query(line, sig); break;
                }
                ++prefix_;
                if (prefix_ == 4) prefix_complete_ = true;
                return true;
            }
            error("E-SYN-00" + std::to_string(prefix_ + 1),
                  std::string("expected ") + std::string(kNames[prefix_]), line_span(line));
            ++prefix_;
        }
        prefix_complete_ = false;
        return false;
    }

    void consume_task(const Line& line, const Token& sig) {
        const Token* ident = find_token(line, TokenKind::Identifier, line.sig + 1);
        if (!ident) {
            error("E-SYN-011", "expected identifier after '#'", sig.span);
            return;
        }
        block_.task = std::string(ident->lexeme);
        if (has_stray_text(line, line.sig + 1)) {
            error("E-SYN-007", "unexpected text after task identifier", sig.span);
        }
    }

    void consume_agent(const Line& line, const Token& sig) {
        const Token* ident = find_token(line, TokenKind::Identifier, line.sig + 1);
        if (!ident) {
            error("E-SYN-011", "expected identifier after '@'", sig.span);
            return;
        }
        block_.agent = std::string(ident->lexeme);
        if (has_stray_text(line, line.sig + 1)) {
            error("E-SYN-007", "unexpected text after agent identifier", sig.span);
        }
    }

    void consume_context(const Line& line, const Token& sig) {
        const Token* close = find_token(line, TokenKind::ContextFence, line.sig + 1);
        if (!close) {
            error("E-SYN-013", "unterminated context line: expected closing '==='", sig.span);
            return;
        }
        const Token* text = find_token(line, TokenKind::Text, line.sig + 1);
        std::string_view raw;
        if (text && text->offset < close->offset) raw = trim(text->lexeme);
        block_.context = std::string(unquote(raw));
        for (std::size_t i = line.last; i-- > line.first;) {
            if (tokens_[i].kind == TokenKind::Text && tokens_[i].offset > close->offset) {
                error("E-SYN-007", "unexpected text after closing '==='", tokens_[i].span);
                break;
            }
        }
    }

    void consume_query(const Line& line, const Token& sig) {
        block_.query = std::string(line_text_from(sig.offset + sig.lexeme.size(), line));
        carrier_ = Carrier::Query;
    }

    void require_section(Section s, const Line& line) {
        if (!strict()) return;
        if (static_cast<int>(s) < static_cast<int>(section_)) {
            error("E-SYN-016",
                  std::string(section_name(s)) + " line after " +
                      std::string(section_name(section_)) + " lines",
                  line_span(line));
            return;
        }
        section_ = s;
    }

    void handle_factor(const Line& line, const Token& sig) {
        require_section(Section::Factors, line);
        const int depth = sig.kind == TokenKind::FactorMarker ? 2 : 3;
        if (depth == 3 && !seen_depth2_) {
            error("E-SYN-005", "'>>>' sub-factor before any '>>' factor", sig.span);
        }
        if (depth == 2) seen_depth2_ = true;
        Factor f;
        f.depth = depth;
        f.text = std::string(line_text_from(sig.offset + sig.lexeme.size(), line));
        f.span = {sig.span.begin, {line.line_no, sig.span.begin.column + 1}};
        if (f.text.empty()) {
            error("E-SYN-012", "empty factor text", sig.span);
        }
        block_.factors.push_back(std::move(f));
        carrier_ = Carrier::Factor;
    }

    void handle_feel(const Line& line, const Token& sig) {
        require_section(Section::Meta, line);
        const Token* ident = find_token(line, TokenKind::Identifier, line.sig + 1);
        if (!ident || has_stray_text(line, line.sig + 1)) {
            error("E-SYN-007", "expected a single identifier after 'FEEL:'", sig.span);
            carrier_ = Carrier::None;
            return;
        }
        if (block_.feel) {
            error("E-SYN-010", "duplicate FEEL line", sig.span);
        } else {
            block_.feel = std::string(ident->lexeme);
        }
        carrier_ = Carrier::None;
    }

    void handle_trace(const Line& line, const Token& sig) {
        require_section(Section::Meta, line);
        if (has_stray_text(line, line.sig + 1)) {
            error("E-SYN-007", "malformed TRACE identifier list", sig.span);
            carrier_ = Carrier::None;
            return;
        }
        bool expect_ident = true;
        bool ok = true;
        for (std::size_t i = line.sig + 1; i < line.last; ++i) {
            const Token& t = tokens_[i];
            if (t.kind == TokenKind::Whitespace || t.kind == TokenKind::Newline) continue;
            if (expect_ident && t.kind == TokenKind::Identifier) {
                block_.trace.emplace_back(t.lexeme);
                expect_ident = false;
            } else if (!expect_ident && t.kind == TokenKind::Comma) {
                expect_ident = true;
            } else {
                ok = false;
                break;
            }
        }
        if (!ok || expect_ident) {
            error("E-SYN-007", "malformed TRACE identifier list", sig.span);
        }
        carrier_ = Carrier::None;
    }

    void handle_trace_fe_header(const Line& line, const Token& sig) {
        require_section(Section::Meta, line);
        if (has_stray_text(line, line.sig + 1)) {
            error("E-SYN-007", "unexpected text after 'TRACE_FE:'", sig.span);
        }
        in_trace_fe_ = true;
        trace_fe_header_seen_ = true;
        trace_fe_items_since_header_ = 0;
        header_span_ = sig.span;
        carrier_ = Carrier::None;
    }

    void close_trace_fe(const Line&) {
        if (strict() && trace_fe_items_since_header_ == 0 && trace_fe_header_seen_) {
            error("E-SYN-017", "TRACE_FE: requires at least one item", header_span_);
        }
        in_trace_fe_ = false;
        trace_fe_header_seen_ = false;
    }

    void handle_response(const Line& line, const Token& sig) {
        require_section(Section::Meta, line);
        const Token* ident = find_token(line, TokenKind::Identifier, line.sig + 1);
        if (!ident || has_stray_text(line, line.sig + 1)) {
            error("E-SYN-007", "expected a response type after 'R:'", sig.span);
            carrier_ = Carrier::None;
            return;
        }
        if (block_.response_format) {
            error("E-SYN-010", "duplicate R: line", sig.span);
            carrier_ = Carrier::None;
            return;
        }
        ResponseFormat rf;
        rf.name = std::string(ident->lexeme);
        rf.kind = response_kind_from_name(rf.name);
        rf.span = sig.span;
        if (rf.kind == ResponseKind::Unknown && strict()) {
            error("E-SYN-014", "unknown response format '" + rf.name + "'", ident->span);
        }
        block_.response_format = std::move(rf);
        carrier_ = Carrier::None;
    }

    void handle_control(const Line& line, const Token& sig, ControlKind kind) {
        require_section(Section::Controls, line);
        ControlDirective c;
        c.kind = kind;
        c.text = std::string(line_text_from(sig.offset + sig.lexeme.size(), line));
        c.span = sig.span;
        block_.controls.push_back(std::move(c));
        carrier_ = Carrier::Control;
    }

    void handle_cot(const Line& line, const Token& sig) {
        require_section(Section::Coordination, line);
        if (cot_seen_) {
            error("E-SYN-010", "duplicate COT line", sig.span);
            carrier_ = Carrier::None;
            return;
        }
        const Token* id = find_token(line, TokenKind::Identifier, line.sig + 1);
        const Token* arrow = find_token(line, TokenKind::Arrow, line.sig + 1);
        const Token* at = find_token(line, TokenKind::AgentMarker, line.sig + 1);
        const Token* colon = at ? find_token(line, TokenKind::Colon, line.sig + 1) : nullptr;
        const Token* target =
            at ? find_token(line, TokenKind::Identifier, (at - tokens_.data()) + 1) : nullptr;
        if (!id || !arrow || !at || !target || !colon) {
            error("E-SYN-008",
                  "malformed COT line: expected 'COT: ID -> @AGENT: \"task\"'", sig.span);
            carrier_ = Carrier::None;
            return;
        }
        cot_seen_ = true;
        cot_id_ = std::string(id->lexeme);
        cot_target_ = std::string(target->lexeme);
        cot_raw_desc_ = std::string(line_text_from(colon->offset + 1, line));
        cot_span_ = sig.span;
        carrier_ = Carrier::Cot;
    }

    void handle_ctx(const Line& line, const Token& sig) {
        require_section(Section::Coordination, line);
        if (ctx_seen_) {
            error("E-SYN-010", "duplicate CTX line", sig.span);
            carrier_ = Carrier::None;
            return;
        }
        if (!cot_seen_) {
            error("E-SYN-018", "CTX transfer without a preceding COT line", sig.span);
        }
        const Token* id = find_token(line, TokenKind::Identifier, line.sig + 1);
        const Token* brace = find_token(line, TokenKind::LBrace, line.sig + 1);
        if (!id || !brace) {
            error("E-SYN-009", "malformed CTX line: expected 'CTX: ID {'", sig.span);
            carrier_ = Carrier::None;
            return;
        }
        ctx_seen_ = true;
        ctx_id_ = std::string(id->lexeme);
        ctx_span_ = sig.span;
        in_ctx_ = true;
        carrier_ = Carrier::None;
    }

    void handle_item(const Line& line, const Token& sig) {
        if (!in_ctx_ && !in_trace_fe_) {
            error("E-SYN-019", "trace item outside TRACE_FE: or CTX block", sig.span);
            carrier_ = Carrier::None;
            return;
        }
        if (in_ctx_) {
            require_section(Section::Coordination, line);
        } else {
            require_section(Section::Meta, line);
        }
        const Token* label = find_token(line, TokenKind::Identifier, line.sig + 1);
        const Token* colon = label ? find_token(line, TokenKind::Colon, line.sig + 1) : nullptr;
        if (!label || !colon) {
            error("E-SYN-020", "malformed trace item: expected '- label: explanation'",
                  sig.span);
            carrier_ = Carrier::None;
            return;
        }
        PendingItem item;
        item.label = std::string(label->lexeme);
        item.raw = std::string(line_text_from(colon->offset + 1, line));
        item.span = sig.span;
        if (in_ctx_) {
            ctx_pending_.push_back(std::move(item));
        } else {
            trace_fe_pending_.push_back(std::move(item));
            ++trace_fe_items_since_header_;
        }
        carrier_ = Carrier::Item;
    }

    void handle_rbrace(const Line& line, const Token& sig) {
        if (!in_ctx_) {
            error("E-SYN-007", "unexpected '}'", sig.span);
            carrier_ = Carrier::None;
            return;
        }
        if (has_stray_text(line, line.sig + 1)) {
            error("E-SYN-007", "unexpected text after '}'", sig.span);
        }
        in_ctx_ = false;
        carrier_ = Carrier::None;
        section_ = Section::Coordination;
    }

    void handle_continuation(const Line& line, const Token& sig) {
        if (strict()) {
            error("E-SYN-007", "unexpected line (not a recognized line type)", sig.span);
            return;
        }
        const std::string_view text = line_text_from(sig.offset, line);
        switch (carrier_) {
            case Carrier::Query:
                append_joined(block_.query, text);
                break;
            case Carrier::Factor:
                append_joined(block_.factors.back().text, text);
                break;
            case Carrier::Item: {
                PendingItem& item =
                    in_ctx_ ? ctx_pending_.back() : trace_fe_pending_.back();
                append_joined(item.raw, text);
                break;
            }
            case Carrier::Control:
                append_joined(block_.controls.back().text, text);
                break;
            case Carrier::Cot:
                append_joined(cot_raw_desc_, text);
                break;
            case Carrier::None:
                error("E-SYN-007", "unexpected line (nothing to continue)", sig.span);
                break;
        }
    }

    TraceItem finalize_item(PendingItem&& pending) {
        const ClauseSplit split = split_confidence_clause(trim(pending.raw));
        TraceItem item;
        item.label = std::move(pending.label);
        item.explanation = std::string(split.explanation);
        item.confidence = split.confidence;
        item.span = pending.span;
        if (strict() && !item.confidence) {
            error("E-SYN-006", "missing or malformed '(confidence=...)' clause", item.span);
        }
        return item;
    }

    void finish() {
        if (in_ctx_) {
            error("E-SYN-009", "unterminated CTX block: expected '}'",
                  {{block_.span.end.line, 1}, {block_.span.end.line, 2}});
        }
        if (in_trace_fe_) {
            close_trace_fe(Line{});
        }
        if (prefix_ < 4) {
            static constexpr std::string_view kNames[4] = {
                "task line (#IDENTIFIER)", "agent line (@IDENTIFIER)",
                "context line (=== text ===)", "query line (> text)"};
            const Span at = {{block_.span.end.line, 1}, {block_.span.end.line, 2}};
            while (prefix_ < 4) {
                error("E-SYN-00" + std::to_string(prefix_ + 1),
                      std::string("expected ") + std::string(kNames[prefix_]), at);
                ++prefix_;
            }
            prefix_complete_ = false;
        }
        for (PendingItem& p : trace_fe_pending_) {
            block_.trace_fe.push_back(finalize_item(std::move(p)));
        }
        if (cot_seen_ && !ctx_seen_) {
            error("E-SYN-018", "COT line without a CTX transfer", cot_span_);
        }
        if (cot_seen_ && ctx_seen_) {
            Coordination coord;
            coord.cot_id = std::move(cot_id_);
            coord.target_agent = std::move(cot_target_);
            coord.task_description = std::string(unquote(trim(cot_raw_desc_)));
            coord.ctx_id = std::move(ctx_id_);
            coord.cot_span = cot_span_;
            coord.ctx_span = ctx_span_;
            for (PendingItem& p : ctx_pending_) {
                coord.ctx_items.push_back(finalize_item(std::move(p)));
            }
            block_.coordination = std::move(coord);
        }
    }

    Span header_span_{};
};

}  // namespace

std::string_view to_string(ControlKind kind) {
    switch (kind) {
        case ControlKind::Mod: return "MOD";
        case ControlKind::Only: return "ONLY";
        case ControlKind::Prefer: return "PREFER";
        case ControlKind::SoftExclude: return "SOFT_EXCLUDE";
        case ControlKind::HardExclude: return "HARD_EXCLUDE";
        case ControlKind::Comment: return "COMMENT";
    }
    return "?";
}

ResponseKind response_kind_from_name(std::string_view name) {
    if (name == "Structured") return ResponseKind::Structured;
    if (name == "Bulletpoint") return ResponseKind::Bulletpoint;
    if (name == "Table") return ResponseKind::Table;
    if (name == "Plain") return ResponseKind::Plain;
    if (name == "JSON") return ResponseKind::Json;
    if (name == "Code") return ResponseKind::Code;
    return ResponseKind::Unknown;
}

bool structurally_equal(const TraceItem& a, const TraceItem& b) {
    return a.label == b.label && a.explanation == b.explanation && a.confidence == b.confidence;
}

namespace {

bool items_equal(const std::vector<TraceItem>& a, const std::vector<TraceItem>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!structurally_equal(a[i], b[i])) return false;
    }
    return true;
}

}  // namespace

bool structurally_equal(const Block& a, const Block& b) {
    if (a.task != b.task || a.agent != b.agent || a.context != b.context || a.query != b.query) {
        return false;
    }
    if (a.factors.size() != b.factors.size()) return false;
    for (std::size_t i = 0; i < a.factors.size(); ++i) {
        if (a.factors[i].depth != b.factors[i].depth || a.factors[i].text != b.factors[i].text) {
            return false;
        }
    }
    if (a.feel != b.feel || a.trace != b.trace) return false;
    if (!items_equal(a.trace_fe, b.trace_fe)) return false;
    const bool ar = a.response_format.has_value();
    const bool br = b.response_format.has_value();
    if (ar != br) return false;
    if (ar && (a.response_format->kind != b.response_format->kind ||
               a.response_format->name != b.response_format->name)) {
        return false;
    }
    if (a.controls.size() != b.controls.size()) return false;
    for (std::size_t i = 0; i < a.controls.size(); ++i) {
        if (a.controls[i].kind != b.controls[i].kind || a.controls[i].text != b.controls[i].text) {
            return false;
        }
    }
    const bool ac = a.coordination.has_value();
    const bool bc = b.coordination.has_value();
    if (ac != bc) return false;
    if (ac) {
        const Coordination& x = *a.coordination;
        const Coordination& y = *b.coordination;
        if (x.cot_id != y.cot_id || x.target_agent != y.target_agent ||
            x.task_description != y.task_description || x.ctx_id != y.ctx_id ||
            !items_equal(x.ctx_items, y.ctx_items)) {
            return false;
        }
    }
    return true;
}

std::vector<Diagnostic> DocumentResult::all_diagnostics() const {
    std::vector<Diagnostic> out = diagnostics;
    for (const ParseResult& r : blocks) {
        out.insert(out.end(), r.diagnostics.begin(), r.diagnostics.end());
    }
    return out;
}

bool DocumentResult::ok() const {
    if (has_errors(diagnostics)) return false;
    for (const ParseResult& r : blocks) {
        if (!r.ok()) return false;
    }
    return true;
}

ParseResult parse_block(std::string_view source, ParseMode mode) {
    LexResult lexed = tokenize(source);
    if (!lexed.diagnostics.empty()) {
        return {std::nullopt, std::move(lexed.diagnostics)};
    }
    const std::vector<Line> lines = split_lines(lexed.tokens, source);
    BlockParser parser(source, lexed.tokens, mode);
    return parser.parse(lines, 0, lines.size());
}

DocumentResult parse_document(std::string_view source, ParseMode mode) {
    DocumentResult result;
    LexResult lexed = tokenize(source);
    if (!lexed.diagnostics.empty()) {
        result.diagnostics = std::move(lexed.diagnostics);
        return result;
    }
    const std::vector<Line> lines = split_lines(lexed.tokens, source);

    // A block starts at a column-0 '#'. Leading whitespace keeps a '#' line
    // from starting a block, matching the column-0 rule exactly.
    std::vector<std::size_t> starts;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (lines[i].sig == SIZE_MAX) continue;
        const Token& t = lexed.tokens[lines[i].sig];
        if (t.kind == TokenKind::TaskMarker && lines[i].sig == lines[i].first &&
            t.span.begin.column == 1) {
            starts.push_back(i);
        }
    }
    if (starts.empty()) {
        Diagnostic d;
        d.severity = Severity::Error;
        d.code = "E-DOC-001";
        d.message = "no communication blocks found (expected a '#TASK' line at column 0)";
        d.span = {{1, 1}, {1, 2}};
        result.diagnostics.push_back(d);
        return result;
    }
    for (std::size_t i = 0; i < starts.front(); ++i) {
        if (lines[i].sig != SIZE_MAX) {
            const Token& t = lexed.tokens[lines[i].sig];
            Diagnostic d;
            d.severity = Severity::Error;
            d.code = "E-DOC-002";
            d.message = "content before the first block";
            d.span = t.span;
            result.diagnostics.push_back(d);
            break;
        }
    }
    for (std::size_t s = 0; s < starts.size(); ++s) {
        const std::size_t lo = starts[s];
        const std::size_t hi = (s + 1 < starts.size()) ? starts[s + 1] : lines.size();
        BlockParser parser(source, lexed.tokens, mode);
        result.blocks.push_back(parser.parse(lines, lo, hi));
    }
    return result;
}

}  // namespace synlang

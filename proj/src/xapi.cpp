#include "xapagy/xapi.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>

#include "xapagy/error.hpp"

namespace xapagy {

std::string_view to_string(ViForm form) {
  switch (form) {
    case ViForm::SV: return "SV";
    case ViForm::SVO: return "SVO";
    case ViForm::SVAdj: return "SVAdj";
    case ViForm::Quote: return "QUOTE";
  }
  return "SV";
}

bool operator==(const ViRequest& a, const ViRequest& b) {
  bool inquit_equal = (a.inquit == nullptr) == (b.inquit == nullptr) &&
                      (a.inquit == nullptr || *a.inquit == *b.inquit);
  return a.form == b.form && a.subject == b.subject && a.verb_words == b.verb_words &&
         a.verbs == b.verbs && a.object == b.object && a.adjective == b.adjective &&
         a.scene == b.scene && a.is_question == b.is_question && inquit_equal;
}

ReferenceExpr ReferenceExpr::simple(Article article, std::vector<std::string> words) {
  Term term;
  term.article = article;
  term.words = std::move(words);
  return ReferenceExpr{{ChainRef{{std::move(term)}, {}}}};
}

ReferenceExpr ReferenceExpr::bound_to(InstanceId id) {
  Term term;
  term.bound = id;
  return ReferenceExpr{{ChainRef{{std::move(term)}, {}}}};
}

namespace {

constexpr std::size_t kMaxRelationDepth = 3;

enum class Tok { Word, Slash, DoubleSlash, Plus, Relation, Dot, Question, Comma, Arrow, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  std::size_t column = 0;  // 1-based
};

bool is_word_char(char c) {
  return !std::isspace(static_cast<unsigned char>(c)) && c != '/' && c != '+' && c != '.' &&
         c != '?' && c != ',' && c != '"';
}

std::vector<Token> tokenize(std::string_view s, std::size_t base_column = 0) {
  std::vector<Token> out;
  std::size_t i = 0;
  auto col = [&](std::size_t at) { return base_column + at + 1; };
  while (i < s.size()) {
    char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    std::size_t start = i;
    if (c == '/') {
      if (i + 1 < s.size() && s[i + 1] == '/') {
        out.push_back({Tok::DoubleSlash, "//", col(start)});
        i += 2;
      } else {
        out.push_back({Tok::Slash, "/", col(start)});
        ++i;
      }
    } else if (c == '+') {
      out.push_back({Tok::Plus, "+", col(start)});
      ++i;
    } else if (c == '.') {
      out.push_back({Tok::Dot, ".", col(start)});
      ++i;
    } else if (c == '?') {
      out.push_back({Tok::Question, "?", col(start)});
      ++i;
    } else if (c == ',') {
      out.push_back({Tok::Comma, ",", col(start)});
      ++i;
    } else if (c == '"') {
      auto close = s.find('"', i + 1);
      if (close == std::string_view::npos) throw ParseError(col(start), "unterminated quote");
      if (close == i + 1) throw ParseError(col(start), "empty proper name");
      out.push_back({Tok::Word, std::string(s.substr(i, close - i + 1)), col(start)});
      i = close + 1;
    } else if (c == '-' && i + 1 < s.size() && s[i + 1] == '>') {
      out.push_back({Tok::Arrow, "->", col(start)});
      i += 2;
    } else if (c == '-' && i + 1 < s.size() && s[i + 1] == '-') {
      // Relation infix: `--of--`, `-- of --`.
      i += 2;
      while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
      std::size_t word_start = i;
      while (i < s.size() && is_word_char(s[i]) && !(s[i] == '-' && i + 1 < s.size() &&
                                                     s[i + 1] == '-')) {
        ++i;
      }
      std::string word(s.substr(word_start, i - word_start));
      while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
      if (word.empty() || i + 1 >= s.size() || s[i] != '-' || s[i + 1] != '-') {
        throw ParseError(col(start), "malformed relation, expected --word--");
      }
      i += 2;
      out.push_back({Tok::Relation, word, col(start)});
    } else {
      while (i < s.size() && is_word_char(s[i])) {
        if (s[i] == '-' && i + 1 < s.size() && (s[i + 1] == '-' || s[i + 1] == '>') && i > start) {
          break;
        }
        ++i;
      }
      if (i == start) throw ParseError(col(start), std::string("unexpected character '") + c + "'");
      out.push_back({Tok::Word, std::string(s.substr(start, i - start)), col(start)});
    }
  }
  out.push_back({Tok::End, "", base_column + s.size() + 1});
  return out;
}

using TokenSpan = std::vector<Token>;

std::optional<Article> article_of(std::string_view w) {
  if (w == "the" || w == "The") return Article::The;
  if (w == "a" || w == "A" || w == "an" || w == "An") return Article::A;
  return std::nullopt;
}

void check_concept_word(const Token& t, const Domain& domain) {
  if (Domain::is_quoted(t.text)) return;
  const Word* w = domain.find_word(t.text);
  if (w == nullptr) throw UnknownWordError(t.text, t.column);
  if (w->kind != WordKind::Concept) {
    throw ParseError(t.column, "'" + t.text + "' is a verb, expected a concept word");
  }
}

void check_relation_word(const Token& t, const Domain& domain) {
  if (t.text == "of" || t.text == "in") return;
  const Word* w = domain.find_word(t.text);
  if (w == nullptr) throw UnknownWordError(t.text, t.column);
  bool relation = w->kind == WordKind::Verb &&
                  std::all_of(w->members.begin(), w->members.end(), [&](const auto& m) {
                    return domain.verb_info(m.first).effect == SideEffect::Relation;
                  });
  if (!relation) throw ParseError(t.column, "'" + t.text + "' is not a relation word");
}

Term parse_term(const TokenSpan& toks, const Domain& domain) {
  Term term;
  std::size_t i = 0;
  if (toks.empty()) throw ParseError(0, "empty reference");
  term.column = toks.front().column;
  if (auto art = article_of(toks[0].text); art && toks.size() > 1) {
    term.article = *art;
    i = 1;
  }
  for (; i < toks.size(); ++i) {
    if (toks[i].kind != Tok::Word) {
      throw ParseError(toks[i].column, "unexpected '" + toks[i].text + "' in reference");
    }
    check_concept_word(toks[i], domain);
    term.words.push_back(toks[i].text);
  }
  if (term.words.empty()) throw ParseError(term.column, "reference without attributes");
  return term;
}

ChainRef parse_chain(const TokenSpan& toks, const Domain& domain) {
  ChainRef chain;
  TokenSpan current;
  for (const auto& t : toks) {
    if (t.kind == Tok::Relation) {
      if (current.empty()) throw ParseError(t.column, "relation without a left-hand reference");
      check_relation_word(t, domain);
      chain.terms.push_back(parse_term(current, domain));
      chain.relations.push_back(t.text);
      current.clear();
    } else {
      current.push_back(t);
    }
  }
  if (current.empty()) {
    std::size_t column = toks.empty() ? 0 : toks.back().column;
    throw ParseError(column, "relation without a base reference");
  }
  chain.terms.push_back(parse_term(current, domain));
  if (chain.relations.size() > kMaxRelationDepth) {
    throw ParseError(chain.terms.front().column, "relation chain deeper than 3");
  }
  if (!chain.relations.empty() && chain.terms.front().article == Article::A) {
    throw ParseError(chain.terms.front().column, "a/an reference cannot use a relation chain");
  }
  return chain;
}

ReferenceExpr parse_reference(const TokenSpan& toks, const Domain& domain) {
  ReferenceExpr ref;
  TokenSpan current;
  for (const auto& t : toks) {
    if (t.kind == Tok::Plus) {
      if (current.empty()) throw ParseError(t.column, "'+' without a group member");
      ref.members.push_back(parse_chain(current, domain));
      current.clear();
    } else {
      current.push_back(t);
    }
  }
  if (current.empty()) {
    std::size_t column = toks.empty() ? 0 : toks.back().column;
    throw ParseError(column, toks.empty() ? "empty sentence part" : "'+' without a group member");
  }
  ref.members.push_back(parse_chain(current, domain));
  return ref;
}

std::vector<std::string> parse_verb_words(const TokenSpan& toks, const Domain& domain) {
  std::vector<std::string> words;
  for (const auto& t : toks) {
    if (t.kind != Tok::Word) throw ParseError(t.column, "unexpected '" + t.text + "' in verb");
    const Word* w = domain.find_word(t.text);
    if (w == nullptr) throw UnknownWordError(t.text, t.column);
    if (w->kind != WordKind::Verb) {
      throw ParseError(t.column, "'" + t.text + "' is not a verb word");
    }
    words.push_back(t.text);
  }
  if (words.empty()) throw ParseError(0, "missing verb");
  return words;
}

std::vector<std::string> parse_adjective(const TokenSpan& toks, const Domain& domain) {
  std::vector<std::string> words;
  for (const auto& t : toks) {
    if (t.kind != Tok::Word) throw ParseError(t.column, "unexpected '" + t.text + "' in adjective");
    check_concept_word(t, domain);
    words.push_back(t.text);
  }
  if (words.empty()) throw ParseError(0, "missing adjective");
  return words;
}

std::vector<TokenSpan> split_on(const TokenSpan& toks, Tok separator) {
  std::vector<TokenSpan> parts(1);
  for (const auto& t : toks) {
    if (t.kind == separator) {
      parts.emplace_back();
    } else {
      parts.back().push_back(t);
    }
  }
  return parts;
}

// `toks` excludes the terminator.
ViRequest parse_simple(const TokenSpan& toks, bool question, const Domain& domain) {
  auto parts = split_on(toks, Tok::Slash);
  std::size_t column = toks.empty() ? 1 : toks.front().column;
  if (parts.size() < 2 || parts.size() > 3) {
    throw ParseError(column, "a sentence has 2 or 3 parts separated by '/'");
  }
  ViRequest req;
  req.is_question = question;
  req.subject = parse_reference(parts[0], domain);
  req.verb_words = parse_verb_words(parts[1], domain);
  req.verbs = domain.verb_overlay(req.verb_words);
  SideEffect effect = domain.primary_effect(req.verbs);
  if (effect == SideEffect::Quote) {
    throw ParseError(parts[1].front().column, "quote verb requires 'in <scene> //'");
  }
  bool adjective_verb = effect == SideEffect::IsA || effect == SideEffect::Changes;
  if (parts.size() == 2) {
    if (adjective_verb) throw ParseError(parts[1].front().column, "verb requires an adjective");
    req.form = ViForm::SV;
  } else if (adjective_verb) {
    req.form = ViForm::SVAdj;
    req.adjective = parse_adjective(parts[2], domain);
  } else {
    req.form = ViForm::SVO;
    req.object = parse_reference(parts[2], domain);
  }
  return req;
}

// Everything up to the terminator; returns whether it was '?'.
std::pair<TokenSpan, bool> strip_terminator(const std::vector<Token>& toks) {
  // toks ends with End.
  if (toks.size() < 2) throw ParseError(1, "empty statement");
  const Token& last = toks[toks.size() - 2];
  if (last.kind != Tok::Dot && last.kind != Tok::Question) {
    throw ParseError(last.column + last.text.size(), "statement must end with '.' or '?'");
  }
  TokenSpan body(toks.begin(), toks.end() - 2);
  for (const auto& t : body) {
    if (t.kind == Tok::Dot || t.kind == Tok::Question) {
      throw ParseError(t.column, "terminator inside statement");
    }
    if (t.kind == Tok::Comma || t.kind == Tok::Arrow) {
      throw ParseError(t.column, "unexpected '" + t.text + "'");
    }
  }
  return {body, last.kind == Tok::Question};
}

ViRequest parse_sentence(const std::vector<Token>& toks, const Domain& domain) {
  auto [body, question] = strip_terminator(toks);
  auto quote_at = std::find_if(body.begin(), body.end(),
                               [](const Token& t) { return t.kind == Tok::DoubleSlash; });
  if (quote_at == body.end()) return parse_simple(body, question, domain);

  TokenSpan prefix(body.begin(), quote_at);
  TokenSpan inquit(quote_at + 1, body.end());
  if (std::any_of(inquit.begin(), inquit.end(),
                  [](const Token& t) { return t.kind == Tok::DoubleSlash; })) {
    throw ParseError(quote_at->column, "nested quotes are not supported");
  }
  auto parts = split_on(prefix, Tok::Slash);
  if (parts.size() != 2) throw ParseError(quote_at->column, "quote prefix is 'subject / verb in scene'");
  auto in_at = std::find_if(parts[1].begin(), parts[1].end(),
                            [](const Token& t) { return t.kind == Tok::Word && t.text == "in"; });
  if (in_at == parts[1].end()) throw ParseError(quote_at->column, "quote needs 'in <scene>'");

  ViRequest req;
  req.form = ViForm::Quote;
  req.subject = parse_reference(parts[0], domain);
  req.verb_words = parse_verb_words(TokenSpan(parts[1].begin(), in_at), domain);
  req.verbs = domain.verb_overlay(req.verb_words);
  if (domain.primary_effect(req.verbs) != SideEffect::Quote) {
    throw ParseError(parts[1].front().column, "'//' requires a quote verb");
  }
  req.scene = parse_reference(TokenSpan(in_at + 1, parts[1].end()), domain);
  if (inquit.empty()) throw ParseError(quote_at->column, "missing inquit after '//'");
  req.inquit = std::make_shared<ViRequest>(parse_simple(inquit, question, domain));
  return req;
}

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

MacroRequest parse_macro(std::string_view text, const Domain& domain) {
  // text starts with '$'
  if (text.substr(0, 4) == "$.//") {
    auto toks = tokenize(text.substr(4), 4);
    auto [body, question] = strip_terminator(toks);
    return QuoteContinuationMacro{std::make_shared<ViRequest>(parse_simple(body, question, domain))};
  }
  std::size_t name_end = 1;
  while (name_end < text.size() && std::isalnum(static_cast<unsigned char>(text[name_end]))) {
    ++name_end;
  }
  std::string name(text.substr(0, name_end));
  std::string_view rest = text.substr(name_end);
  std::string args = trim(rest);
  if (!args.empty() && args.back() == '.') args.pop_back();

  if (name == "$Wait") {
    int ticks = 0;
    auto a = trim(args);
    auto [ptr, ec] = std::from_chars(a.data(), a.data() + a.size(), ticks);
    if (ec != std::errc{} || ptr != a.data() + a.size() || ticks < 0) {
      throw ParseError(name_end + 1, "$Wait needs a non-negative tick count");
    }
    return WaitMacro{ticks};
  }
  if (name == "$NewSceneCurrent") {
    auto toks = tokenize(args, name_end + 1);
    toks.pop_back();  // End
    auto fields = split_on(toks, Tok::Comma);
    if (fields.size() < 2) throw ParseError(name_end + 1, "$NewSceneCurrent needs a name and a relation");
    NewSceneMacro macro;
    if (fields[0].size() != 1 || !Domain::is_quoted(fields[0][0].text)) {
      throw ParseError(name_end + 1, "scene name must be a quoted string");
    }
    macro.name = fields[0][0].text.substr(1, fields[0][0].text.size() - 2);
    if (fields[1].size() != 1 || fields[1][0].kind != Tok::Word) {
      throw ParseError(name_end + 1, "expected a scene relation verb or 'none'");
    }
    const Token& rel = fields[1][0];
    if (rel.text != "none") {
      const Word* w = domain.find_word(rel.text);
      if (w == nullptr) throw UnknownWordError(rel.text, rel.column);
      if (w->kind != WordKind::Verb) throw ParseError(rel.column, "scene relation must be a verb");
      macro.relation_word = rel.text;
    }
    for (std::size_t f = 2; f < fields.size(); ++f) {
      const auto& field = fields[f];
      if (field.empty()) throw ParseError(name_end + 1, "empty scene member");
      auto arrow = std::find_if(field.begin(), field.end(),
                                [](const Token& t) { return t.kind == Tok::Arrow; });
      SceneMember member;
      for (auto it = field.begin(); it != arrow; ++it) {
        if (it->kind != Tok::Word) throw ParseError(it->column, "unexpected '" + it->text + "'");
        check_concept_word(*it, domain);
        member.words.push_back(it->text);
      }
      if (member.words.empty()) throw ParseError(field.front().column, "scene member needs attributes");
      if (arrow != field.end()) {
        member.target = parse_reference(TokenSpan(arrow + 1, field.end()), domain);
      }
      macro.members.push_back(std::move(member));
    }
    return macro;
  }
  throw ParseError(1, "unknown macro '" + name + "'");
}

}  // namespace

Statement parse_statement(std::string_view text, const Domain& domain) {
  std::string trimmed = trim(text);
  if (trimmed.empty()) throw ParseError(1, "empty statement");
  if (trimmed.front() == '$') return parse_macro(trimmed, domain);
  return parse_sentence(tokenize(trimmed), domain);
}

ViRequest parse_vi(std::string_view text, const Domain& domain) {
  Statement st = parse_statement(text, domain);
  if (auto* vi = std::get_if<ViRequest>(&st)) return *vi;
  throw ParseError(1, "expected a sentence, got a macro");
}

// --- expansion ---------------------------------------------------------------

namespace {

std::vector<Action> expand(const NewSceneMacro& m, ExpansionContext& ctx) {
  const Domain& domain = ctx.domain();
  InstanceId previous = ctx.current_scene();
  // Targets live in the scene that is current before the macro runs.
  std::vector<std::optional<InstanceId>> targets;
  for (const auto& member : m.members) {
    targets.push_back(member.target ? std::optional(ctx.resolve_now(*member.target)) : std::nullopt);
  }
  std::string label = "\"" + m.name + "\"";
  std::vector<Action> out;
  out.emplace_back(CreateScene{{"scene", label}, true});
  if (!m.relation_word.empty()) {
    ViRequest rel;
    rel.form = ViForm::SVO;
    rel.subject = ReferenceExpr::simple(Article::The, {"scene", label});
    rel.verb_words = {m.relation_word};
    rel.verbs = domain.verb_overlay(rel.verb_words);
    rel.object = ReferenceExpr::bound_to(previous);
    out.emplace_back(std::move(rel));
  }
  std::optional<SymbolId> identity = domain.relation_verb(kIdentityRelation);
  for (std::size_t i = 0; i < m.members.size(); ++i) {
    out.emplace_back(CreateInstance{m.members[i].words});
    if (!targets[i]) continue;
    if (!identity) throw ResolutionError("domain declares no relation:identity verb");
    ViRequest link;
    link.form = ViForm::SVO;
    link.subject = ReferenceExpr::simple(Article::The, m.members[i].words);
    link.verb_words = {domain.verbs().name(*identity)};
    link.verbs = VerbOverlay{{*identity, 1.0}};
    link.object = ReferenceExpr::bound_to(*targets[i]);
    out.emplace_back(std::move(link));
  }
  return out;
}

}  // namespace

std::vector<Action> expand_macro(const MacroRequest& macro, ExpansionContext& ctx) {
  if (const auto* scene = std::get_if<NewSceneMacro>(&macro)) return expand(*scene, ctx);
  if (const auto* wait = std::get_if<WaitMacro>(&macro)) return {Idle{wait->ticks}};
  const auto& cont = std::get<QuoteContinuationMacro>(macro);
  const ViRequest* prefix = ctx.last_quote();
  if (prefix == nullptr) throw ParseError(1, "$.// without a preceding quote statement");
  ViRequest quote;
  quote.form = ViForm::Quote;
  quote.subject = prefix->subject;
  quote.verb_words = prefix->verb_words;
  quote.verbs = prefix->verbs;
  quote.scene = prefix->scene;
  quote.inquit = cont.inquit;
  return {std::move(quote)};
}

// --- story files -------------------------------------------------------------

namespace {

std::string strip_comment(std::string_view line) {
  bool in_quote = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') in_quote = !in_quote;
    if (line[i] == '#' && !in_quote) return std::string(line.substr(0, i));
  }
  return std::string(line);
}

bool continues(const std::string& s) {
  auto ends_with = [&](std::string_view suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
  };
  return ends_with("/") || ends_with(",") || ends_with("--");
}

}  // namespace

std::vector<SourceStatement> split_story(std::string_view text) {
  std::vector<SourceStatement> out;
  std::optional<SourceStatement> pending;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view raw = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    bool comment_only = trim(raw).empty() == false && trim(strip_comment(raw)).empty();
    std::string line = trim(strip_comment(raw));
    if (comment_only) continue;
    if (line.empty()) {
      if (pending) continue;  // blank lines inside a continuation are ignored
      out.push_back({line_no, ""});
      continue;
    }
    if (pending) {
      pending->text += " " + line;
    } else {
      pending = SourceStatement{line_no, line};
    }
    if (!continues(pending->text)) {
      out.push_back(std::move(*pending));
      pending.reset();
    }
  }
  if (pending) out.push_back(std::move(*pending));
  return out;
}

}  // namespace xapagy

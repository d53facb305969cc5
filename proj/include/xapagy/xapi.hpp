#pragma once

// Xapi pidgin: statement syntax tree, parser and macro expansion.
//
//   statement := simple | quote | macro
//   simple    := part "/" part ["/" part] term
//   quote     := part "/" qverb "in" ref "//" simple
//   part      := [article] word+ | refchain | group
//   refchain  := part ("--" word "--" part)+
//   group     := part ("+" part)+
//   term      := "." | "?"
//   macro     := "$" name args

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "xapagy/ids.hpp"
#include "xapagy/knowledge.hpp"

namespace xapagy {

enum class Article { None, A, The };

/// One attribute-based reference: `the big wolf`, `"LRRH"`, `a girl`.
/// A term may instead carry an already resolved instance (macro expansion).
struct Term {
  Article article = Article::None;
  std::vector<std::string> words;
  std::size_t column = 0;
  std::optional<InstanceId> bound;

  friend bool operator==(const Term&, const Term&) = default;
};

/// `terms[0] --relations[0]-- terms[1] --relations[1]-- ...`; the last term
/// is the base, resolved first.
struct ChainRef {
  std::vector<Term> terms;
  std::vector<std::string> relations;

  friend bool operator==(const ChainRef&, const ChainRef&) = default;
};

/// A reference to an instance; two or more members make a group reference.
struct ReferenceExpr {
  std::vector<ChainRef> members;

  bool is_group() const { return members.size() > 1; }
  const Term& head() const { return members.front().terms.front(); }

  static ReferenceExpr simple(Article article, std::vector<std::string> words);
  static ReferenceExpr bound_to(InstanceId id);

  friend bool operator==(const ReferenceExpr&, const ReferenceExpr&) = default;
};

enum class ViForm { SV, SVO, SVAdj, Quote };

std::string_view to_string(ViForm form);

struct ViRequest {
  ViForm form = ViForm::SV;
  ReferenceExpr subject;
  std::vector<std::string> verb_words;
  VerbOverlay verbs;
  std::optional<ReferenceExpr> object;           // SVO
  std::vector<std::string> adjective;            // SVAdj
  std::optional<ReferenceExpr> scene;            // Quote
  std::shared_ptr<const ViRequest> inquit;       // Quote
  bool is_question = false;

  friend bool operator==(const ViRequest& a, const ViRequest& b);
};

struct SceneMember {
  std::vector<std::string> words;  // attributes followed by the quoted label
  std::optional<ReferenceExpr> target;

  friend bool operator==(const SceneMember&, const SceneMember&) = default;
};

/// `$NewSceneCurrent "Name", <relation-verb|none>, member, member ...`
struct NewSceneMacro {
  std::string name;
  std::string relation_word;
  std::vector<SceneMember> members;

  friend bool operator==(const NewSceneMacro&, const NewSceneMacro&) = default;
};

/// `$.// <inquit>`: quote with the previous quote's subject, verb and scene.
struct QuoteContinuationMacro {
  std::shared_ptr<const ViRequest> inquit;

  friend bool operator==(const QuoteContinuationMacro& a, const QuoteContinuationMacro& b) {
    return *a.inquit == *b.inquit;
  }
};

/// `$Wait <n>`: n empty ticks.
struct WaitMacro {
  int ticks = 1;

  friend bool operator==(const WaitMacro&, const WaitMacro&) = default;
};

using MacroRequest = std::variant<NewSceneMacro, QuoteContinuationMacro, WaitMacro>;
using Statement = std::variant<ViRequest, MacroRequest>;

/// Parse one statement. Throws ParseError / UnknownWordError.
Statement parse_statement(std::string_view text, const Domain& domain);

/// Convenience for non-macro statements.
ViRequest parse_vi(std::string_view text, const Domain& domain);

// --- expansion ---------------------------------------------------------------

struct CreateScene {
  std::vector<std::string> words;
  bool make_current = true;
};

struct CreateInstance {
  std::vector<std::string> words;
};

struct Idle {
  int ticks = 1;
};

/// What one statement asks the engine to do, in order.
using Action = std::variant<ViRequest, CreateScene, CreateInstance, Idle>;

/// The agent-side services macro expansion depends on.
class ExpansionContext {
 public:
  virtual ~ExpansionContext() = default;
  virtual InstanceId current_scene() const = 0;
  /// Resolve a definite reference in the current scene without side effects.
  virtual InstanceId resolve_now(const ReferenceExpr& ref) = 0;
  /// Subject/verb/scene of the most recent quote statement, if any.
  virtual const ViRequest* last_quote() const = 0;
  virtual const Domain& domain() const = 0;
};

std::vector<Action> expand_macro(const MacroRequest& macro, ExpansionContext& context);

// --- story files -------------------------------------------------------------

/// One logical statement of a story file. Empty text means an idle tick.
struct SourceStatement {
  std::size_t line = 0;
  std::string text;
};

/// Split a story into statements: strips `#` comments, joins continuation
/// lines (ending in `/`, `//`, `,` or `--`), and maps blank lines to ticks.
std::vector<SourceStatement> split_story(std::string_view text);

}  // namespace xapagy

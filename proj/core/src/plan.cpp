#include "cha/plan.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <optional>
#include <set>

#include "cha/task.hpp"
#include "cha/text.hpp"

namespace cha::plan {

namespace {

enum class Tok { Ident, String, Assign, LParen, RParen, LBracket, RBracket, Comma, Dot, Newline, End };

std::string_view tok_name(Tok t) {
  switch (t) {
    case Tok::Ident: return "identifier";
    case Tok::String: return "string literal";
    case Tok::Assign: return "'='";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::LBracket: return "'['";
    case Tok::RBracket: return "']'";
    case Tok::Comma: return "','";
    case Tok::Dot: return "'.'";
    case Tok::Newline: return "end of line";
    case Tok::End: return "end of input";
  }
  return "?";
}

struct Token {
  Tok kind;
  std::string text;
  int line;
  int column;
};

constexpr std::array<std::string_view, 35> kPythonKeywords = {
    "False", "None",   "True",    "and",      "as",       "assert", "async",
    "await", "break",  "class",   "continue", "def",      "del",    "elif",
    "else",  "except", "finally", "for",      "from",     "global", "if",
    "import", "in",    "is",      "lambda",   "nonlocal", "not",    "or",
    "pass",  "raise",  "return",  "try",      "while",    "with",   "yield"};

bool is_keyword(std::string_view word) {
  return std::find(kPythonKeywords.begin(), kPythonKeywords.end(), word) != kPythonKeywords.end();
}

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (pos_ < src_.size()) {
      const char c = src_[pos_];
      if (c == ' ' || c == '\t' || c == '\r' || c == '\f') {
        advance();
      } else if (c == '#') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else if (c == '\\' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '\n') {
        advance();  // explicit line continuation
        advance();
      } else if (c == '\n') {
        if (depth_ == 0) out.push_back({Tok::Newline, "\n", line_, col_});
        advance();
      } else if (ident_start(c)) {
        const int l = line_, col = col_;
        const std::size_t start = pos_;
        while (pos_ < src_.size() && ident_char(src_[pos_])) advance();
        out.push_back({Tok::Ident, std::string(src_.substr(start, pos_ - start)), l, col});
      } else if (c == '\'' || c == '"') {
        out.push_back(string_literal(c));
      } else {
        const int l = line_, col = col_;
        Tok kind;
        switch (c) {
          case '=': kind = Tok::Assign; break;
          case '(': kind = Tok::LParen; ++depth_; break;
          case ')': kind = Tok::RParen; depth_ = std::max(0, depth_ - 1); break;
          case '[': kind = Tok::LBracket; ++depth_; break;
          case ']': kind = Tok::RBracket; depth_ = std::max(0, depth_ - 1); break;
          case ',': kind = Tok::Comma; break;
          case '.': kind = Tok::Dot; break;
          default: {
            std::string shown = std::isprint(static_cast<unsigned char>(c))
                                    ? std::string(1, c)
                                    : "\\x" + hex64(static_cast<unsigned char>(c)).substr(14);
            throw PlanError(Errc::SyntaxError, "unexpected character '" + shown + "'", l, col,
                            "statement");
          }
        }
        advance();
        out.push_back({kind, std::string(1, c), l, col});
      }
    }
    out.push_back({Tok::End, "", line_, col_});
    return out;
  }

 private:
  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  Token string_literal(char quote) {
    const int l = line_, col = col_;
    advance();
    std::string value;
    while (true) {
      if (pos_ >= src_.size() || src_[pos_] == '\n') {
        throw PlanError(Errc::SyntaxError, "unterminated string literal", l, col,
                        std::string("closing ") + quote);
      }
      const char c = src_[pos_];
      if (c == quote) {
        advance();
        break;
      }
      if (c == '\\' && pos_ + 1 < src_.size() && src_[pos_ + 1] != '\n') {
        const char e = src_[pos_ + 1];
        advance();
        advance();
        switch (e) {
          case 'n': value.push_back('\n'); break;
          case 't': value.push_back('\t'); break;
          case '\\': value.push_back('\\'); break;
          case '\'': value.push_back('\''); break;
          case '"': value.push_back('"'); break;
          default:
            value.push_back('\\');
            value.push_back(e);
        }
        continue;
      }
      value.push_back(c);
      advance();
    }
    return {Tok::String, std::move(value), l, col};
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
  int depth_ = 0;
};

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

  std::vector<Step> run() {
    std::vector<Step> steps;
    while (peek().kind != Tok::End) {
      if (peek().kind == Tok::Newline) {
        ++pos_;
        continue;
      }
      steps.push_back(statement());
      const Token& t = peek();
      if (t.kind != Tok::Newline && t.kind != Tok::End) fail(t, "end of line");
    }
    return steps;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
  }

  [[noreturn]] void fail(const Token& t, std::string_view expected) const {
    std::string got = t.kind == Tok::Ident || t.kind == Tok::String
                          ? std::string(tok_name(t.kind)) + " '" + t.text + "'"
                          : std::string(tok_name(t.kind));
    throw PlanError(Errc::SyntaxError, "expected " + std::string(expected) + ", got " + got,
                    t.line, t.column, std::string(expected));
  }

  const Token& expect(Tok kind, std::string_view expected = {}) {
    const Token& t = peek();
    if (t.kind != kind) fail(t, expected.empty() ? tok_name(kind) : expected);
    ++pos_;
    return t;
  }

  void require_defined(const Token& t) const {
    if (!defined_.contains(t.text)) {
      throw PlanError(Errc::UseBeforeDefine,
                      "variable '" + t.text + "' is used before it is defined on line " +
                          std::to_string(t.line),
                      t.line, t.column);
    }
  }

  Argument argument() {
    const Token& t = peek();
    if (t.kind == Tok::String) {
      ++pos_;
      return StringLiteral{t.text};
    }
    if (t.kind != Tok::Ident) fail(t, "argument (string or variable)");
    ++pos_;
    require_defined(t);
    if (peek().kind == Tok::LBracket) {
      ++pos_;
      const Token& key = expect(Tok::String, "string key");
      expect(Tok::RBracket);
      return FieldRef{t.text, key.text};
    }
    return VariableRef{t.text};
  }

  Action task_call() {
    expect(Tok::Dot);
    const Token& method = expect(Tok::Ident, "'execute_task'");
    if (method.text != "execute_task") fail(method, "'execute_task'");
    expect(Tok::LParen);
    const Token& name = expect(Tok::String, "task name string");
    expect(Tok::Comma);
    expect(Tok::LBracket, "'[' (inputs must be passed as a list)");
    TaskCall call{name.text, {}};
    if (peek().kind != Tok::RBracket) {
      call.args.push_back(argument());
      while (peek().kind == Tok::Comma) {
        ++pos_;
        if (peek().kind == Tok::RBracket) break;  // trailing comma
        call.args.push_back(argument());
      }
    }
    expect(Tok::RBracket, "',' or ']'");
    expect(Tok::RParen);
    return call;
  }

  Step statement() {
    const Token& target = expect(Tok::Ident, "variable name");
    if (is_keyword(target.text)) fail(target, "variable name");
    expect(Tok::Assign);
    const Token& t = peek();
    Step step{target.text, LiteralBind{}, target.line};
    if (t.kind == Tok::String) {
      ++pos_;
      step.action = LiteralBind{t.text};
    } else if (t.kind == Tok::Ident) {
      ++pos_;
      if (t.text == "self" && peek().kind == Tok::Dot) {
        step.action = task_call();
      } else if (peek().kind == Tok::LParen || peek().kind == Tok::Dot) {
        fail(peek(), "end of line (only self.execute_task calls are allowed)");
      } else if (peek().kind == Tok::LBracket) {
        require_defined(t);
        ++pos_;
        const Token& key = expect(Tok::String, "string key");
        expect(Tok::RBracket);
        step.action = FieldExtract{t.text, key.text};
      } else {
        require_defined(t);
        step.action = AliasBind{t.text};
      }
    } else {
      fail(t, "string, variable or self.execute_task call");
    }
    defined_.insert(step.binding);
    return step;
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::set<std::string> defined_;
};

std::string quote(const std::string& s) {
  const bool has_single = s.find('\'') != std::string::npos;
  const bool has_double = s.find('"') != std::string::npos;
  const char q = (has_single && !has_double) ? '"' : '\'';
  std::string out(1, q);
  for (char c : s) {
    if (c == '\\' || c == q) {
      out.push_back('\\');
      out.push_back(c);
    } else if (c == '\n') {
      out += "\\n";
    } else {
      out.push_back(c);
    }
  }
  out.push_back(q);
  return out;
}

std::string render_argument(const Argument& arg) {
  return std::visit(
      [](const auto& a) -> std::string {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, StringLiteral>) {
          return quote(a.value);
        } else if constexpr (std::is_same_v<T, VariableRef>) {
          return a.name;
        } else {
          return a.variable + "[" + quote(a.key) + "]";
        }
      },
      arg);
}

bool only_comments(std::string_view block) {
  for (const auto& line : split_lines(block)) {
    const auto t = trim(line);
    if (!t.empty() && t.front() != '#') return false;
  }
  return true;
}

}  // namespace

PlanError::PlanError(Errc code, const std::string& message, int line, int column,
                     std::string expected, std::ptrdiff_t step)
    : Error(code, line > 0 ? "line " + std::to_string(line) + ", column " +
                                 std::to_string(column) + ": " + message
                           : message),
      line_(line),
      column_(column),
      expected_(std::move(expected)),
      step_(step) {}

std::size_t Plan::task_call_count() const {
  return static_cast<std::size_t>(std::count_if(steps.begin(), steps.end(), [](const Step& s) {
    return std::holds_alternative<TaskCall>(s.action);
  }));
}

std::string extract_code_block(std::string_view llm_output, std::string_view tag) {
  struct Fence {
    std::string tag;
    std::string_view body;
  };
  std::vector<Fence> fences;
  std::size_t pos = 0;
  while (true) {
    const auto open = llm_output.find("```", pos);
    if (open == std::string_view::npos) break;
    auto eol = llm_output.find('\n', open);
    if (eol == std::string_view::npos) eol = llm_output.size();
    std::string fence_tag = to_lower(trim(llm_output.substr(open + 3, eol - open - 3)));
    const std::size_t body_start = std::min(eol + 1, llm_output.size());
    auto close = llm_output.find("```", body_start);
    const std::size_t body_end = close == std::string_view::npos ? llm_output.size() : close;
    fences.push_back({std::move(fence_tag), llm_output.substr(body_start, body_end - body_start)});
    if (close == std::string_view::npos) break;
    pos = close + 3;
  }
  if (fences.empty()) return std::string(trim(llm_output));

  const std::string want = to_lower(tag);
  auto it = std::find_if(fences.begin(), fences.end(), [&](const Fence& f) { return f.tag == want; });
  if (it == fences.end()) {
    it = std::find_if(fences.begin(), fences.end(), [](const Fence& f) { return f.tag.empty(); });
  }
  if (it == fences.end()) it = fences.begin();
  if (only_comments(it->body)) {
    throw PlanError(Errc::EmptyBlock, "the code block contains no statements");
  }
  return std::string(trim(it->body));
}

Plan parse_plan(std::string_view code) {
  Plan plan;
  plan.source_text = std::string(code);
  plan.steps = Parser(Lexer(code).run()).run();
  return plan;
}

Plan validate_plan(Plan plan, const TaskRegistry& registry) {
  std::set<std::string> defined;
  auto check_ref = [&](const std::string& name, const Step& step, std::size_t index) {
    if (!defined.contains(name)) {
      throw PlanError(Errc::UseBeforeDefine, "variable '" + name + "' is used before it is defined",
                      step.line, 0, {}, static_cast<std::ptrdiff_t>(index));
    }
  };
  for (std::size_t i = 0; i < plan.steps.size(); ++i) {
    const Step& step = plan.steps[i];
    if (const auto* call = std::get_if<TaskCall>(&step.action)) {
      const auto* task = registry.find(call->task);
      if (!task) {
        throw PlanError(Errc::UnknownTask,
                        "step " + std::to_string(i) + " calls unknown task '" + call->task + "'",
                        step.line, 0, {}, static_cast<std::ptrdiff_t>(i));
      }
      const std::size_t expected = task->spec.inputs.size();
      if (call->args.size() != expected) {
        throw PlanError(Errc::ArityMismatch,
                        "task '" + call->task + "' expects " + std::to_string(expected) +
                            " input(s), got " + std::to_string(call->args.size()),
                        step.line, 0, {}, static_cast<std::ptrdiff_t>(i));
      }
      for (const auto& arg : call->args) {
        if (const auto* v = std::get_if<VariableRef>(&arg)) check_ref(v->name, step, i);
        if (const auto* f = std::get_if<FieldRef>(&arg)) check_ref(f->variable, step, i);
      }
    } else if (const auto* fx = std::get_if<FieldExtract>(&step.action)) {
      check_ref(fx->source, step, i);
    } else if (const auto* alias = std::get_if<AliasBind>(&step.action)) {
      check_ref(alias->source, step, i);
    }
    defined.insert(step.binding);
  }
  if (!plan.steps.empty() && plan.task_call_count() == 0) {
    throw PlanError(Errc::NoTaskCall, "the plan does not call any task");
  }
  plan.validated = true;
  return plan;
}

std::string render_step(const Step& step) {
  std::string rhs = std::visit(
      [](const auto& a) -> std::string {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, TaskCall>) {
          std::vector<std::string> args;
          for (const auto& arg : a.args) args.push_back(render_argument(arg));
          return "self.execute_task(" + quote(a.task) + ", [" + join(args, ", ") + "])";
        } else if constexpr (std::is_same_v<T, FieldExtract>) {
          return a.source + "[" + quote(a.key) + "]";
        } else if constexpr (std::is_same_v<T, LiteralBind>) {
          return quote(a.value);
        } else {
          return a.source;
        }
      },
      step.action);
  return step.binding + " = " + rhs;
}

std::string render_canonical(const Plan& plan) {
  std::string out;
  for (const auto& step : plan.steps) {
    out += render_step(step);
    out += '\n';
  }
  return out;
}

}  // namespace cha::plan

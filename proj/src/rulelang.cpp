#include "ruleweave/rulelang.hpp"

#include <cctype>
#include <charconv>
#include <cstdlib>

#include "ruleweave/diagnostics.hpp"
#include "ruleweave/value.hpp"

namespace ruleweave {

bool ActionTask::operator==(const ActionTask& o) const { return operations == o.operations; }

const char* to_string(CompareOp op) {
  switch (op) {
    case CompareOp::Eq: return "==";
    case CompareOp::Neq: return "!=";
    case CompareOp::Gt: return ">";
    case CompareOp::Gte: return ">=";
    case CompareOp::Lt: return "<";
    case CompareOp::Lte: return "<=";
  }
  return "?";
}

namespace {

enum class Tok {
  KwRule,
  KwWhen,
  KwNot,
  KwThen,
  KwEnd,
  Ident,
  Number,
  String,
  Op,      // one of the six comparison operators
  Dot,
  LParen,
  RParen,
  Comma,
  LBrace,
  RBrace,
  End,     // end of input
};

const char* tok_name(Tok t) {
  switch (t) {
    case Tok::KwRule: return "'rule'";
    case Tok::KwWhen: return "'when'";
    case Tok::KwNot: return "'not'";
    case Tok::KwThen: return "'then'";
    case Tok::KwEnd: return "'end'";
    case Tok::Ident: return "identifier";
    case Tok::Number: return "number";
    case Tok::String: return "string";
    case Tok::Op: return "comparison operator";
    case Tok::Dot: return "'.'";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::Comma: return "','";
    case Tok::LBrace: return "'{'";
    case Tok::RBrace: return "'}'";
    case Tok::End: return "end of input";
  }
  return "?";
}

struct Token {
  Tok kind;
  std::string text;  // lexeme (string tokens hold the unescaped payload)
  SourcePos pos;
};

// Eager tokenizer: lexical errors surface at the exact offending position
// before any parsing happens.
std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> out;
  std::size_t pos = 0;
  int line = 1, col = 1;

  auto advance = [&] {
    if (text[pos] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
    ++pos;
  };

  while (pos < text.size()) {
    char c = text[pos];
    SourcePos at{line, col};
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance();
      continue;
    }
    if (c == '#') {
      while (pos < text.size() && text[pos] != '\n') advance();
      continue;
    }
    if (c == '\'' || c == '"') {
      char quote = c;
      advance();
      std::string s;
      while (true) {
        if (pos >= text.size() || text[pos] == '\n')
          throw Error(Errc::Syntax, "unterminated string", at);
        char d = text[pos];
        if (d == '\\') {
          advance();
          if (pos >= text.size()) throw Error(Errc::Syntax, "unterminated string", at);
          char e = text[pos];
          if (e != '\\' && e != '\'' && e != '"')
            throw Error(Errc::Syntax, std::string("unknown escape '\\") + e + "'", at);
          s += e;
          advance();
        } else if (d == quote) {
          advance();
          break;
        } else {
          s += d;
          advance();
        }
      }
      out.push_back({Tok::String, std::move(s), at});
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        ((c == '+' || c == '-') && pos + 1 < text.size() &&
         std::isdigit(static_cast<unsigned char>(text[pos + 1])))) {
      std::size_t start = pos;
      if (c == '+' || c == '-') advance();
      while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) advance();
      if (pos < text.size() && text[pos] == '.' && pos + 1 < text.size() &&
          std::isdigit(static_cast<unsigned char>(text[pos + 1]))) {
        advance();
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) advance();
      }
      if (pos < text.size() && (text[pos] == 'e' || text[pos] == 'E')) {
        std::size_t mark = pos;
        advance();
        if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) advance();
        if (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
          while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) advance();
        } else {
          // not an exponent after all ("3end"); rewind
          while (pos > mark) {
            --pos;
            --col;
          }
        }
      }
      out.push_back({Tok::Number, std::string(text.substr(start, pos - start)), at});
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos;
      while (pos < text.size() &&
             (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
        advance();
      std::string word(text.substr(start, pos - start));
      Tok kind = Tok::Ident;
      if (word == "rule") kind = Tok::KwRule;
      else if (word == "when") kind = Tok::KwWhen;
      else if (word == "not") kind = Tok::KwNot;
      else if (word == "then") kind = Tok::KwThen;
      else if (word == "end") kind = Tok::KwEnd;
      out.push_back({kind, std::move(word), at});
      continue;
    }
    switch (c) {
      case '.': out.push_back({Tok::Dot, ".", at}); advance(); continue;
      case '(': out.push_back({Tok::LParen, "(", at}); advance(); continue;
      case ')': out.push_back({Tok::RParen, ")", at}); advance(); continue;
      case ',': out.push_back({Tok::Comma, ",", at}); advance(); continue;
      case '{': out.push_back({Tok::LBrace, "{", at}); advance(); continue;
      case '}': out.push_back({Tok::RBrace, "}", at}); advance(); continue;
      case '=':
        if (pos + 1 < text.size() && text[pos + 1] == '=') {
          out.push_back({Tok::Op, "==", at});
          advance();
          advance();
          continue;
        }
        throw Error(Errc::Syntax, "unexpected '='", at);
      case '!':
        if (pos + 1 < text.size() && text[pos + 1] == '=') {
          out.push_back({Tok::Op, "!=", at});
          advance();
          advance();
          continue;
        }
        throw Error(Errc::Syntax, "unexpected '!'", at);
      case '>':
      case '<': {
        std::string op(1, c);
        advance();
        if (pos < text.size() && text[pos] == '=') {
          op += '=';
          advance();
        }
        out.push_back({Tok::Op, std::move(op), at});
        continue;
      }
      default:
        throw Error(Errc::Syntax, std::string("unexpected character '") + c + "'", at);
    }
  }
  out.push_back({Tok::End, "", {line, col}});
  return out;
}

NumberLit parse_number(const std::string& lexeme, SourcePos at) {
  NumberLit lit;
  bool fractional = lexeme.find_first_of(".eE") != std::string::npos;
  if (!fractional) {
    auto res = std::from_chars(lexeme.data() + (lexeme[0] == '+' ? 1 : 0),
                               lexeme.data() + lexeme.size(), lit.int_value);
    if (res.ec == std::errc() && res.ptr == lexeme.data() + lexeme.size()) {
      lit.is_float = false;
      lit.float_value = static_cast<double>(lit.int_value);
      return lit;
    }
    // out of int64 range; fall through to float
  }
  lit.is_float = true;
  char* end = nullptr;
  lit.float_value = std::strtod(lexeme.c_str(), &end);
  if (end != lexeme.c_str() + lexeme.size())
    throw Error(Errc::Syntax, "bad number '" + lexeme + "'", at);
  return lit;
}

struct Parser {
  std::vector<Token> toks;
  std::size_t at = 0;

  const Token& peek() const { return toks[at]; }

  Token take(Tok want) {
    if (toks[at].kind != want)
      throw Error(Errc::Syntax,
                  std::string("expected ") + tok_name(want) + ", got " + tok_name(toks[at].kind),
                  toks[at].pos);
    return toks[at++];
  }

  bool accept(Tok want) {
    if (toks[at].kind == want) {
      ++at;
      return true;
    }
    return false;
  }

  [[noreturn]] void unexpected(const char* expected) {
    throw Error(Errc::Syntax,
                std::string("expected ") + expected + ", got " + tok_name(peek().kind),
                peek().pos);
  }

  // term: (type '.' attribute) | NUMBER | STRING
  // `type` is greedy: every segment but the last belongs to the class path.
  Term term() {
    const Token& t = peek();
    if (t.kind == Tok::Number) {
      ++at;
      return parse_number(t.text, t.pos);
    }
    if (t.kind == Tok::String) {
      ++at;
      return StringLit{t.text};
    }
    if (t.kind == Tok::Ident) {
      std::vector<std::string> segments;
      segments.push_back(take(Tok::Ident).text);
      while (accept(Tok::Dot)) segments.push_back(take(Tok::Ident).text);
      if (segments.size() < 2)
        throw Error(Errc::Syntax, "attribute reference needs a class path and attribute", t.pos);
      AttributeRef ref;
      ref.attribute = segments.back();
      segments.pop_back();
      for (std::size_t i = 0; i < segments.size(); ++i) {
        if (i) ref.class_path += '.';
        ref.class_path += segments[i];
      }
      return ref;
    }
    unexpected("term (attribute reference, number, or string)");
  }

  CompareOp op() {
    Token t = take(Tok::Op);
    if (t.text == "==") return CompareOp::Eq;
    if (t.text == "!=") return CompareOp::Neq;
    if (t.text == ">") return CompareOp::Gt;
    if (t.text == ">=") return CompareOp::Gte;
    if (t.text == "<") return CompareOp::Lt;
    return CompareOp::Lte;
  }

  Condition condition() {
    take(Tok::KwWhen);
    Condition c;
    c.negated = accept(Tok::KwNot);
    c.left = term();
    c.op = op();
    c.right = term();
    return c;
  }

  // value: STRING | '{' task '}'
  ActionArg value() {
    if (peek().kind == Tok::String) return ActionArg{take(Tok::String).text};
    if (accept(Tok::LBrace)) {
      ActionTask nested = task();
      take(Tok::RBrace);
      return ActionArg{std::move(nested)};
    }
    unexpected("string or '{' task '}'");
  }

  OperationCall operation() {
    OperationCall call;
    call.name = take(Tok::Ident).text;
    take(Tok::LParen);
    if (!accept(Tok::RParen)) {
      call.args.push_back(value());
      while (accept(Tok::Comma)) call.args.push_back(value());
      take(Tok::RParen);
    }
    return call;
  }

  ActionTask task() {
    ActionTask t;
    t.operations.push_back(operation());
    while (accept(Tok::Dot)) t.operations.push_back(operation());
    return t;
  }

  RuleDef rule() {
    take(Tok::KwRule);
    RuleDef def;
    def.name = take(Tok::String).text;
    def.condition = condition();
    take(Tok::KwThen);
    def.action = task();
    take(Tok::KwEnd);
    return def;
  }

  std::vector<RuleDef> rules() {
    std::vector<RuleDef> out;
    while (peek().kind != Tok::End) out.push_back(rule());
    return out;
  }
};

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  out += '"';
  return out;
}

std::string print_number(const NumberLit& n) {
  return n.is_float ? format_float(n.float_value) : std::to_string(n.int_value);
}

std::string print_term(const Term& t) {
  if (const auto* ref = std::get_if<AttributeRef>(&t)) return ref->class_path + "." + ref->attribute;
  if (const auto* num = std::get_if<NumberLit>(&t)) return print_number(*num);
  return quote(std::get<StringLit>(t).text);
}

std::string print_operation(const OperationCall& call) {
  std::string out = call.name + "(";
  for (std::size_t i = 0; i < call.args.size(); ++i) {
    if (i) out += ",";
    if (const auto* s = std::get_if<std::string>(&call.args[i])) {
      out += quote(*s);
    } else {
      out += "{ " + print_task(std::get<ActionTask>(call.args[i])) + " }";
    }
  }
  out += ")";
  return out;
}

}  // namespace

std::string print_task(const ActionTask& task) {
  std::string out;
  for (std::size_t i = 0; i < task.operations.size(); ++i) {
    if (i) out += ".";
    out += print_operation(task.operations[i]);
  }
  return out;
}

std::string print_condition(const Condition& cond) {
  std::string out;
  if (cond.negated) out += "not ";
  out += print_term(cond.left);
  out += ' ';
  out += to_string(cond.op);
  out += ' ';
  out += print_term(cond.right);
  return out;
}

std::vector<RuleDef> parse_rules(std::string_view text) {
  Parser p{tokenize(text)};
  return p.rules();
}

std::string pretty_print(const std::vector<RuleDef>& rules) {
  std::string out;
  for (const auto& rule : rules) {
    out += "rule " + quote(rule.name) + "\nwhen\n    " + print_condition(rule.condition) +
           "\nthen\n";
    for (std::size_t i = 0; i < rule.action.operations.size(); ++i) {
      out += "    ";
      if (i) out += ".";
      out += print_operation(rule.action.operations[i]);
      out += "\n";
    }
    out += "end\n";
  }
  return out;
}

}  // namespace ruleweave

#include "ruleweave/metamodel.hpp"

#include <cctype>
#include <optional>

#include "ruleweave/diagnostics.hpp"

namespace ruleweave {

const AttributeDef* ClassDef::find_attribute(std::string_view name) const {
  for (const auto& a : attributes)
    if (a.name == name) return &a;
  return nullptr;
}

const ReferenceDef* ClassDef::find_reference(std::string_view name) const {
  for (const auto& r : references)
    if (r.name == name) return &r;
  return nullptr;
}

MetaModel::MetaModel(std::vector<ClassDef> classes) : classes_(std::move(classes)) {
  for (std::size_t i = 0; i < classes_.size(); ++i) index_.emplace(classes_[i].qualified_name, i);
}

const ClassDef* MetaModel::lookup_class(std::string_view qualified_name) const {
  auto it = index_.find(std::string(qualified_name));
  return it == index_.end() ? nullptr : &classes_[it->second];
}

namespace {

// Hand-rolled scanner; the syntax is small enough that a token struct with a
// position is all the machinery needed.
struct MmScanner {
  std::string_view text;
  std::size_t pos = 0;
  int line = 1, col = 1;

  void advance() {
    if (text[pos] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
    ++pos;
  }

  void skip_space() {
    while (pos < text.size()) {
      char c = text[pos];
      if (c == '#') {
        while (pos < text.size() && text[pos] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  bool eof() {
    skip_space();
    return pos >= text.size();
  }

  SourcePos here() const { return {line, col}; }

  [[noreturn]] void fail(const std::string& msg) { throw Error(Errc::Syntax, msg, here()); }

  static bool ident_start(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
  }
  static bool ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  }

  std::string ident() {
    skip_space();
    if (pos >= text.size() || !ident_start(text[pos])) fail("expected identifier");
    std::size_t start = pos;
    while (pos < text.size() && ident_char(text[pos])) advance();
    return std::string(text.substr(start, pos - start));
  }

  std::string qname() {
    std::string name = ident();
    while (pos < text.size() && text[pos] == '.') {
      advance();
      name += '.';
      name += ident_no_skip();
    }
    return name;
  }

  std::string ident_no_skip() {
    if (pos >= text.size() || !ident_start(text[pos])) fail("expected identifier");
    std::size_t start = pos;
    while (pos < text.size() && ident_char(text[pos])) advance();
    return std::string(text.substr(start, pos - start));
  }

  void expect(char c) {
    skip_space();
    if (pos >= text.size() || text[pos] != c) fail(std::string("expected '") + c + "'");
    advance();
  }

  bool accept(char c) {
    skip_space();
    if (pos < text.size() && text[pos] == c) {
      advance();
      return true;
    }
    return false;
  }
};

std::optional<ValueKind> kind_from_name(const std::string& s) {
  if (s == "Bool") return ValueKind::Bool;
  if (s == "Int") return ValueKind::Int;
  if (s == "Float") return ValueKind::Float;
  if (s == "String") return ValueKind::String;
  return std::nullopt;
}

}  // namespace

MetaModel parse_metamodel(std::string_view text) {
  MmScanner sc{text};
  std::vector<ClassDef> classes;

  while (!sc.eof()) {
    SourcePos at = sc.here();
    std::string kw = sc.ident();
    if (kw != "class") throw Error(Errc::Syntax, "expected 'class', got '" + kw + "'", at);

    ClassDef cls;
    cls.qualified_name = sc.qname();
    for (const auto& existing : classes)
      if (existing.qualified_name == cls.qualified_name)
        throw Error(Errc::DuplicateClass, cls.qualified_name, at);

    sc.expect('{');
    while (!sc.accept('}')) {
      SourcePos mat = sc.here();
      std::string mkw = sc.ident();
      std::string mname = sc.ident();
      sc.expect(':');
      if (mkw == "att") {
        std::string tname = sc.ident();
        auto kind = kind_from_name(tname);
        if (!kind) throw Error(Errc::Syntax, "unknown attribute type '" + tname + "'", mat);
        if (cls.find_attribute(mname) || cls.find_reference(mname))
          throw Error(Errc::DuplicateMember, cls.qualified_name + "." + mname, mat);
        cls.attributes.push_back({mname, *kind});
      } else if (mkw == "rel") {
        std::string target = sc.qname();
        bool many = sc.accept('*');
        if (cls.find_attribute(mname) || cls.find_reference(mname))
          throw Error(Errc::DuplicateMember, cls.qualified_name + "." + mname, mat);
        cls.references.push_back({mname, target, many});
      } else {
        throw Error(Errc::Syntax, "expected 'att' or 'rel', got '" + mkw + "'", mat);
      }
    }
    classes.push_back(std::move(cls));
  }

  MetaModel mm(std::move(classes));
  for (const auto& cls : mm.classes())
    for (const auto& ref : cls.references)
      if (!mm.lookup_class(ref.target_class))
        throw Error(Errc::UnresolvedTarget,
                    cls.qualified_name + "." + ref.name + " -> " + ref.target_class);
  return mm;
}

std::string pretty_print_metamodel(const MetaModel& mm) {
  std::string out;
  for (const auto& cls : mm.classes()) {
    out += "class " + cls.qualified_name + " {\n";
    for (const auto& a : cls.attributes)
      out += "  att " + a.name + ": " + to_string(a.value_type) + "\n";
    for (const auto& r : cls.references) {
      out += "  rel " + r.name + ": " + r.target_class;
      if (r.many) out += " *";
      out += "\n";
    }
    out += "}\n";
  }
  return out;
}

}  // namespace ruleweave

#pragma once

#include <stdexcept>
#include <string>

namespace ruleweave {

enum class Errc {
  // parsing
  Syntax,
  DuplicateClass,
  DuplicateMember,
  UnresolvedTarget,
  // store
  Precondition,
  UnknownClass,
  UnknownId,
  UnknownAttribute,
  UnknownRelation,
  TypeMismatch,
  ClassMismatch,
  BackendIo,
  Corrupt,
  UseAfterClose,
  PinOverflow,
  CacheExhausted,
  // weaving
  UnknownOperation,
  ArityMismatch,
  ArgKind,
  NotWeavable,
  // runtime
  UnknownAction,
  UnknownCallback,
  DuplicateCallback,
  CascadeDepth,
  EvalError,
};

const char* to_string(Errc code);

struct SourcePos {
  int line = 0;  // 1-based; 0 when not applicable
  int column = 0;
};

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}
  Error(Errc code, const std::string& message, SourcePos pos)
      : std::runtime_error(std::string(to_string(code)) + " at " + std::to_string(pos.line) +
                           ":" + std::to_string(pos.column) + ": " + message),
        code_(code),
        pos_(pos) {}

  Errc code() const { return code_; }
  SourcePos pos() const { return pos_; }

 private:
  Errc code_;
  SourcePos pos_;
};

}  // namespace ruleweave

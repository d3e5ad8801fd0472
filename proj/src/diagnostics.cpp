#include "ruleweave/diagnostics.hpp"

namespace ruleweave {

const char* to_string(Errc code) {
  switch (code) {
    case Errc::Syntax: return "syntax error";
    case Errc::DuplicateClass: return "duplicate class";
    case Errc::DuplicateMember: return "duplicate member";
    case Errc::UnresolvedTarget: return "unresolved reference target";
    case Errc::Precondition: return "precondition violated";
    case Errc::UnknownClass: return "unknown class";
    case Errc::UnknownId: return "unknown node id";
    case Errc::UnknownAttribute: return "undeclared attribute";
    case Errc::UnknownRelation: return "undeclared relation";
    case Errc::TypeMismatch: return "type mismatch";
    case Errc::ClassMismatch: return "class mismatch";
    case Errc::BackendIo: return "backend i/o failure";
    case Errc::Corrupt: return "corrupt record encoding";
    case Errc::UseAfterClose: return "store used after close";
    case Errc::PinOverflow: return "pin count exceeds cache capacity";
    case Errc::CacheExhausted: return "cache exhausted: all resident nodes pinned";
    case Errc::UnknownOperation: return "unknown operation";
    case Errc::ArityMismatch: return "arity mismatch";
    case Errc::ArgKind: return "wrong argument kind";
    case Errc::NotWeavable: return "rule not weavable";
    case Errc::UnknownAction: return "unknown action id";
    case Errc::UnknownCallback: return "unregistered callback";
    case Errc::DuplicateCallback: return "callback already registered";
    case Errc::CascadeDepth: return "trigger cascade depth exceeded";
    case Errc::EvalError: return "evaluation error";
  }
  return "error";
}

}  // namespace ruleweave

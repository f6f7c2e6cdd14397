#pragma once

#include <stdexcept>
#include <string>

namespace pragtune {

// Base class for all library errors.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// ---- design space ----
struct MissingPlaceholder : Error {
  explicit MissingPlaceholder(const std::string& msg) : Error(msg) {}
};
struct UnknownGuardSymbol : Error {
  explicit UnknownGuardSymbol(const std::string& msg) : Error(msg) {}
};
struct GuardParseError : Error {
  explicit GuardParseError(const std::string& msg) : Error(msg) {}
};
struct EmptyDomain : Error {
  explicit EmptyDomain(const std::string& msg) : Error(msg) {}
};
struct UnsupportedKindForBackend : Error {
  explicit UnsupportedKindForBackend(const std::string& msg) : Error(msg) {}
};
struct DuplicateParam : Error {
  explicit DuplicateParam(const std::string& msg) : Error(msg) {}
};
struct DefaultViolatesGuard : Error {
  explicit DefaultViolatesGuard(const std::string& msg) : Error(msg) {}
};
struct UnknownParam : Error {
  explicit UnknownParam(const std::string& msg) : Error(msg) {}
};
struct InvalidPoint : Error {
  explicit InvalidPoint(const std::string& msg) : Error(msg) {}
};
struct SpaceFormatError : Error {
  explicit SpaceFormatError(const std::string& msg) : Error(msg) {}
};

// ---- evaluator ----
struct UnknownLoopAttachment : Error {
  explicit UnknownLoopAttachment(const std::string& msg) : Error(msg) {}
};
struct AdapterSpawnFailure : Error {
  explicit AdapterSpawnFailure(const std::string& msg) : Error(msg) {}
};

// ---- agents ----
struct NoCandidates : Error {
  explicit NoCandidates(const std::string& msg) : Error(msg) {}
};
struct FrozenParam : Error {
  explicit FrozenParam(const std::string& msg) : Error(msg) {}
};
struct MultiParamDiff : Error {
  explicit MultiParamDiff(const std::string& msg) : Error(msg) {}
};
struct TransportError : Error {
  explicit TransportError(const std::string& msg) : Error(msg) {}
};
struct SchemaViolation : Error {
  explicit SchemaViolation(const std::string& msg) : Error(msg) {}
};

// ---- history ----
struct DuplicatePoint : Error {
  DuplicatePoint(const std::string& msg, int existing) : Error(msg), existing_node(existing) {}
  int existing_node;
};
struct PrunedParent : Error {
  explicit PrunedParent(const std::string& msg) : Error(msg) {}
};
struct NoFeasible : Error {
  explicit NoFeasible(const std::string& msg) : Error(msg) {}
};
struct CorruptLog : Error {
  CorruptLog(const std::string& msg, long line_no) : Error(msg), line(line_no) {}
  long line;
};

// ---- explorer / cli ----
struct RootInfeasible : Error {
  explicit RootInfeasible(const std::string& msg) : Error(msg) {}
};
struct BackendFailure : Error {
  explicit BackendFailure(const std::string& msg) : Error(msg) {}
};
struct ConfigError : Error {
  explicit ConfigError(const std::string& msg) : Error(msg) {}
};

}  // namespace pragtune

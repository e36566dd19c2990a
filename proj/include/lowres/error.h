#ifndef LOWRES_ERROR_H_
#define LOWRES_ERROR_H_

#include <stdexcept>
#include <string>

namespace lowres {

// Base class for every error raised by the library. The CLI maps these to
// exit code 2 (runtime) except ConfigError and SchemaViolation (exit 1).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define LOWRES_DEFINE_ERROR(Name)                              \
  class Name : public Error {                                  \
   public:                                                     \
    explicit Name(const std::string& what) : Error(#Name ": " + what) {} \
  }

LOWRES_DEFINE_ERROR(ParseError);
LOWRES_DEFINE_ERROR(EmptyCorpus);
LOWRES_DEFINE_ERROR(InsufficientCandidates);
LOWRES_DEFINE_ERROR(TooFewPairs);
LOWRES_DEFINE_ERROR(DegenerateLabels);
LOWRES_DEFINE_ERROR(EmptyEntityLexicon);
LOWRES_DEFINE_ERROR(InvalidSpan);
LOWRES_DEFINE_ERROR(MissingPlaceholder);
LOWRES_DEFINE_ERROR(EmptyClass);
LOWRES_DEFINE_ERROR(InvalidRange);
LOWRES_DEFINE_ERROR(InvalidArgument);
LOWRES_DEFINE_ERROR(ConfigError);
LOWRES_DEFINE_ERROR(SchemaViolation);

#undef LOWRES_DEFINE_ERROR

// A pipeline stage failed; wraps the underlying error with the stage name.
class StageError : public Error {
 public:
  StageError(const std::string& stage, const std::string& what)
      : Error("stage " + stage + ": " + what), stage_(stage) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

}  // namespace lowres

#endif  // LOWRES_ERROR_H_

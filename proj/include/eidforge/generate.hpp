#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "eidforge/eid.hpp"
#include "eidforge/families.hpp"
#include "eidforge/verify.hpp"

namespace eidforge {

inline constexpr std::string_view kRecordVersion = "eid-1";

enum class OutputForm { Expanded, Chain };
enum class OutputFormat { Text, Latex, Json };

OutputFormat parse_format(std::string_view name);

struct GenerateRequest {
  FamilySpec spec;
  OutputForm output_form = OutputForm::Expanded;
};

/// Resonant l gives potential + degenerate_solution; otherwise the closed
/// iterated form is applied to the seed solution and cross-checked against
/// the loop form and the EID chain. Throws ValidationError for bad specs.
GeneratedProblem generate(const GenerateRequest& req);

/// The two solutions obtained by setting (c1, c2) to (1, 0) and (0, 1).
std::pair<Expr, Expr> basis(const GeneratedProblem& problem);

/// Residual of the problem's solution at sampled parameter values. A
/// symbolic l is drawn with sign `l_sign`.
VerificationReport verify_problem(const GeneratedProblem& problem, const VerifyOptions& opts = {}, int l_sign = 1);

struct ExprText {
  std::string prefix;
  std::string latex;
  friend bool operator==(const ExprText&, const ExprText&) = default;
};

struct OperatorText {
  std::string text;
  std::string latex;
  friend bool operator==(const OperatorText&, const OperatorText&) = default;
};

struct TraceRecord {
  std::string eigenfunction;
  std::string eigenvalue;
  std::string log_derivative;
  std::string new_coeff;
  bool invertible = true;
  friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

struct VerificationSummary {
  double max_residual = 0;
  int points = 0;
  double lo = 0;
  double hi = 0;
  double tolerance = 0;
  bool passed = false;
  friend bool operator==(const VerificationSummary&, const VerificationSummary&) = default;
};

/// Serializable view of a generated problem. The equation is stored as the
/// bracket E of y'' - E y = 0; expressions use the prefix form.
struct ProblemRecord {
  std::string version{kRecordVersion};
  std::string family;
  unsigned n = 0;
  /// a, b, m, l in prefix form; empty for chains built from explicit steps.
  std::vector<std::pair<std::string, std::string>> params;
  std::string seed_form;
  int l_sign = 1;
  bool resonant = false;
  ExprText equation;
  ExprText solution;
  /// Iterated operator and seed, kept for the chain output form.
  std::optional<OperatorText> operator_form;
  std::optional<ExprText> seed;
  std::vector<TraceRecord> trace;
  std::optional<VerificationSummary> verification;
  friend bool operator==(const ProblemRecord&, const ProblemRecord&) = default;
};

ProblemRecord make_record(const GeneratedProblem& problem, const std::optional<GenerateRequest>& req = std::nullopt,
                          const std::optional<VerificationReport>& report = std::nullopt);

std::string to_json(const ProblemRecord& record);
/// Throws ParseError on malformed input or an unknown version.
ProblemRecord record_from_json(std::string_view text);

/// The equation bracket E and the solution of a record.
std::pair<Expr, Expr> record_exprs(const ProblemRecord& record);
VerificationReport verify_record(const ProblemRecord& record, const VerifyOptions& opts = {});

std::string emit(const ProblemRecord& record, OutputFormat format);
std::string emit(const GeneratedProblem& problem, OutputFormat format);

}  // namespace eidforge

#pragma once

#include <map>
#include <string>

namespace fsmforge::agent {

/// Versioned prompt templates with named substitution slots. Bumping a
/// template requires bumping its version tag so transcripts stay
/// attributable.
inline constexpr const char* kPromptVersion = "v1";

inline constexpr const char* kExtractorPrompt = R"(You are the FSMExtractor agent of an FSM code generation pipeline.
Read the design description and produce the finite state machine it describes
as a single JSON document, with fields: name, clock {name, edge}, reset
{name, active, kind}, inputs [{name, width}], outputs [{name, width}],
registers [{name, width, reset}], initial, encoding, states [{name, moore
{output: constant}, transitions [{guard, target, actions {name: expr}}]}].
Guards and action values are expressions over inputs and registers using
! ~ && || ^ == != < > <= >= + - and unsigned decimal constants.
Reply with the JSON document only, no prose and no code fences.

Design description:
{description}
)";

inline constexpr const char* kVerifierPrompt = R"(You are the Verifier agent of an FSM code generation pipeline.
Check whether the JSON FSM below accurately reflects the design description:
every described state, transition, condition, and output behavior must be
present and nothing invented. Reply with exactly one line: either
ACCEPT
or
REJECT: <short reason>

Design description:
{description}

JSON FSM:
{ir}
)";

inline constexpr const char* kTesterPrompt = R"(You are the Tester agent of an FSM code generation pipeline.
Model the design description below, independently of any other attempt, as a
reference finite state machine in the same JSON format used by the pipeline
(fields: name, clock, reset, inputs, outputs, registers, initial, encoding,
states). The reference is simulated against the generated design, so input
and output names and widths must follow the description exactly.
Reply with the JSON document only, no prose and no code fences.

Design description:
{description}
)";

inline constexpr const char* kTesterExternalPrompt = R"(You are the Tester agent of an FSM code generation pipeline.
Write the verification sources for the design described below, as a single
JSON object with three string fields:
  "ref":  the reference model source,
  "test": the stimulus generator source,
  "main": the entry point that instantiates both models, drives identical
          stimuli into them, compares outputs every cycle, prints one
          "TRACE cycle=<n> in.<name>=<v> ... state=<s> reg.<name>=<v> ...
          ref.<name>=<v> ... dut.<name>=<v> ..." line per cycle into a
          bounded queue, and on the first difference prints
          "MISMATCH cycle=<n> signal=<name> expected=<v> actual=<v>" and
          stops.
Reply with the JSON object only.

Design description:
{description}
)";

inline constexpr const char* kJudgerPrompt = R"(You are the Judger agent of an FSM code generation pipeline.
A cycle-accurate comparison of the reference model and the design under test
stopped at a mismatch. Decide where the fault lies using the error trace and
both models. Reply with exactly one line starting with DUT or REFERENCE,
followed by a colon and a short rationale, e.g.
DUT: output inverted in state ON

Error trace:
{trace}

Design under test (JSON FSM):
{ir}

Reference model:
{reference}
)";

inline constexpr const char* kFixerPrompt = R"(You are the Fixer agent of an FSM code generation pipeline.
The artifact below failed; the evidence explains how. Return the complete
corrected artifact in the same format, never a diff or commentary.

Artifact kind: {kind}

Artifact:
{artifact}

Evidence:
{diagnostics}
)";

/// Replaces {slot} markers; unknown markers are left untouched.
std::string render_prompt(const std::string& tmpl,
                          const std::map<std::string, std::string>& slots);

}  // namespace fsmforge::agent

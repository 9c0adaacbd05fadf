#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "wbfuzz/collector.hpp"
#include "wbfuzz/sut.hpp"
#include "wbfuzz/test_program.hpp"

namespace wbfuzz {

enum class ReqFormat { Mixed, NlOnly, CodeOnly, RawImpl };

std::string_view to_string(ReqFormat f);
ReqFormat req_format_from_string(std::string_view s);

// Summarized trigger conditions for one optimization.
struct Requirement {
  std::string opt_id;
  ReqFormat format = ReqFormat::Mixed;
  std::string text;
  std::string produced_by;  // model id or "human"
};

enum class ShotKind { Summarization, Generation };

// One few-shot example. Summarization shots carry (instruction, source,
// requirement); generation shots carry (instruction, requirement, test).
struct FewShotExample {
  ShotKind kind = ShotKind::Summarization;
  std::string instruction;
  std::optional<std::string> opt_source;
  std::optional<Requirement> requirement;
  std::optional<std::string> test;

  static FewShotExample summarization(std::string instruction, std::string source,
                                      Requirement requirement);
  static FewShotExample generation(std::string instruction, Requirement requirement,
                                   std::string test);
};

enum class PromptFamily { Summarize, Generate, Feedback };

std::string_view to_string(PromptFamily f);

struct PromptBundle {
  std::string text;
  std::string target_opt;  // optimization name
  PromptFamily family = PromptFamily::Summarize;
  std::vector<std::string> example_ids;  // feedback example test ids
};

struct ContextOverflow : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Prompt templates with named placeholders. The repository ships them as
// plain text files; the built-in set is the same text compiled in so the
// library works without an assets directory.
struct TemplateSet {
  std::string summarize_instruction;
  std::string summarize_instruction_pattern;  // pattern-matcher variant
  std::string summarize_block;
  std::string generate_instruction;
  std::string generate_block;
  std::string feedback_header;
  std::string feedback_example_block;
  std::string feedback_tail;

  static TemplateSet builtin();
  static TemplateSet load_dir(const std::filesystem::path& dir);
};

struct PromptEngineConfig {
  std::size_t context_budget_chars = 16000;
};

class PromptEngine {
 public:
  explicit PromptEngine(TemplateSet templates = TemplateSet::builtin(),
                        PromptEngineConfig config = {});

  // Fig-4a-style summarization prompt: shots as (I, C, R) triples, then the
  // target with an empty requirement slot. Pattern-matcher targets use the
  // pattern template variant. Overflow drops the target's aux sources first.
  PromptBundle build_summarization_prompt(const Optimization& target,
                                          std::span<const FewShotExample> shots,
                                          const SutDescriptor& descriptor) const;

  // Fig-5a-style generation prompt: shots as (I, R, T) triples, then the
  // target with an empty test slot. Overflow drops shots oldest-first.
  PromptBundle build_generation_prompt(const Requirement& target_req,
                                       std::span<const FewShotExample> shots,
                                       const SutDescriptor& descriptor) const;

  // Fig-6-style feedback prompt: instruction, requirement, then previously
  // triggering programs as examples. Overflow drops the largest example
  // first; at least one example is always kept.
  PromptBundle build_feedback_prompt(const Requirement& target_req,
                                     std::span<const TestProgram> trigger_examples,
                                     const SutDescriptor& descriptor) const;

  const PromptEngineConfig& config() const { return config_; }

 private:
  TemplateSet templates_;
  PromptEngineConfig config_;
};

// WF-NL / WF-Code ablation splits of a mixed requirement text. The prose part
// is everything outside fenced code blocks; the code part is the fenced
// blocks including their fence lines, so the two parts partition the text.
std::string requirement_nl_part(std::string_view mixed);
std::string requirement_code_part(std::string_view mixed);

// Requirement text converted to the requested format. RawImpl callers bypass
// this and use the optimization source directly.
std::string requirement_text_for_format(std::string_view mixed, ReqFormat format);

// The human-written MiniLang seed pair: one summarization shot and one
// generation shot built from the same pass.
std::vector<FewShotExample> builtin_minilang_seeds();

// Seed shot storage (JSON file in the SUT catalog directory).
std::vector<FewShotExample> load_seed_examples(const std::filesystem::path& file);
void write_seed_examples(const std::filesystem::path& file,
                         const std::vector<FewShotExample>& seeds);

}  // namespace wbfuzz

#pragma once

#include <string>
#include <vector>

#include "bento/types.hpp"

namespace bento {

enum class PromptStyle { mmlu, flan };

const char* to_string(PromptStyle s);
PromptStyle prompt_style_from_string(const std::string& s);

/// Task instruction p presented in the prompt header (the MMLU subject line
/// or the FLAN system sentence's exemplar block).
struct PromptTemplate {
  PromptStyle style = PromptStyle::mmlu;
  std::string instruction;
};

struct Exemplar {
  std::string input;
  std::string output;
};

/// Byte-exact prompt construction. The exemplar block and trailing answer
/// cue are fixed per style; rendering is a pure function of its arguments.
std::string build_prompt(const PromptTemplate& tmpl, const std::vector<Exemplar>& exemplars,
                         const std::string& question);

/// Non-strict: the first standalone A-D letter of the response, compared
/// case-insensitively to the gold option letter. Strict: whitespace-trimmed
/// whole-response equality. Unparseable responses score 0.
int score_exact_match(const std::string& response, const std::string& gold, bool strict);

struct PerplexityScore {
  double perplexity = 1.0;
  /// Negated natural log-perplexity (= mean token logprob); larger is better.
  double score = 0.0;
};

PerplexityScore score_perplexity(const std::vector<double>& token_logprobs);

/// Fixed prompt asking for a representativeness ranking over task names.
std::string ranking_prompt(const std::vector<TaskId>& tasks);

/// Parses a numbered-list ranking. Unparsed or missing tasks are appended in
/// the original order with a warning; duplicates keep the first occurrence.
/// A response naming no task at all is an error carrying the raw response.
std::vector<TaskId> parse_ranked_list(const std::string& response,
                                      const std::vector<TaskId>& tasks,
                                      std::vector<std::string>* warnings = nullptr);

}  // namespace bento

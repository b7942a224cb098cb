#include "bento/prompts.hpp"

#include <cctype>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace bento {

const char* to_string(PromptStyle s) { return s == PromptStyle::mmlu ? "mmlu" : "flan"; }

PromptStyle prompt_style_from_string(const std::string& s) {
  if (s == "mmlu") return PromptStyle::mmlu;
  if (s == "flan") return PromptStyle::flan;
  throw std::invalid_argument("unknown prompt style: " + s);
}

std::string build_prompt(const PromptTemplate& tmpl, const std::vector<Exemplar>& exemplars,
                         const std::string& question) {
  std::string out;
  if (tmpl.style == PromptStyle::mmlu) {
    out = "The following are multiple choice questions (with answers) about " +
          tmpl.instruction + ".\n\n";
    for (const auto& ex : exemplars) {
      out += ex.input;
      out += "\nAnswer: ";
      out += ex.output;
      out += "\n\n";
    }
    out += question;
    out += "\nAnswer: ";
  } else {
    out = "You are a helpful AI assistant. Here are some example input-output pairs that "
          "you should follow.\n\n";
    for (const auto& ex : exemplars) {
      out += "Input:\n";
      out += ex.input;
      out += "\nOutput: ";
      out += ex.output;
      out += "\n\n";
    }
    out += "Input:\n";
    out += question;
    out += "\nOutput: ";
  }
  return out;
}

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

}  // namespace

int score_exact_match(const std::string& response, const std::string& gold, bool strict) {
  if (gold.empty()) {
    throw std::invalid_argument("score_exact_match: gold answer is empty");
  }
  if (strict) {
    return trim(response) == trim(gold) ? 1 : 0;
  }
  const std::string gold_trimmed = trim(gold);
  for (std::size_t i = 0; i < response.size(); ++i) {
    const char up = static_cast<char>(std::toupper(static_cast<unsigned char>(response[i])));
    if (up < 'A' || up > 'D') continue;
    const bool left_ok =
        i == 0 || !std::isalnum(static_cast<unsigned char>(response[i - 1]));
    const bool right_ok = i + 1 == response.size() ||
                          !std::isalnum(static_cast<unsigned char>(response[i + 1]));
    if (!left_ok || !right_ok) continue;
    return (gold_trimmed.size() == 1 &&
            std::toupper(static_cast<unsigned char>(gold_trimmed[0])) == up)
               ? 1
               : 0;
  }
  return 0;  // no standalone option letter found
}

PerplexityScore score_perplexity(const std::vector<double>& token_logprobs) {
  if (token_logprobs.empty()) {
    throw std::invalid_argument("score_perplexity: need at least one token logprob");
  }
  double mean = 0.0;
  for (double lp : token_logprobs) mean += lp;
  mean /= static_cast<double>(token_logprobs.size());
  PerplexityScore s;
  s.perplexity = std::exp(-mean);
  s.score = mean;  // -ln(perplexity)
  return s;
}

std::string ranking_prompt(const std::vector<TaskId>& tasks) {
  std::string out =
      "The following tasks make up an evaluation benchmark:\n";
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    out += std::to_string(i + 1);
    out += ". ";
    out += tasks[i];
    out += '\n';
  }
  out += "\nRank all of these tasks from most representative to least representative of "
         "the whole benchmark. Answer with a numbered list of task names, one per line, "
         "and nothing else.\n";
  return out;
}

std::vector<TaskId> parse_ranked_list(const std::string& response,
                                      const std::vector<TaskId>& tasks,
                                      std::vector<std::string>* warnings) {
  std::unordered_map<std::string, std::size_t> known;
  for (std::size_t i = 0; i < tasks.size(); ++i) known.emplace(tasks[i], i);

  std::vector<TaskId> ranked;
  std::set<TaskId> seen;
  std::istringstream in(response);
  std::string line;
  while (std::getline(in, line)) {
    std::string body = trim(line);
    // Strip a leading "12." / "12)" numbering if present.
    std::size_t p = 0;
    while (p < body.size() && std::isdigit(static_cast<unsigned char>(body[p]))) ++p;
    if (p > 0 && p < body.size() && (body[p] == '.' || body[p] == ')')) {
      body = trim(body.substr(p + 1));
    }
    if (body.empty()) continue;
    const auto it = known.find(body);
    if (it == known.end()) continue;  // unrecognized line, ignored
    if (!seen.insert(body).second) {
      if (warnings) warnings->push_back("duplicate task in ranking ignored: " + body);
      continue;
    }
    ranked.push_back(body);
  }

  if (ranked.empty()) {
    throw std::runtime_error("parse_ranked_list: no task names recognized in response: " +
                             response);
  }
  for (const auto& t : tasks) {
    if (!seen.count(t)) {
      if (warnings) warnings->push_back("task missing from ranking, appended: " + t);
      ranked.push_back(t);
    }
  }
  return ranked;
}

}  // namespace bento

#include "bento/collector.hpp"

#include <atomic>
#include <ctime>
#include <exception>
#include <filesystem>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <nlohmann/json.hpp>

#include "bento/csv.hpp"
#include "bento/rng.hpp"

namespace bento {

using nlohmann::json;

const char* to_string(ScoringMode m) {
  switch (m) {
    case ScoringMode::exact_match: return "exact_match";
    case ScoringMode::exact_match_strict: return "exact_match_strict";
    case ScoringMode::perplexity: return "perplexity";
  }
  return "exact_match";
}

ScoringMode scoring_mode_from_string(const std::string& s) {
  if (s == "exact_match") return ScoringMode::exact_match;
  if (s == "exact_match_strict") return ScoringMode::exact_match_strict;
  if (s == "perplexity") return ScoringMode::perplexity;
  throw std::invalid_argument("unknown scoring mode: " + s);
}

namespace {

std::vector<Exemplar> load_examples_jsonl(const std::string& path) {
  std::vector<Exemplar> out;
  std::istringstream in(read_file(path));
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw std::invalid_argument(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
    out.push_back(Exemplar{j.at("input").get<std::string>(), j.at("output").get<std::string>()});
  }
  return out;
}

}  // namespace

std::vector<TaskData> load_task_suite(const std::string& index_path,
                                      const std::string& data_dir) {
  const json index = json::parse(read_file(index_path));
  if (!index.is_array() || index.empty()) {
    throw std::invalid_argument("task index must be a non-empty JSON array: " + index_path);
  }
  std::vector<TaskData> suite;
  for (const auto& entry : index) {
    TaskData t;
    t.id = entry.at("id").get<std::string>();
    t.instruction = entry.value("instruction", t.id);
    const std::string base = data_dir + "/" + t.id;
    t.pool = load_examples_jsonl(base + ".jsonl");
    if (t.pool.empty()) {
      throw std::invalid_argument("task " + t.id + " has an empty example pool");
    }
    if (std::filesystem::exists(base + ".train.jsonl")) {
      t.train = load_examples_jsonl(base + ".train.jsonl");
    }
    suite.push_back(std::move(t));
  }
  std::vector<TaskId> ids;
  ids.reserve(suite.size());
  for (const auto& t : suite) ids.push_back(t.id);
  (void)TaskIndex(ids);  // throws on duplicate or empty ids
  return suite;
}

ExemplarSet sample_exemplars(const TaskData& source, int num_exemplars, std::uint32_t seed,
                             std::vector<std::string>* warnings) {
  if (num_exemplars < 0) {
    throw std::invalid_argument("sample_exemplars: L must be non-negative");
  }
  const auto& pool = source.exemplar_pool();
  auto count = static_cast<std::size_t>(num_exemplars);
  if (pool.size() < count) {
    // Few-shot tasks that ship only a handful of training exemplars use the
    // whole pool.
    if (warnings) {
      warnings->push_back("task " + source.id + ": exemplar pool has " +
                          std::to_string(pool.size()) + " < L = " + std::to_string(count) +
                          ", using the whole pool");
    }
    count = pool.size();
  }
  Rng rng = derive_rng(seed, "exemplars/" + source.id);
  const auto idx = rng.sample_without_replacement(pool.size(), count);
  ExemplarSet out;
  out.source = source.id;
  out.seed = seed;
  for (std::size_t i : idx) out.exemplars.push_back(pool[i]);
  return out;
}

std::vector<std::size_t> sample_questions(const TaskData& target, int cap, std::uint32_t seed) {
  const std::size_t n = target.pool.size();
  if (cap <= 0 || static_cast<std::size_t>(cap) >= n) {
    std::vector<std::size_t> all(n);
    for (std::size_t i = 0; i < n; ++i) all[i] = i;
    return all;
  }
  Rng rng = derive_rng(seed, "questions/" + target.id);
  return rng.sample_without_replacement(n, static_cast<std::size_t>(cap));
}

namespace {

struct ScoredCompletion {
  double score = 0.0;
  bool from_cache = false;
};

ScoredCompletion score_one(const PromptTemplate& tmpl, const ExemplarSet& exemplars,
                           const Exemplar& question, const CollectorOptions& opts,
                           CompletionClient& client, const CompletionCache* cache) {
  const std::string prompt = build_prompt(tmpl, exemplars.exemplars, question.input);
  ScoredCompletion out;

  if (opts.scoring == ScoringMode::perplexity) {
    const std::string key = cache ? CompletionCache::key_for(client.model_id(), "score",
                                                             prompt + '\x1f' + question.output,
                                                             "temperature=0")
                                  : std::string{};
    std::vector<double> logprobs;
    if (cache) {
      if (auto hit = cache->get(key)) {
        logprobs = json::parse(*hit).at("logprobs").get<std::vector<double>>();
        out.from_cache = true;
      }
    }
    if (logprobs.empty()) {
      logprobs = client.continuation_logprobs(prompt, question.output);
      if (cache) {
        json entry;
        entry["logprobs"] = logprobs;
        entry["timestamp"] = std::time(nullptr);
        cache->put(key, entry.dump());
      }
    }
    out.score = score_perplexity(logprobs).score;
    return out;
  }

  const bool strict = opts.scoring == ScoringMode::exact_match_strict;
  const int max_tokens = strict ? opts.max_tokens_freeform : opts.max_tokens_choice;
  const std::string params = "max_tokens=" + std::to_string(max_tokens) + ";temperature=0";
  const std::string key =
      cache ? CompletionCache::key_for(client.model_id(), "chat", prompt, params)
            : std::string{};
  std::string text;
  bool have = false;
  if (cache) {
    if (auto hit = cache->get(key)) {
      text = json::parse(*hit).at("text").get<std::string>();
      have = true;
      out.from_cache = true;
    }
  }
  if (!have) {
    CompletionRequest req;
    req.prompt = prompt;
    req.max_tokens = max_tokens;
    text = client.complete(req);
    if (cache) {
      json entry;
      entry["text"] = text;
      entry["timestamp"] = std::time(nullptr);
      cache->put(key, entry.dump());
    }
  }
  out.score = score_exact_match(text, question.output, strict);
  return out;
}

}  // namespace

CellResult run_transfer_cell(const TaskData& source, const TaskData& target, std::uint32_t seed,
                             const CollectorOptions& opts, CompletionClient& client,
                             const CompletionCache* cache) {
  CellResult result;
  const ExemplarSet exemplars =
      sample_exemplars(source, opts.exemplars_per_prompt, seed, &result.warnings);
  const std::vector<std::size_t> questions =
      sample_questions(target, opts.questions_per_seed, seed);
  const PromptTemplate tmpl{opts.style, source.instruction};

  result.records.resize(questions.size());
  std::vector<char> cached_flags(questions.size(), 0);

  const int workers = std::max(1, opts.in_flight);
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;

  auto worker = [&] {
    for (;;) {
      const std::size_t slot = next.fetch_add(1);
      if (slot >= questions.size()) return;
      try {
        const Exemplar& q = target.pool[questions[slot]];
        const ScoredCompletion scored = score_one(tmpl, exemplars, q, opts, client, cache);
        TransferRecord rec;
        rec.source = source.id;
        rec.target = target.id;
        rec.seed = seed;
        rec.question_id = std::to_string(questions[slot]);
        rec.score = scored.score;
        result.records[slot] = std::move(rec);
        cached_flags[slot] = scored.from_cache ? 1 : 0;
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };

  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  for (char flag : cached_flags) {
    if (flag) {
      ++result.cache_hits;
    } else {
      ++result.requests;
    }
  }
  return result;
}

CellResult run_transfer_eval(const TaskData& source, const TaskData& target,
                             const CollectorOptions& opts, CompletionClient& client,
                             const CompletionCache* cache) {
  CellResult all;
  for (int m = 1; m <= opts.seeds_per_pair; ++m) {
    CellResult cell =
        run_transfer_cell(source, target, static_cast<std::uint32_t>(m), opts, client, cache);
    all.records.insert(all.records.end(), cell.records.begin(), cell.records.end());
    all.requests += cell.requests;
    all.cache_hits += cell.cache_hits;
    all.warnings.insert(all.warnings.end(), cell.warnings.begin(), cell.warnings.end());
  }
  return all;
}

std::vector<TaskId> rank_tasks_by_prompt(const std::vector<TaskId>& tasks,
                                         CompletionClient& client,
                                         std::vector<std::string>* warnings) {
  CompletionRequest req;
  req.prompt = ranking_prompt(tasks);
  req.max_tokens = 2048;
  const std::string response = client.complete(req);
  return parse_ranked_list(response, tasks, warnings);
}

}  // namespace bento

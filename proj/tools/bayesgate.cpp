// bayesgate: comment-spam filter daemon and offline tools.
//
// Subcommands: serve, score, sweep, verify-example, lexicon.
// Exit codes: 0 success, 1 user/input error, 2 storage error, 3 network error.

#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "bayesgate/classifier.hpp"
#include "bayesgate/config.hpp"
#include "bayesgate/evalharness.hpp"
#include "bayesgate/json_io.hpp"
#include "bayesgate/lexicon.hpp"
#include "bayesgate/policy.hpp"
#include "bayesgate/service.hpp"
#include "bayesgate/store.hpp"
#include "bayesgate/textprep.hpp"

namespace {

using namespace bayesgate;

constexpr const char* kSampleComment =
    "yesterday I went to a restaurant it was a bad experience food were "
    "disgusting and also waiters were stupid but the view was not bad";

ModerationService* g_service = nullptr;

void handle_signal(int) {
  if (g_service) g_service->stop();
}

std::string read_file_or_fail(const std::string& path) {
  if (path == "-") {
    std::ostringstream buf;
    buf << std::cin.rdbuf();
    return buf.str();
  }
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// --stats accepts inline JSON ({"total_comments": ...}) or a file path.
CorpusStats parse_stats_arg(const std::string& arg) {
  const std::string text = arg.find('{') == 0 ? arg : read_file_or_fail(arg);
  const auto j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object())
    throw std::runtime_error("stats must be a JSON object");
  CorpusStats stats;
  from_json(j, stats);
  if (stats.spam_labeled > stats.total_comments ||
      stats.with_spam_words > stats.total_comments)
    throw std::runtime_error("inconsistent stats counters");
  return stats;
}

struct ScoringContext {
  CorpusStats stats;
  Lexicon stopword_lexicon = default_stopwords();
  Lexicon spam_lexicon = default_spamwords();
};

// Stats and lexicons come from --stats JSON, from a store, or default to the
// bootstrap values, in that priority order.
ScoringContext scoring_context(const std::string& stats_arg,
                               const std::string& store_path) {
  ScoringContext ctx;
  if (!store_path.empty()) {
    Store store(store_path);
    ctx.stats = store.stats();
    ctx.stopword_lexicon = store.stopwords();
    ctx.spam_lexicon = store.spamwords();
  }
  if (!stats_arg.empty()) ctx.stats = parse_stats_arg(stats_arg);
  return ctx;
}

void print_breakdown(const ScoreBreakdown& b, const FilterConfig& filter) {
  std::cout << "content_tokens: " << b.content_token_count << "\n"
            << "spam_tokens: " << b.spam_token_count << "\n"
            << "likelihood: " << format_score(b.likelihood) << "\n"
            << "prior: " << format_score(b.prior) << "\n"
            << "evidence: " << format_score(b.evidence) << "\n"
            << "score: " << format_score(b.score) << "\n"
            << "verdict: "
            << (classify(b, filter) == Verdict::Spam ? "SPAM" : "HAM") << "\n";
}

int cmd_serve(const std::string& config_path) {
  AppConfig cfg;
  try {
    cfg = load_app_config(config_path);
  } catch (const std::exception& e) {
    std::cerr << "invalid config: " << e.what() << "\n";
    return 1;
  }
  if (const char* token = std::getenv("BAYESGATE_ADMIN_TOKEN"))
    if (*token) cfg.admin_token = token;

  std::optional<Store> store;
  try {
    store.emplace(cfg.storage_path, cfg.filter, cfg.policy);
  } catch (const std::exception& e) {
    std::cerr << "storage error: " << e.what() << "\n";
    return 2;
  }

  ModerationService service(*store, cfg);
  if (!service.bind()) {
    std::cerr << "cannot bind " << cfg.listen_address << "\n";
    return 3;
  }
  g_service = &service;
  std::signal(SIGINT, handle_signal);
  std::signal(SIGTERM, handle_signal);
  std::cerr << "listening on " << cfg.listen_address << ", storage at "
            << cfg.storage_path << "\n";
  service.run();
  g_service = nullptr;
  try {
    store->save_snapshot();
  } catch (const std::exception& e) {
    std::cerr << "snapshot on shutdown failed: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

int cmd_score(const std::string& text_arg, const std::string& file_arg,
              const std::string& stats_arg, const std::string& store_path,
              double threshold) {
  try {
    const std::string text =
        !file_arg.empty() ? read_file_or_fail(file_arg) : text_arg;
    const ScoringContext ctx = scoring_context(stats_arg, store_path);
    const TokenSequence content =
        remove_stopwords(normalize(text), ctx.stopword_lexicon);
    const ScoreBreakdown breakdown =
        score(count_spam_tokens(content, ctx.spam_lexicon), content.size(),
              ctx.stats);
    FilterConfig filter;
    filter.threshold = threshold;
    print_breakdown(breakdown, filter);
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "score failed: " << e.what() << "\n";
    return 1;
  }
}

int cmd_sweep(const std::string& corpus_path, const std::string& stats_arg,
              const std::string& store_path,
              const std::string& thresholds_arg, const std::string& csv_path) {
  try {
    std::vector<double> thresholds;
    std::stringstream ts(thresholds_arg);
    std::string item;
    while (std::getline(ts, item, ','))
      if (!item.empty()) thresholds.push_back(std::stod(item));

    std::ifstream in(corpus_path);
    if (!in) {
      std::cerr << "cannot read corpus: " << corpus_path << "\n";
      return 1;
    }
    const LabeledCorpus corpus = load_corpus_jsonl(in);
    const ScoringContext ctx = scoring_context(stats_arg, store_path);
    const auto rows = sweep(corpus, thresholds, ctx.stats, ctx.stopword_lexicon,
                            ctx.spam_lexicon);
    std::cout << render_table(rows);
    if (!csv_path.empty()) {
      std::ofstream csv(csv_path);
      if (!csv) {
        std::cerr << "cannot write csv: " << csv_path << "\n";
        return 1;
      }
      write_csv(rows, csv);
    }
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "sweep failed: " << e.what() << "\n";
    return 1;
  }
}

// Runs the full pipeline on a fixed sample comment against a fixed corpus
// snapshot and checks every stage against its expected value. Self-contained;
// touches no files and no network.
int cmd_verify_example() {
  const CorpusStats stats{358, 286, 295, 3335};
  const FilterConfig filter;  // threshold 0.35

  struct Check {
    const char* what;
    std::string got;
    std::string want;
  };
  const TokenSequence content =
      remove_stopwords(normalize(kSampleComment), default_stopwords());
  const ScoreBreakdown breakdown = score(
      count_spam_tokens(content, default_spamwords()), content.size(), stats);
  const Verdict verdict = classify(breakdown, filter);

  const Check checks[] = {
      {"content tokens", std::to_string(content.size()), "12"},
      {"spam tokens", std::to_string(breakdown.spam_token_count), "4"},
      {"score", format_score(breakdown.score), "0.323163841808"},
      {"verdict", verdict == Verdict::Ham ? "HAM (posted)" : "SPAM (quarantined)",
       "HAM (posted)"},
  };
  bool pass = true;
  for (const auto& c : checks) {
    const bool ok = c.got == c.want;
    std::cout << c.what << ": " << c.got << (ok ? " [ok]" : " [FAIL]") << "\n";
    if (!ok) {
      std::cerr << "verify-example: " << c.what << " = " << c.got
                << ", expected " << c.want << "\n";
      pass = false;
      break;
    }
  }
  std::cout << "verify-example: " << (pass ? "PASS" : "FAIL") << "\n";
  return pass ? 0 : 1;
}

int cmd_lexicon(const std::string& kind_arg, const std::string& action,
                const std::string& term, const std::string& file,
                const std::string& store_path) {
  const LexiconKind kind = kind_arg == "stopwords" ? LexiconKind::Stopwords
                                                   : LexiconKind::Spamwords;
  try {
    const bool mutating =
        action == "add" || action == "remove" || action == "import";
    if (mutating && store_path.empty()) {
      std::cerr << "lexicon " << action << " needs --store\n";
      return 1;
    }
    std::optional<Store> store;
    if (!store_path.empty()) {
      try {
        store.emplace(store_path);
      } catch (const std::exception& e) {
        std::cerr << "storage error: " << e.what() << "\n";
        return 2;
      }
    }
    const Timestamp now = static_cast<Timestamp>(std::time(nullptr));
    if (action == "add") {
      store->lexicon_add(kind, term, now);
    } else if (action == "remove") {
      store->lexicon_remove(kind, term, now);
    } else if (action == "import") {
      std::ifstream in(file);
      if (!in) {
        std::cerr << "cannot read file: " << file << "\n";
        return 1;
      }
      store->lexicon_add_many(kind, parse_lexicon_lines(in), now);
    }
    const Lexicon lex = store ? store->lexicon(kind)
                              : (kind == LexiconKind::Stopwords
                                     ? default_stopwords()
                                     : default_spamwords());
    if (action == "export") {
      if (file.empty() || file == "-") {
        std::cout << serialize_lexicon_lines(lex);
      } else {
        std::ofstream out(file);
        if (!out) {
          std::cerr << "cannot write file: " << file << "\n";
          return 1;
        }
        out << serialize_lexicon_lines(lex);
      }
      return 0;
    }
    std::cout << serialize_lexicon_lines(lex);
    return 0;
  } catch (const MultiTokenTerm& e) {
    std::cerr << "lexicon " << action << " failed: " << e.what() << "\n";
    return 1;
  } catch (const LexiconParseError& e) {
    std::cerr << "lexicon import failed: " << e.what() << "\n";
    return 1;
  } catch (const StorageFailure& e) {
    std::cerr << "storage error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian comment-spam filter"};
  app.require_subcommand(1);
  // global flags stay usable after the subcommand name
  app.fallthrough();

  std::string store_path;
  std::string config_path;
  if (const char* env = std::getenv("BAYESGATE_CONFIG")) config_path = env;
  app.add_option("--store", store_path, "storage directory");
  app.add_option("--config", config_path, "config file (JSON)");

  auto* serve = app.add_subcommand("serve", "run the moderation service");

  auto* score_cmd = app.add_subcommand("score", "score a single text");
  std::string text_arg, file_arg, stats_arg;
  double threshold = 0.35;
  auto* text_opt = score_cmd->add_option("--text", text_arg, "text to score");
  score_cmd->add_option("--file", file_arg, "read text from file ('-' = stdin)")
      ->excludes(text_opt);
  score_cmd->add_option("--stats", stats_arg, "corpus stats (JSON or file)");
  score_cmd->add_option("--threshold", threshold, "spam threshold");

  auto* sweep_cmd =
      app.add_subcommand("sweep", "threshold sweep over a labeled corpus");
  std::string corpus_path, csv_path;
  std::string thresholds_arg = "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9";
  sweep_cmd->add_option("--corpus", corpus_path, "JSONL corpus file")
      ->required();
  sweep_cmd->add_option("--stats", stats_arg, "corpus stats (JSON or file)");
  sweep_cmd->add_option("--thresholds", thresholds_arg,
                        "comma-separated increasing thresholds");
  sweep_cmd->add_option("--csv", csv_path, "also write rows as CSV");

  auto* verify = app.add_subcommand(
      "verify-example", "check the built-in worked example end to end");

  auto* lexicon_cmd = app.add_subcommand("lexicon", "manage word lists");
  std::string kind_arg, action_arg, term_arg, lex_file;
  lexicon_cmd->add_option("kind", kind_arg, "stopwords|spamwords")
      ->required()
      ->check(CLI::IsMember({"stopwords", "spamwords"}));
  lexicon_cmd->add_option("action", action_arg, "list|add|remove|import|export")
      ->required()
      ->check(CLI::IsMember({"list", "add", "remove", "import", "export"}));
  lexicon_cmd->add_option("term", term_arg, "term (add/remove) or file (import/export)");

  CLI11_PARSE(app, argc, argv);

  if (serve->parsed()) {
    if (config_path.empty()) {
      std::cerr << "serve needs --config (or BAYESGATE_CONFIG)\n";
      return 1;
    }
    return cmd_serve(config_path);
  }
  if (score_cmd->parsed()) {
    if (text_arg.empty() && file_arg.empty()) {
      std::cerr << "score needs --text or --file\n";
      return 1;
    }
    if (!(threshold > 0.0 && threshold < 1.0)) {
      std::cerr << "threshold must lie in (0, 1)\n";
      return 1;
    }
    return cmd_score(text_arg, file_arg, stats_arg, store_path, threshold);
  }
  if (sweep_cmd->parsed())
    return cmd_sweep(corpus_path, stats_arg, store_path, thresholds_arg, csv_path);
  if (verify->parsed()) return cmd_verify_example();
  if (lexicon_cmd->parsed()) {
    if ((action_arg == "add" || action_arg == "remove") && term_arg.empty()) {
      std::cerr << "lexicon " << action_arg << " needs a term\n";
      return 1;
    }
    if (action_arg == "import" && term_arg.empty()) {
      std::cerr << "lexicon import needs a file\n";
      return 1;
    }
    lex_file = term_arg;
    return cmd_lexicon(kind_arg, action_arg, term_arg, lex_file, store_path);
  }
  return 0;
}

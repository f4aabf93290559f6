#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pmikit/analogy.hpp"
#include "pmikit/counts.hpp"
#include "pmikit/embed.hpp"
#include "pmikit/error.hpp"
#include "pmikit/paraphrase.hpp"
#include "pmikit/pmi.hpp"
#include "pmikit/prob.hpp"
#include "pmikit/sgns.hpp"
#include "pmikit/store.hpp"
#include "pmikit/tokenize.hpp"
#include "pmikit/verify.hpp"
#include "pmikit/vocab.hpp"

namespace {

using nlohmann::json;
using namespace pmikit;

constexpr const char* kToolVersion = "pmikit 1.0.0";

json versions_block() {
  return json{{"tool", kToolVersion},
              {"store", kStoreFormatVersion},
              {"matrix", 1},
              {"embeddings", 1}};
}

// Every run leads with the resolved configuration so the output alone
// identifies what produced it.
json report_skeleton(const std::string& command, json config) {
  return json{{"command", command},
              {"config", std::move(config)},
              {"versions", versions_block()}};
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  out += '"';
  return out;
}

std::string fmt(double v, int precision = 17) {
  std::ostringstream os;
  os << std::setprecision(precision) << v;
  return os.str();
}

// CSV output keeps the reproducibility block as comment lines.
void print_csv_preamble(const json& report) {
  std::cout << "# command=" << report.at("command").get<std::string>() << "\n";
  for (const auto& [key, value] : report.at("config").items())
    std::cout << "# " << key << "=" << (value.is_string() ? value.get<std::string>() : value.dump())
              << "\n";
  for (const auto& [key, value] : report.at("versions").items())
    std::cout << "# " << key << "=" << (value.is_string() ? value.get<std::string>() : value.dump())
              << "\n";
}

struct ModelBundle {
  StoreData data;
  ProbabilityModel model;
  explicit ModelBundle(StoreData d) : data(std::move(d)), model(data.counts, data.tokens) {}
};

std::unique_ptr<ModelBundle> open_store(const std::string& dir, bool inject_fault = false) {
  StoreData data = load_store(dir);
  if (inject_fault) inject_pair_count_fault(data.counts);
  return std::make_unique<ModelBundle>(std::move(data));
}

SupportPolicy parse_policy(const std::string& name) {
  if (name == "strict") return SupportPolicy::strict;
  if (name == "clamp0") return SupportPolicy::clamp;
  throw UsageError("unknown policy '" + name + "'; use strict or clamp0");
}

PmiView make_view(const ProbabilityModel& model, double shift_k, const std::string& policy) {
  if (!(shift_k > 0.0)) throw UsageError("--shift-k must be positive (PMI shifts by ln k)");
  return PmiView(model, std::log(shift_k), parse_policy(policy), 0.0);
}

WordId resolve(const Vocabulary& vocab, const std::string& word) {
  if (std::optional<WordId> id = vocab.find(word)) return *id;
  throw VocabularyError("'" + word + "' is not in the vocabulary");
}

// ---------------------------------------------------------------------------
// count

struct CountOpts {
  std::string corpus, store;
  std::string tokenizer = "raw";
  int window = 4;
  int min_count = 1;
  int max_vocab = 0;
  int threads = 1;
  std::string format = "json";
};

int run_count(const CountOpts& o) {
  const TokenizerMode mode =
      o.tokenizer == "raw" ? TokenizerMode::raw : TokenizerMode::pretokenized;
  std::vector<std::string> raw_tokens = tokenize_file(o.corpus, mode);
  Vocabulary vocab = build_vocabulary(raw_tokens, o.min_count, o.max_vocab);
  std::vector<WordId> ids = encode(raw_tokens, vocab);
  WindowConfig cfg;
  cfg.window_radius = o.window;
  cfg.min_count = o.min_count;
  EventCounts counts = count_events(ids, std::move(vocab), cfg, o.threads);
  save_store(o.store, counts, ids, o.tokenizer);

  const double kept = raw_tokens.empty()
                          ? 0.0
                          : static_cast<double>(ids.size()) / static_cast<double>(raw_tokens.size());
  json report = report_skeleton(
      "count", json{{"corpus", o.corpus},
                    {"store", o.store},
                    {"window", o.window},
                    {"min_count", o.min_count},
                    {"max_vocab", o.max_vocab},
                    {"tokenizer", o.tokenizer},
                    {"threads", o.threads}});
  report["result"] = json{{"vocabulary", counts.vocab().size()},
                          {"total_anchors", counts.total_anchors()},
                          {"kept_fraction", kept},
                          {"raw_tokens", raw_tokens.size()}};
  if (o.format == "csv") {
    print_csv_preamble(report);
    std::cout << "key,value\n";
    for (const auto& [key, value] : report["result"].items())
      std::cout << key << "," << (value.is_string() ? value.get<std::string>() : value.dump())
                << "\n";
  } else {
    std::cout << report.dump(2) << "\n";
  }
  return 0;
}

// ---------------------------------------------------------------------------
// verify

struct VerifyOpts {
  std::string store;
  VerifyOptions options;
  bool inject_fault = false;
  std::string format = "json";
};

int run_verify(const VerifyOpts& o) {
  auto bundle = open_store(o.store, o.inject_fault);
  std::vector<CheckResult> results = run_identity_suite(bundle->model, o.options);
  const bool ok = all_pass(results);

  json report = report_skeleton(
      "verify", json{{"store", o.store},
                     {"draws", o.options.draws},
                     {"seed", o.options.seed},
                     {"shift_k", o.options.shift_k},
                     {"bound_identity", o.options.bound_identity},
                     {"bound_cancellation", o.options.bound_cancellation},
                     {"max_set_size", o.options.max_set_size},
                     {"attempts_per_draw", o.options.attempts_per_draw},
                     {"inject_fault", o.inject_fault}});
  json checks = json::array();
  for (const CheckResult& r : results)
    checks.push_back(json{{"check", r.name},
                          {"requested_draws", r.requested_draws},
                          {"draws", r.draws},
                          {"max_residual", r.max_residual},
                          {"bound", r.bound},
                          {"pass", r.pass},
                          {"exhausted", r.exhausted}});
  report["checks"] = checks;
  report["pass"] = ok;

  if (o.format == "csv") {
    print_csv_preamble(report);
    std::cout << "check,requested_draws,draws,max_residual,bound,pass,exhausted\n";
    for (const CheckResult& r : results)
      std::cout << r.name << "," << r.requested_draws << "," << r.draws << ","
                << fmt(r.max_residual) << "," << fmt(r.bound) << "," << (r.pass ? 1 : 0) << ","
                << (r.exhausted ? 1 : 0) << "\n";
  } else {
    std::cout << report.dump(2) << "\n";
  }
  return ok ? 0 : 1;
}

// ---------------------------------------------------------------------------
// decompose

struct DecomposeOpts {
  std::string store;
  std::vector<std::string> words;
  std::string file;
  double shift_k = 1.0;
  std::string policy = "strict";
  bool plot_data = false;
  std::string format = "json";
};

std::vector<std::array<std::string, 4>> read_quadruples(const DecomposeOpts& o) {
  std::vector<std::array<std::string, 4>> quads;
  if (!o.file.empty()) {
    if (!o.words.empty())
      throw UsageError("give a quadruple on the command line or a --file, not both");
    std::ifstream in(o.file);
    if (!in) throw IoError("cannot open quadruple list '" + o.file + "'");
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      std::istringstream ls(line);
      std::vector<std::string> parts;
      for (std::string w; ls >> w;) parts.push_back(w);
      if (parts.empty() || parts[0].starts_with("#")) continue;
      if (parts.size() != 4)
        throw UsageError("line " + std::to_string(lineno) + " of '" + o.file +
                         "' does not hold four words");
      quads.push_back({parts[0], parts[1], parts[2], parts[3]});
    }
    if (quads.empty()) throw UsageError("'" + o.file + "' holds no quadruples");
    return quads;
  }
  if (o.words.size() != 4)
    throw UsageError("an analogy quadruple is four words: a a* b b*");
  quads.push_back({o.words[0], o.words[1], o.words[2], o.words[3]});
  return quads;
}

json norms_json(const Eigen::VectorXd& v) {
  VectorNorms n = norms_of(v);
  return json{{"max_abs", n.max_abs}, {"rms", n.rms}};
}

int run_decompose(const DecomposeOpts& o) {
  auto bundle = open_store(o.store);
  const Vocabulary& vocab = bundle->data.counts.vocab();
  const PmiView view = make_view(bundle->model, o.shift_k, o.policy);
  auto quads = read_quadruples(o);

  std::optional<EmbeddingPair> embeds;
  if (o.plot_data) embeds.emplace(explicit_embeddings(view));

  json report = report_skeleton("decompose", json{{"store", o.store},
                                                  {"shift_k", o.shift_k},
                                                  {"policy", o.policy},
                                                  {"plot_data", o.plot_data}});
  json rows = json::array();
  std::vector<std::vector<PlotPoint>> plots;
  std::vector<AnalogyDecomposition> decomps;
  for (const auto& q : quads) {
    AnalogyDecomposition d =
        analogy_decomposition(view, resolve(vocab, q[0]), resolve(vocab, q[1]),
                              resolve(vocab, q[2]), resolve(vocab, q[3]));
    json row{{"a", q[0]},
             {"astar", q[1]},
             {"b", q[2]},
             {"bstar", q[3]},
             {"support", d.support.size()},
             {"offset", norms_json(d.offset)},
             {"pe", norms_json(d.pe)},
             {"ce", norms_json(d.ce)},
             {"ie", norms_json(d.ie)},
             {"tau_w", d.tau_w},
             {"tau_wstar", d.tau_wstar},
             {"identity_residual", d.identity_residual}};
    if (o.plot_data) {
      std::vector<PlotPoint> pts = analogy_plot_points(*embeds, d);
      json jpts = json::array();
      for (const PlotPoint& p : pts)
        jpts.push_back(json{{"label", p.label}, {"x", p.xyz.x()}, {"y", p.xyz.y()}, {"z", p.xyz.z()}});
      row["plot"] = jpts;
      plots.push_back(std::move(pts));
    }
    rows.push_back(std::move(row));
    decomps.push_back(std::move(d));
  }
  report["quadruples"] = rows;

  if (o.format == "csv") {
    print_csv_preamble(report);
    if (o.plot_data) {
      std::cout << "a,astar,b,bstar,label,x,y,z\n";
      for (std::size_t i = 0; i < plots.size(); ++i)
        for (const PlotPoint& p : plots[i])
          std::cout << csv_field(quads[i][0]) << "," << csv_field(quads[i][1]) << ","
                    << csv_field(quads[i][2]) << "," << csv_field(quads[i][3]) << ","
                    << csv_field(p.label) << "," << fmt(p.xyz.x()) << "," << fmt(p.xyz.y())
                    << "," << fmt(p.xyz.z()) << "\n";
    } else {
      std::cout << "a,astar,b,bstar,support,offset_rms,pe_rms,ce_rms,ie_rms,"
                   "tau_w,tau_wstar,identity_residual\n";
      for (std::size_t i = 0; i < decomps.size(); ++i) {
        const AnalogyDecomposition& d = decomps[i];
        std::cout << csv_field(quads[i][0]) << "," << csv_field(quads[i][1]) << ","
                  << csv_field(quads[i][2]) << "," << csv_field(quads[i][3]) << ","
                  << d.support.size() << "," << fmt(norms_of(d.offset).rms) << ","
                  << fmt(norms_of(d.pe).rms) << "," << fmt(norms_of(d.ce).rms) << ","
                  << fmt(norms_of(d.ie).rms) << "," << fmt(d.tau_w) << "," << fmt(d.tau_wstar)
                  << "," << fmt(d.identity_residual) << "\n";
      }
    }
  } else {
    std::cout << report.dump(2) << "\n";
  }
  return 0;
}

// ---------------------------------------------------------------------------
// hist

struct HistOpts {
  std::string store;
  std::int64_t samples = 10000;
  std::uint64_t seed = 7;
  double shift_k = 1.0;
  std::string format = "json";
};

int run_hist(const HistOpts& o) {
  if (o.samples < 1) throw UsageError("--samples must be a positive count");
  auto bundle = open_store(o.store);
  const EventCounts& counts = bundle->data.counts;
  const WordId n = counts.vocab().size();
  if (counts.pair_total() == 0) throw PositivityError("the store holds no co-occurrences");
  const PmiView view = make_view(bundle->model, o.shift_k, "strict");

  std::mt19937_64 gen(o.seed);
  std::uniform_int_distribution<WordId> pick(0, n - 1);

  std::vector<double> random_pmi;
  random_pmi.reserve(static_cast<std::size_t>(o.samples));
  for (std::int64_t i = 0; i < o.samples; ++i) {
    for (std::int64_t tries = 0;; ++tries) {
      if (tries > 1'000'000)
        throw SearchError("could not sample a defined pair after 1e6 attempts");
      const WordId w = pick(gen);
      const WordId c = pick(gen);
      if (counts.pair_count(w, c) > 0) {
        random_pmi.push_back(view.value_or_throw(w, c));
        break;
      }
    }
  }
  std::vector<double> same_pmi;
  for (WordId w = 0; w < n; ++w)
    if (counts.pair_count(w, w) > 0) same_pmi.push_back(view.value_or_throw(w, w));

  const double bin_width = 0.25;
  std::map<std::int64_t, std::pair<std::int64_t, std::int64_t>> bins;
  for (double v : random_pmi) bins[static_cast<std::int64_t>(std::floor(v / bin_width))].first++;
  for (double v : same_pmi) bins[static_cast<std::int64_t>(std::floor(v / bin_width))].second++;
  auto mean = [](const std::vector<double>& xs) {
    if (xs.empty()) return 0.0;
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
  };

  json report = report_skeleton("hist", json{{"store", o.store},
                                             {"samples", o.samples},
                                             {"seed", o.seed},
                                             {"shift_k", o.shift_k},
                                             {"bin_width", bin_width}});
  json table = json::array();
  for (const auto& [idx, counts_pair] : bins)
    table.push_back(json{{"bin_lo", static_cast<double>(idx) * bin_width},
                         {"random_pair", counts_pair.first},
                         {"same_word", counts_pair.second}});
  report["bins"] = table;
  report["mean_random_pair"] = mean(random_pmi);
  report["mean_same_word"] = mean(same_pmi);
  report["same_word_entries"] = same_pmi.size();

  if (o.format == "csv") {
    print_csv_preamble(report);
    std::cout << "bin_lo,random_pair,same_word\n";
    for (const auto& [idx, counts_pair] : bins)
      std::cout << fmt(static_cast<double>(idx) * bin_width, 6) << "," << counts_pair.first
                << "," << counts_pair.second << "\n";
  } else {
    std::cout << report.dump(2) << "\n";
  }
  return 0;
}

// ---------------------------------------------------------------------------
// query

struct QueryOpts {
  std::string store;
  std::vector<std::string> words;
  std::string embeddings;  // optional pre-trained pair
  std::string method = "explicit";
  int dim = 0;  // 0 = method default
  double gamma = 0.5;
  std::string metric = "cosine";
  int top = 10;
  bool no_exclude = false;
  double shift_k = 1.0;
  std::string policy = "clamp0";
  std::string format = "json";
};

EmbeddingPair build_embeddings(const QueryOpts& o, const PmiView& view, WordId n) {
  if (!o.embeddings.empty()) {
    EmbeddingPair pair = import_embeddings(o.embeddings);
    if (pair.words() != n)
      throw UsageError("embeddings cover " + std::to_string(pair.words()) +
                       " words but the store vocabulary has " + std::to_string(n));
    return pair;
  }
  if (o.method == "explicit") return explicit_embeddings(view);
  if (o.method == "svd") {
    const int d = o.dim > 0 ? std::min<int>(o.dim, n) : std::min<int>(300, n);
    return factorize_svd(pmi_matrix(view), d);
  }
  throw UsageError("query builds explicit or svd embeddings from a store; for sgns, train "
                   "with the embed subcommand and pass --embeddings");
}

int run_query(const QueryOpts& o) {
  if (o.words.size() != 3) throw UsageError("an analogy query is three words: a a* b");
  auto bundle = open_store(o.store);
  const Vocabulary& vocab = bundle->data.counts.vocab();
  const PmiView view = make_view(bundle->model, o.shift_k, o.policy);
  EmbeddingPair embeds = build_embeddings(o, view, vocab.size());

  QueryMetric metric;
  if (o.metric == "cosine")
    metric = QueryMetric::cosine;
  else if (o.metric == "euclidean")
    metric = QueryMetric::euclidean;
  else
    throw UsageError("unknown metric '" + o.metric + "'; use cosine or euclidean");

  QueryResult result =
      analogy_query(embeds, resolve(vocab, o.words[0]), resolve(vocab, o.words[1]),
                    resolve(vocab, o.words[2]), metric, o.top, !o.no_exclude);

  json report = report_skeleton(
      "query", json{{"store", o.store},
                    {"a", o.words[0]},
                    {"astar", o.words[1]},
                    {"b", o.words[2]},
                    {"method", o.embeddings.empty() ? o.method : "file"},
                    {"embeddings", o.embeddings},
                    {"dim", embeds.dim()},
                    {"gamma", o.gamma},
                    {"metric", o.metric},
                    {"top", o.top},
                    {"exclude_query_words", !o.no_exclude},
                    {"shift_k", o.shift_k},
                    {"policy", o.policy}});
  json ranked = json::array();
  for (std::size_t i = 0; i < result.ranked.size(); ++i)
    ranked.push_back(json{{"rank", i + 1},
                          {"word", vocab.word(result.ranked[i].word)},
                          {"score", result.ranked[i].score}});
  report["ranked"] = ranked;

  if (o.format == "csv") {
    print_csv_preamble(report);
    std::cout << "rank,word,score\n";
    for (std::size_t i = 0; i < result.ranked.size(); ++i)
      std::cout << (i + 1) << "," << csv_field(vocab.word(result.ranked[i].word)) << ","
                << fmt(result.ranked[i].score) << "\n";
  } else {
    std::cout << report.dump(2) << "\n";
  }
  return 0;
}

// ---------------------------------------------------------------------------
// matrix

struct MatrixOpts {
  std::string store, out;
  double shift_k = 1.0;
  std::string policy = "clamp0";
  bool table = false;
  std::string format = "json";
};

int run_matrix(const MatrixOpts& o) {
  auto bundle = open_store(o.store);
  const PmiView view = make_view(bundle->model, o.shift_k, o.policy);
  PmiMatrix matrix = pmi_matrix(view);
  if (o.table)
    export_pmi_matrix_csv(o.out, matrix);
  else
    export_pmi_matrix(o.out, matrix);

  json report = report_skeleton("matrix", json{{"store", o.store},
                                               {"out", o.out},
                                               {"shift_k", o.shift_k},
                                               {"policy", o.policy},
                                               {"table", o.table}});
  report["result"] = json{{"n", matrix.values.rows()}, {"coverage", matrix.coverage}};
  if (o.format == "csv") {
    print_csv_preamble(report);
    std::cout << "key,value\nn," << matrix.values.rows() << "\ncoverage,"
              << fmt(matrix.coverage) << "\n";
  } else {
    std::cout << report.dump(2) << "\n";
  }
  return 0;
}

// ---------------------------------------------------------------------------
// embed

struct EmbedOpts {
  std::string store, out;
  std::string method = "svd";
  int dim = 0;  // 0 = method default
  double gamma = 0.5;
  double shift_k = 1.0;
  std::string policy = "clamp0";
  int epochs = 5;
  int negatives = 5;
  double learning_rate = 0.025;
  double unigram_power = 1.0;
  std::uint64_t seed = 1;
  std::string text;  // optional word2vec-style text export
  std::string format = "json";
};

int run_embed(const EmbedOpts& o) {
  auto bundle = open_store(o.store);
  const WordId n = bundle->data.counts.vocab().size();
  std::optional<EmbeddingPair> pair;
  double sgns_loss = 0.0;

  if (o.method == "explicit") {
    const PmiView view = make_view(bundle->model, o.shift_k, o.policy);
    pair.emplace(explicit_embeddings(view));
  } else if (o.method == "svd") {
    const PmiView view = make_view(bundle->model, o.shift_k, o.policy);
    const int d = o.dim > 0 ? std::min<int>(o.dim, n) : std::min<int>(300, n);
    SvdOptions sopt;
    sopt.gamma = o.gamma;
    pair.emplace(factorize_svd(pmi_matrix(view), d, sopt));
  } else if (o.method == "sgns") {
    SgnsConfig cfg;
    cfg.dim = o.dim > 0 ? o.dim : 32;
    cfg.negatives = o.negatives;
    cfg.epochs = o.epochs;
    cfg.learning_rate = o.learning_rate;
    cfg.unigram_power = o.unigram_power;
    cfg.seed = o.seed;
    SgnsTrainer trainer(bundle->data.counts, bundle->data.tokens, cfg);
    for (int e = 0; e < cfg.epochs; ++e) trainer.run_epoch();
    sgns_loss = trainer.last_loss();
    pair.emplace(trainer.embeddings());
  } else {
    throw UsageError("unknown method '" + o.method + "'; use explicit, svd, or sgns");
  }

  export_embeddings(o.out, *pair);
  if (!o.text.empty()) export_word2vec_text(o.text, *pair, bundle->data.counts.vocab());

  json report = report_skeleton(
      "embed", json{{"store", o.store},
                    {"out", o.out},
                    {"method", o.method},
                    {"dim", pair->dim()},
                    {"gamma", o.gamma},
                    {"shift_k", o.shift_k},
                    {"policy", o.policy},
                    {"epochs", o.epochs},
                    {"negatives", o.negatives},
                    {"learning_rate", o.learning_rate},
                    {"unigram_power", o.unigram_power},
                    {"seed", o.seed},
                    {"text", o.text}});
  report["result"] = json{{"dim", pair->dim()}, {"words", pair->words()}};
  if (o.method == "sgns") report["result"]["mean_loss"] = sgns_loss;
  if (o.format == "csv") {
    print_csv_preamble(report);
    std::cout << "key,value\ndim," << pair->dim() << "\nwords," << pair->words() << "\n";
  } else {
    std::cout << report.dump(2) << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pointwise mutual information toolkit: count co-occurrences, verify the "
               "paraphrase and analogy identities, decompose analogies, and query embeddings"};
  app.require_subcommand(1);

  CountOpts count_opts;
  auto* count_cmd = app.add_subcommand("count", "Count window events and persist a store");
  count_cmd->add_option("--corpus", count_opts.corpus, "Corpus text file")->required();
  count_cmd->add_option("--store", count_opts.store, "Store directory to write")->required();
  count_cmd->add_option("--window", count_opts.window, "Window radius l");
  count_cmd->add_option("--min-count", count_opts.min_count, "Minimum token frequency");
  count_cmd->add_option("--max-vocab", count_opts.max_vocab, "Keep only the most frequent words (0 = all)");
  count_cmd->add_option("--tokenizer", count_opts.tokenizer, "Tokenizer mode")
      ->check(CLI::IsMember({"raw", "pretok"}));
  count_cmd->add_option("--threads", count_opts.threads, "Counting threads");
  count_cmd->add_option("--format", count_opts.format)->check(CLI::IsMember({"json", "csv"}));

  VerifyOpts verify_opts;
  auto* verify_cmd = app.add_subcommand("verify", "Run the randomized identity suite");
  verify_cmd->add_option("--store", verify_opts.store, "Store directory")->required();
  verify_cmd->add_option("--draws", verify_opts.options.draws, "Draws per check");
  verify_cmd->add_option("--seed", verify_opts.options.seed, "Sampling seed");
  verify_cmd->add_option("--shift-k", verify_opts.options.shift_k, "Shift base for the shift laws");
  verify_cmd->add_option("--max-set-size", verify_opts.options.max_set_size, "Largest sampled word set");
  verify_cmd->add_option("--attempts", verify_opts.options.attempts_per_draw,
                         "Rejection attempts per draw");
  verify_cmd->add_option("--bound-identity", verify_opts.options.bound_identity,
                         "Residual bound for the identities");
  verify_cmd->add_option("--bound-cancellation", verify_opts.options.bound_cancellation,
                         "Residual bound for the exact laws");
  verify_cmd->add_flag("--inject-fault", verify_opts.inject_fault,
                       "Corrupt pair counts after loading (test only)");
  verify_cmd->add_option("--format", verify_opts.format)->check(CLI::IsMember({"json", "csv"}));

  DecomposeOpts dec_opts;
  auto* dec_cmd = app.add_subcommand("decompose", "Decompose analogies into PE, CE, and IE");
  dec_cmd->add_option("--store", dec_opts.store, "Store directory")->required();
  dec_cmd->add_option("words", dec_opts.words, "Quadruple: a a* b b*")->expected(-1);
  dec_cmd->add_option("--file", dec_opts.file, "File with one quadruple per line");
  dec_cmd->add_option("--shift-k", dec_opts.shift_k, "PMI shift base");
  dec_cmd->add_option("--policy", dec_opts.policy)->check(CLI::IsMember({"strict", "clamp0"}));
  dec_cmd->add_flag("--plot-data", dec_opts.plot_data,
                    "Add projected component points (explicit embeddings)");
  dec_cmd->add_option("--format", dec_opts.format)->check(CLI::IsMember({"json", "csv"}));

  HistOpts hist_opts;
  auto* hist_cmd = app.add_subcommand("hist", "Histogram PMI of random pairs and the diagonal");
  hist_cmd->add_option("--store", hist_opts.store, "Store directory")->required();
  hist_cmd->add_option("--samples", hist_opts.samples, "Random defined pairs to draw");
  hist_cmd->add_option("--seed", hist_opts.seed, "Sampling seed");
  hist_cmd->add_option("--shift-k", hist_opts.shift_k, "PMI shift base");
  hist_cmd->add_option("--format", hist_opts.format)->check(CLI::IsMember({"json", "csv"}));

  QueryOpts query_opts;
  auto* query_cmd = app.add_subcommand("query", "Complete an analogy a : a* :: b : ?");
  query_cmd->add_option("--store", query_opts.store, "Store directory")->required();
  query_cmd->add_option("words", query_opts.words, "Triple: a a* b")->expected(-1);
  query_cmd->add_option("--embeddings", query_opts.embeddings, "Pre-built embedding file");
  query_cmd->add_option("--method", query_opts.method)->check(CLI::IsMember({"explicit", "svd", "sgns"}));
  query_cmd->add_option("--dim", query_opts.dim, "Embedding dimension (0 = method default)");
  query_cmd->add_option("--gamma", query_opts.gamma, "SVD singular-value split");
  query_cmd->add_option("--metric", query_opts.metric)->check(CLI::IsMember({"cosine", "euclidean"}));
  query_cmd->add_option("--top", query_opts.top, "Completions to return");
  query_cmd->add_flag("--no-exclude", query_opts.no_exclude, "Keep the query words in the ranking");
  query_cmd->add_option("--shift-k", query_opts.shift_k, "PMI shift base");
  query_cmd->add_option("--policy", query_opts.policy)->check(CLI::IsMember({"strict", "clamp0"}));
  query_cmd->add_option("--format", query_opts.format)->check(CLI::IsMember({"json", "csv"}));

  MatrixOpts matrix_opts;
  auto* matrix_cmd = app.add_subcommand("matrix", "Export the dense PMI matrix");
  matrix_cmd->add_option("--store", matrix_opts.store, "Store directory")->required();
  matrix_cmd->add_option("--out", matrix_opts.out, "Output file")->required();
  matrix_cmd->add_option("--shift-k", matrix_opts.shift_k, "PMI shift base");
  matrix_cmd->add_option("--policy", matrix_opts.policy)->check(CLI::IsMember({"strict", "clamp0"}));
  matrix_cmd->add_flag("--table", matrix_opts.table, "Write a CSV table instead of binary");
  matrix_cmd->add_option("--format", matrix_opts.format)->check(CLI::IsMember({"json", "csv"}));

  EmbedOpts embed_opts;
  auto* embed_cmd = app.add_subcommand("embed", "Build and export an embedding pair");
  embed_cmd->add_option("--store", embed_opts.store, "Store directory")->required();
  embed_cmd->add_option("--out", embed_opts.out, "Output embedding file")->required();
  embed_cmd->add_option("--method", embed_opts.method)->check(CLI::IsMember({"explicit", "svd", "sgns"}));
  embed_cmd->add_option("--dim", embed_opts.dim, "Embedding dimension (0 = method default)");
  embed_cmd->add_option("--gamma", embed_opts.gamma, "SVD singular-value split");
  embed_cmd->add_option("--shift-k", embed_opts.shift_k, "PMI shift base");
  embed_cmd->add_option("--policy", embed_opts.policy)->check(CLI::IsMember({"strict", "clamp0"}));
  embed_cmd->add_option("--epochs", embed_opts.epochs, "SGNS epochs");
  embed_cmd->add_option("--negatives", embed_opts.negatives, "SGNS negative samples");
  embed_cmd->add_option("--learning-rate", embed_opts.learning_rate, "SGNS initial learning rate");
  embed_cmd->add_option("--unigram-power", embed_opts.unigram_power, "SGNS negative-table exponent");
  embed_cmd->add_option("--seed", embed_opts.seed, "SGNS seed");
  embed_cmd->add_option("--text", embed_opts.text, "Also write word2vec-style text here");
  embed_cmd->add_option("--format", embed_opts.format)->check(CLI::IsMember({"json", "csv"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (count_cmd->parsed()) return run_count(count_opts);
    if (verify_cmd->parsed()) return run_verify(verify_opts);
    if (dec_cmd->parsed()) return run_decompose(dec_opts);
    if (hist_cmd->parsed()) return run_hist(hist_opts);
    if (query_cmd->parsed()) return run_query(query_opts);
    if (matrix_cmd->parsed()) return run_matrix(matrix_opts);
    if (embed_cmd->parsed()) return run_embed(embed_opts);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 70;
  }
  return 2;
}

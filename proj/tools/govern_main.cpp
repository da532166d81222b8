// Copyright 2026  The govern-distill Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// govern: command-line front end for ensemble distillation experiments.
//
// Exit codes: 0 success, 1 runtime or data error, 2 usage error.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "govern/core.hpp"
#include "govern/ensemble.hpp"
#include "govern/metrics.hpp"
#include "govern/montecarlo.hpp"
#include "govern/student.hpp"
#include "govern/training.hpp"
#include "run_config.hpp"

namespace govern::cli {
namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

std::vector<double> parse_list(const std::string& text, const std::string& what) {
  try {
    return parse_real_list(text, what);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
}

std::vector<int> parse_int_list(const std::string& text, const std::string& what) {
  std::vector<int> out;
  for (double v : parse_list(text, what)) {
    if (v != static_cast<double>(static_cast<int>(v))) throw UsageError(what + " must be integers");
    out.push_back(static_cast<int>(v));
  }
  return out;
}

BetaSpec parse_beta(const std::string& text, const std::string& what) {
  const auto v = parse_list(text, what);
  if (v.size() != 2) throw UsageError(what + " expects 'alpha,beta'");
  try {
    return BetaSpec(v[0], v[1]);
  } catch (const Error& e) {
    throw UsageError(what + ": " + e.what());
  }
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  return out;
}

/// Writes a key=value report to `path`, or stdout when `path` is empty.
void emit(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
  } else {
    auto out = open_output(path);
    out << text;
  }
}

void write_histogram(const std::string& path, const Histogram& hist) {
  auto out = open_output(path);
  for (std::size_t i = 0; i < kHistogramBins; ++i) {
    out << format_real((static_cast<double>(i) + 0.5) / kHistogramBins) << '\t' << hist[i] << '\n';
  }
}

unsigned default_threads() { return 1; }

// Settings shared by distill and train.
struct TrainingArgs {
  std::string data;
  std::string dev;
  std::string output;
  std::string log;
  std::string init_model;
  std::string hidden = "16";
  std::string loss;
  std::uint64_t seed = 0;
  TrainConfig config;
};

void add_training_options(CLI::App* cmd, TrainingArgs& a, const char* default_loss) {
  a.loss = default_loss;
  cmd->add_option("--data", a.data, "Training dataset");
  cmd->add_option("--dev", a.dev, "Labeled dev set for per-epoch checkpoint selection");
  cmd->add_option("--output", a.output, "Where to write the trained model");
  cmd->add_option("--log", a.log, "Per-epoch CSV log (epoch,mean_loss,dev_prauc,skipped)");
  cmd->add_option("--init-model", a.init_model, "Start from this model instead of a fresh one");
  cmd->add_option("--hidden", a.hidden, "Comma-separated hidden layer sizes for a fresh model");
  cmd->add_option("--seed", a.seed, "Seed for initialization and shuffling (required)");
  cmd->add_option("--learning-rate", a.config.learning_rate);
  cmd->add_option("--batch-size", a.config.batch_size);
  cmd->add_option("--epochs", a.config.epochs);
  cmd->add_option("--warmup-steps", a.config.warmup_steps);
  cmd->add_option("--adam-beta1", a.config.adam_beta1);
  cmd->add_option("--adam-beta2", a.config.adam_beta2);
  cmd->add_option("--adam-epsilon", a.config.adam_epsilon);
  cmd->add_option("--loss", a.loss, "mse or cross-entropy");
  cmd->add_option("--threads", a.config.threads, "Worker cap; never changes results")->envname("GOVERN_THREADS");
}

void require(const CLI::App& cmd, const std::string& value, const char* flag) {
  if (value.empty()) throw UsageError(cmd.get_name() + ": " + flag + " is required");
}

void require_seed(const CLI::App& cmd) {
  if (cmd.get_option("--seed")->count() == 0) {
    throw UsageError(cmd.get_name() + ": --seed is required for stochastic commands");
  }
}

StudentModel starting_model(const TrainingArgs& a, const Dataset& data) {
  if (!a.init_model.empty()) return load_model(a.init_model);
  std::vector<int> sizes{static_cast<int>(data.feature_dim())};
  if (!a.hidden.empty() && a.hidden != "none") {
    for (int h : parse_int_list(a.hidden, "--hidden")) sizes.push_back(h);
  }
  sizes.push_back(1);
  try {
    return init_model(sizes, a.seed);
  } catch (const Error& e) {
    throw UsageError(std::string("--hidden: ") + e.what());
  }
}

void finish_training(const TrainingArgs& a, const TrainingResult& result) {
  save_model(result.model, a.output);
  if (!a.log.empty()) {
    auto out = open_output(a.log);
    write_training_log(out, result.log);
  }
}

struct Command {
  CLI::App* app;
  std::string path;
  std::function<void()> run;
  /// Primary output file; a manifest is written next to it by default.
  std::function<std::string()> output;
};

class Cli {
 public:
  Cli() : app_("Multi-teacher ensemble distillation toolkit", "govern") {
    app_.require_subcommand(1);
    app_.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast)->always_capture_default();
    add_synthesize();
    add_ensemble();
    add_lr_fit();
    add_distill();
    add_train();
    add_evaluate();
    add_simulate();
    add_gsb();
  }

  int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    try {
      parse(args);
      const Command* cmd = selected();
      if (cmd == nullptr) throw UsageError("no command given");
      if (!config_path_.empty()) {
        // Re-parse with the file's settings placed before the command line
        // so that explicit flags win.
        const auto tokens = config_tokens(*cmd->app, read_run_config(config_path_));
        args.insert(args.begin() + static_cast<std::ptrdiff_t>(command_end(*cmd, args)), tokens.begin(),
                    tokens.end());
        config_path_.clear();
        app_.clear();
        parse(args);
      }
      cmd->run();
      write_manifest(*cmd);
      return 0;
    } catch (const CLI::CallForHelp&) {
      std::cout << current_help();
      return 0;
    } catch (const CLI::ParseError& e) {
      std::cerr << "govern: " << e.what() << "\nRun with --help for more information.\n";
      return kExitUsage;
    } catch (const UsageError& e) {
      std::cerr << "govern: " << e.what() << "\nRun with --help for more information.\n";
      return kExitUsage;
    } catch (const std::exception& e) {
      std::cerr << "govern: error: " << e.what() << '\n';
      return kExitRuntime;
    }
  }

 private:
  void parse(std::vector<std::string> args) {
    std::reverse(args.begin(), args.end());
    app_.parse(args);
  }

  const Command* selected() const {
    const Command* best = nullptr;
    for (const auto& c : commands_) {
      if (c.app->parsed() && (!best || c.path.size() > best->path.size())) best = &c;
    }
    return best;
  }

  // Index just past the command-path tokens in `args`.
  static std::size_t command_end(const Command& c, const std::vector<std::string>& args) {
    std::istringstream names(c.path);
    std::string name;
    std::size_t pos = 0;
    while (names >> name) {
      while (pos < args.size() && args[pos] != name) ++pos;
      ++pos;
    }
    return std::min(pos, args.size());
  }

  std::string current_help() const {
    for (auto* sub : app_.get_subcommands()) {
      for (auto* leaf : sub->get_subcommands()) return leaf->help();
      return sub->help();
    }
    return app_.help();
  }

  void write_manifest(const Command& cmd) {
    std::string path = manifest_path_;
    if (path.empty() && cmd.output) {
      const std::string out = cmd.output();
      if (!out.empty()) path = out + ".manifest";
    }
    if (path.empty()) return;
    emit(path, render_manifest(*cmd.app, cmd.path));
  }

  CLI::App* add_command(CLI::App* parent, const std::string& name, const std::string& description) {
    CLI::App* cmd = parent->add_subcommand(name, description);
    cmd->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast)->always_capture_default();
    cmd->add_option("--config", config_path_, "Read settings from a 'key = value' file");
    cmd->add_option("--manifest", manifest_path_, "Where to write the resolved settings");
    return cmd;
  }

  void add_synthesize() {
    auto* cmd = add_command(&app_, "synthesize", "Generate a synthetic teacher-scored corpus");
    auto& a = synth_;
    cmd->add_option("--questions", a.config.n_questions);
    cmd->add_option("--paragraphs", a.config.paragraphs_per_question);
    cmd->add_option("--features", a.config.feature_dim);
    cmd->add_option("--flip-rates", a.flip_rates, "Comma-separated flip rate per teacher");
    cmd->add_option("--positive-beta", a.positive, "alpha,beta of scores for a seen positive");
    cmd->add_option("--negative-beta", a.negative, "alpha,beta of scores for a seen negative");
    cmd->add_option("--label-sharpness", a.config.label_sharpness);
    cmd->add_option("--label-offset", a.config.label_offset);
    cmd->add_option("--seed", a.config.seed, "(required)");
    cmd->add_option("--output", a.output, "Training split (the whole corpus if no other split)");
    cmd->add_option("--dev-output", a.dev_output);
    cmd->add_option("--dev-questions", a.dev_questions);
    cmd->add_option("--test-output", a.test_output);
    cmd->add_option("--test-questions", a.test_questions);
    cmd->add_flag("--unlabeled", a.unlabeled, "Write the training split without labels");
    commands_.push_back({cmd, "synthesize", [this, cmd] { run_synthesize(*cmd); }, [this] { return synth_.output; }});
  }

  void run_synthesize(const CLI::App& cmd) {
    auto& a = synth_;
    require(cmd, a.output, "--output");
    require_seed(cmd);
    const BetaSpec pos = parse_beta(a.positive, "--positive-beta");
    const BetaSpec neg = parse_beta(a.negative, "--negative-beta");
    a.config.teachers.clear();
    for (double f : parse_list(a.flip_rates, "--flip-rates")) a.config.teachers.push_back({f, pos, neg});
    if (a.dev_questions > 0 && a.dev_output.empty()) throw UsageError("--dev-questions needs --dev-output");
    if (a.test_questions > 0 && a.test_output.empty()) throw UsageError("--test-questions needs --test-output");
    if (a.dev_questions + a.test_questions >= a.config.n_questions) {
      throw UsageError("dev and test splits leave no training questions");
    }
    const Dataset all = synthesize_dataset(a.config);
    const std::size_t ppq = a.config.paragraphs_per_question;
    const std::size_t train_q = a.config.n_questions - a.dev_questions - a.test_questions;
    auto split = [&](std::size_t first_q, std::size_t count, bool drop_labels) {
      std::vector<SampleRecord> recs(all.records().begin() + static_cast<std::ptrdiff_t>(first_q * ppq),
                                     all.records().begin() + static_cast<std::ptrdiff_t>((first_q + count) * ppq));
      if (drop_labels) {
        for (auto& r : recs) r.label.reset();
      }
      return Dataset(std::move(recs));
    };
    save_dataset(a.output, split(0, train_q, a.unlabeled));
    if (a.dev_questions > 0) save_dataset(a.dev_output, split(train_q, a.dev_questions, false));
    if (a.test_questions > 0) {
      save_dataset(a.test_output, split(train_q + a.dev_questions, a.test_questions, false));
    }
  }

  void add_ensemble() {
    auto* cmd = add_command(&app_, "ensemble", "Write per-record combiner targets");
    auto& a = ens_;
    cmd->add_option("--data", a.data);
    cmd->add_option("--strategy", a.strategy, "mean, lr, govern, govern-ca or camkd");
    cmd->add_option("--student-model", a.student_model, "Student whose scores GOVERN votes against");
    cmd->add_option("--lr-weights", a.lr_weights, "Weights from lr-fit (lr strategy)");
    cmd->add_option("--output", a.output);
    commands_.push_back({cmd, "ensemble", [this, cmd] { run_ensemble(*cmd); }, [this] { return ens_.output; }});
  }

  void run_ensemble(const CLI::App& cmd) {
    auto& a = ens_;
    require(cmd, a.data, "--data");
    require(cmd, a.output, "--output");
    Combiner combiner{parse_strategy(a.strategy), std::nullopt};
    if (combiner.needs_student() && a.student_model.empty()) {
      throw UsageError("strategy " + a.strategy + " needs --student-model");
    }
    if (combiner.strategy == Strategy::LRWeighted) {
      if (a.lr_weights.empty()) throw UsageError("strategy lr needs --lr-weights");
      combiner.lr_weights = load_lr_weights(a.lr_weights);
    }
    const Dataset data = load_dataset(a.data);
    check_combiner(combiner, data);
    std::vector<double> student(data.size(), 0.5);
    if (combiner.needs_student()) student = predict(load_model(a.student_model), data);

    std::ostringstream out;
    for (std::size_t i = 0; i < data.size(); ++i) {
      const auto& r = data[i];
      const EnsembleTarget t = combine(combiner, Score(student[i]), r);
      out << r.question_id << '\t' << r.paragraph_id << '\t' << (t.skipped ? "-" : format_real(t.target.value()))
          << '\t' << (t.skipped ? 1 : 0) << '\t';
      for (std::size_t k = 0; k < t.weights.size(); ++k) out << (k ? "," : "") << format_real(t.weights[k]);
      out << '\n';
    }
    emit(a.output, out.str());
  }

  void add_lr_fit() {
    auto* cmd = add_command(&app_, "lr-fit", "Fit logistic-regression teacher weights on a dev set");
    auto& a = lr_;
    cmd->add_option("--dev", a.dev);
    cmd->add_option("--output", a.output);
    cmd->add_option("--learning-rate", a.config.learning_rate);
    cmd->add_option("--max-iterations", a.config.max_iterations);
    cmd->add_option("--tolerance", a.config.tolerance);
    commands_.push_back({cmd, "lr-fit", [this, cmd] { run_lr_fit(*cmd); }, [this] { return lr_.output; }});
  }

  void run_lr_fit(const CLI::App& cmd) {
    require(cmd, lr_.dev, "--dev");
    require(cmd, lr_.output, "--output");
    save_lr_weights(lr_.output, lr_fit(load_dataset(lr_.dev), lr_.config));
  }

  void add_distill() {
    auto* cmd = add_command(&app_, "distill", "Distill a student onto combiner targets (MSE)");
    add_training_options(cmd, distill_.train, "mse");
    cmd->add_option("--strategy", distill_.strategy, "mean, lr, govern, govern-ca or camkd");
    cmd->add_option("--lr-weights", distill_.lr_weights, "Weights from lr-fit (lr strategy)");
    commands_.push_back({cmd, "distill", [this, cmd] { run_distill(*cmd); }, [this] { return distill_.train.output; }});
  }

  void run_distill(const CLI::App& cmd) {
    auto& a = distill_.train;
    require(cmd, a.data, "--data");
    require(cmd, a.output, "--output");
    require_seed(cmd);
    a.config.seed = a.seed;
    a.config.loss = parse_loss_kind(a.loss);
    a.config.validate();
    Combiner combiner{parse_strategy(distill_.strategy), std::nullopt};
    if (combiner.strategy == Strategy::LRWeighted) {
      if (distill_.lr_weights.empty()) throw UsageError("strategy lr needs --lr-weights");
      combiner.lr_weights = load_lr_weights(distill_.lr_weights);
    }
    const Dataset data = load_dataset(a.data);
    const std::optional<Dataset> dev = a.dev.empty() ? std::nullopt : std::optional(load_dataset(a.dev));
    finish_training(a, distill(starting_model(a, data), data, combiner, a.config, dev ? &*dev : nullptr));
  }

  void add_train() {
    auto* cmd = add_command(&app_, "train", "Supervised training on labels");
    add_training_options(cmd, train_, "cross-entropy");
    commands_.push_back({cmd, "train", [this, cmd] { run_train(*cmd); }, [this] { return train_.output; }});
  }

  void run_train(const CLI::App& cmd) {
    auto& a = train_;
    require(cmd, a.data, "--data");
    require(cmd, a.output, "--output");
    require_seed(cmd);
    a.config.seed = a.seed;
    a.config.loss = parse_loss_kind(a.loss);
    a.config.validate();
    const Dataset data = load_dataset(a.data);
    const std::optional<Dataset> dev = a.dev.empty() ? std::nullopt : std::optional(load_dataset(a.dev));
    finish_training(a, train_supervised(starting_model(a, data), data, a.config, dev ? &*dev : nullptr));
  }

  void add_evaluate() {
    auto* cmd = add_command(&app_, "evaluate", "Recall at 90% precision and PR-AUC of a scorer");
    auto& a = eval_;
    cmd->add_option("--data", a.data, "Labeled dataset");
    cmd->add_option("--model", a.model, "Score with this student model");
    cmd->add_option("--teacher", a.teacher, "Score with this teacher column (0-based)");
    cmd->add_option("--precision", a.precision, "Precision floor for the recall metrics");
    cmd->add_option("--output", a.output, "Report file (stdout if omitted)");
    commands_.push_back({cmd, "evaluate", [this, cmd] { run_evaluate(*cmd); }, [this] { return eval_.output; }});
  }

  void run_evaluate(const CLI::App& cmd) {
    auto& a = eval_;
    require(cmd, a.data, "--data");
    const bool by_teacher = cmd.get_option("--teacher")->count() > 0;
    if (a.model.empty() == !by_teacher) throw UsageError("evaluate needs exactly one of --model or --teacher");
    if (!(a.precision > 0.0 && a.precision <= 1.0)) throw UsageError("--precision must lie in (0,1]");
    const Dataset data = load_dataset(a.data);
    std::vector<double> scores;
    if (by_teacher) {
      if (a.teacher >= data.teacher_count()) throw UsageError("--teacher index out of range");
      for (const auto& r : data.records()) scores.push_back(r.teacher_scores[a.teacher].value());
    } else {
      scores = predict(load_model(a.model), data);
    }
    const auto pairs = make_scored_pairs(data, scores);
    const PRCurve qp = qp_pr_curve(pairs);
    const PRCurve q = q_pr_curve(pairs);
    std::map<std::string, bool> answerable;
    std::size_t positives = 0;
    for (const auto& p : pairs) {
      answerable[p.question_id] = answerable[p.question_id] || is_positive(p.label);
      positives += is_positive(p.label) ? 1 : 0;
    }
    std::size_t answerable_count = 0;
    for (const auto& [id, has] : answerable) answerable_count += has ? 1 : 0;

    // Key suffix names the precision floor in percent, e.g. r_at_p90.
    const std::string floor = "r_at_p" + format_real(std::round(a.precision * 1e6) / 1e4);
    std::ostringstream out;
    out << "# prauc uses step interpolation (average precision)\n"
        << "qp_" << floor << '=' << format_real(recall_at_precision(qp, a.precision)) << '\n'
        << "q_" << floor << '=' << format_real(recall_at_precision(q, a.precision)) << '\n'
        << "qp_prauc=" << format_real(pr_auc(qp)) << '\n'
        << "q_prauc=" << format_real(pr_auc(q)) << '\n'
        << "counts=pairs:" << pairs.size() << ",positive_pairs:" << positives
        << ",questions:" << answerable.size() << ",answerable_questions:" << answerable_count << '\n';
    emit(a.output, out.str());
  }

  void add_simulate() {
    auto* sim = app_.add_subcommand("simulate", "Voting and ensemble statistics");
    sim->require_subcommand(1);

    auto* cond = add_command(sim, "condorcet", "Majority-vote accuracy of n voters");
    auto& c = cond_;
    cond->add_option("--p", c.p, "Single-voter accuracy");
    cond->add_option("--n", c.n, "Odd number of voters");
    cond->add_flag("--exact", c.exact, "Closed-form binomial sum instead of Monte-Carlo");
    cond->add_option("--trials", c.trials);
    cond->add_option("--seed", c.seed, "(required unless --exact)");
    cond->add_option("--threads", c.threads)->envname("GOVERN_THREADS");
    cond->add_option("--output", c.output, "Report file (stdout if omitted)");
    commands_.push_back({cond, "simulate condorcet", [this, cond] { run_condorcet(*cond); }, [this] { return cond_.output; }});

    auto* beta = add_command(sim, "beta", "Beta sampler moments against closed forms");
    auto& b = beta_;
    beta->add_option("--alpha", b.alpha);
    beta->add_option("--beta", b.beta);
    beta->add_option("--n", b.n, "Ensemble size for the closed-form mean-ensemble moments");
    beta->add_option("--trials", b.trials);
    beta->add_option("--seed", b.seed, "(required)");
    beta->add_option("--threads", b.threads)->envname("GOVERN_THREADS");
    beta->add_option("--histogram", b.histogram, "Write a 100-bin histogram of the draws");
    beta->add_option("--output", b.output, "Report file (stdout if omitted)");
    commands_.push_back({beta, "simulate beta", [this, beta] { run_beta(*beta); }, [this] { return beta_.output; }});

    auto* ens = add_command(sim, "ensemble-sim", "Single teacher vs mean vs GOVERN targets under Beta scores");
    auto& e = sim_;
    ens->add_option("--student-beta", e.student, "alpha,beta of the student score");
    ens->add_option("--teacher-beta", e.teacher, "alpha,beta of every teacher score");
    ens->add_option("--teachers", e.teachers);
    ens->add_option("--trials", e.trials);
    ens->add_option("--seed", e.seed, "(required)");
    ens->add_option("--threads", e.threads)->envname("GOVERN_THREADS");
    ens->add_option("--histogram", e.histogram, "Prefix for per-strategy 100-bin histograms");
    ens->add_option("--output", e.output, "Report file (stdout if omitted)");
    commands_.push_back({ens, "simulate ensemble-sim", [this, ens] { run_sim_ensemble(*ens); }, [this] { return sim_.output; }});
  }

  void run_condorcet(const CLI::App& cmd) {
    auto& c = cond_;
    std::ostringstream out;
    if (c.exact) {
      out << "p0=" << format_real(condorcet_exact(c.p, c.n)) << '\n';
    } else {
      require_seed(cmd);
      out << "p0=" << format_real(condorcet_mc(c.p, c.n, c.trials, c.seed, c.threads)) << '\n'
          << "trials=" << c.trials << '\n';
    }
    emit(c.output, out.str());
  }

  void run_beta(const CLI::App& cmd) {
    auto& b = beta_;
    require_seed(cmd);
    const BetaSpec spec(b.alpha, b.beta);
    Histogram hist{};
    const Moments sample = beta_sample_moments(spec, b.trials, b.seed, b.threads, &hist);
    const Moments closed = beta_mean_ensemble_moments(spec, b.n);
    std::ostringstream out;
    out << "sample_mean=" << format_real(sample.mean) << '\n'
        << "sample_variance=" << format_real(sample.variance) << '\n'
        << "analytic_mean=" << format_real(spec.mean()) << '\n'
        << "analytic_variance=" << format_real(spec.variance()) << '\n'
        << "mean_ensemble_n=" << b.n << '\n'
        << "mean_ensemble_variance=" << format_real(closed.variance) << '\n'
        << "trials=" << b.trials << '\n';
    emit(b.output, out.str());
    if (!b.histogram.empty()) write_histogram(b.histogram, hist);
  }

  void run_sim_ensemble(const CLI::App& cmd) {
    auto& e = sim_;
    require_seed(cmd);
    const BetaSpec student = parse_beta(e.student, "--student-beta");
    const BetaSpec teacher = parse_beta(e.teacher, "--teacher-beta");
    if (e.teachers < 1) throw UsageError("--teachers must be positive");
    const std::vector<BetaSpec> teachers(e.teachers, teacher);
    std::vector<Histogram> hists;
    const auto results =
        run_ensemble_sim(student, teachers, e.trials, e.seed, e.threads, e.histogram.empty() ? nullptr : &hists);
    const Moments closed = beta_mean_ensemble_moments(teacher, e.teachers);
    std::ostringstream out;
    for (const auto& r : results) {
      out << to_string(r.strategy) << "_mean=" << format_real(r.mean) << '\n'
          << to_string(r.strategy) << "_variance=" << format_real(r.variance) << '\n';
    }
    out << "analytic_mean_ensemble_mean=" << format_real(closed.mean) << '\n'
        << "analytic_mean_ensemble_variance=" << format_real(closed.variance) << '\n'
        << "trials=" << e.trials << '\n';
    emit(e.output, out.str());
    if (!e.histogram.empty()) {
      for (std::size_t k = 0; k < results.size(); ++k) {
        write_histogram(e.histogram + "." + std::string(to_string(results[k].strategy)) + ".tsv", hists[k]);
      }
    }
  }

  void add_gsb() {
    auto* cmd = add_command(&app_, "gsb", "Side-by-side delta from Good/Same/Bad counts");
    cmd->add_option("good", gsb_.good)->required();
    cmd->add_option("same", gsb_.same)->required();
    cmd->add_option("bad", gsb_.bad)->required();
    commands_.push_back({cmd, "gsb", [this] { std::cout << "delta_gsb=" << format_real(gsb_delta(gsb_)) << '\n'; }, {}});
  }

  CLI::App app_;
  std::vector<Command> commands_;
  std::string config_path_;
  std::string manifest_path_;

  struct SynthArgs {
    SynthConfig config{2000, 10, 8, {}, 0, 3.0, 0.0};
    std::string flip_rates = "0.02,0.045,0.07,0.095,0.12,0.145,0.17,0.195,0.22,0.25";
    std::string positive = "20,2";
    std::string negative = "2,20";
    std::string output;
    std::string dev_output;
    std::size_t dev_questions = 0;
    std::string test_output;
    std::size_t test_questions = 0;
    bool unlabeled = false;
  } synth_;

  struct EnsembleArgs {
    std::string data;
    std::string strategy = "mean";
    std::string student_model;
    std::string lr_weights;
    std::string output;
  } ens_;

  struct LrArgs {
    std::string dev;
    std::string output;
    LRFitConfig config;
  } lr_;

  struct DistillArgs {
    TrainingArgs train;
    std::string strategy = "govern";
    std::string lr_weights;
  } distill_;

  TrainingArgs train_;

  struct EvalArgs {
    std::string data;
    std::string model;
    std::size_t teacher = 0;
    double precision = 0.9;
    std::string output;
  } eval_;

  struct CondorcetArgs {
    double p = 0.6;
    int n = 3;
    bool exact = false;
    std::uint64_t trials = 100000;
    std::uint64_t seed = 0;
    unsigned threads = default_threads();
    std::string output;
  } cond_;

  struct BetaArgs {
    double alpha = 20.0;
    double beta = 2.0;
    int n = 1;
    std::uint64_t trials = 100000;
    std::uint64_t seed = 0;
    unsigned threads = default_threads();
    std::string histogram;
    std::string output;
  } beta_;

  struct SimArgs {
    std::string student = "19,3";
    std::string teacher = "20,2";
    int teachers = 10;
    std::uint64_t trials = 1000000;
    std::uint64_t seed = 0;
    unsigned threads = default_threads();
    std::string histogram;
    std::string output;
  } sim_;

  GSBCounts gsb_;
};

}  // namespace
}  // namespace govern::cli

int main(int argc, char** argv) {
  govern::cli::Cli cli;
  return cli.main(argc, argv);
}

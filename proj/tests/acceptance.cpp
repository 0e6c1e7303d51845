// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <algorithm>
#include <array>
#include <atomic>
#include <mutex>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <set>

#include <Eigen/Dense>
#include <fmt/core.h>
#include <nlohmann/json.hpp>

#include "support.hpp"
#include "xfid/artifact_checks.hpp"
#include "xfid/auc.hpp"
#include "xfid/chat_provider.hpp"
#include "xfid/error.hpp"
#include "xfid/judge.hpp"
#include "xfid/logistic.hpp"
#include "xfid/orchestrator.hpp"
#include "xfid/parity.hpp"
#include "xfid/prompts.hpp"
#include "xfid/report.hpp"
#include "xfid/similarity.hpp"
#include "xfid/text_format.hpp"
#include "xfid/ttest.hpp"

using namespace xfid;
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok && pass) {
      pass = false;
      detail = what;
    }
  }
};

struct Criterion {
  std::string name;
  double budget_s;  // 0: no runtime bound
  std::function<Outcome()> run;
};

EmbeddingMatrix from_eigen(const Eigen::MatrixXd& m) {
  std::vector<std::string> ids;
  std::vector<float> data;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    ids.push_back("r" + std::to_string(i));
    for (Eigen::Index j = 0; j < m.cols(); ++j) data.push_back(static_cast<float>(m(i, j)));
  }
  return EmbeddingMatrix(ids, static_cast<std::size_t>(m.cols()), data);
}

Eigen::MatrixXd to_eigen(const EmbeddingMatrix& m) {
  Eigen::MatrixXd out(m.rows(), m.dim());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.dim(); ++j) out(i, j) = m.row(i)[j];
  return out;
}

double gram_cka(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
  const Eigen::Index n = x.rows();
  const Eigen::MatrixXd h =
      Eigen::MatrixXd::Identity(n, n) - Eigen::MatrixXd::Constant(n, n, 1.0 / double(n));
  const Eigen::MatrixXd k = h * (x * x.transpose()) * h;
  const Eigen::MatrixXd l = h * (y * y.transpose()) * h;
  return (k.array() * l.array()).sum() /
         std::sqrt((k.array() * k.array()).sum() * (l.array() * l.array()).sum());
}

// Entries on a 2^-10 grid with at most 12 significant bits, so products with
// small-mantissa scale factors stay exact in float.
Eigen::MatrixXd dyadic(std::size_t n, std::size_t d, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> k(-2047, 2047);
  return Eigen::MatrixXd::NullaryExpr(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d),
                                      [&] { return k(rng) / 1024.0; });
}

Outcome cka_suite() {
  Outcome o;
  std::mt19937_64 rng(101);
  std::normal_distribution<double> g;
  double worst_self = 0, worst_rot = 0, worst_scale = 0, worst_gram = 0;

  for (int t = 0; t < 5; ++t) {
    const auto x = test::random_matrix(100, 8, 200 + t);
    worst_self = std::max(worst_self, std::abs(linear_cka(x, x).value - 1.0));
  }
  const auto x = test::random_matrix(100, 8, 7);
  const Eigen::MatrixXd xe = to_eigen(x);
  for (int t = 0; t < 20; ++t) {
    const Eigen::MatrixXd a = Eigen::MatrixXd::NullaryExpr(8, 8, [&] { return g(rng); });
    const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(a).householderQ();
    worst_rot = std::max(worst_rot, std::abs(linear_cka(x, from_eigen(xe * q)).value - 1.0));
  }
  for (int t = 0; t < 10; ++t) {
    const Eigen::MatrixXd a = dyadic(100, 8, rng);
    const Eigen::MatrixXd b = dyadic(100, 6, rng);
    const double base = linear_cka(from_eigen(a), from_eigen(b)).value;
    for (double c : {2.0, 0.5, 3.0, 0.375, 1000.0, 1.0 / 1024}) {
      worst_scale = std::max(worst_scale, std::abs(linear_cka(from_eigen(a * c), from_eigen(b)).value - base));
      worst_scale = std::max(worst_scale, std::abs(linear_cka(from_eigen(a), from_eigen(b * c)).value - base));
    }
  }
  for (std::size_t n : {5, 20, 50, 100, 200}) {
    for (int t = 0; t < 4; ++t) {
      const auto a = test::random_matrix(n, 8, 300 + n + t);
      const auto noise = test::random_matrix(n, 5, 400 + n + t);
      std::vector<float> mixed(n * 5);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < 5; ++j) mixed[i * 5 + j] = a.row(i)[j] + noise.row(i)[j];
      const EmbeddingMatrix b(a.ids(), 5, mixed);
      worst_gram = std::max(worst_gram, std::abs(linear_cka(a, b).value - gram_cka(to_eigen(a), to_eigen(b))));
    }
  }
  o.require(worst_self <= 1e-9, fmt::format("CKA(X,X) off by {:.3g}", worst_self));
  o.require(worst_rot <= 1e-6, fmt::format("rotation invariance off by {:.3g}", worst_rot));
  o.require(worst_scale <= 1e-9, fmt::format("scale invariance off by {:.3g}", worst_scale));
  o.require(worst_gram <= 1e-10, fmt::format("Gram-form oracle off by {:.3g}", worst_gram));
  if (o.pass) {
    o.detail = fmt::format("max err self {:.1e}, 20 rotations {:.1e}, scale {:.1e}, Gram form {:.1e}",
                           worst_self, worst_rot, worst_scale, worst_gram);
  }
  return o;
}

Outcome auc_oracle() {
  Outcome o;
  std::mt19937_64 rng(55);
  double worst = 0;
  std::size_t tied = 0;
  for (int round = 0; round < 200; ++round) {
    const std::size_t n = std::uniform_int_distribution<std::size_t>(2, 50)(rng);
    std::vector<double> s(n);
    std::vector<bool> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = std::uniform_int_distribution<int>(0, 9)(rng) / 10.0;
      y[i] = std::bernoulli_distribution(0.45)(rng);
    }
    y[0] = true;
    y[n - 1] = false;
    double wins = 0, pairs = 0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (!y[i] || y[j]) continue;
        pairs += 1;
        wins += s[i] > s[j] ? 1.0 : s[i] == s[j] ? 0.5 : 0.0;
        if (s[i] == s[j]) ++tied;
      }
    }
    worst = std::max(worst, std::abs(roc_auc(s, y) - wins / pairs));
  }
  o.require(tied > 0, "no tied pairs generated");
  o.require(worst <= 1e-12, fmt::format("rank AUC differs from brute force by {:.3g}", worst));
  if (o.pass) o.detail = fmt::format("200 instances, {} tied pairs, max |diff| {:.1e}", tied, worst);
  return o;
}

Outcome logistic_head() {
  Outcome o;
  std::mt19937_64 rng(77);
  std::normal_distribution<double> g;
  const Eigen::MatrixXd x = Eigen::MatrixXd::NullaryExpr(80, 6, [&] { return g(rng); });
  std::vector<bool> y(80);
  for (int i = 0; i < 80; ++i) y[i] = x(i, 0) - 0.5 * x(i, 3) + g(rng) > 0;

  double worst_rel = 0;
  for (int point = 0; point < 50; ++point) {
    const Eigen::VectorXd w = Eigen::VectorXd::NullaryExpr(6, [&] { return g(rng); });
    const double b = g(rng);
    const double lambda = point % 2 ? 1e-4 : 0.1;
    const auto at = logistic_objective(x, y, w, b, lambda);
    Eigen::VectorXd analytic(7), numeric(7);
    analytic << at.grad_w, at.grad_b;
    constexpr double h = 1e-5;
    for (int j = 0; j < 7; ++j) {
      Eigen::VectorXd wp = w, wm = w;
      double bp = b, bm = b;
      if (j < 6) {
        wp(j) += h;
        wm(j) -= h;
      } else {
        bp += h;
        bm -= h;
      }
      numeric(j) = (logistic_objective(x, y, wp, bp, lambda).loss - logistic_objective(x, y, wm, bm, lambda).loss) / (2 * h);
    }
    worst_rel = std::max(worst_rel, (numeric - analytic).norm() / analytic.norm());
  }
  o.require(worst_rel < 1e-5, fmt::format("gradient relative error {:.3g}", worst_rel));

  bool monotone = true;
  std::size_t steps = 0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    std::mt19937_64 r(seed);
    const Eigen::MatrixXd xs = Eigen::MatrixXd::NullaryExpr(200, 5, [&] { return g(r); });
    std::vector<bool> ys(200);
    for (int i = 0; i < 200; ++i) ys[i] = xs(i, 1) + g(r) > 0.3;
    const auto head = train_logistic(xs, ys);
    steps += head.loss_trace.size();
    for (std::size_t i = 1; i < head.loss_trace.size(); ++i) monotone &= head.loss_trace[i] <= head.loss_trace[i - 1];
  }
  o.require(monotone, "loss increased during training");

  // separable: label is the sign of a fixed direction, margin >= 0.2
  Eigen::MatrixXd xt(400, 4);
  std::vector<bool> yt;
  Eigen::Index rows = 0;
  while (rows < 400) {
    Eigen::RowVectorXd r = Eigen::RowVectorXd::NullaryExpr(4, [&] { return g(rng); });
    const double m = r(0) + r(1) - r(2);
    if (std::abs(m) < 0.2) continue;
    xt.row(rows++) = r;
    yt.push_back(m > 0);
  }
  const auto head = train_logistic(xt.topRows(300), std::vector<bool>(yt.begin(), yt.begin() + 300));
  const Eigen::VectorXd s = head.decision(xt.bottomRows(100));
  const double auc = roc_auc(std::vector<double>(s.data(), s.data() + s.size()),
                             std::vector<bool>(yt.begin() + 300, yt.end()));
  o.require(auc >= 0.99, fmt::format("separable held-out AUC {:.4f}", auc));
  if (o.pass) {
    o.detail = fmt::format("50 points max rel err {:.1e}, {} monotone loss steps, separable AUC {:.4f}",
                           worst_rel, steps, auc);
  }
  return o;
}

Outcome t_statistics() {
  Outcome o;
  const double q = student_t_cdf(1.8331, 9);
  o.require(std::abs(q - 0.95) <= 2e-4, fmt::format("cdf(1.8331; 9) = {:.6f}", q));
  double worst = 0;
  for (double t = -6; t <= 6; t += 0.25) {
    worst = std::max(worst, std::abs(student_t_cdf(t, 2) - (0.5 + t / (2 * std::sqrt(2 + t * t)))));
  }
  o.require(worst <= 1e-4, fmt::format("df=2 closed form off by {:.3g}", worst));
  const std::vector<double> d{1, 2, 3};
  const double p = paired_t_onesided(d, 0.0, Alternative::greater).p_value;
  o.require(std::abs(p - 0.0371) <= 1e-3, fmt::format("paired p = {:.5f}", p));
  if (o.pass) o.detail = fmt::format("cdf(1.8331; 9) = {:.6f}, df=2 max err {:.1e}, paired p = {:.4f}", q, worst, p);
  return o;
}

struct Synthetic {
  EmbeddingMatrix m;
  FoundationLabels labels;
};

// Five foundations with unit directions; label noise sized for AUCs near 0.85.
Synthetic synthetic_task(std::size_t n, std::size_t d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::vector<std::vector<double>> dirs(5, std::vector<double>(d));
  for (auto& v : dirs) {
    double norm = 0;
    for (double& x : v) {
      x = g(rng);
      norm += x * x;
    }
    for (double& x : v) x /= std::sqrt(norm);
  }
  std::vector<std::string> ids;
  std::vector<float> data(n * d);
  FoundationLabels labels;
  for (Foundation f : kFoundations) labels[f].resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    ids.push_back("s" + std::to_string(i));
    for (std::size_t j = 0; j < d; ++j) data[i * d + j] = static_cast<float>(g(rng));
    for (std::size_t f = 0; f < 5; ++f) {
      double s = 0;
      for (std::size_t j = 0; j < d; ++j) s += data[i * d + j] * dirs[f][j];
      labels[kFoundations[f]][i] = s + g(rng) > 0.8;
    }
  }
  return {EmbeddingMatrix(ids, d, data), labels};
}

Outcome parity_degeneracy() {
  Outcome o;
  constexpr std::size_t n = 2000, d = 32;
  {
    const auto task = synthetic_task(n, d, 1);
    ParityOptions options;
    options.seed = 1;
    const auto rows = run_parity(task.m, task.m, task.labels, options);
    for (const auto& r : rows) {
      o.require(r.gap == 0.0, fmt::format("{} gap {} with tgt = src", name(r.foundation), r.gap));
      o.require(r.degenerate, fmt::format("{} not flagged degenerate", name(r.foundation)));
    }
  }
  const std::array<double, 3> sigmas{0.0, 0.1, 0.5};
  std::array<double, 3> mean_gap{};
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto task = synthetic_task(n, d, 1000 + seed);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    const auto noise = test::random_matrix(n, d, 5000 + seed);
    for (std::size_t k = 0; k < sigmas.size(); ++k) {
      std::vector<float> tgt = task.m.data();
      for (std::size_t i = 0; i < tgt.size(); ++i) tgt[i] += static_cast<float>(sigmas[k]) * noise.data()[i];
      ParityOptions options;
      options.seed = seed;
      const auto rows = run_parity(task.m, EmbeddingMatrix(task.m.ids(), d, tgt), task.labels, options);
      double sum = 0;
      for (const auto& r : rows) sum += r.gap;
      mean_gap[k] += sum / static_cast<double>(rows.size()) / 10.0;
    }
  }
  o.require(mean_gap[0] <= mean_gap[1] && mean_gap[1] <= mean_gap[2],
            fmt::format("mean gaps {:.5f} {:.5f} {:.5f} not non-decreasing", mean_gap[0], mean_gap[1], mean_gap[2]));
  if (o.pass) {
    o.detail = fmt::format("tgt=src gap 0 and degenerate on 5 foundations; sigma 0/0.1/0.5 mean gap {:.4f}/{:.4f}/{:.4f}",
                           mean_gap[0], mean_gap[1], mean_gap[2]);
  }
  return o;
}

bool contains_line(const std::string& text, const std::string& line) {
  return ("\n" + text).find("\n" + line + "\n") != std::string::npos;
}

Outcome paper_fixtures() {
  Outcome o;
  const auto care = parity_from_folds(Foundation::care, test::reference_care_folds(), 0.02);
  const std::string care_row = fmt::format("Everyday/Care {} {} {}", format_fixed(care.en_auc, 3),
                                           format_fixed(care.pl_auc, 3), format_signed(care.gap, 3));
  o.require(care_row == "Everyday/Care 0.853 0.842 +0.011", "parity row renders as " + care_row);
  o.require(care.p_gt0 <= 0.01, fmt::format("p_gt0 = {:.4f}", care.p_gt0));

  std::vector<JudgeVerdict> verdicts;
  for (int i = 0; i < 200; ++i) {
    JudgeVerdict v;
    v.post_id = "v" + std::to_string(i);
    v.category = i < 186 ? JudgeCategory::clean : i < 196 ? JudgeCategory::minor : JudgeCategory::error;
    verdicts.push_back(v);
  }
  const auto audit = pooled_audit(verdicts, "everyday");
  const std::string judge_row = fmt::format("{} / {} / {}", format_tenths(audit.clean_tenths()),
                                            format_tenths(audit.minor_tenths()), format_tenths(audit.error_tenths()));
  o.require(judge_row == "93.0 / 5.0 / 2.0", "judge row renders as " + judge_row);

  const auto cos = summarize(test::reference_cosines());
  const std::string cos_row = fmt::format("{} / {} / {} / {}", format_fixed(cos.mean, 3), format_fixed(cos.std, 3),
                                          format_fixed(cos.p05, 3), format_fixed(cos.p95, 3));
  o.require(cos_row == "0.889 / 0.063 / 0.789 / 0.960", "cosine row renders as " + cos_row);

  // the same rows through the report renderer
  ReportBundle bundle;
  bundle.corpus = "fixture";
  bundle.cosine_overall = cos;
  bundle.parity = {{"Everyday", {care}}};
  bundle.judge = {audit};
  const auto docs = render(bundle, ReportFormat::markdown);
  std::map<std::string, std::string> by_name;
  for (const auto& doc : docs) by_name[doc.name] = doc.content;
  o.require(contains_line(by_name["cosine_fixture.md"], "| Overall | 51,744 | 0.889 | 0.063 | 0.789 | 0.960 |"),
            "cosine table Overall row differs");
  o.require(contains_line(by_name["parity_fixture.md"], "| Care | 0.853 | 0.842 | +0.011 | 0.002 | 0.006 |"),
            "parity table Care row differs");
  o.require(contains_line(by_name["judge_fixture.md"], "| everyday | 200 | 93.0 | 5.0 | 2.0 | 0.0 |"),
            "judge table row differs");
  if (o.pass) o.detail = fmt::format("{} (p_gt0 {:.4f}); {}; {}", care_row, care.p_gt0, judge_row, cos_row);
  return o;
}

Outcome orchestrator() {
  using namespace std::chrono_literals;
  Outcome o;
  std::mutex mutex;
  std::map<std::string, int> attempts;
  std::atomic<bool> outage{false};
  test::MockChatServer server([&](const std::string&, const std::string& user, int) {
    int attempt;
    {
      std::lock_guard lock(mutex);
      attempt = ++attempts[user];
    }
    const auto latency = std::chrono::milliseconds(20 + static_cast<int>(std::hash<std::string>{}(user) % 40));
    if (outage && user.ends_with("3")) return test::MockReply{503, "", false, latency};
    if (attempt == 1 && (user.back() - '0') % 3 == 0) return test::MockReply{429, "", false, latency};
    return test::MockReply{200, "PL " + user, false, latency};
  });

  CorpusSlice slice{"mock", {}};
  for (int i = 0; i < 200; ++i) {
    Post p;
    p.id = "m" + std::to_string(i);
    p.text_src = "post " + std::to_string(i);
    p.corpus = "mock";
    p.subcorpus = "s";
    slice.posts.push_back(p);
  }
  ProviderConfig pc;
  pc.endpoint = server.endpoint();
  pc.model = "mock";
  pc.timeout = 5000ms;
  HttpChatProvider provider(pc);
  RequestPolicy policy;  // max_in_flight 20
  policy.initial_backoff = 10ms;
  policy.max_backoff = 100ms;
  policy.max_retries = 2;
  const auto prompt = load_named_prompt(XFID_PROMPT_DIR, kRedditPrompt);

  test::TempDir dir("acceptance-journal");
  outage = true;
  std::size_t failed_first = 0;
  std::size_t retries = 0;
  {
    Journal journal(dir / "journal.jsonl");
    const auto first = translate_batch(slice, prompt, provider, policy, {0.3, &journal});
    failed_first = first.failures.size();
    retries = first.stats.retries;
  }
  const std::size_t calls_first = server.calls();
  const std::size_t peak_first = server.peak_in_flight();

  outage = false;
  Journal journal(dir / "journal.jsonl");
  const auto second = translate_batch(slice, prompt, provider, policy, {0.3, &journal});
  const auto users = server.users();
  std::map<std::string, int> reissued;
  for (std::size_t i = calls_first; i < users.size(); ++i) ++reissued[users[i]];
  std::size_t duplicates = 0;
  for (const auto& [user, count] : reissued) {
    if (!user.ends_with("3") || count > 1) duplicates += static_cast<std::size_t>(count);
  }

  o.require(server.peak_in_flight() <= 20, fmt::format("peak in-flight {}", server.peak_in_flight()));
  o.require(retries > 0, "no retries observed");
  o.require(failed_first == 20, fmt::format("{} failures in the outage run, expected 20", failed_first));
  o.require(second.failures.empty(), "resumed run still has failures");
  o.require(second.stats.skipped == 180, fmt::format("resumed run skipped {}", second.stats.skipped));
  o.require(duplicates == 0, fmt::format("{} duplicate calls on resume", duplicates));
  o.require(server.calls() - calls_first == 20, fmt::format("{} calls on resume", server.calls() - calls_first));
  if (o.pass) {
    o.detail = fmt::format("peak in-flight {}/20, {} retries, {} calls; resume made {} calls, 0 duplicates",
                           std::max(peak_first, server.peak_in_flight()), retries, calls_first,
                           server.calls() - calls_first);
  }
  return o;
}

Outcome artifact_checks_criterion() {
  Outcome o;
  std::mt19937_64 rng(31337);
  std::size_t tp = 0, fp = 0, fn = 0;
  std::map<ViolationKind, std::size_t> injected;
  for (int i = 0; i < 1000; ++i) {
    const auto pair = test::mutated_pair(rng);
    auto expected = pair.expected;
    auto found = artifact_checks(pair.src, pair.tgt, pair.platform);
    std::sort(expected.begin(), expected.end());
    std::sort(found.begin(), found.end());
    std::vector<Violation> hit;
    std::set_intersection(found.begin(), found.end(), expected.begin(), expected.end(), std::back_inserter(hit));
    tp += hit.size();
    fp += found.size() - hit.size();
    fn += expected.size() - hit.size();
    for (const auto& v : expected) ++injected[v.kind];
  }
  const double precision = tp + fp ? double(tp) / double(tp + fp) : 1.0;
  const double recall = tp + fn ? double(tp) / double(tp + fn) : 1.0;
  o.require(injected[ViolationKind::HashtagAltered] > 0 && injected[ViolationKind::MentionAltered] > 0 &&
                injected[ViolationKind::CyrillicLeakage] > 0,
            "generator did not inject every kind");
  o.require(fp == 0 && fn == 0, fmt::format("precision {:.4f} recall {:.4f} ({} fp, {} fn)", precision, recall, fp, fn));
  if (o.pass) {
    o.detail = fmt::format("{} injected ({} hashtag, {} mention, {} url, {} cyrillic); precision {:.1f}% recall {:.1f}%",
                           tp + fn, injected[ViolationKind::HashtagAltered], injected[ViolationKind::MentionAltered],
                           injected[ViolationKind::UrlAltered], injected[ViolationKind::CyrillicLeakage],
                           100 * precision, 100 * recall);
  }
  return o;
}

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

// Copies the bundled fixture into dir with an absolute prompt directory.
void stage_fixture(const fs::path& dir, const std::string& endpoint) {
  const fs::path src = fs::path(XFID_DATA_DIR) / "fixture";
  for (const char* f : {"corpus.jsonl", "corpus_en.jsonl", "embeddings.jsonl"}) fs::copy_file(src / f, dir / f);
  std::string toml = test::read_file(src / "xfid.toml");
  const auto line = [&](const std::string& key) {
    const auto at = toml.find(key + " = ");
    return std::pair{at, toml.find('\n', at) - at};
  };
  auto [pa, pl] = line("prompt_dir");
  toml.replace(pa, pl, "prompt_dir = \"" + std::string(XFID_PROMPT_DIR) + "\"");
  auto [ea, el] = line("endpoint");
  toml.replace(ea, el, "endpoint = \"" + endpoint + "\"");
  test::write_file(dir / "xfid.toml", toml);
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (entry.is_regular_file()) out[fs::relative(entry.path(), dir).string()] = test::read_file(entry.path());
  }
  return out;
}

Outcome end_to_end() {
  Outcome o;
  std::map<std::string, std::string> reference;
  {
    std::ifstream in(fs::path(XFID_DATA_DIR) / "fixture" / "corpus.jsonl");
    for (std::string line; std::getline(in, line);) {
      const json j = json::parse(line);
      if (j.contains("text_tgt") && j["text_tgt"].is_string()) reference[j["text"]] = j["text_tgt"];
    }
  }
  o.require(reference.size() == 50, fmt::format("bundled fixture has {} bilingual posts", reference.size()));
  test::MockChatServer server([&](const std::string&, const std::string& user, int) {
    const auto it = reference.find(user);
    return test::MockReply{200, it == reference.end() ? "" : it->second, false, std::chrono::milliseconds(5)};
  });

  const std::vector<std::string> stages{"ingest", "embed", "cosine", "cka", "parity", "report"};
  std::vector<std::map<std::string, std::string>> runs;
  std::string verdict;
  for (int run = 0; run < 2; ++run) {
    test::TempDir dir("acceptance-e2e");
    stage_fixture(dir.path(), server.endpoint());
    for (const auto& stage : stages) {
      const auto r = test::run_command(std::string(XFID_BIN) + " --config " + q(dir / "xfid.toml") + " " + stage);
      o.require(r.exit_code == 0, fmt::format("run {} {} exited {}: {}", run + 1, stage, r.exit_code, r.err));
    }
    runs.push_back(snapshot(dir / "out" / "report"));
    verdict = test::read_file(dir / "out" / "report" / "verdict_syn.csv");
  }
  for (const char* table : {"prevalence", "cosine", "cka", "parity", "verdict"}) {
    for (const char* ext : {".md", ".csv"}) {
      const std::string name = std::string(table) + "_syn" + ext;
      o.require(runs[0].contains(name), "missing " + name);
    }
  }
  o.require(runs[0] == runs[1], "report differs between the two runs");
  const auto at = verdict.find("verdict,");
  o.require(at != std::string::npos, "no verdict line");
  const std::string level = at == std::string::npos ? "" : verdict.substr(at + 8, verdict.find(',', at + 8) - at - 8);

  // same fixture from the English-only corpus, translated through the mock provider
  test::TempDir dir("acceptance-translate");
  stage_fixture(dir.path(), server.endpoint());
  const std::string base = std::string(XFID_BIN) + " --config " + q(dir / "xfid.toml") + " ";
  std::vector<std::string> translated_stages{"--corpus " + q(dir / "corpus_en.jsonl") + " ingest", "translate"};
  translated_stages.insert(translated_stages.end(), stages.begin() + 1, stages.end());
  for (const auto& stage : translated_stages) {
    const auto r = test::run_command(base + stage);
    o.require(r.exit_code == 0, fmt::format("translated run '{}' exited {}: {}", stage, r.exit_code, r.err));
  }
  const auto translated = snapshot(dir / "out" / "report");
  const auto strip_meta = [](const std::string& csv) { return csv.substr(csv.find('\n') + 1); };
  o.require(translated.contains("cosine_syn.csv") &&
                strip_meta(translated.at("cosine_syn.csv")) == strip_meta(runs[0]["cosine_syn.csv"]),
            "translated run cosine table differs from the bilingual run");
  o.require(server.calls() == 50, fmt::format("{} provider calls for 50 posts", server.calls()));
  if (o.pass) {
    o.detail = fmt::format("{} report files identical across 2 runs, verdict {}; mock-translated run matches ({} calls)",
                           runs[0].size(), level, server.calls());
  }
  return o;
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {"CKA suite", 5.0, cka_suite},
      {"AUC oracle", 1.0, auc_oracle},
      {"Logistic head", 0.0, logistic_head},
      {"t statistics", 0.0, t_statistics},
      {"Parity degeneracy", 60.0, parity_degeneracy},
      {"Reference fixtures", 0.0, paper_fixtures},
      {"Orchestrator", 10.0, orchestrator},
      {"Artifact checks", 0.0, artifact_checks_criterion},
      {"End-to-end smoke", 0.0, end_to_end},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto& c = criteria[i];
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = c.run();
    } catch (const std::exception& e) {
      outcome = {false, std::string("threw ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.budget_s > 0 && secs > c.budget_s) {
      outcome.require(false, fmt::format("runtime {:.2f} s over the {:.0f} s budget", secs, c.budget_s));
    }
    failed += outcome.pass ? 0 : 1;
    fmt::print("{} [{}] {} ({:.2f} s): {}\n", outcome.pass ? "PASS" : "FAIL", i + 1, c.name, secs, outcome.detail);
    std::fflush(stdout);
  }
  fmt::print("{}/{} criteria passed\n", criteria.size() - static_cast<std::size_t>(failed), criteria.size());
  return failed == 0 ? 0 : 1;
}

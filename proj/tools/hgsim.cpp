// Command-line front end: closed-form predictions, sampling, and the
// verification experiments, all deterministic functions of their argument
// vector (every random draw flows from --seed through the seed mixer).

#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hgsim/exposure.hpp"
#include "hgsim/hypergraph.hpp"
#include "hgsim/rng.hpp"
#include "hgsim/sampling.hpp"
#include "hgsim/stats.hpp"
#include "hgsim/theory.hpp"

namespace {

using ojson = nlohmann::ordered_json;

struct Options {
  std::uint64_t n = 0;
  int d = 2;
  double c = -1.0;
  double p = -1.0;
  bool has_c = false;
  bool has_p = false;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
  double eps = 0.1;
  std::uint64_t n1 = 0;
  int kmax = 3;
  double window = 1.0;
  unsigned threads = 1;
  std::string out;
  std::string format = "json";
  std::string in_file;
};

hgsim::ModelParams resolve_model(const Options& o) {
  if (o.has_c == o.has_p) {
    throw CLI::ValidationError("model", "exactly one of --c or --p is required");
  }
  return o.has_c ? hgsim::ModelParams::from_c(o.n, o.d, o.c)
                 : hgsim::ModelParams::from_p(o.n, o.d, o.p);
}

void write_text(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    if (text.empty() || text.back() != '\n') std::cout << '\n';
    return;
  }
  std::ofstream f(out_path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + out_path + " for writing");
  f << text;
  if (text.empty() || text.back() != '\n') f << '\n';
  if (!f) throw std::runtime_error("write failed: " + out_path);
}

void write_json(const ojson& j, const std::string& out_path) {
  write_text(j.dump(2), out_path);
}

// Runs per_trial(i) for i in [0, trials), fanned out over worker threads.
// Each trial derives its own seed, and results land in trial-indexed slots,
// so the aggregate is independent of scheduling.
template <typename F>
void parallel_trials(std::uint64_t trials, unsigned threads, F&& per_trial) {
  threads = std::max(1u, std::min(threads, 64u));
  if (threads == 1) {
    for (std::uint64_t i = 0; i < trials; ++i) per_trial(i);
    return;
  }
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::uint64_t i = next.fetch_add(1); i < trials; i = next.fetch_add(1)) {
        if (failed.load(std::memory_order_relaxed)) return;
        try {
          per_trial(i);
        } catch (...) {
          if (!failed.exchange(true)) failure = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

void require_json(const Options& o) {
  if (o.format != "json") {
    throw CLI::ValidationError("--format", "this subcommand only writes json");
  }
}

ojson model_json(const hgsim::ModelParams& m) {
  return ojson{{"n", m.n}, {"d", m.d}, {"c", m.c}, {"p", m.p}};
}

int cmd_predict(const Options& o) {
  require_json(o);
  const hgsim::ModelParams m = resolve_model(o);
  const hgsim::GiantPrediction pred = hgsim::predict(m);
  ojson j{{"command", "predict"}};
  j.update(model_json(m));
  j["critical_c"] = m.critical_c();
  j["rho"] = pred.rho;
  j["mu"] = pred.mu;
  j["sigma2"] = pred.sigma2;
  j["sigma"] = pred.sigma();
  write_json(j, o.out);
  return 0;
}

int cmd_sample(const Options& o) {
  const hgsim::ModelParams m = resolve_model(o);
  const hgsim::Hypergraph h = hgsim::sample_hnp(m.n, m.d, m.p, o.seed);
  if (o.out.empty()) {
    hgsim::write_hg(h, std::cout);
  } else {
    hgsim::write_hg_file(h, o.out);
  }
  return 0;
}

int cmd_components(const Options& o) {
  require_json(o);
  ojson j{{"command", "components"}};
  std::uint64_t n = 0;
  int d = 0;
  std::size_t m = 0;
  hgsim::ComponentSummary summary;
  if (!o.in_file.empty()) {
    const hgsim::Hypergraph h = hgsim::read_hg_file(o.in_file);
    n = h.n();
    d = h.d();
    m = h.edge_count();
    summary = hgsim::components(h);
    j["source"] = o.in_file;
  } else {
    const hgsim::ModelParams mp = resolve_model(o);
    const hgsim::Hypergraph h = hgsim::sample_hnp(mp.n, mp.d, mp.p, o.seed);
    n = h.n();
    d = h.d();
    m = h.edge_count();
    summary = hgsim::components(h);
    j["source"] = "sampled";
    j["seed"] = o.seed;
    j["c"] = mp.c;
    j["p"] = mp.p;
  }
  j["n"] = n;
  j["d"] = d;
  j["edges"] = m;
  j["component_count"] = summary.sizes.size();
  j["largest_order"] = summary.largest_order;
  constexpr std::size_t kHead = 20;
  j["sizes_desc_head"] =
      std::vector<std::uint64_t>(summary.sizes.begin(),
                                 summary.sizes.begin() +
                                     std::min(kHead, summary.sizes.size()));
  j["largest_vertices_head"] = std::vector<hgsim::Vertex>(
      summary.largest_vertices.begin(),
      summary.largest_vertices.begin() +
          std::min(kHead, summary.largest_vertices.size()));
  write_json(j, o.out);
  return 0;
}

int cmd_verify_clt(const Options& o) {
  require_json(o);
  const hgsim::ModelParams m = resolve_model(o);
  const hgsim::GiantPrediction pred = hgsim::predict(m);
  std::vector<double> orders(o.trials, 0.0);
  parallel_trials(o.trials, o.threads, [&](std::uint64_t i) {
    const hgsim::Hypergraph h =
        hgsim::sample_hnp(m.n, m.d, m.p, hgsim::mix_seed(o.seed, i));
    orders[i] = static_cast<double>(hgsim::largest_component(h).first);
  });

  const auto [mean, var] = hgsim::moments(orders);
  const double ks = hgsim::ks_normal(orders, pred.mu, pred.sigma());
  const double ks_crit = 1.63 / std::sqrt(static_cast<double>(o.trials));
  const double mean_z =
      (mean - pred.mu) / (pred.sigma() / std::sqrt(static_cast<double>(o.trials)));
  const bool pass = ks < ks_crit && std::abs(mean_z) <= 3.0;

  ojson j{{"test", "verify-clt"}};
  j.update(model_json(m));
  j["trials"] = o.trials;
  j["seed"] = o.seed;
  j["predicted"] = ojson{{"rho", pred.rho}, {"mu", pred.mu}, {"sigma2", pred.sigma2}};
  j["observed"] = ojson{{"mean", mean}, {"variance", var}};
  j["mean_z"] = mean_z;
  j["ks_d"] = ks;
  j["ks_critical_1pct"] = ks_crit;
  j["pass"] = pass;
  write_json(j, o.out);
  return pass ? 0 : 1;
}

int cmd_verify_llt(const Options& o) {
  const hgsim::ModelParams m = resolve_model(o);
  const hgsim::GiantPrediction pred = hgsim::predict(m);
  std::vector<double> orders(o.trials, 0.0);
  parallel_trials(o.trials, o.threads, [&](std::uint64_t i) {
    const hgsim::Hypergraph h =
        hgsim::sample_hnp(m.n, m.d, m.p, hgsim::mix_seed(o.seed, i));
    orders[i] = static_cast<double>(hgsim::largest_component(h).first);
  });
  const hgsim::LocalLawReport report =
      hgsim::local_law_report(orders, pred.mu, pred.sigma(), o.window);
  const double threshold = 0.10;
  const bool pass = report.l1 < threshold;

  if (o.format == "csv") {
    std::ostringstream csv;
    csv << "nu,empirical_freq,predicted,abs_diff\n";
    for (const auto& row : report.rows) {
      csv << row.nu << ',' << row.empirical << ',' << row.predicted << ','
          << std::abs(row.empirical - row.predicted) << '\n';
    }
    write_text(csv.str(), o.out);
    return pass ? 0 : 1;
  }

  ojson j{{"test", "verify-llt"}};
  j.update(model_json(m));
  j["trials"] = o.trials;
  j["seed"] = o.seed;
  j["window_sigmas"] = o.window;
  j["predicted"] = ojson{{"mu", pred.mu}, {"sigma", pred.sigma()}};
  j["l1"] = report.l1;
  j["threshold"] = threshold;
  j["pass"] = pass;
  ojson rows = ojson::array();
  for (const auto& row : report.rows) {
    rows.push_back(ojson{{"nu", row.nu},
                         {"empirical", row.empirical},
                         {"predicted", row.predicted}});
  }
  j["rows"] = rows;
  write_json(j, o.out);
  return pass ? 0 : 1;
}

int cmd_exposure(const Options& o) {
  const hgsim::ModelParams m = resolve_model(o);
  if (!((1.0 - o.eps) * m.c > 1.0 / (m.d - 1) + 0.05)) {
    throw CLI::ValidationError(
        "--eps", "(1-eps)c must exceed 1/(d-1)+0.05 so round 1 stays supercritical");
  }
  const hgsim::ExposureConfig cfg = hgsim::split_probabilities(m.p, o.eps);
  hgsim::ModelParams round1 = m;
  round1.c = (1.0 - o.eps) * m.c;
  round1.p = cfg.p1;
  const hgsim::GiantPrediction pred1 = hgsim::predict(round1);
  const std::uint64_t n1 =
      o.n1 ? o.n1 : static_cast<std::uint64_t>(std::llround(pred1.mu));

  struct Record {
    std::uint64_t l1, l3;
    std::int64_t s;
    std::uint64_t sg, w, s_iso, f1, f2, f3;
  };
  std::vector<Record> records(o.trials);
  parallel_trials(o.trials, o.threads, [&](std::uint64_t i) {
    const std::uint64_t trial_seed = hgsim::mix_seed(o.seed, i);
    const hgsim::FourRoundTrace four =
        hgsim::run_four_rounds(m.n, m.d, m.p, o.eps, trial_seed);
    const hgsim::ArtificialTrace art = hgsim::run_artificial(
        m.n, m.d, n1, cfg.p1, cfg.p2, hgsim::mix_seed(trial_seed, 7));
    records[i] = Record{four.orders[0],       four.orders[2],      four.s,
                        art.sg,               art.law.w.size(),    art.law.s_iso,
                        art.classes.f1.size(), art.classes.f2.size(),
                        art.classes.f3.size()};
  });

  if (o.format == "csv") {
    std::ostringstream csv;
    csv << "trial,n,d,c,eps,L1,L3,S,SG,W,S_iso,F1,F2,F3\n";
    for (std::uint64_t i = 0; i < o.trials; ++i) {
      const Record& r = records[i];
      csv << i << ',' << m.n << ',' << m.d << ',' << m.c << ',' << o.eps << ','
          << r.l1 << ',' << r.l3 << ',' << r.s << ',' << r.sg << ',' << r.w << ','
          << r.s_iso << ',' << r.f1 << ',' << r.f2 << ',' << r.f3 << '\n';
    }
    write_text(csv.str(), o.out);
    return 0;
  }

  double mean_s = 0.0;
  double mean_sg = 0.0;
  ojson recs = ojson::array();
  for (std::uint64_t i = 0; i < o.trials; ++i) {
    const Record& r = records[i];
    mean_s += static_cast<double>(r.s);
    mean_sg += static_cast<double>(r.sg);
    recs.push_back(ojson{{"trial", i},
                         {"n", m.n},
                         {"d", m.d},
                         {"c", m.c},
                         {"eps", o.eps},
                         {"L1", r.l1},
                         {"L3", r.l3},
                         {"S", r.s},
                         {"SG", r.sg},
                         {"W", r.w},
                         {"S_iso", r.s_iso},
                         {"F1", r.f1},
                         {"F2", r.f2},
                         {"F3", r.f3}});
  }
  mean_s /= static_cast<double>(o.trials);
  mean_sg /= static_cast<double>(o.trials);

  ojson j{{"command", "exposure"}};
  j.update(model_json(m));
  j["eps"] = o.eps;
  j["p1"] = cfg.p1;
  j["p2"] = cfg.p2;
  j["n1"] = n1;
  j["mu1_predicted"] = pred1.mu;
  j["trials"] = o.trials;
  j["seed"] = o.seed;
  j["summary"] = ojson{{"mean_S", mean_s}, {"mean_SG", mean_sg}};
  j["records"] = recs;
  write_json(j, o.out);
  return 0;
}

int cmd_stein_audit(const Options& o) {
  require_json(o);
  if (!o.has_p) {
    throw CLI::ValidationError("--p", "stein-audit takes an explicit --p");
  }
  const hgsim::SteinAuditResult res =
      hgsim::stein_audit(o.n, o.d, o.p, o.kmax, o.trials, o.seed);

  // Worst factorization rows by |z| for a skimmable report.
  std::vector<const hgsim::SteinAlphaStat*> worst;
  worst.reserve(res.factorization.size());
  for (const auto& s : res.factorization) worst.push_back(&s);
  std::sort(worst.begin(), worst.end(), [](const auto* a, const auto* b) {
    if (std::abs(a->z) != std::abs(b->z)) return std::abs(a->z) > std::abs(b->z);
    return a->mask < b->mask;
  });

  ojson j{{"test", res.report.test},
          {"n", o.n},
          {"d", o.d},
          {"p", o.p},
          {"k_max", o.kmax},
          {"trials", o.trials},
          {"seed", o.seed}};
  j["identity"] = ojson{{"graphs", res.identity_graphs},
                        {"checks", res.identity_checks},
                        {"violations", res.identity_violations}};
  j["factorization"] = ojson{{"subsets", res.factorization.size()},
                             {"max_abs_z", res.max_abs_z},
                             {"threshold", res.report.threshold}};
  ojson top = ojson::array();
  for (std::size_t i = 0; i < worst.size() && i < 5; ++i) {
    top.push_back(ojson{{"mask", worst[i]->mask},
                        {"size", worst[i]->size},
                        {"expected", worst[i]->expected},
                        {"observed", worst[i]->observed},
                        {"z", worst[i]->z}});
  }
  j["factorization"]["worst"] = top;
  j["pass"] = res.report.pass;
  write_json(j, o.out);
  return res.report.pass ? 0 : 1;
}

int cmd_qk(const Options& o) {
  hgsim::ModelParams m = resolve_model(o);
  const hgsim::QkEstimate est =
      hgsim::q_k_empirical(m.c, m.d, m.n, o.trials, static_cast<std::uint64_t>(o.kmax),
                           o.seed);
  double sum_q = 0.0;
  for (std::size_t k = 1; k < est.q.size(); ++k) sum_q += est.q[k];

  if (o.format == "csv") {
    std::ostringstream csv;
    csv << "k,q_k\n";
    for (std::size_t k = 1; k < est.q.size(); ++k) csv << k << ',' << est.q[k] << '\n';
    write_text(csv.str(), o.out);
    return 0;
  }

  ojson j{{"command", "qk"}};
  j.update(model_json(m));
  j["trials"] = o.trials;
  j["k_max"] = o.kmax;
  j["seed"] = o.seed;
  ojson q = ojson::array();
  for (std::size_t k = 1; k < est.q.size(); ++k) {
    q.push_back(ojson{{"k", k}, {"q_k", est.q[k]}});
  }
  j["q"] = q;
  j["sum_q"] = sum_q;
  if (std::isnan(est.decay_slope)) {
    j["decay"] = ojson{{"slope", nullptr}, {"fit_lo", est.fit_lo}, {"fit_hi", est.fit_hi}};
  } else {
    j["decay"] =
        ojson{{"slope", est.decay_slope}, {"fit_lo", est.fit_lo}, {"fit_hi", est.fit_hi}};
  }
  j["oversize_trials"] = est.oversize;
  write_json(j, o.out);
  return 0;
}

void add_model_flags(CLI::App* cmd, Options& o, bool need_n = true) {
  auto* n = cmd->add_option("--n", o.n, "vertex count");
  if (need_n) n->required();
  cmd->add_option("--d", o.d, "uniformity (vertices per edge)")->check(CLI::Range(2, 64));
  auto* c = cmd->add_option("--c", o.c, "average-degree parameter c = C(n-1,d-1) p");
  auto* p = cmd->add_option("--p", o.p, "edge probability");
  c->excludes(p);
  p->excludes(c);
  cmd->callback([&o, c, p] {
    o.has_c = c->count() > 0;
    o.has_p = p->count() > 0;
  });
}

void add_output_flags(CLI::App* cmd, Options& o, bool allow_csv = false) {
  cmd->add_option("--out", o.out, "output file (default: stdout)");
  auto* fmt = cmd->add_option("--format", o.format, "output format");
  if (allow_csv) {
    fmt->check(CLI::IsMember({"json", "csv"}));
  } else {
    fmt->check(CLI::IsMember({"json"}));
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"random d-uniform hypergraph simulator: giant-component "
               "predictions and their Monte Carlo verification"};
  app.require_subcommand(1);
  Options o;

  CLI::App* predict = app.add_subcommand("predict", "closed-form rho/mu/sigma2");
  add_model_flags(predict, o);
  add_output_flags(predict, o);

  CLI::App* sample = app.add_subcommand("sample", "draw one hypergraph, write .hg text");
  add_model_flags(sample, o);
  sample->add_option("--seed", o.seed, "master seed");
  sample->add_option("--out", o.out, "output file (default: stdout)");

  CLI::App* components =
      app.add_subcommand("components", "component summary of a .hg file or a fresh sample");
  components->add_option("file", o.in_file, "input .hg file (omit to sample instead)");
  add_model_flags(components, o, /*need_n=*/false);
  components->add_option("--seed", o.seed, "master seed (sampling mode)");
  add_output_flags(components, o);

  CLI::App* clt = app.add_subcommand(
      "verify-clt", "largest-component mean/variance and KS normality check");
  add_model_flags(clt, o);
  clt->add_option("--trials", o.trials, "Monte Carlo trials (default 1000)");
  clt->add_option("--seed", o.seed, "master seed");
  clt->add_option("--threads", o.threads, "worker threads");
  add_output_flags(clt, o);

  CLI::App* llt = app.add_subcommand(
      "verify-llt", "per-integer local-law table for the largest component");
  add_model_flags(llt, o);
  llt->add_option("--trials", o.trials, "Monte Carlo trials (default 20000)");
  llt->add_option("--seed", o.seed, "master seed");
  llt->add_option("--window", o.window, "halfwidth of the nu window in sigmas");
  llt->add_option("--threads", o.threads, "worker threads");
  add_output_flags(llt, o, /*allow_csv=*/true);

  CLI::App* exposure = app.add_subcommand(
      "exposure", "four-round and surrogate exposure traces (one record per trial)");
  add_model_flags(exposure, o);
  exposure->add_option("--eps", o.eps, "probability split parameter (default 0.1)");
  exposure->add_option("--trials", o.trials, "trace count (default 100)");
  exposure->add_option("--n1", o.n1, "designated-set size (default: round-1 mu)");
  exposure->add_option("--seed", o.seed, "master seed");
  exposure->add_option("--threads", o.threads, "worker threads");
  add_output_flags(exposure, o, /*allow_csv=*/true);

  CLI::App* stein = app.add_subcommand(
      "stein-audit", "exhaustive component-indicator identity audit (small n)");
  stein->add_option("--n", o.n, "vertex count (<= 14)")->required();
  stein->add_option("--d", o.d, "uniformity")->check(CLI::Range(2, 14));
  stein->add_option("--p", o.p, "edge probability")->required();
  stein->callback([&o] { o.has_p = true; });
  stein->add_option("--kmax", o.kmax, "max subset order audited (<= 4)");
  stein->add_option("--trials", o.trials, "sampled graphs (default 100000)");
  stein->add_option("--seed", o.seed, "master seed");
  add_output_flags(stein, o);

  CLI::App* qk = app.add_subcommand(
      "qk", "subcritical component-order distribution of a fixed vertex");
  add_model_flags(qk, o);
  qk->add_option("--trials", o.trials, "Monte Carlo trials (default 100000)");
  qk->add_option("--kmax", o.kmax, "largest order tracked (default 30)");
  qk->add_option("--seed", o.seed, "master seed");
  add_output_flags(qk, o, /*allow_csv=*/true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    std::cerr << e.what() << '\n' << app.help() << '\n';
    return 2;
  }

  try {
    if (app.got_subcommand(predict)) return cmd_predict(o);
    if (app.got_subcommand(sample)) return cmd_sample(o);
    if (app.got_subcommand(components)) return cmd_components(o);
    if (app.got_subcommand(clt)) {
      if (clt->count("--trials") == 0) o.trials = 1000;
      return cmd_verify_clt(o);
    }
    if (app.got_subcommand(llt)) {
      if (llt->count("--trials") == 0) o.trials = 20000;
      return cmd_verify_llt(o);
    }
    if (app.got_subcommand(exposure)) {
      if (exposure->count("--trials") == 0) o.trials = 100;
      return cmd_exposure(o);
    }
    if (app.got_subcommand(stein)) {
      if (stein->count("--trials") == 0) o.trials = 100000;
      return cmd_stein_audit(o);
    }
    if (app.got_subcommand(qk)) {
      if (qk->count("--trials") == 0) o.trials = 100000;
      if (qk->count("--kmax") == 0) o.kmax = 30;
      return cmd_qk(o);
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  std::cerr << "no subcommand selected\n";
  return 2;
}

/* Copyright 2026 The drivenet Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License. */

// Acceptance gate: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

#include "drivenet/cli/run.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace drivenet;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

net::Mat<double> gaussian(Eigen::Index r, Eigen::Index c, Rng& rng, double scale = 1.0) {
  net::Mat<double> m(r, c);
  std::normal_distribution<double> n(0.0, scale);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = n(rng);
  return m;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// ---- synthetic end-to-end (criteria 1-3) ----

struct ScenarioRun {
  double acc_t0 = 0, acc_tm4 = 0, seconds = 0;
};

class EndToEnd {
 public:
  EndToEnd() {
    dir_ = fixtures::temp_dir("acceptance_e2e");
    const config::ExperimentConfig cfg(config::Profile::desk);
    const auto manifest = generate_synthetic(cfg.synthetic(), dir_);
    split_ = holdout_split(manifest, cfg.get_real("data.split_ratio"),
                           static_cast<std::uint64_t>(cfg.get_int("data.split_seed")));
  }

  const ScenarioRun& run(const std::string& scenario) {
    if (auto it = runs_.find(scenario); it != runs_.end()) return it->second;
    const auto start = std::chrono::steady_clock::now();
    config::ExperimentConfig cfg(config::Profile::desk);
    cfg.set("model.scenario", scenario);
    const auto tc = cfg.train();
    const auto result = train::train(split_.train, tc);
    const auto test = train::load_clips(split_.test, net::active_branches(tc.model.scenario));
    const auto rows = eval::horizon_eval(result.final_model, test, cfg.eval_options());
    ScenarioRun r;
    for (const auto& h : rows) {
      if (h.metrics.horizon == 0) r.acc_t0 = h.metrics.accuracy;
      if (h.metrics.horizon == -4) r.acc_tm4 = h.metrics.accuracy;
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("  [%s] T=0 %.4f  T=-4 %.4f  %.0f s\n", scenario.c_str(), r.acc_t0, r.acc_tm4, r.seconds);
    std::fflush(stdout);
    return runs_[scenario] = r;
  }

  std::size_t test_size() const { return split_.test.size(); }

 private:
  fs::path dir_;
  HoldoutSplit split_;
  std::map<std::string, ScenarioRun> runs_;
};

EndToEnd& e2e() {
  static EndToEnd instance;
  return instance;
}

Outcome c1_end_to_end() {
  const auto& r = e2e().run("both");
  const bool ok = r.acc_t0 >= 0.90 && r.seconds <= 900 && e2e().test_size() == 100;
  return {ok, fmt("T=0 accuracy %.4f on %.0f held-out clips, %.0f s", r.acc_t0, e2e().test_size(), r.seconds)};
}

Outcome c2_horizon() {
  const auto& r = e2e().run("both");
  return {r.acc_t0 >= r.acc_tm4 + 0.10, fmt("T=0 %.4f vs T=-4 %.4f", r.acc_t0, r.acc_tm4)};
}

Outcome c3_scenarios() {
  const double both = e2e().run("both").acc_t0;
  const double in = e2e().run("inside_only").acc_t0;
  const double out = e2e().run("outside_only").acc_t0;
  return {both + 0.02 >= in && both + 0.02 >= out, fmt("both %.4f inside %.4f outside %.4f", both, in, out)};
}

// ---- ISDA (criteria 4-5) ----

Outcome c4_isda_reduction() {
  auto rng = make_rng(104);
  double worst = 0;
  for (int t = 0; t < 1000; ++t) {
    const int D = 1 + static_cast<int>(rng() % 16), B = 1 + static_cast<int>(rng() % 6);
    net::LinearParams<double> cls;
    cls.weight = gaussian(kNumClasses, D, rng);
    cls.bias = gaussian(kNumClasses, 1, rng);
    const auto f = gaussian(D, B, rng, 2.0);
    std::vector<int> y(B);
    net::Mat<double> q = net::Mat<double>::Zero(kNumClasses, B);
    double ce = 0;
    for (int s = 0; s < B; ++s) {
      y[s] = static_cast<int>(rng() % kNumClasses);
      q(y[s], s) = 1;
      const net::Vec<double> z = cls.weight * f.col(s) + cls.bias;
      ce += -net::log_softmax(z)(y[s]) / B;
    }
    const net::Mat<double> var = gaussian(D, kNumClasses, rng).cwiseAbs();
    worst = std::max(worst, std::abs(net::isda_loss(f, y, q, cls, var, 0.0).loss - ce));
  }
  return {worst <= 1e-6, fmt("max |isda(0) - ce| = %.3g over 1000 instances", worst)};
}

double rel_err(double a, double b) { return std::abs(a - b) / std::max({1e-6, std::abs(a), std::abs(b)}); }

template <typename Loss>
double fd_error(net::Mat<double>& param, const net::Mat<double>& analytic, Loss loss) {
  constexpr double h = 1e-6;
  double worst = 0;
  for (Eigen::Index i = 0; i < param.size(); ++i) {
    const double keep = param.data()[i];
    param.data()[i] = keep + h;
    const double up = loss();
    param.data()[i] = keep - h;
    const double down = loss();
    param.data()[i] = keep;
    worst = std::max(worst, rel_err((up - down) / (2 * h), analytic.data()[i]));
  }
  return worst;
}

Outcome c5_isda_gradients() {
  auto rng = make_rng(105);
  double worst = 0;
  for (int t = 0; t < 50; ++t) {
    const int D = 2 + t % 5, B = 1 + t % 4;
    net::LinearParams<double> cls;
    cls.weight = gaussian(kNumClasses, D, rng);
    cls.bias = gaussian(kNumClasses, 1, rng);
    net::Mat<double> f = gaussian(D, B, rng);
    std::vector<int> y(B);
    net::Mat<double> q = net::Mat<double>::Constant(kNumClasses, B, 0.02);
    for (int s = 0; s < B; ++s) {
      y[s] = static_cast<int>(rng() % kNumClasses);
      q(y[s], s) = 0.92;
    }
    const net::Mat<double> var = gaussian(D, kNumClasses, rng).cwiseAbs();
    const double lambda = uniform01(rng);
    const auto r = net::isda_loss(f, y, q, cls, var, lambda);
    auto loss = [&] { return net::isda_loss(f, y, q, cls, var, lambda).loss; };
    worst = std::max({worst, fd_error(f, r.d_features, loss), fd_error(cls.weight, r.grad.weight, loss),
                      fd_error(cls.bias, r.grad.bias, loss)});
  }
  return {worst <= 1e-4, fmt("max relative error %.3g over 50 instances", worst)};
}

// ---- metrics (criterion 6) ----

Outcome c6_metrics() {
  auto rng = make_rng(106);
  long mismatches = 0;
  for (int t = 0; t < 1000; ++t) {
    const auto n = 1 + rng() % 80;
    std::vector<ManeuverLabel> p(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      p[i] = label_from_index(rng() % kNumClasses);
      y[i] = label_from_index(rng() % kNumClasses);
    }
    const auto m = eval::metrics_from_confusion(eval::confusion(p, y));
    const auto o = fixtures::pair_oracle(p, y);
    bool same = m.accuracy == o.accuracy && m.precision == o.precision && m.recall == o.recall && m.f1 == o.f1;
    for (std::size_t c = 0; c < kNumClasses; ++c)
      same = same && m.per_class[c].tp == o.tp[c] && m.per_class[c].fp == o.fp[c] && m.per_class[c].fn == o.fn[c] &&
             m.per_class[c].tn == o.tn[c];
    mismatches += !same;
  }

  // Per-class F1 reads only row c and column c, so every class sees all 3^9
  // assignments of those cells while the other 16 cells hold a constant fill.
  long checked = 0, f1_bad = 0;
  for (std::size_t c = 0; c < kNumClasses; ++c)
    for (long fill = 0; fill < 3; ++fill)
      for (int code = 0; code < 19683; ++code) {
        eval::ConfusionMatrix cm;
        for (auto& row : cm.counts) row.fill(fill);
        int k = code;
        for (std::size_t j = 0; j < kNumClasses; ++j, k /= 3) cm.counts[c][j] = k % 3;
        for (std::size_t i = 0; i < kNumClasses; ++i) {
          if (i == c) continue;
          cm.counts[i][c] = k % 3;
          k /= 3;
        }
        if (cm.total() == 0) continue;
        const auto& m = eval::metrics_from_confusion(cm).per_class[c];
        const double denom = 2.0 * m.tp + m.fp + m.fn;
        const double expect = denom == 0 ? 0.0 : 2.0 * m.tp / denom;
        f1_bad += std::abs(m.f1 - expect) > 1e-12;
        ++checked;
      }
  return {mismatches == 0 && f1_bad == 0,
          fmt("oracle mismatches %.0f/1000, F1 identity failures %.0f/%.0f", mismatches, f1_bad, checked)};
}

// ---- OTC (criterion 7) ----

Outcome c7_otc() {
  auto rng = make_rng(107);
  int bad = 0, total = 0;
  for (int code = 0; code < 125; ++code) {
    const std::array<ManeuverLabel, 3> v = {label_from_index(code % 5), label_from_index(code / 5 % 5),
                                            label_from_index(code / 25)};
    // Random probabilities plus a flat set that forces exact-tie handling.
    for (int variant = 0; variant < 2; ++variant) {
      std::array<net::Vec<double>, 3> p;
      for (auto& x : p) {
        if (variant == 0)
          x = net::Vec<double>::NullaryExpr(5, [&] { return uniform01(rng); });
        else
          x = net::Vec<double>::Constant(5, 0.2);
        x /= x.sum();
      }
      bad += eval::otc_vote(v, p) != fixtures::otc_oracle(v, p);
      ++total;
    }
  }
  return {bad == 0, fmt("%.0f mismatches over %.0f vote cases (125 triples)", bad, total)};
}

// ---- k-fold arithmetic (criterion 8) ----

Outcome c8_kfold() {
  const auto s = eval::fold_stats({87.91, 87.91, 89.01, 87.91, 89.01});
  const bool ok = eval::round2(s.mean) == 88.35 && std::round(s.stddev * 10) / 10 == 0.6;
  return {ok, fmt("mean %.2f std %.4f", s.mean, s.stddev)};
}

// ---- augmentation (criterion 9) ----

Outcome c9_augment() {
  auto rng = make_rng(109);
  int flip_bad = 0, shape_bad = 0, cut_bad = 0;
  const std::map<ManeuverLabel, ManeuverLabel> table = {
      {ManeuverLabel::go_straight, ManeuverLabel::go_straight},
      {ManeuverLabel::left_lane_change, ManeuverLabel::right_lane_change},
      {ManeuverLabel::left_turn, ManeuverLabel::right_turn},
      {ManeuverLabel::right_lane_change, ManeuverLabel::left_lane_change},
      {ManeuverLabel::right_turn, ManeuverLabel::left_turn}};
  int table_bad = 0;
  for (const auto& [from, to] : table) table_bad += mirror(from) != to;

  augment::AugPipelineConfig full;
  full.enabled = augment::preset_ops('E');
  full.cutout.side = 6;
  const auto pipeline = augment::build_pipeline(full);
  for (int t = 0; t < 200; ++t) {
    const int h = 8 + static_cast<int>(rng() % 9), w = 8 + static_cast<int>(rng() % 9);
    Clip c = fixtures::random_clip("c" + std::to_string(t), label_from_index(rng() % 5), h, rng);
    for (auto b : kAllBranches) c.branches[b] = fixtures::random_seq(kClipFrames, h, w, rng);
    for (auto b : kAllBranches) {
      const auto& seq = c.frames(b);
      const auto once = augment::flip_lr(seq, c.label);
      const auto twice = augment::flip_lr(once.first, once.second);
      flip_bad += twice.first != seq || twice.second != c.label || once.second != table.at(c.label);
    }

    const auto& seq = c.frames(BranchKind::inside_appearance);
    auto same_shape = [&](const FrameSeq& out) {
      if (out.size() != seq.size()) return false;
      for (std::size_t i = 0; i < out.size(); ++i)
        if (!out[i].same_shape(seq[i]) || out[i].pixels.size() != seq[i].pixels.size()) return false;
      return true;
    };
    std::vector<FrameSeq> outputs = {augment::translate(seq, {3, -2}), augment::flip_lr(seq, c.label).first,
                                     augment::cutout(seq, {5, 0}, rng)};
    FrameSeq mixed, pixel;
    for (const auto& f : seq) {
      mixed.push_back(augment::augmix(f, {}, rng));
      pixel.push_back(augment::equalize(augment::autocontrast(augment::solarize(augment::posterize(f, 3), 100))));
    }
    outputs.push_back(mixed);
    outputs.push_back(pixel);
    for (const auto& o : outputs) shape_bad += !same_shape(o);
    const Clip aug = pipeline(c, rng);
    for (auto b : kAllBranches) {
      const auto& a = aug.frames(b);
      const auto& o = c.frames(b);
      shape_bad += a.size() != o.size() || !a.front().same_shape(o.front());
    }

    // Cutout on frames with no zero pixel: the zeroed set must be one in-bounds square.
    FrameSeq lifted = seq;
    for (auto& f : lifted)
      for (auto& px : f.pixels) px = static_cast<std::uint8_t>(std::max<int>(px, 1));
    const int side = 1 + static_cast<int>(rng() % std::min(h, w));
    const auto cut = augment::cutout(lifted, {side, 0}, rng);
    int y0 = h, x0 = w, y1 = -1, x1 = -1;
    long zeros = 0;
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x)
        if (cut[0].at(y, x, 0) == 0) {
          y0 = std::min(y0, y), x0 = std::min(x0, x), y1 = std::max(y1, y), x1 = std::max(x1, x);
          ++zeros;
        }
    bool one_square = zeros == static_cast<long>(side) * side && y1 - y0 + 1 == side && x1 - x0 + 1 == side &&
                      y0 >= 0 && x0 >= 0 && y1 < h && x1 < w;
    for (const auto& f : cut)
      for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
          for (int ch = 0; ch < Frame::kChannels; ++ch) {
            const bool inside = y >= y0 && y <= y1 && x >= x0 && x <= x1;
            one_square = one_square && ((f.at(y, x, ch) == 0) == inside);
          }
    cut_bad += !one_square;
  }
  const bool ok = flip_bad == 0 && table_bad == 0 && shape_bad == 0 && cut_bad == 0;
  std::ostringstream d;
  d << "200 clips: flip failures " << flip_bad << ", mirror table failures " << table_bad << ", shape failures "
    << shape_bad << ", cutout failures " << cut_bad;
  return {ok, d.str()};
}

// ---- DropBlock (criterion 10) ----

Outcome c10_dropblock() {
  auto rng = make_rng(110);
  const net::DropBlockParams p{5, 0.9};
  const net::FeatureMap<double> m{gaussian(3, 256, rng), 16, 16};
  const auto same = net::dropblock(m, p, false, rng);
  const bool identity = (same.data.array() == m.data.array()).all();
  double kept = 0;
  for (int t = 0; t < 10000; ++t) {
    const auto mask = net::sample_dropblock_mask<double>(1, 16, 16, p, rng);
    for (Eigen::Index i = 0; i < mask.scale.size(); ++i) kept += mask.scale.data()[i] > 0;
  }
  const double frac = kept / (10000.0 * 256.0);
  return {identity && std::abs(frac - 0.9) <= 0.05,
          fmt("eval identity %.0f, keep fraction %.4f over 10000 masks", identity, frac)};
}

// ---- attention and softmax (criterion 11) ----

Outcome c11_normalization() {
  auto rng = make_rng(111);
  double worst_sum = 0, worst_shift = 0;
  int argmax_bad = 0;
  net::AttentionParams<double> att;
  att.init(8, 6, rng);
  for (int t = 0; t < 1000; ++t) {
    net::AttentionCache<double> cache;
    net::attention_forward(att, gaussian(8, 1 + t % 15, rng, 3.0), cache);
    worst_sum = std::max(worst_sum, std::abs(cache.alpha.sum() - 1.0));

    const net::Vec<double> z = gaussian(5, 1, rng, 6.0);
    const double shift = (uniform01(rng) - 0.5) * 200.0;
    const net::Vec<double> a = net::softmax(z);
    const net::Vec<double> b = net::softmax<double>((z.array() + shift).matrix());
    worst_shift = std::max(worst_shift, (a - b).cwiseAbs().maxCoeff());
    worst_sum = std::max(worst_sum, std::abs(a.sum() - 1.0));
    argmax_bad += net::argmax(a) != net::argmax(z);
  }
  return {worst_sum <= 1e-6 && worst_shift <= 1e-6 && argmax_bad == 0,
          fmt("max |sum - 1| %.3g, max shift deviation %.3g, argmax failures %.0f", worst_sum, worst_shift,
              argmax_bad)};
}

// ---- determinism (criterion 12) ----

Outcome c12_determinism() {
  const auto root = fixtures::temp_dir("acceptance_det");
  std::ostringstream log, err;
  const std::vector<std::string> small = {"data.synthetic_clips=40", "train.epochs=2", "train.workers=1"};
  cli::Command synth{.verb = "synth", .data_dir = (root / "data").string(), .quiet = true, .overrides = small};
  if (cli::run(synth, log, err) != 0) return {false, "synth failed: " + err.str()};

  auto train_eval = [&](const fs::path& out, const cli::Command& base) {
    for (const char* verb : {"train", "eval"}) {
      cli::Command c = base;
      c.verb = verb;
      c.out_dir = out.string();
      if (cli::run(c, log, err) != 0) return false;
    }
    return true;
  };
  cli::Command first{.data_dir = (root / "data").string(), .quiet = true, .overrides = small};
  if (!train_eval(root / "a", first)) return {false, "first run failed: " + err.str()};
  cli::Command second{.config_path = (root / "a" / "resolved_config.ini").string(), .quiet = true};
  if (!train_eval(root / "b", second)) return {false, "second run failed: " + err.str()};

  std::string differing;
  for (const char* f : {"report.json", "report.csv"}) {
    const auto a = slurp(root / "a" / f), b = slurp(root / "b" / f);
    if (a.empty() || a != b) differing += std::string(" ") + f;
  }
  // history.csv ends with a wall-clock column; everything before it must match.
  auto without_wall = [](const std::string& text) {
    std::istringstream in(text);
    std::string line, out;
    while (std::getline(in, line)) out += line.substr(0, line.rfind(',')) + "\n";
    return out;
  };
  const auto ha = slurp(root / "a" / "history.csv"), hb = slurp(root / "b" / "history.csv");
  if (ha.empty() || without_wall(ha) != without_wall(hb)) differing += " history.csv";
  return {differing.empty(),
          differing.empty() ? "report.json and report.csv byte-identical; training history identical apart from wall time"
                            : "differs:" + differing};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"synthetic end-to-end", c1_end_to_end},
      {"horizon degradation", c2_horizon},
      {"scenario ordering", c3_scenarios},
      {"isda reduction", c4_isda_reduction},
      {"isda gradients", c5_isda_gradients},
      {"metric oracle", c6_metrics},
      {"otc oracle", c7_otc},
      {"k-fold aggregation", c8_kfold},
      {"augmentation properties", c9_augment},
      {"dropblock", c10_dropblock},
      {"attention/softmax normalization", c11_normalization},
      {"determinism", c12_determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("criterion %2zu %s  %s: %s\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first.c_str(),
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}

#include "pairbench/report.hpp"

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <ctime>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "pairbench/attribution.hpp"
#include "pairbench/errors.hpp"

namespace pairbench {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// SHA-256 (FIPS 180-4), compact single-buffer implementation

namespace {

constexpr std::uint32_t kSha256K[64] = {
    0x428a2f98, 0x71374491, 0xb5c0fbcf, 0xe9b5dba5, 0x3956c25b, 0x59f111f1, 0x923f82a4,
    0xab1c5ed5, 0xd807aa98, 0x12835b01, 0x243185be, 0x550c7dc3, 0x72be5d74, 0x80deb1fe,
    0x9bdc06a7, 0xc19bf174, 0xe49b69c1, 0xefbe4786, 0x0fc19dc6, 0x240ca1cc, 0x2de92c6f,
    0x4a7484aa, 0x5cb0a9dc, 0x76f988da, 0x983e5152, 0xa831c66d, 0xb00327c8, 0xbf597fc7,
    0xc6e00bf3, 0xd5a79147, 0x06ca6351, 0x14292967, 0x27b70a85, 0x2e1b2138, 0x4d2c6dfc,
    0x53380d13, 0x650a7354, 0x766a0abb, 0x81c2c92e, 0x92722c85, 0xa2bfe8a1, 0xa81a664b,
    0xc24b8b70, 0xc76c51a3, 0xd192e819, 0xd6990624, 0xf40e3585, 0x106aa070, 0x19a4c116,
    0x1e376c08, 0x2748774c, 0x34b0bcb5, 0x391c0cb3, 0x4ed8aa4a, 0x5b9cca4f, 0x682e6ff3,
    0x748f82ee, 0x78a5636f, 0x84c87814, 0x8cc70208, 0x90befffa, 0xa4506ceb, 0xbef9a3f7,
    0xc67178f2};

inline std::uint32_t rotr(std::uint32_t x, int n) { return (x >> n) | (x << (32 - n)); }

class Sha256 {
 public:
  void update(const unsigned char* data, std::size_t n) {
    total_ += n;
    while (n > 0) {
      std::size_t take = std::min(n, std::size_t{64} - fill_);
      std::memcpy(buf_ + fill_, data, take);
      fill_ += take;
      data += take;
      n -= take;
      if (fill_ == 64) {
        compress(buf_);
        fill_ = 0;
      }
    }
  }

  std::string hex() {
    std::uint64_t bit_len = total_ * 8;  // message length, captured before padding
    unsigned char pad = 0x80;
    update(&pad, 1);
    unsigned char zero = 0;
    while (fill_ != 56) update(&zero, 1);
    for (int i = 0; i < 8; ++i)
      buf_[56 + i] = static_cast<unsigned char>(bit_len >> (56 - 8 * i));
    compress(buf_);
    char out[65];
    for (int i = 0; i < 8; ++i) std::snprintf(out + i * 8, 9, "%08x", h_[i]);
    return std::string(out, 64);
  }

 private:
  void compress(const unsigned char* p) {
    std::uint32_t w[64];
    for (int i = 0; i < 16; ++i)
      w[i] = (std::uint32_t(p[4 * i]) << 24) | (std::uint32_t(p[4 * i + 1]) << 16) |
             (std::uint32_t(p[4 * i + 2]) << 8) | std::uint32_t(p[4 * i + 3]);
    for (int i = 16; i < 64; ++i) {
      std::uint32_t s0 = rotr(w[i - 15], 7) ^ rotr(w[i - 15], 18) ^ (w[i - 15] >> 3);
      std::uint32_t s1 = rotr(w[i - 2], 17) ^ rotr(w[i - 2], 19) ^ (w[i - 2] >> 10);
      w[i] = w[i - 16] + s0 + w[i - 7] + s1;
    }
    std::uint32_t a = h_[0], b = h_[1], c = h_[2], d = h_[3];
    std::uint32_t e = h_[4], f = h_[5], g = h_[6], h = h_[7];
    for (int i = 0; i < 64; ++i) {
      std::uint32_t s1 = rotr(e, 6) ^ rotr(e, 11) ^ rotr(e, 25);
      std::uint32_t ch = (e & f) ^ (~e & g);
      std::uint32_t t1 = h + s1 + ch + kSha256K[i] + w[i];
      std::uint32_t s0 = rotr(a, 2) ^ rotr(a, 13) ^ rotr(a, 22);
      std::uint32_t maj = (a & b) ^ (a & c) ^ (b & c);
      std::uint32_t t2 = s0 + maj;
      h = g;
      g = f;
      f = e;
      e = d + t1;
      d = c;
      c = b;
      b = a;
      a = t1 + t2;
    }
    h_[0] += a;
    h_[1] += b;
    h_[2] += c;
    h_[3] += d;
    h_[4] += e;
    h_[5] += f;
    h_[6] += g;
    h_[7] += h;
  }

  std::uint32_t h_[8] = {0x6a09e667, 0xbb67ae85, 0x3c6ef372, 0xa54ff53a,
                         0x510e527f, 0x9b05688c, 0x1f83d9ab, 0x5be0cd19};
  unsigned char buf_[64] = {};
  std::size_t fill_{0};
  std::uint64_t total_{0};
};

}  // namespace

std::string sha256_hex(std::string_view bytes) {
  Sha256 s;
  s.update(reinterpret_cast<const unsigned char*>(bytes.data()), bytes.size());
  return s.hex();
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot read " + path.string());
  Sha256 s;
  char chunk[65536];
  while (in.read(chunk, sizeof chunk) || in.gcount() > 0)
    s.update(reinterpret_cast<const unsigned char*>(chunk),
             static_cast<std::size_t>(in.gcount()));
  return s.hex();
}

// ---------------------------------------------------------------------------
// Manifests

std::string RunManifest::canonical() const {
  std::vector<std::pair<std::string, std::string>> sorted = inputs;
  std::sort(sorted.begin(), sorted.end());
  std::string out = "pairbench-manifest-v1\n";
  out += "tool " + tool_version + "\n";
  out += "policy " + policy + "\n";
  out += "judge " + judge_id + "\n";
  out += "seed " + std::to_string(seed) + "\n";
  out += "resamples " + std::to_string(resamples) + "\n";
  for (const auto& [label, digest] : sorted) out += "input " + label + " " + digest + "\n";
  return out;
}

RunManifest make_manifest(std::vector<std::pair<std::string, std::string>> inputs,
                          std::string policy, std::string judge_id, std::uint64_t seed,
                          int resamples) {
  RunManifest m;
  m.inputs = std::move(inputs);
  m.policy = std::move(policy);
  m.judge_id = std::move(judge_id);
  m.seed = seed;
  m.resamples = resamples;
  m.run_id = sha256_hex(m.canonical());
  std::time_t now = std::time(nullptr);
  std::tm utc{};
  gmtime_r(&now, &utc);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", &utc);
  m.created_utc = stamp;
  return m;
}

std::string render_manifest(const RunManifest& manifest) {
  json doc;
  doc["format"] = "pairbench/manifest";
  doc["version"] = 1;
  doc["run_id"] = manifest.run_id;
  doc["policy"] = manifest.policy;
  doc["judge_id"] = manifest.judge_id;
  doc["seed"] = manifest.seed;
  doc["resamples"] = manifest.resamples;
  doc["tool_version"] = manifest.tool_version;
  doc["created_utc"] = manifest.created_utc;
  doc["inputs"] = json::array();
  for (const auto& [label, digest] : manifest.inputs)
    doc["inputs"].push_back({{"path", label}, {"sha256", digest}});
  return doc.dump(2) + "\n";
}

void save_manifest(const RunManifest& manifest, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << render_manifest(manifest);
}

// ---------------------------------------------------------------------------
// Bundle loading

namespace {

const json& need(const json& obj, const char* key, const std::filesystem::path& file) {
  auto it = obj.find(key);
  if (it == obj.end())
    throw ValidationError(file.string() + ": bundle is missing key \"" + key + "\"");
  return *it;
}

}  // namespace

const BundleView::ConfigData& BundleView::config(const std::string& config_id) const {
  for (const ConfigData& c : configs)
    if (c.config_id == config_id) return c;
  throw ValidationError("bundle has no configuration \"" + config_id + "\"");
}

BundleView load_bundle(const std::filesystem::path& bundle_json) {
  std::ifstream in(bundle_json);
  if (!in) throw ValidationError("cannot read " + bundle_json.string());
  json doc = json::parse(in, nullptr, false);
  if (doc.is_discarded())
    throw ValidationError(bundle_json.string() + ": not valid JSON");
  if (need(doc, "format", bundle_json) != "pairbench/bundle")
    throw ValidationError(bundle_json.string() + ": format is not pairbench/bundle");
  if (need(doc, "version", bundle_json) != kSchemaVersion)
    throw ValidationError(bundle_json.string() + ": unsupported bundle version");

  BundleView view;
  view.root = bundle_json.parent_path();
  auto tracked = [&view](const std::string& label) {
    std::filesystem::path path = view.root / label;
    view.files.emplace_back(label, path);
    return path;
  };
  view.files.emplace_back(bundle_json.filename().string(), bundle_json);
  view.tasks = load_tasks(tracked(need(doc, "tasks", bundle_json).get<std::string>()));

  const json& judges = need(doc, "judges", bundle_json);
  view.det_judge = need(judges, "det", bundle_json).get<std::string>();
  view.llm_judge = need(judges, "llm", bundle_json).get<std::string>();
  view.llm_judge_b = need(judges, "llm_b", bundle_json).get<std::string>();

  for (const json& entry : need(doc, "configs", bundle_json)) {
    BundleView::ConfigData data;
    data.config_id = need(entry, "config_id", bundle_json).get<std::string>();
    data.scale = need(entry, "scale", bundle_json).get<std::string>();
    data.role = need(entry, "role", bundle_json).get<std::string>();
    data.det = load_verdicts(tracked(need(entry, "det", bundle_json).get<std::string>()));
    data.llm = load_verdicts(tracked(need(entry, "llm", bundle_json).get<std::string>()));
    data.llm_b =
        load_verdicts(tracked(need(entry, "llm_b", bundle_json).get<std::string>()));
    data.det_artifact = need(entry, "det_artifact", bundle_json).get<bool>();
    data.det_test = need(entry, "det_test", bundle_json).get<bool>();
    data.llm_test = need(entry, "llm_test", bundle_json).get<bool>();
    view.configs.push_back(std::move(data));
  }
  if (view.configs.empty())
    throw ValidationError(bundle_json.string() + ": bundle lists no configurations");

  for (const json& entry : need(doc, "scale_pairs", bundle_json))
    view.scale_pairs.push_back({need(entry, "scale", bundle_json).get<std::string>(),
                                need(entry, "pre", bundle_json).get<std::string>(),
                                need(entry, "post", bundle_json).get<std::string>()});
  for (const json& entry : need(doc, "w_order", bundle_json))
    view.w_order.push_back(entry.get<std::string>());
  for (const json& entry : need(doc, "shift_order", bundle_json))
    view.shift_order.push_back(entry.get<std::string>());
  const json& saturation = need(doc, "saturation", bundle_json);
  view.saturation_a = need(saturation, "a", bundle_json).get<std::string>();
  view.saturation_b = need(saturation, "b", bundle_json).get<std::string>();
  const json& attribution = need(doc, "attribution", bundle_json);
  view.attribution_pre_small = need(attribution, "pre_small", bundle_json).get<std::string>();
  view.attribution_pre_large = need(attribution, "pre_large", bundle_json).get<std::string>();
  view.attribution_post = need(attribution, "post", bundle_json).get<std::string>();
  view.per_skill_config = need(doc, "per_skill_config", bundle_json).get<std::string>();
  return view;
}

// ---------------------------------------------------------------------------
// Report rendering

namespace {

/// Left-aligned plain-text table with two-space column gaps.
class TableWriter {
 public:
  void row(std::vector<std::string> cells) { rows_.push_back(std::move(cells)); }

  std::string str() const {
    std::vector<std::size_t> width;
    for (const auto& r : rows_) {
      if (r.size() > width.size()) width.resize(r.size(), 0);
      for (std::size_t i = 0; i < r.size(); ++i) width[i] = std::max(width[i], r[i].size());
    }
    std::string out;
    for (const auto& r : rows_) {
      std::string line;
      for (std::size_t i = 0; i < r.size(); ++i) {
        line += r[i];
        if (i + 1 < r.size()) line.append(width[i] - r[i].size() + 2, ' ');
      }
      while (!line.empty() && line.back() == ' ') line.pop_back();
      out += line + "\n";
    }
    return out;
  }

 private:
  std::vector<std::vector<std::string>> rows_;
};

std::string fixed(double v, int decimals) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

std::string signed_fixed(double v, int decimals) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%+.*f", decimals, v);
  return buf;
}

std::string ci_str(double lo, double hi) {
  return "[" + signed_fixed(lo, 3) + ", " + signed_fixed(hi, 3) + "]";
}

std::string exact(const Rational& r) {
  return std::to_string(r.num()) + "/" + std::to_string(r.den());
}

std::string exact(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class Tsv {
 public:
  void add(const std::string& block, const std::string& row, const std::string& col,
           const std::string& rendered, const std::string& exact_value) {
    out_ += block + "\t" + row + "\t" + col + "\t" + rendered + "\t" + exact_value + "\n";
  }
  std::string take() { return std::move(out_); }

 private:
  std::string out_ = "block\trow\tcol\trendered\texact\n";
};

struct ViewStats {
  PairedOutcomes pairs;
  DeltaStats stats;
};

ViewStats view_stats(const BundleView::ConfigData& config, bool llm_view) {
  ViewStats v;
  v.pairs = pair(llm_view ? config.llm : config.det, config.config_id);
  v.stats = delta(v.pairs.table());
  return v;
}

std::string mcnemar_label(const McNemarResult& r) {
  if (r.variant == McNemarVariant::kChi2Continuity)
    return "chi2=" + render_chi2(*r.statistic);
  return "exact";
}

}  // namespace

ReportDocument render_report(const BundleView& bundle, const ReportOptions& options,
                             const RunManifest& manifest) {
  std::string text;
  Tsv tsv;

  text += "pairbench consolidated report\n";
  text += "=============================\n";
  text += "manifest " + manifest.run_id + "\n";
  text += "policy " + manifest.policy + "; seed " + std::to_string(options.seed) +
          "; resamples " + std::to_string(options.resamples) + "; tool pairbench " +
          manifest.tool_version + "\n\n";

  // --- sft-contribution: per-scale decomposition, LLM-only view -------------
  {
    text += "## sft-contribution (LLM-only view)\n";
    TableWriter t;
    t.row({"scale", "pre", "post", "pre_bl", "pre_cu", "pre_delta", "sft_dbl", "sft_dcu",
           "delta_lift"});
    for (const auto& sp : bundle.scale_pairs) {
      ViewStats pre = view_stats(bundle.config(sp.pre), true);
      ViewStats post = view_stats(bundle.config(sp.post), true);
      Rational dbl = post.stats.pass_bl - pre.stats.pass_bl;
      Rational dcu = post.stats.pass_cu - pre.stats.pass_cu;
      Rational lift = delta_lift(pre.stats, post.stats);
      t.row({sp.scale, sp.pre, sp.post, render_rate(pre.stats.pass_bl),
             render_rate(pre.stats.pass_cu), pre.stats.delta.to_signed_fixed(3),
             dbl.to_signed_fixed(3), dcu.to_signed_fixed(3), lift.to_signed_fixed(3)});
      tsv.add("sft-contribution", sp.scale, "pre_bl", render_rate(pre.stats.pass_bl),
              exact(pre.stats.pass_bl));
      tsv.add("sft-contribution", sp.scale, "pre_cu", render_rate(pre.stats.pass_cu),
              exact(pre.stats.pass_cu));
      tsv.add("sft-contribution", sp.scale, "pre_delta", pre.stats.delta.to_signed_fixed(3),
              exact(pre.stats.delta));
      tsv.add("sft-contribution", sp.scale, "sft_dbl", dbl.to_signed_fixed(3), exact(dbl));
      tsv.add("sft-contribution", sp.scale, "sft_dcu", dcu.to_signed_fixed(3), exact(dcu));
      tsv.add("sft-contribution", sp.scale, "delta_lift", lift.to_signed_fixed(3),
              exact(lift));
    }
    text += t.str() + "\n";
  }

  // --- pass-rates: all configs, LLM-only view -------------------------------
  {
    text += "## pass-rates (LLM-only view)\n";
    TableWriter t;
    t.row({"role", "config", "bl", "cu", "delta", "mcnemar_p", "ci95"});
    for (const auto& config : bundle.configs) {
      ViewStats v = view_stats(config, true);
      std::string p_str = "-", ci = "-";
      if (config.llm_test) {
        McNemarResult m = mcnemar(v.pairs.table());
        BootstrapCI b = paired_bootstrap_ci(v.pairs, options.resamples, options.seed);
        p_str = render_p(m.p_value);
        ci = ci_str(b.lo, b.hi);
        tsv.add("pass-rates", config.config_id, "mcnemar_p", p_str, exact(m.p_value));
        tsv.add("pass-rates", config.config_id, "ci_lo", signed_fixed(b.lo, 3), exact(b.lo));
        tsv.add("pass-rates", config.config_id, "ci_hi", signed_fixed(b.hi, 3), exact(b.hi));
      }
      t.row({config.role, config.config_id, render_rate(v.stats.pass_bl),
             render_rate(v.stats.pass_cu), v.stats.delta.to_signed_fixed(3), p_str, ci});
      tsv.add("pass-rates", config.config_id, "bl", render_rate(v.stats.pass_bl),
              exact(v.stats.pass_bl));
      tsv.add("pass-rates", config.config_id, "cu", render_rate(v.stats.pass_cu),
              exact(v.stats.pass_cu));
      tsv.add("pass-rates", config.config_id, "delta", v.stats.delta.to_signed_fixed(3),
              exact(v.stats.delta));
    }
    text += t.str() + "\n";
  }

  // --- pre-sft-trajectory ----------------------------------------------------
  {
    text += "## pre-sft-trajectory (LLM-only view)\n";
    std::vector<std::pair<std::string, DeltaStats>> seq;
    for (const std::string& id : bundle.w_order)
      seq.emplace_back(id, view_stats(bundle.config(id), true).stats);
    DeltaSequence w = delta_sequence(seq);
    TableWriter t;
    t.row({"config", "delta"});
    for (const auto& [id, d] : w.deltas) {
      t.row({id, d.to_signed_fixed(3)});
      tsv.add("pre-sft-trajectory", id, "delta", d.to_signed_fixed(3), exact(d));
    }
    text += t.str();
    text += "sign_changes " + std::to_string(w.sign_changes) + "\n\n";
    tsv.add("pre-sft-trajectory", "-", "sign_changes", std::to_string(w.sign_changes),
            std::to_string(w.sign_changes));
  }

  // --- rejudge-shifts ---------------------------------------------------------
  {
    text += "## rejudge-shifts (deterministic-mixed -> LLM-only)\n";
    std::vector<std::pair<std::string, DeltaStats>> det_view, llm_view;
    for (const std::string& id : bundle.shift_order) {
      const auto& config = bundle.config(id);
      det_view.emplace_back(id, view_stats(config, false).stats);
      llm_view.emplace_back(id, view_stats(config, true).stats);
    }
    TableWriter t;
    t.row({"config", "shift_bl", "shift_cu", "shift_delta"});
    for (const RejudgeShiftRow& row : rejudge_shift(det_view, llm_view)) {
      t.row({row.config_id, row.shift_bl.to_signed_fixed(3), row.shift_cu.to_signed_fixed(3),
             row.shift_delta_delta.to_signed_fixed(3)});
      tsv.add("rejudge-shifts", row.config_id, "shift_bl", row.shift_bl.to_signed_fixed(3),
              exact(row.shift_bl));
      tsv.add("rejudge-shifts", row.config_id, "shift_cu", row.shift_cu.to_signed_fixed(3),
              exact(row.shift_cu));
      tsv.add("rejudge-shifts", row.config_id, "shift_delta",
              row.shift_delta_delta.to_signed_fixed(3), exact(row.shift_delta_delta));
    }
    text += t.str() + "\n";
  }

  // --- paired-tests ------------------------------------------------------------
  {
    text += "## paired-tests (per-model McNemar + paired bootstrap)\n";
    TableWriter t;
    t.row({"config", "view", "delta", "test", "p", "ci95"});
    struct TestRow {
      std::string config_id;
      bool llm_view;
      double p;
    };
    std::vector<TestRow> test_rows;
    for (const auto& config : bundle.configs) {
      for (bool llm_view : {false, true}) {
        if (llm_view ? !config.llm_test : !config.det_test) continue;
        ViewStats v = view_stats(config, llm_view);
        McNemarResult m = mcnemar(v.pairs.table());
        BootstrapCI b = paired_bootstrap_ci(v.pairs, options.resamples, options.seed);
        std::string view_name = llm_view ? "llm" : "det";
        t.row({config.config_id, view_name, v.stats.delta.to_signed_fixed(3),
               mcnemar_label(m), render_p(m.p_value), ci_str(b.lo, b.hi)});
        std::string row_id = config.config_id + "/" + view_name;
        tsv.add("paired-tests", row_id, "delta", v.stats.delta.to_signed_fixed(3),
                exact(v.stats.delta));
        tsv.add("paired-tests", row_id, "test", mcnemar_label(m), mcnemar_label(m));
        tsv.add("paired-tests", row_id, "p", render_p(m.p_value), exact(m.p_value));
        tsv.add("paired-tests", row_id, "ci_lo", signed_fixed(b.lo, 3), exact(b.lo));
        tsv.add("paired-tests", row_id, "ci_hi", signed_fixed(b.hi, 3), exact(b.hi));
        test_rows.push_back({config.config_id, llm_view, m.p_value});
      }
    }
    text += t.str();
    for (bool llm_view : {false, true}) {
      std::vector<const TestRow*> rows;
      for (const TestRow& row : test_rows)
        if (row.llm_view == llm_view) rows.push_back(&row);
      if (rows.empty()) continue;
      int m = static_cast<int>(rows.size());
      std::string view_name = llm_view ? "llm" : "det";
      std::string line = "bonferroni (m=" + std::to_string(m) + ", alpha 0.05, " + view_name +
                         " view):";
      for (const TestRow* row : rows) {
        double adj = bonferroni(row->p, m);
        line += " " + row->config_id + " " + render_p(row->p) + " -> " + render_p(adj) +
                (adj <= 0.05 ? " (survives)" : " (does not survive)") + ";";
        tsv.add("paired-tests", row->config_id + "/" + view_name, "bonferroni_p",
                render_p(adj), exact(adj));
      }
      line.pop_back();
      text += line + "\n";
    }
    text += "\n";
  }

  // --- saturation ---------------------------------------------------------------
  {
    text += "## saturation (" + bundle.saturation_a + " vs " + bundle.saturation_b + ")\n";
    TableWriter t;
    t.row({"view", "delta_diff", "ci95", "p_one_sided"});
    for (bool llm_view : {false, true}) {
      ViewStats a = view_stats(bundle.config(bundle.saturation_a), llm_view);
      ViewStats b = view_stats(bundle.config(bundle.saturation_b), llm_view);
      SaturationTest s =
          saturation_test(a.pairs, b.pairs, options.resamples, options.seed);
      std::string view_name = llm_view ? "llm" : "det";
      t.row({view_name, s.delta_diff.to_signed_fixed(3), ci_str(s.ci_lo, s.ci_hi),
             render_p(s.p_one_sided)});
      tsv.add("saturation", view_name, "delta_diff", s.delta_diff.to_signed_fixed(3),
              exact(s.delta_diff));
      tsv.add("saturation", view_name, "ci_lo", signed_fixed(s.ci_lo, 3), exact(s.ci_lo));
      tsv.add("saturation", view_name, "ci_hi", signed_fixed(s.ci_hi, 3), exact(s.ci_hi));
      tsv.add("saturation", view_name, "p_one_sided", render_p(s.p_one_sided),
              exact(s.p_one_sided));
    }
    text += t.str() + "\n";
  }

  // --- attribution ----------------------------------------------------------------
  {
    text += "## attribution (" + bundle.attribution_post + " over " +
            bundle.attribution_pre_small + " via " + bundle.attribution_pre_large + ")\n";
    AttributionSplit split[2];
    Rational pre_delta[2], post_delta[2];
    for (bool llm_view : {false, true}) {
      DeltaStats pre_small =
          view_stats(bundle.config(bundle.attribution_pre_small), llm_view).stats;
      DeltaStats pre_large =
          view_stats(bundle.config(bundle.attribution_pre_large), llm_view).stats;
      DeltaStats post = view_stats(bundle.config(bundle.attribution_post), llm_view).stats;
      split[llm_view ? 1 : 0] = attribution_split(pre_small, pre_large, post);
      pre_delta[llm_view ? 1 : 0] = pre_large.delta;
      post_delta[llm_view ? 1 : 0] = post.delta;
    }
    TableWriter t;
    t.row({"component", "det_dbl", "det_dcu", "llm_dbl", "llm_dcu"});
    auto add = [&](const std::string& name, const Rational& det_bl, const Rational& det_cu,
                   const Rational& llm_bl, const Rational& llm_cu) {
      t.row({name, det_bl.to_signed_fixed(3), det_cu.to_signed_fixed(3),
             llm_bl.to_signed_fixed(3), llm_cu.to_signed_fixed(3)});
      tsv.add("attribution", name, "det_dbl", det_bl.to_signed_fixed(3), exact(det_bl));
      tsv.add("attribution", name, "det_dcu", det_cu.to_signed_fixed(3), exact(det_cu));
      tsv.add("attribution", name, "llm_dbl", llm_bl.to_signed_fixed(3), exact(llm_bl));
      tsv.add("attribution", name, "llm_dcu", llm_cu.to_signed_fixed(3), exact(llm_cu));
    };
    add("base-scaling", split[0].base_scaling_bl, split[0].base_scaling_cu,
        split[1].base_scaling_bl, split[1].base_scaling_cu);
    add("sft", split[0].sft_bl, split[0].sft_cu, split[1].sft_bl, split[1].sft_cu);
    add("total", split[0].total_bl, split[0].total_cu, split[1].total_bl,
        split[1].total_cu);
    text += t.str();
    text += "delta-lift: det " + pre_delta[0].to_signed_fixed(3) + " -> " +
            post_delta[0].to_signed_fixed(3) + " (" + split[0].delta_lift_sft.to_signed_fixed(3) +
            "); llm " + pre_delta[1].to_signed_fixed(3) + " -> " +
            post_delta[1].to_signed_fixed(3) + " (" + split[1].delta_lift_sft.to_signed_fixed(3) +
            ")\n\n";
    tsv.add("attribution", "delta-lift", "det", split[0].delta_lift_sft.to_signed_fixed(3),
            exact(split[0].delta_lift_sft));
    tsv.add("attribution", "delta-lift", "llm", split[1].delta_lift_sft.to_signed_fixed(3),
            exact(split[1].delta_lift_sft));
  }

  // --- per-skill --------------------------------------------------------------------
  {
    const auto& config = bundle.config(bundle.per_skill_config);
    text += "## per-skill (" + config.config_id + ", deterministic-mixed view)\n";
    PerSkillResult det_result = per_skill(config.det, bundle.tasks, config.config_id);
    text += "census: lift " + std::to_string(det_result.census.lift) + " / flat " +
            std::to_string(det_result.census.flat) + " / regress " +
            std::to_string(det_result.census.regress) + " (" +
            std::to_string(det_result.reports.size()) + " skills)\n";
    tsv.add("per-skill", "census", "lift", std::to_string(det_result.census.lift),
            std::to_string(det_result.census.lift));
    tsv.add("per-skill", "census", "flat", std::to_string(det_result.census.flat),
            std::to_string(det_result.census.flat));
    tsv.add("per-skill", "census", "regress", std::to_string(det_result.census.regress),
            std::to_string(det_result.census.regress));

    std::vector<const SkillReport*> lift, regress;
    std::int64_t flat_count = 0, flat_ceiling = 0;
    for (const SkillReport& report : det_result.reports) {
      if (report.cluster == SkillCluster::kLift) lift.push_back(&report);
      if (report.cluster == SkillCluster::kRegress) regress.push_back(&report);
      if (report.cluster == SkillCluster::kFlat) {
        ++flat_count;
        if (report.bl_rate >= Rational(4, 5)) ++flat_ceiling;
      }
    }
    auto by_delta_desc = [](const SkillReport* a, const SkillReport* b) {
      if (a->delta != b->delta) return b->delta < a->delta;
      return a->skill_id < b->skill_id;
    };
    std::sort(lift.begin(), lift.end(), by_delta_desc);
    std::sort(regress.begin(), regress.end(), by_delta_desc);

    text += "lift (sorted by delta):\n";
    for (const SkillReport* report : lift) {
      text += "  " + report->skill_id + " " + report->delta.to_signed_fixed(2) +
              " (baseline " + render_rate(report->bl_rate) + " -> curated " +
              render_rate(report->cu_rate) + ")\n";
      tsv.add("per-skill", report->skill_id, "delta", report->delta.to_signed_fixed(2),
              exact(report->delta));
      tsv.add("per-skill", report->skill_id, "bl", render_rate(report->bl_rate),
              exact(report->bl_rate));
      tsv.add("per-skill", report->skill_id, "cu", render_rate(report->cu_rate),
              exact(report->cu_rate));
    }
    text += "flat: " + std::to_string(flat_count) + " skills, " +
            std::to_string(flat_ceiling) + " at baseline >= 0.800\n";
    tsv.add("per-skill", "flat", "at_ceiling", std::to_string(flat_ceiling),
            std::to_string(flat_ceiling));
    text += "regress:\n";
    for (const SkillReport* report : regress) {
      text += "  " + report->skill_id + " " + report->delta.to_signed_fixed(2) +
              " (baseline " + render_rate(report->bl_rate) + " -> curated " +
              render_rate(report->cu_rate) + ")\n";
      tsv.add("per-skill", report->skill_id, "delta", report->delta.to_signed_fixed(2),
              exact(report->delta));
    }

    PerSkillResult llm_result = per_skill(config.llm, bundle.tasks, config.config_id);
    std::string llm_regress;
    for (const SkillReport& report : llm_result.reports)
      if (report.cluster == SkillCluster::kRegress)
        llm_regress += (llm_regress.empty() ? "" : ", ") + report.skill_id;
    text += "llm-only view: lift " + std::to_string(llm_result.census.lift) + " / flat " +
            std::to_string(llm_result.census.flat) + " / regress " +
            std::to_string(llm_result.census.regress) +
            (llm_regress.empty() ? "" : "; regress cluster: " + llm_regress) + "\n\n";
    tsv.add("per-skill", "census-llm", "lift", std::to_string(llm_result.census.lift),
            std::to_string(llm_result.census.lift));
    tsv.add("per-skill", "census-llm", "flat", std::to_string(llm_result.census.flat),
            std::to_string(llm_result.census.flat));
    tsv.add("per-skill", "census-llm", "regress", std::to_string(llm_result.census.regress),
            std::to_string(llm_result.census.regress));
  }

  text += "end of report; manifest " + manifest.run_id + "; seed " +
          std::to_string(options.seed) + "\n";

  ReportDocument doc;
  doc.text = std::move(text);
  doc.tsv = tsv.take();
  return doc;
}

}  // namespace pairbench

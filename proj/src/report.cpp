#include "hintbits/report.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <memory>
#include <json.hpp>
#include <sstream>

#include "hintbits/errors.hpp"
#include "hintbits/infotheory.hpp"

namespace hintbits {

namespace {

using json = nlohmann::ordered_json;

class Sha256 {
 public:
  Sha256() : ctx_(EVP_MD_CTX_new(), &EVP_MD_CTX_free) {
    if (!ctx_ || EVP_DigestInit_ex(ctx_.get(), EVP_sha256(), nullptr) != 1) {
      throw std::runtime_error("sha256 init failed");
    }
  }
  void update(const void* data, std::size_t n) {
    EVP_DigestUpdate(ctx_.get(), data, n);
  }
  void update_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open " + path.string());
    std::array<char, 1 << 16> buf{};
    while (in) {
      in.read(buf.data(), buf.size());
      update(buf.data(), static_cast<std::size_t>(in.gcount()));
    }
  }
  std::string hex() {
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx_.get(), md.data(), &len);
    static const char* digits = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
      out.push_back(digits[md[i] >> 4]);
      out.push_back(digits[md[i] & 0xf]);
    }
    return out;
  }

 private:
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx_;
};

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

json number_or_null(double x) {
  if (!std::isfinite(x)) return nullptr;
  return x;
}

json manifest_json(const RunManifest& m) {
  json j;
  j["command"] = m.command;
  j["tool_version"] = m.tool_version;
  json cfg = json::object();
  for (const auto& [k, v] : m.config) cfg[k] = v;
  j["config"] = cfg;
  json inputs = json::object();
  for (const auto& [k, v] : m.inputs) inputs[k] = v;
  j["inputs"] = inputs;
  if (m.wall_clock_seconds) j["wall_clock_seconds"] = *m.wall_clock_seconds;
  return j;
}

void manifest_comment(std::ostringstream& out, const RunManifest& m,
                      const char* prefix, const char* suffix = "") {
  const auto line = [&](const std::string& key, const std::string& value) {
    out << prefix << key << ": " << value << suffix << '\n';
  };
  line("command", m.command);
  line("tool_version", m.tool_version);
  for (const auto& [k, v] : m.config) line(k, v);
  for (const auto& [k, v] : m.inputs) line("input " + k, "sha256 " + v);
  if (m.wall_clock_seconds) {
    line("wall_clock_seconds", format_number(*m.wall_clock_seconds));
  }
}

std::string fixed1(double x) {
  if (!std::isfinite(x)) return "n/a";
  std::array<char, 64> buf{};
  auto [ptr, ec] =
      std::to_chars(buf.data(), buf.data() + buf.size(), x, std::chars_format::fixed, 1);
  std::string s(buf.data(), ptr);
  if (s == "-0.0") s = "0.0";
  return s;
}

}  // namespace

void RunManifest::set(std::string key, std::string value) {
  for (auto& [k, v] : config) {
    if (k == key) {
      v = std::move(value);
      return;
    }
  }
  config.emplace_back(std::move(key), std::move(value));
}

void RunManifest::add_input(std::string path, std::string digest) {
  inputs.emplace_back(std::move(path), std::move(digest));
}

std::string sha256_file(const std::filesystem::path& path) {
  Sha256 h;
  h.update_file(path);
  return h.hex();
}

std::string sha256_tree(const std::filesystem::path& root) {
  namespace fs = std::filesystem;
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) files.push_back(fs::relative(e.path(), root));
  }
  std::sort(files.begin(), files.end());
  Sha256 h;
  for (const auto& rel : files) {
    const std::string name = rel.generic_string();
    h.update(name.data(), name.size() + 1);  // include the NUL separator
    const std::string inner = sha256_file(root / rel);
    h.update(inner.data(), inner.size());
  }
  return h.hex();
}

std::string sha256_path(const std::filesystem::path& path) {
  return std::filesystem::is_directory(path) ? sha256_tree(path) : sha256_file(path);
}

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return std::string(buf.data(), ptr);
}

std::string render_eval_report(const RunManifest& manifest,
                               std::span<const SubsetReport> rows,
                               ReportFormat format) {
  std::ostringstream out;
  switch (format) {
    case ReportFormat::kCsv: {
      manifest_comment(out, manifest, "# ");
      const auto& cols = report_columns();
      for (std::size_t i = 0; i < cols.size(); ++i) {
        out << (i ? "," : "") << cols[i];
      }
      out << '\n';
      for (const auto& r : rows) {
        out << csv_field(r.subset) << ',' << r.g << ',' << r.skipped << ','
            << format_number(r.soft_acc1) << ',' << format_number(r.soft_acc2)
            << ',' << format_number(r.hard_acc1) << ','
            << format_number(r.hard_acc2) << ',' << format_number(r.delta_i1)
            << ',' << format_number(r.delta_i2) << ',' << format_number(r.i0)
            << '\n';
      }
      break;
    }
    case ReportFormat::kJson: {
      json doc;
      doc["manifest"] = manifest_json(manifest);
      json arr = json::array();
      for (const auto& r : rows) {
        json row;
        row["subset"] = r.subset;
        row["g"] = r.g;
        row["skipped"] = r.skipped;
        row["soft_acc1"] = number_or_null(r.soft_acc1);
        row["soft_acc2"] = number_or_null(r.soft_acc2);
        row["hard_acc1"] = number_or_null(r.hard_acc1);
        row["hard_acc2"] = number_or_null(r.hard_acc2);
        row["delta_i1"] = number_or_null(r.delta_i1);
        row["delta_i2"] = number_or_null(r.delta_i2);
        row["i0"] = number_or_null(r.i0);
        arr.push_back(std::move(row));
      }
      doc["rows"] = std::move(arr);
      out << doc.dump(2) << '\n';
      break;
    }
    case ReportFormat::kMarkdown: {
      manifest_comment(out, manifest, "<!-- ", " -->");
      out << '\n';
      out << "| Subset | G | Skipped | Soft acc. single-hint (%) | Soft acc. "
             "two-hints (%) | Hard acc. single-hint (%) | Hard acc. two-hints "
             "(%) | dI1 (bits) | dI2 (bits) |\n";
      out << "|---|---:|---:|---:|---:|---:|---:|---:|---:|\n";
      for (const auto& r : rows) {
        out << "| " << r.subset << " | " << r.g << " | " << r.skipped << " | "
            << fixed1(100.0 * r.soft_acc1) << " | " << fixed1(100.0 * r.soft_acc2)
            << " | " << fixed1(100.0 * r.hard_acc1) << " | "
            << fixed1(100.0 * r.hard_acc2) << " | " << fixed1(r.delta_i1) << " | "
            << fixed1(r.delta_i2) << " |\n";
      }
      break;
    }
  }
  return out.str();
}

std::string render_curve_csv(const RunManifest& manifest,
                             std::span<const CurvePoint> curve) {
  std::ostringstream out;
  manifest_comment(out, manifest, "# ");
  out << "g,hard_acc,soft_acc\n";
  for (const auto& p : curve) {
    out << p.g << ',' << format_number(p.hard_acc) << ','
        << format_number(p.soft_acc) << '\n';
  }
  return out.str();
}

std::string render_model_summary(const RunManifest& manifest,
                                 const ModelSummary& summary) {
  const auto& res = summary.result;
  const std::size_t half = res.ranks.size();

  // Ten equal-width bins over ranks 1..m/2, plus everything beyond m/2.
  constexpr std::size_t kBins = 10;
  std::vector<std::size_t> bins(kBins, 0);
  std::size_t beyond = 0, max_rank = 0;
  for (const auto& r : res.ranks) {
    max_rank = std::max(max_rank, r.o_t);
    if (r.o_t > half) {
      ++beyond;
      continue;
    }
    const std::size_t b = (r.o_t - 1) * kBins / half;
    ++bins[std::min(b, kBins - 1)];
  }

  json doc;
  doc["manifest"] = manifest_json(manifest);
  json params;
  params["m"] = summary.params.m;
  params["dim"] = summary.params.d;
  params["phi_norm"] = summary.params.phi_norm;
  params["noise_sigma"] = summary.params.noise_sigma;
  params["seed"] = summary.params.seed;
  doc["model"] = params;
  json result;
  result["pairs"] = half;
  result["h_g_mean_bits"] = res.h_g_mean;
  result["bias_bits"] = res.bias_bits;
  result["i0_bits"] = base_information(summary.params.m);
  result["info_gain_bits"] = res.info_gain_bits;
  json hist;
  hist["bins"] = bins;
  hist["ranks_beyond_half"] = beyond;
  hist["max_rank"] = max_rank;
  result["rank_histogram"] = hist;
  doc["result"] = result;
  return doc.dump(2) + "\n";
}

DiceWalkthrough compute_dice_walkthrough() {
  const std::vector<double> loaded = {1.0 / 6, 1.0 / 24, 1.0 / 3,
                                      1.0 / 12, 1.0 / 3, 1.0 / 24};
  const std::vector<double> fair(6, 1.0 / 6);
  const std::vector<double> after_h1 = {1.0 / 8, 1.0 / 8, 1.0 / 4,
                                        1.0 / 4, 1.0 / 8, 1.0 / 8};
  const std::vector<double> after_h2 = {1.0 / 13, 1.0 / 13, 3.0 / 13,
                                        4.0 / 13, 2.0 / 13, 2.0 / 13};
  DiceWalkthrough w;
  w.acc0 = expected_guesser_accuracy({loaded, fair});
  w.acc1 = expected_guesser_accuracy({loaded, after_h1});
  w.acc2 = expected_guesser_accuracy({loaded, after_h2});
  w.i0 = base_information(6);
  w.i1 = std::log2(1.0 / w.acc1);
  w.i2 = std::log2(1.0 / w.acc2);
  w.delta_i1 = delta_i1(w.acc1, 6);
  w.delta_i2 = delta_i2(w.acc1, w.acc2);
  w.c0 = std::exp2(w.i0);
  w.c1 = std::exp2(w.i1);
  w.c2 = std::exp2(w.i2);
  return w;
}

std::string render_dice_walkthrough(const DiceWalkthrough& w) {
  std::ostringstream out;
  out.precision(6);
  out << std::fixed;
  out << "Loaded six-sided die: P = (1/6, 1/24, 1/3, 1/12, 1/3, 1/24)\n\n";
  out << "No hint (guess uniformly)\n"
      << "  accuracy            acc0 = " << w.acc0 << "  (1/6)\n"
      << "  missing information I0   = " << w.i0 << " bits  (log2 6)\n"
      << "  effective cardinality C0 = " << w.c0 << "\n\n";
  out << "Hint h1: outcomes cluster around 3 and 4 (true)\n"
      << "  model               (1/8, 1/8, 1/4, 1/4, 1/8, 1/8), guess 3 or 4\n"
      << "  accuracy            acc1 = " << w.acc1 << "  (5/24)\n"
      << "  missing information I1   = " << w.i1 << " bits  (log2 24/5)\n"
      << "  effective cardinality C1 = " << w.c1 << "\n"
      << "  information added   dI1  = " << w.delta_i1 << " bits\n\n";
  out << "Hint h2: outcomes favour 4, 5 or 6 (false)\n"
      << "  model               (1/13, 1/13, 3/13, 4/13, 2/13, 2/13), guess 4\n"
      << "  accuracy            acc2 = " << w.acc2 << "  (1/12)\n"
      << "  missing information I2   = " << w.i2 << " bits  (log2 12)\n"
      << "  effective cardinality C2 = " << w.c2 << "\n"
      << "  information added   dI2  = " << w.delta_i2 << " bits\n";
  return out.str();
}

}  // namespace hintbits

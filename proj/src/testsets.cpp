#include "hintbits/testsets.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>
#include <unordered_set>

#include "hintbits/errors.hpp"

namespace hintbits {

namespace {

std::vector<std::string> split_whitespace(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> out;
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

std::string trim(std::string_view s) {
  const auto is_space = [](char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n';
  };
  std::size_t b = 0, e = s.size();
  while (b < e && is_space(s[b])) ++b;
  while (e > b && is_space(s[e - 1])) --e;
  return std::string(s.substr(b, e - b));
}

std::string ascii_lower(std::string s) { return fold_token(s, true); }

struct PairLine {
  std::string left;
  std::vector<std::string> rights;
};

}  // namespace

TestSet parse_gats(std::istream& source, std::string name) {
  TestSet set;
  set.name = std::move(name);
  std::unordered_set<std::string> labels;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(source, line)) {
    ++line_no;
    const std::string body = trim(line);
    if (body.empty()) continue;
    if (body.front() == ':') {
      std::string label = trim(std::string_view(body).substr(1));
      if (label.empty()) {
        throw InputError("line " + std::to_string(line_no) +
                         ": empty section label");
      }
      if (!labels.insert(label).second) {
        throw InputError("line " + std::to_string(line_no) +
                         ": duplicate section '" + label + "'");
      }
      set.subsets.push_back({std::move(label), {}, {}});
      continue;
    }
    if (set.subsets.empty()) {
      throw InputError("line " + std::to_string(line_no) +
                       ": item before any section header");
    }
    auto tokens = split_whitespace(body);
    if (tokens.size() != 4) {
      throw InputError("line " + std::to_string(line_no) +
                       ": four tokens required, found " +
                       std::to_string(tokens.size()));
    }
    auto& subset = set.subsets.back();
    subset.questions.push_back(AnalogyQuestion{
        std::move(tokens[0]), std::move(tokens[1]), std::move(tokens[2]),
        {std::move(tokens[3])}});
    ++subset.stats.parsed;
  }
  return set;
}

TestSet parse_gats_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open test set: " + path.string());
  return parse_gats(in, path.filename().string());
}

const std::vector<std::string>& bats_category_labels() {
  static const std::vector<std::string> labels = {
      "Inflectional morphology", "Derivational morphology",
      "Encyclopedic semantics", "Lexicographic semantics"};
  return labels;
}

std::vector<AnalogyQuestion> bats_questions_from_pairs(
    std::istream& source, const PairingPolicy& policy,
    const std::string& origin) {
  std::vector<PairLine> lines;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(source, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw InputError(origin + ":" + std::to_string(line_no) +
                       ": missing tab separator");
    }
    PairLine pl;
    pl.left = trim(std::string_view(line).substr(0, tab));
    std::stringstream rhs(trim(std::string_view(line).substr(tab + 1)));
    std::string form;
    while (std::getline(rhs, form, '/')) {
      form = trim(form);
      if (!form.empty()) pl.rights.push_back(std::move(form));
    }
    if (pl.left.empty()) {
      throw InputError(origin + ":" + std::to_string(line_no) +
                       ": empty left-hand side");
    }
    if (pl.rights.empty()) {
      throw InputError(origin + ":" + std::to_string(line_no) +
                       ": empty right-hand side");
    }
    lines.push_back(std::move(pl));
  }

  const std::size_t n = lines.size();
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  if (n >= 2) {
    const std::size_t total = n * (n - 1);
    if (!policy.sample_per_file || *policy.sample_per_file >= total) {
      pairs.reserve(total);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          if (i != j) pairs.emplace_back(i, j);
        }
      }
    } else {
      // Selection sampling keeps the chosen pairs in enumeration order.
      std::mt19937_64 rng(policy.seed);
      std::vector<std::size_t> picks(total);
      for (std::size_t k = 0; k < total; ++k) picks[k] = k;
      std::vector<std::size_t> chosen;
      std::sample(picks.begin(), picks.end(), std::back_inserter(chosen),
                  *policy.sample_per_file, rng);
      for (std::size_t k : chosen) {
        const std::size_t i = k / (n - 1);
        std::size_t j = k % (n - 1);
        if (j >= i) ++j;
        pairs.emplace_back(i, j);
      }
    }
  }

  std::vector<AnalogyQuestion> out;
  out.reserve(pairs.size());
  for (auto [i, j] : pairs) {
    out.push_back(AnalogyQuestion{lines[i].left, lines[i].rights.front(),
                                  lines[j].left, lines[j].rights});
  }
  return out;
}

TestSet load_bats(const std::filesystem::path& root,
                  const PairingPolicy& policy) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(root)) {
    throw InputError("BATS root is not a directory: " + root.string());
  }

  std::vector<fs::path> subdirs;
  for (const auto& entry : fs::directory_iterator(root)) {
    if (entry.is_directory()) subdirs.push_back(entry.path());
  }
  std::sort(subdirs.begin(), subdirs.end());

  TestSet set;
  set.name = root.filename().string();
  if (set.name.empty()) set.name = root.parent_path().filename().string();

  for (const auto& label : bats_category_labels()) {
    const std::string keyword = ascii_lower(label.substr(0, label.find(' ')));
    std::optional<fs::path> dir;
    for (const auto& d : subdirs) {
      if (ascii_lower(d.filename().string()).find(keyword) != std::string::npos) {
        dir = d;
        break;
      }
    }
    if (!dir) {
      throw InputError("missing BATS category directory for '" + label +
                       "' under " + root.string());
    }

    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(*dir)) {
      if (entry.is_regular_file()) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());

    Subset<AnalogyQuestion> subset{label, {}, {}};
    for (std::size_t f = 0; f < files.size(); ++f) {
      std::ifstream in(files[f]);
      if (!in) throw InputError("cannot open " + files[f].string());
      PairingPolicy file_policy = policy;
      // Distinct but reproducible stream per file.
      file_policy.seed = policy.seed ^ (0x9e3779b97f4a7c15ULL * (f + 1));
      auto qs = bats_questions_from_pairs(in, file_policy, files[f].string());
      subset.questions.insert(subset.questions.end(),
                              std::make_move_iterator(qs.begin()),
                              std::make_move_iterator(qs.end()));
    }
    subset.stats.parsed = subset.questions.size();
    set.subsets.push_back(std::move(subset));
  }
  return set;
}

BoundTestSet bind(const TestSet& raw, const EmbeddingStore& store) {
  BoundTestSet out;
  out.name = raw.name;
  for (const auto& subset : raw.subsets) {
    Subset<BoundQuestion> bound{subset.label, {}, {}};
    bound.stats.parsed = subset.questions.size();
    for (const auto& q : subset.questions) {
      auto alpha = store.lookup(q.alpha);
      auto beta = store.lookup(q.beta);
      auto a = store.lookup(q.a);
      std::vector<WordIndex> targets;
      for (const auto& t : q.targets) {
        if (auto idx = store.lookup(t)) {
          if (std::find(targets.begin(), targets.end(), *idx) == targets.end()) {
            targets.push_back(*idx);
          }
        }
      }
      if (!alpha || !beta || !a || targets.empty()) {
        ++bound.stats.skipped_oov;
        continue;
      }
      bound.stats.targets_dropped_oov += q.targets.size() - targets.size();
      if (std::find(targets.begin(), targets.end(), *a) != targets.end()) {
        ++bound.stats.a_is_target;
      }
      bound.questions.push_back(BoundQuestion{*alpha, *beta, *a, std::move(targets)});
    }
    bound.stats.bound = bound.questions.size();
    out.subsets.push_back(std::move(bound));
  }
  return out;
}

}  // namespace hintbits

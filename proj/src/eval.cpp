#include "shipcast/eval.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "shipcast/error.hpp"

namespace shipcast {
namespace {

using json = nlohmann::json;

bool is_punct(char c) { return std::ispunct(static_cast<unsigned char>(c)) != 0; }

std::string describe(const FragmentKey& k) { return k.area + "/" + k.attribute + "@" + k.issue_time; }

std::string percent(double v) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%.1f%%", 100.0 * v);
  return buf;
}

std::string pad(const std::string& s, std::size_t width, bool right = false) {
  if (s.size() >= width) {
    return s;
  }
  return right ? std::string(width - s.size(), ' ') + s : s + std::string(width - s.size(), ' ');
}

json score_json(const WordScore& s) {
  return {{"tp", s.tp},
          {"fp", s.fp},
          {"fn", s.fn},
          {"precision", s.precision()},
          {"recall", s.recall()},
          {"f1", s.f1()}};
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::string word;
  auto flush = [&] {
    std::size_t b = 0;
    std::size_t e = word.size();
    while (b < e && is_punct(word[b])) {
      ++b;
    }
    while (e > b && is_punct(word[e - 1])) {
      --e;
    }
    if (e > b) {
      out.push_back(word.substr(b, e - b));
    }
    word.clear();
  };
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      flush();
    } else {
      word += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
  }
  flush();
  return out;
}

WordScore word_score(const std::vector<std::string>& generated, const std::vector<std::string>& expected) {
  std::map<std::string_view, std::size_t> want;
  for (const auto& w : expected) {
    ++want[w];
  }
  WordScore s;
  for (const auto& w : generated) {
    const auto it = want.find(w);
    if (it != want.end() && it->second > 0) {
      --it->second;
      ++s.tp;
    }
  }
  s.fp = generated.size() - s.tp;
  s.fn = expected.size() - s.tp;
  return s;
}

WordScore word_score(std::string_view generated, std::string_view expected) {
  return word_score(tokenize(generated), tokenize(expected));
}

WordScore micro_average(std::span<const WordScore> scores) {
  if (scores.empty()) {
    throw Error(ErrorKind::EmptyEvaluation, "no scores to aggregate");
  }
  WordScore total;
  for (const auto& s : scores) {
    total += s;
  }
  return total;
}

json to_json(const TextRecord& r) {
  json j = {{"key", {{"area", r.key.area}, {"attribute", r.key.attribute}, {"issue_time", r.key.issue_time}}},
            {"text", r.text}};
  if (r.excluded) {
    j["excluded"] = true;
  }
  return j;
}

TextRecord text_record_from_json(const json& j) {
  try {
    TextRecord r;
    const auto& k = j.at("key");
    r.key = {k.at("area").get<std::string>(), k.at("attribute").get<std::string>(),
             k.at("issue_time").get<std::string>()};
    r.text = j.at("text").get<std::string>();
    r.excluded = j.value("excluded", false);
    return r;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::InvalidRequest, std::string("bad text record: ") + e.what());
  }
}

std::vector<TextRecord> read_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorKind::IoError, "cannot read " + path.string());
  }
  std::vector<TextRecord> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) {
      continue;
    }
    try {
      out.push_back(text_record_from_json(json::parse(line)));
    } catch (const json::exception& e) {
      throw Error(ErrorKind::InvalidRequest, path.string() + ":" + std::to_string(n) + ": " + e.what());
    }
  }
  return out;
}

void write_jsonl(const std::filesystem::path& path, const std::vector<TextRecord>& records) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream out(path);
  for (const auto& r : records) {
    out << to_json(r).dump() << "\n";
  }
  if (!out) {
    throw Error(ErrorKind::IoError, "cannot write " + path.string());
  }
}

std::vector<TextRecord> expected_records(const std::vector<Fragment>& fragments, const std::string& issue_time) {
  std::vector<TextRecord> out;
  for (const auto& f : fragments) {
    if (f.kind == FragmentKind::Gale || f.kind == FragmentKind::Synopsis) {
      continue;
    }
    for (const auto& area : f.areas) {
      out.push_back({{area, std::string(to_string(f.kind)), issue_time}, f.text, f.excluded});
    }
  }
  return out;
}

const ReportRow& EvalReport::row(const std::string& attribute, const std::string& system) const {
  for (const auto& r : rows) {
    if (r.attribute == attribute && r.system == system) {
      return r;
    }
  }
  throw Error(ErrorKind::InvalidRequest, "no report row for " + attribute + "/" + system);
}

double EvalReport::average_f1(const std::string& system) const {
  double sum = 0.0;
  for (const auto& a : attributes) {
    sum += row(a, system).score.f1();
  }
  return attributes.empty() ? 0.0 : sum / static_cast<double>(attributes.size());
}

EvalReport evaluate_systems(const std::vector<TextRecord>& expected,
                            const std::vector<std::pair<std::string, std::vector<TextRecord>>>& outputs) {
  EvalReport report;
  for (auto k : kScoredAttributes) {
    report.attributes.emplace_back(to_string(k));
  }
  std::map<FragmentKey, const TextRecord*> scored;
  std::set<FragmentKey> excluded;
  std::vector<std::string> orphans;
  for (const auto& r : expected) {
    if (r.excluded) {
      excluded.insert(r.key);
      ++report.excluded_count;
      continue;
    }
    if (std::find(report.attributes.begin(), report.attributes.end(), r.key.attribute) == report.attributes.end()) {
      throw Error(ErrorKind::AlignmentError, "expected fragment with unscored attribute " + describe(r.key));
    }
    if (!scored.emplace(r.key, &r).second) {
      throw Error(ErrorKind::AlignmentError, "duplicate expected fragment " + describe(r.key));
    }
  }

  for (const auto& [system, records] : outputs) {
    report.systems.push_back(system);
    std::map<FragmentKey, const TextRecord*> got;
    for (const auto& r : records) {
      if (excluded.contains(r.key)) {
        continue;
      }
      if (!scored.contains(r.key)) {
        orphans.push_back(system + ": unexpected " + describe(r.key));
      } else if (!got.emplace(r.key, &r).second) {
        orphans.push_back(system + ": duplicate " + describe(r.key));
      }
    }
    for (const auto& [key, rec] : scored) {
      if (!got.contains(key)) {
        orphans.push_back(system + ": missing " + describe(key));
      }
    }
    if (!orphans.empty()) {
      continue;
    }
    std::map<std::string, ReportRow> per_attr;
    for (const auto& a : report.attributes) {
      per_attr[a] = {a, system, {}, 0};
    }
    WordScore pooled;
    for (const auto& [key, rec] : scored) {
      const WordScore s = word_score(got.at(key)->text, rec->text);
      auto& row = per_attr[key.attribute];
      row.score += s;
      ++row.fragments;
      pooled += s;
    }
    for (const auto& a : report.attributes) {
      report.rows.push_back(per_attr[a]);
    }
    report.aggregate[system] = pooled;
  }
  if (!orphans.empty()) {
    std::string msg = std::to_string(orphans.size()) + " unaligned fragment(s):";
    for (const auto& o : orphans) {
      msg += "\n  " + o;
    }
    throw Error(ErrorKind::AlignmentError, msg);
  }
  if (scored.empty()) {
    throw Error(ErrorKind::EmptyEvaluation, "no single-area fragments to score");
  }
  // Keep rows attribute-major.
  std::stable_sort(report.rows.begin(), report.rows.end(), [&report](const ReportRow& a, const ReportRow& b) {
    const auto pos = [&report](const std::string& x) {
      return std::find(report.attributes.begin(), report.attributes.end(), x) - report.attributes.begin();
    };
    return pos(a.attribute) < pos(b.attribute);
  });
  return report;
}

std::string render_report(const EvalReport& report) {
  const bool diff = report.systems.size() == 2;
  std::vector<std::vector<std::string>> table;
  std::vector<std::string> head{"Attribute", "Metric"};
  head.insert(head.end(), report.systems.begin(), report.systems.end());
  if (diff) {
    head.emplace_back("Difference");
  }
  table.push_back(head);
  auto pretty = [](const std::string& attr) {
    const auto k = parse_fragment_kind(attr);
    if (k == FragmentKind::SeaState) {
      return std::string("Sea State");
    }
    std::string s = attr;
    s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
    return s;
  };
  for (const auto& a : report.attributes) {
    const std::pair<const char*, double (WordScore::*)() const> metrics[] = {
        {"Precision", &WordScore::precision}, {"Recall", &WordScore::recall}, {"F1", &WordScore::f1}};
    bool first = true;
    for (const auto& [name, fn] : metrics) {
      std::vector<std::string> line{first ? pretty(a) : "", name};
      first = false;
      std::vector<double> vals;
      for (const auto& sys : report.systems) {
        vals.push_back((report.row(a, sys).score.*fn)());
        line.push_back(percent(vals.back()));
      }
      if (diff) {
        line.push_back(percent(vals[0] - vals[1]));
      }
      table.push_back(line);
    }
  }
  std::vector<std::string> avg{"Average", "F1"};
  std::vector<double> avgs;
  for (const auto& sys : report.systems) {
    avgs.push_back(report.average_f1(sys));
    avg.push_back(percent(avgs.back()));
  }
  if (diff) {
    avg.push_back(percent(avgs[0] - avgs[1]));
  }
  table.push_back(avg);

  std::vector<std::size_t> width(head.size(), 0);
  for (const auto& line : table) {
    for (std::size_t c = 0; c < line.size(); ++c) {
      width[c] = std::max(width[c], line[c].size());
    }
  }
  std::ostringstream out;
  auto emit = [&](const std::vector<std::string>& line) {
    for (std::size_t c = 0; c < line.size(); ++c) {
      out << (c ? "  " : "") << pad(line[c], width[c], c >= 2);
    }
    out << "\n";
  };
  std::size_t total = 0;
  for (auto w : width) {
    total += w + 2;
  }
  const std::string rule(total - 2, '-');
  emit(table[0]);
  out << rule << "\n";
  for (std::size_t r = 1; r < table.size(); ++r) {
    if (r == table.size() - 1) {
      out << rule << "\n";
    }
    emit(table[r]);
  }
  out << "\nPooled over all attributes (micro):\n";
  for (const auto& sys : report.systems) {
    const auto& s = report.aggregate.at(sys);
    out << "  " << sys << ": P " << percent(s.precision()) << "  R " << percent(s.recall()) << "  F1 "
        << percent(s.f1()) << "  (tp " << s.tp << ", fp " << s.fp << ", fn " << s.fn << ")\n";
  }
  out << "Excluded multi-area fragments: " << report.excluded_count << "\n";
  return out.str();
}

json to_json(const EvalReport& report) {
  json rows = json::array();
  for (const auto& r : report.rows) {
    json j = score_json(r.score);
    j["attribute"] = r.attribute;
    j["system"] = r.system;
    j["fragments"] = r.fragments;
    rows.push_back(j);
  }
  json aggregate = json::object();
  json average = json::object();
  for (const auto& sys : report.systems) {
    aggregate[sys] = score_json(report.aggregate.at(sys));
    average[sys] = report.average_f1(sys);
  }
  json out = {{"systems", report.systems}, {"attributes", report.attributes},
              {"rows", rows},               {"aggregate", aggregate},
              {"average_f1", average},      {"excluded_count", report.excluded_count}};
  if (report.systems.size() == 2) {
    json d = json::array();
    for (const auto& a : report.attributes) {
      const auto& x = report.row(a, report.systems[0]).score;
      const auto& y = report.row(a, report.systems[1]).score;
      d.push_back({{"attribute", a},
                   {"precision", x.precision() - y.precision()},
                   {"recall", x.recall() - y.recall()},
                   {"f1", x.f1() - y.f1()}});
    }
    out["difference"] = d;
    out["average_f1_difference"] = report.average_f1(report.systems[0]) - report.average_f1(report.systems[1]);
  }
  return out;
}

}  // namespace shipcast

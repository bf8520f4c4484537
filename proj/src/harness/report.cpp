#include "svrt/harness/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "svrt/error.hpp"
#include "svrt/problems.hpp"

namespace svrt::harness {

const std::vector<ReferenceAccuracy>& reference_accuracies() {
  static const std::vector<ReferenceAccuracy> table = {
      {1, 0.57, 0.50, 0.98, 0.98},  {5, 0.54, 0.50, 0.87, 0.90},  {6, 0.76, 0.86, 0.76, 0.70},
      {7, 0.53, 0.50, 0.76, 0.90},  {8, 0.94, 0.91, 0.90, 1.00},  {15, 0.52, 0.50, 1.00, 0.95},
      {16, 0.98, 0.50, 1.00, 0.78}, {17, 0.75, 0.95, 0.67, 0.78}, {19, 0.51, 0.50, 0.61, 0.98},
      {20, 0.55, 0.50, 0.70, 0.98}, {21, 0.51, 0.51, 0.50, 0.83}, {22, 0.59, 0.50, 0.97, 1.00},
      {2, 1.00, 1.00, 0.98, 1.00},  {4, 0.98, 1.00, 0.93, 1.00},  {9, 0.93, 1.00, 0.68, 0.93},
      {10, 0.99, 1.00, 0.94, 0.98}, {12, 0.97, 1.00, 0.84, 0.95}, {14, 0.90, 1.00, 0.73, 0.98},
      {18, 0.99, 0.99, 0.99, 0.93}, {23, 0.87, 1.00, 0.75, 1.00},
  };
  return table;
}

std::optional<ReferenceAccuracy> reference_accuracy(int problem) {
  for (const auto& r : reference_accuracies())
    if (r.problem == problem) return r;
  return std::nullopt;
}

std::optional<double> reference_control_accuracy(int problem) {
  switch (problem) {
    case 6: return 0.75;
    case 8: return 0.95;
    case 17: return 0.77;
    default: return std::nullopt;
  }
}

namespace {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> split_fields(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.emplace_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

template <typename F>
auto parse_field(const std::string& s, std::size_t line, const char* name, F convert) {
  try {
    std::size_t used = 0;
    auto v = convert(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw InvalidArgument("csv line " + std::to_string(line) + ": bad " + name + " '" + s + "'");
  }
}

bool is_comparison_problem(int problem) {
  return problems::is_comparison(problems::problem_spec(problems::ProblemId(problem)).category);
}

}  // namespace

std::string to_csv(const std::vector<ResultRow>& rows) {
  std::string out(kCsvHeader);
  out += '\n';
  for (const auto& r : rows) {
    if (r.variant.find(',') != std::string::npos || r.category.find(',') != std::string::npos)
      throw InvalidArgument("csv fields may not contain commas");
    out += std::to_string(r.problem) + ',' + r.variant + ',' + std::to_string(r.image_size) + ',' +
           std::to_string(r.n_train) + ',' + format_double(r.accuracy) + ',' + r.category + ',' +
           std::to_string(r.seed) + ',' + format_double(r.wall_seconds) + '\n';
  }
  return out;
}

std::vector<ResultRow> parse_csv(std::string_view text) {
  std::vector<ResultRow> rows;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (number == 1) {
      if (line != kCsvHeader) throw InvalidArgument("unexpected csv header '" + line + "'");
      continue;
    }
    if (line.empty()) continue;
    const auto f = split_fields(line);
    if (f.size() != 8) throw InvalidArgument("csv line " + std::to_string(number) + ": expected 8 fields");
    ResultRow r;
    r.problem = parse_field(f[0], number, "problem", [](const std::string& s, std::size_t* u) { return std::stoi(s, u); });
    r.variant = f[1];
    r.image_size = parse_field(f[2], number, "image_size", [](const std::string& s, std::size_t* u) { return std::stoi(s, u); });
    r.n_train = parse_field(f[3], number, "n_train", [](const std::string& s, std::size_t* u) { return std::stoi(s, u); });
    r.accuracy = parse_field(f[4], number, "accuracy", [](const std::string& s, std::size_t* u) { return std::stod(s, u); });
    r.category = f[5];
    r.seed = parse_field(f[6], number, "seed", [](const std::string& s, std::size_t* u) { return std::stoull(s, u); });
    r.wall_seconds = parse_field(f[7], number, "wall_seconds", [](const std::string& s, std::size_t* u) { return std::stod(s, u); });
    rows.push_back(std::move(r));
  }
  if (number == 0) throw InvalidArgument("empty csv");
  return rows;
}

std::string render_table(const std::vector<ResultRow>& rows) {
  std::ostringstream out;
  char buf[256];
  const auto ref_cell = [&](std::optional<ReferenceAccuracy> ref, double ReferenceAccuracy::*field) {
    if (!ref) return std::string("    -");
    std::snprintf(buf, sizeof buf, "%5.2f", (*ref).*field);
    return std::string(buf);
  };
  std::snprintf(buf, sizeof buf, "%-7s  %-26s  %-22s  %5s  %6s  %8s  %5s  %9s  %8s  %5s\n", "problem", "category",
                "variant", "size", "n", "measured", "LeNet", "GoogLeNet", "baseline", "human");
  out << buf;

  struct Sums {
    double measured = 0, lenet = 0, googlenet = 0, baseline = 0, human = 0;
    int count = 0, ref_count = 0;
    void add(const ResultRow& r) {
      measured += r.accuracy;
      ++count;
      if (const auto ref = reference_accuracy(r.problem)) {
        lenet += ref->lenet;
        googlenet += ref->googlenet;
        baseline += ref->svrt_baseline;
        human += ref->human;
        ++ref_count;
      }
    }
  };
  const auto average_line = [&](const char* label, const Sums& s) {
    const auto avg = [](double v, int n) {
      char b[16];
      if (n == 0) return std::string("    -");
      std::snprintf(b, sizeof b, "%5.2f", v / n);
      return std::string(b);
    };
    std::snprintf(buf, sizeof buf, "%-7s  %-26s  %-22s  %5s  %6s  %8s  %5s  %9s  %8s  %5s\n", "average", label, "",
                  "", "", s.count ? avg(s.measured, s.count).c_str() : "-", avg(s.lenet, s.ref_count).c_str(),
                  avg(s.googlenet, s.ref_count).c_str(), avg(s.baseline, s.ref_count).c_str(),
                  avg(s.human, s.ref_count).c_str());
    out << buf;
  };

  Sums overall;
  for (const bool comparison : {true, false}) {
    out << (comparison ? "-- comparison problems\n" : "-- non-comparison problems\n");
    Sums block;
    for (const auto& r : rows) {
      if (is_comparison_problem(r.problem) != comparison) continue;
      const auto ref = reference_accuracy(r.problem);
      std::snprintf(buf, sizeof buf, "%-7d  %-26s  %-22s  %5d  %6d  %8.4f  %5s  %9s  %8s  %5s\n", r.problem,
                    r.category.c_str(), r.variant.c_str(), r.image_size, r.n_train, r.accuracy,
                    ref_cell(ref, &ReferenceAccuracy::lenet).c_str(), ref_cell(ref, &ReferenceAccuracy::googlenet).c_str(),
                    ref_cell(ref, &ReferenceAccuracy::svrt_baseline).c_str(), ref_cell(ref, &ReferenceAccuracy::human).c_str());
      out << buf;
      block.add(r);
      overall.add(r);
    }
    average_line(comparison ? "comparison" : "non-comparison", block);
  }
  average_line("all", overall);
  return out.str();
}

}  // namespace svrt::harness

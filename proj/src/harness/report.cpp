#include "epf/harness/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace epf {

std::pair<double, double> mean_std(const std::vector<double>& values) {
  if (values.empty()) throw std::invalid_argument("mean_std: empty");
  double m = 0.0;
  for (double v : values) m += v;
  m /= static_cast<double>(values.size());
  double s = 0.0;
  for (double v : values) s += (v - m) * (v - m);
  return {m, std::sqrt(s / static_cast<double>(values.size()))};
}

namespace {

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (!tok.empty() && tok.back() == '\r') tok.pop_back();
    out.push_back(tok);
  }
  return out;
}

}  // namespace

void write_report_csv(const ScoreReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_report_csv: cannot open " + path);
  out << "kind,name,metric,mean,std\n";
  for (const auto& m : report.methods) {
    out << "method," << m.method << ",es," << g17(m.es_mean) << "," << g17(m.es_std) << "\n";
    out << "method," << m.method << ",crps," << g17(m.crps_mean) << "," << g17(m.crps_std) << "\n";
    out << "method," << m.method << ",rmse," << g17(m.rmse_mean) << "," << g17(m.rmse_std) << "\n";
  }
  for (const auto& e : report.experts) {
    out << "expert," << e.name << ",mae," << g17(e.mae) << ",0\n";
    out << "expert," << e.name << ",rmse," << g17(e.rmse) << ",0\n";
  }
}

ScoreReport read_report_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_report_csv: cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || split_csv(line) != std::vector<std::string>{"kind", "name", "metric", "mean", "std"}) {
    throw std::runtime_error("read_report_csv: unexpected header");
  }
  ScoreReport report;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != 5) throw std::runtime_error("read_report_csv: bad row");
    const double mean = std::stod(f[3]);
    const double sd = std::stod(f[4]);
    if (f[0] == "method") {
      MethodScores* m = nullptr;
      for (auto& cand : report.methods) {
        if (cand.method == f[1]) m = &cand;
      }
      if (m == nullptr) {
        report.methods.push_back({});
        m = &report.methods.back();
        m->method = f[1];
      }
      if (f[2] == "es") {
        m->es_mean = mean;
        m->es_std = sd;
      } else if (f[2] == "crps") {
        m->crps_mean = mean;
        m->crps_std = sd;
      } else if (f[2] == "rmse") {
        m->rmse_mean = mean;
        m->rmse_std = sd;
      } else {
        throw std::runtime_error("read_report_csv: unknown metric " + f[2]);
      }
    } else if (f[0] == "expert") {
      ExpertScores* e = nullptr;
      for (auto& cand : report.experts) {
        if (cand.name == f[1]) e = &cand;
      }
      if (e == nullptr) {
        report.experts.push_back({});
        e = &report.experts.back();
        e->name = f[1];
      }
      if (f[2] == "mae") {
        e->mae = mean;
      } else if (f[2] == "rmse") {
        e->rmse = mean;
      } else {
        throw std::runtime_error("read_report_csv: unknown metric " + f[2]);
      }
    } else {
      throw std::runtime_error("read_report_csv: unknown kind " + f[0]);
    }
  }
  return report;
}

std::string format_report(const ScoreReport& report) {
  std::ostringstream out;
  char buf[64];
  if (!report.methods.empty()) {
    out << "metric";
    for (const auto& m : report.methods) out << "," << m.method;
    out << "\n";
    const auto row = [&](const char* name, auto mean_of, auto std_of) {
      out << name;
      for (const auto& m : report.methods) {
        std::snprintf(buf, sizeof(buf), ",%.3f +/- %.3f", mean_of(m), std_of(m));
        out << buf;
      }
      out << "\n";
    };
    row("es", [](const MethodScores& m) { return m.es_mean; },
        [](const MethodScores& m) { return m.es_std; });
    row("crps", [](const MethodScores& m) { return m.crps_mean; },
        [](const MethodScores& m) { return m.crps_std; });
    row("rmse", [](const MethodScores& m) { return m.rmse_mean; },
        [](const MethodScores& m) { return m.rmse_std; });
  }
  if (!report.experts.empty()) {
    out << "\nexpert";
    for (const auto& e : report.experts) out << "," << e.name;
    out << "\nmae";
    for (const auto& e : report.experts) {
      std::snprintf(buf, sizeof(buf), ",%.3f", e.mae);
      out << buf;
    }
    out << "\nrmse";
    for (const auto& e : report.experts) {
      std::snprintf(buf, sizeof(buf), ",%.3f", e.rmse);
      out << buf;
    }
    out << "\n";
  }
  return out.str();
}

}  // namespace epf

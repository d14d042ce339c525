#include "epf/harness/svg.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace epf {

Eigen::VectorXd scenario_hourly_range(const Eigen::MatrixXd& scenarios) {
  if (scenarios.rows() == 0) return Eigen::VectorXd::Zero(scenarios.cols());
  return scenarios.colwise().maxCoeff() - scenarios.colwise().minCoeff();
}

namespace {

constexpr double kWidth = 880.0, kHeight = 460.0;
constexpr double kLeft = 56.0, kRight = 16.0, kTop = 18.0, kBottom = 36.0;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

class Chart {
 public:
  Chart(double ymin, double ymax) : ymin_(ymin), ymax_(ymax) {}
  double x(int hour) const {
    return kLeft + (kWidth - kLeft - kRight) * hour / 23.0;
  }
  double y(double value) const {
    const double t = (value - ymin_) / (ymax_ - ymin_);
    return kHeight - kBottom - (kHeight - kTop - kBottom) * t;
  }
  std::string polyline(const Eigen::VectorXd& series, const std::string& style) const {
    std::string s = "<polyline fill=\"none\" " + style + " points=\"";
    for (int h = 0; h < static_cast<int>(series.size()); ++h) {
      if (h > 0) s += " ";
      s += fmt(x(h)) + "," + fmt(y(series[h]));
    }
    s += "\"/>\n";
    return s;
  }

 private:
  double ymin_, ymax_;
};

}  // namespace

void plot_scenarios(const Eigen::MatrixXd& scenarios, const EnsembleForecast& forecast,
                    const Eigen::VectorXd& actual, const std::string& path, int max_drawn) {
  const int hours = static_cast<int>(forecast.values.rows());
  if (hours != 24 || actual.size() != 24) {
    throw std::invalid_argument("plot_scenarios: expected 24-hour inputs");
  }
  if (scenarios.rows() > 0 && scenarios.cols() != 24) {
    throw std::invalid_argument("plot_scenarios: scenario width must be 24");
  }

  double ymin = std::min(actual.minCoeff(), forecast.values.minCoeff());
  double ymax = std::max(actual.maxCoeff(), forecast.values.maxCoeff());
  const int drawn = std::min<int>(max_drawn, static_cast<int>(scenarios.rows()));
  for (int s = 0; s < drawn; ++s) {
    ymin = std::min(ymin, scenarios.row(s).minCoeff());
    ymax = std::max(ymax, scenarios.row(s).maxCoeff());
  }
  const double pad = 0.05 * std::max(1.0, ymax - ymin);
  Chart chart(ymin - pad, ymax + pad);

  std::ofstream out(path);
  if (!out) throw std::runtime_error("plot_scenarios: cannot open " + path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  // axes
  out << "<line x1=\"" << fmt(kLeft) << "\" y1=\"" << fmt(kTop) << "\" x2=\"" << fmt(kLeft)
      << "\" y2=\"" << fmt(kHeight - kBottom) << "\" stroke=\"#444\" stroke-width=\"1\"/>\n";
  out << "<line x1=\"" << fmt(kLeft) << "\" y1=\"" << fmt(kHeight - kBottom) << "\" x2=\""
      << fmt(kWidth - kRight) << "\" y2=\"" << fmt(kHeight - kBottom)
      << "\" stroke=\"#444\" stroke-width=\"1\"/>\n";
  out << "<text x=\"" << fmt(kLeft) << "\" y=\"" << fmt(kHeight - 10.0)
      << "\" font-size=\"12\" fill=\"#444\">hour 1-24, " << forecast.day.str()
      << " (EUR/MWh)</text>\n";

  static const char* kScenarioColors[] = {"#e6a176", "#76b7e6", "#8fd18a", "#d98fd1",
                                          "#e6d676", "#9a9ae6"};
  for (int s = 0; s < drawn; ++s) {
    const std::string style = std::string("stroke=\"") + kScenarioColors[s % 6] +
                              "\" stroke-width=\"0.7\" stroke-opacity=\"0.55\"";
    out << chart.polyline(scenarios.row(s).transpose(), style);
  }
  for (Eigen::Index m = 0; m < forecast.values.cols(); ++m) {
    out << chart.polyline(forecast.values.col(m), "stroke=\"black\" stroke-width=\"1.1\"");
  }
  out << chart.polyline(actual, "stroke=\"#1f4fbf\" stroke-width=\"2.2\"");
  out << "</svg>\n";
}

}  // namespace epf

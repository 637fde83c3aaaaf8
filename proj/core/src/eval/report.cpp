#include "ueba/eval/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <stdexcept>

#include "ueba/features.hpp"
#include "ueba/rng.hpp"

namespace ueba::eval {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open for write: " + path.string());
  return f;
}

const std::map<std::string, std::string>& type_colors() {
  static const std::map<std::string, std::string> colors = {{"login", "#1f77b4"},
                                                            {"antivirus", "#d62728"},
                                                            {"email", "#2ca02c"},
                                                            {"process", "#9467bd"},
                                                            {"normal", "#7f7f7f"}};
  return colors;
}

std::string color_for(const std::string& type) {
  auto it = type_colors().find(type);
  return it == type_colors().end() ? "#17becf" : it->second;
}

constexpr int kW = 760;
constexpr int kH = 420;
constexpr int kPad = 50;

void svg_header(std::ofstream& f) {
  f << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
    << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << kW
    << "\" height=\"" << kH << "\" viewBox=\"0 0 " << kW << " " << kH << "\">\n"
    << "<rect width=\"" << kW << "\" height=\"" << kH << "\" fill=\"white\"/>\n";
}

void svg_axes(std::ofstream& f, const std::string& x_label, const std::string& y_label) {
  f << "<line x1=\"" << kPad << "\" y1=\"" << kH - kPad << "\" x2=\"" << kW - kPad << "\" y2=\""
    << kH - kPad << "\" stroke=\"black\"/>\n"
    << "<line x1=\"" << kPad << "\" y1=\"" << kPad << "\" x2=\"" << kPad << "\" y2=\""
    << kH - kPad << "\" stroke=\"black\"/>\n"
    << "<text x=\"" << kW / 2 << "\" y=\"" << kH - 10
    << "\" font-size=\"13\" text-anchor=\"middle\">" << x_label << "</text>\n"
    << "<text x=\"15\" y=\"" << kH / 2 << "\" font-size=\"13\" text-anchor=\"middle\" "
    << "transform=\"rotate(-90 15 " << kH / 2 << ")\">" << y_label << "</text>\n";
}

double map_x(double v, double lo, double hi) {
  return kPad + (v - lo) / std::max(hi - lo, 1e-12) * (kW - 2 * kPad);
}

double map_y(double v, double lo, double hi) {
  return (kH - kPad) - (v - lo) / std::max(hi - lo, 1e-12) * (kH - 2 * kPad);
}

void write_detection_csv(const DetectionCurveSet& curves, const std::filesystem::path& path) {
  auto f = open_out(path);
  f << "type,lambda,rate,n\n";
  for (const auto& [type, curve] : curves)
    for (const auto& pt : curve)
      f << type << ',' << fmt(pt.lambda) << ',' << fmt(pt.rate) << ',' << pt.count << '\n';
}

void write_detection_svg(const DetectionCurveSet& curves, const std::filesystem::path& path) {
  auto f = open_out(path);
  svg_header(f);
  svg_axes(f, "anomaly intensity", "detection rate");
  int legend_y = kPad;
  for (const auto& [type, curve] : curves) {
    f << "<polyline fill=\"none\" stroke=\"" << color_for(type) << "\" stroke-width=\"2\" points=\"";
    for (const auto& pt : curve)
      f << fmt2(map_x(pt.lambda, 0.0, 1.0)) << ',' << fmt2(map_y(pt.rate, 0.0, 1.0)) << ' ';
    f << "\"/>\n";
    f << "<text x=\"" << kW - kPad - 100 << "\" y=\"" << legend_y << "\" font-size=\"12\" fill=\""
      << color_for(type) << "\">" << type << "</text>\n";
    legend_y += 16;
  }
  f << "</svg>\n";
}

void write_feature_error_csv(const FeatureErrorReport& report, const std::filesystem::path& path) {
  auto f = open_out(path);
  f << "feature,mean_abs_residual,log_mean\n";
  for (std::size_t i = 0; i < report.names.size(); ++i)
    f << report.names[i] << ',' << fmt(report.mean_abs_residual[i]) << ','
      << fmt(report.log_mean[i]) << '\n';
}

void write_feature_error_svg(const FeatureErrorReport& report, const std::filesystem::path& path) {
  // Named features plus the aggregated embedding bar; individual embedding
  // coordinates stay in the CSV.
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < report.names.size(); ++i)
    if (report.names[i].rfind("e", 0) != 0 || report.names[i] == "events_4100" ||
        report.names[i] == "events_4104")
      keep.push_back(i);

  double lo = 0.0, hi = -1e300;
  for (auto i : keep) {
    lo = std::min(lo, report.log_mean[i]);
    hi = std::max(hi, report.log_mean[i]);
  }

  auto f = open_out(path);
  svg_header(f);
  svg_axes(f, "feature", "log reconstruction error");
  const double bar_w = static_cast<double>(kW - 2 * kPad) / static_cast<double>(keep.size());
  for (std::size_t k = 0; k < keep.size(); ++k) {
    std::size_t i = keep[k];
    double x = kPad + bar_w * static_cast<double>(k);
    double y = map_y(report.log_mean[i], lo, hi);
    double base = map_y(lo, lo, hi);
    f << "<rect x=\"" << fmt2(x + 1) << "\" y=\"" << fmt2(y) << "\" width=\"" << fmt2(bar_w - 2)
      << "\" height=\"" << fmt2(std::max(base - y, 0.5)) << "\" fill=\"#1f77b4\"/>\n";
    f << "<text x=\"" << fmt2(x + bar_w / 2) << "\" y=\"" << kH - kPad + 10
      << "\" font-size=\"7\" text-anchor=\"end\" transform=\"rotate(-60 " << fmt2(x + bar_w / 2)
      << " " << kH - kPad + 10 << ")\">" << report.names[i] << "</text>\n";
  }
  f << "</svg>\n";
}

void write_tsne_csv(const Embedding2D& emb, const synth::LabelledTestSet& set,
                    const std::vector<std::size_t>& rows, const std::filesystem::path& path) {
  auto f = open_out(path);
  f << "x,y,template_id,type,lambda\n";
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const auto& label = set.labels[rows[k]];
    f << fmt(emb.points(k, 0)) << ',' << fmt(emb.points(k, 1)) << ',' << label.template_id << ','
      << label.type << ',' << fmt(label.lambda) << '\n';
  }
}

void write_tsne_svg(const Embedding2D& emb, const synth::LabelledTestSet& set,
                    const std::vector<std::size_t>& rows, const std::filesystem::path& path) {
  double xlo = 1e300, xhi = -1e300, ylo = 1e300, yhi = -1e300;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    xlo = std::min(xlo, emb.points(k, 0));
    xhi = std::max(xhi, emb.points(k, 0));
    ylo = std::min(ylo, emb.points(k, 1));
    yhi = std::max(yhi, emb.points(k, 1));
  }
  auto f = open_out(path);
  svg_header(f);
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const auto& label = set.labels[rows[k]];
    double opacity = 0.25 + 0.75 * label.lambda;  // saturation encodes intensity
    f << "<circle cx=\"" << fmt2(map_x(emb.points(k, 0), xlo, xhi)) << "\" cy=\""
      << fmt2(map_y(emb.points(k, 1), ylo, yhi)) << "\" r=\"3\" fill=\"" << color_for(label.type)
      << "\" fill-opacity=\"" << fmt2(opacity) << "\"/>\n";
  }
  f << "</svg>\n";
}

}  // namespace

void write_report(const ReportInputs& inputs, const std::filesystem::path& out_dir) {
  if (!inputs.model) throw std::invalid_argument("write_report: model required");
  std::filesystem::create_directories(out_dir);

  if (inputs.stress_set) {
    auto curves = detection_curve(*inputs.model, *inputs.stress_set);
    write_detection_csv(curves, out_dir / "detection_curves.csv");
    write_detection_svg(curves, out_dir / "detection_curves.svg");

    auto errors = per_feature_error(*inputs.model, inputs.stress_set->X);
    write_feature_error_csv(errors, out_dir / "feature_errors.csv");
    write_feature_error_svg(errors, out_dir / "feature_errors.svg");

    // Residual-space embedding on a deterministic subsample.
    std::vector<std::size_t> rows(inputs.stress_set->X.rows());
    std::iota(rows.begin(), rows.end(), 0);
    if (rows.size() > inputs.tsne_max_rows) {
      Rng rng(derive_seed(inputs.tsne_config.seed, "report-tsne-sample"));
      std::shuffle(rows.begin(), rows.end(), rng);
      rows.resize(inputs.tsne_max_rows);
      std::sort(rows.begin(), rows.end());
    }
    Matrix residuals(rows.size(), inputs.stress_set->X.cols());
    for (std::size_t k = 0; k < rows.size(); ++k) {
      auto rep = ae::score(*inputs.model, inputs.stress_set->X.row_vec(rows[k]));
      residuals.set_row(k, rep.residual);
    }
    auto emb = tsne(residuals, inputs.tsne_config);
    write_tsne_csv(emb, *inputs.stress_set, rows, out_dir / "tsne_residuals.csv");
    write_tsne_svg(emb, *inputs.stress_set, rows, out_dir / "tsne_residuals.svg");
  }

  if (inputs.clean_rows) {
    auto f = open_out(out_dir / "positive_rate.csv");
    f << "n,positive_rate,threshold\n";
    f << inputs.clean_rows->rows() << ','
      << fmt(ae::positive_rate(*inputs.model, *inputs.clean_rows)) << ','
      << fmt(inputs.model->threshold) << '\n';
  }
}

}  // namespace ueba::eval

#include "mgt/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "mgt/errors.hpp"

namespace mgt::report {

std::string num(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

namespace {

void escape_string(const std::string& s, std::string& out) {
  out += '"';
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  out += '"';
}

void dump(const nlohmann::ordered_json& j, std::string& out, int indent) {
  const std::string pad(2 * indent, ' ');
  const std::string pad1(2 * (indent + 1), ' ');
  switch (j.type()) {
    case nlohmann::json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      size_t k = 0;
      for (auto it = j.begin(); it != j.end(); ++it, ++k) {
        out += pad1;
        escape_string(it.key(), out);
        out += ": ";
        dump(it.value(), out, indent + 1);
        if (k + 1 < j.size()) out += ',';
        out += '\n';
      }
      out += pad + "}";
      break;
    }
    case nlohmann::json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      bool scalars = true;
      for (auto& v : j)
        if (v.is_structured()) scalars = false;
      if (scalars) {
        out += '[';
        for (size_t k = 0; k < j.size(); ++k) {
          dump(j[k], out, indent);
          if (k + 1 < j.size()) out += ", ";
        }
        out += ']';
      } else {
        out += "[\n";
        for (size_t k = 0; k < j.size(); ++k) {
          out += pad1;
          dump(j[k], out, indent + 1);
          if (k + 1 < j.size()) out += ',';
          out += '\n';
        }
        out += pad + "]";
      }
      break;
    }
    case nlohmann::json::value_t::string:
      escape_string(j.get<std::string>(), out);
      break;
    case nlohmann::json::value_t::boolean:
      out += j.get<bool>() ? "true" : "false";
      break;
    case nlohmann::json::value_t::number_integer:
      out += std::to_string(j.get<long long>());
      break;
    case nlohmann::json::value_t::number_unsigned:
      out += std::to_string(j.get<unsigned long long>());
      break;
    case nlohmann::json::value_t::number_float:
      out += num(j.get<double>());
      break;
    default:
      out += "null";
  }
}

}  // namespace

std::string dump_json(const nlohmann::ordered_json& j) {
  std::string out;
  dump(j, out, 0);
  out += '\n';
  return out;
}

std::string csv(const std::vector<std::string>& header,
                const std::vector<std::vector<double>>& rows,
                const std::vector<std::string>& row_labels) {
  std::string out;
  for (size_t i = 0; i < header.size(); ++i) {
    out += header[i];
    out += (i + 1 < header.size()) ? ',' : '\n';
  }
  for (size_t r = 0; r < rows.size(); ++r) {
    if (!row_labels.empty()) out += row_labels[r] + ",";
    for (size_t i = 0; i < rows[r].size(); ++i) {
      out += num(rows[r][i]);
      out += (i + 1 < rows[r].size()) ? ',' : '\n';
    }
    if (rows[r].empty()) out += '\n';
  }
  return out;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) fail(errc::io_error, "cannot open '" + path + "' for writing");
  f << content;
  if (!f) fail(errc::io_error, "write failed for '" + path + "'");
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) fail(errc::io_error, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::string svg_snapshot(const std::vector<std::pair<std::string, std::vector<double>>>& curves,
                         int width, int height) {
  double lo = 0.0, hi = 1.0;
  size_t maxlen = 2;
  for (auto& [_, ys] : curves) {
    for (double y : ys) {
      lo = std::min(lo, y);
      hi = std::max(hi, y);
    }
    maxlen = std::max(maxlen, ys.size());
  }
  if (hi - lo < 1e-30) hi = lo + 1.0;
  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height << "\">\n";
  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                                  "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
  int ci = 0;
  double plot_h = height - 20.0;
  for (auto& [name, ys] : curves) {
    s << "<polyline fill=\"none\" stroke=\"" << palette[ci % 10] << "\" stroke-width=\"1\" points=\"";
    for (size_t i = 0; i < ys.size(); ++i) {
      double x = 10.0 + (width - 20.0) * (ys.size() > 1 ? double(i) / (ys.size() - 1) : 0.0);
      double y = 10.0 + plot_h * (1.0 - (ys[i] - lo) / (hi - lo));
      s << num(x) << ',' << num(y);
      if (i + 1 < ys.size()) s << ' ';
    }
    s << "\"><title>" << name << "</title></polyline>\n";
    ++ci;
  }
  s << "</svg>\n";
  return s.str();
}

}  // namespace mgt::report

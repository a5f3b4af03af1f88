#include "icbd/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

namespace icbd {

namespace {

std::string trim(std::string_view s) {
  const auto* ws = " \t\r\n";
  const auto begin = s.find_first_not_of(ws);
  if (begin == std::string_view::npos) {
    return {};
  }
  const auto end = s.find_last_not_of(ws);
  return std::string(s.substr(begin, end - begin + 1));
}

[[noreturn]] void fail_line(int line_no, const std::string& message) {
  std::ostringstream msg;
  msg << "config line " << line_no << ": " << message;
  throw ValidationError(msg.str());
}

double parse_double_or_fail(const std::string& value, int line_no,
                            const std::string& key) {
  double out = 0.0;
  const char* begin = value.data();
  const char* end = begin + value.size();
  const auto [ptr, ec] = std::from_chars(begin, end, out);
  if (ec != std::errc{} || ptr != end) {
    fail_line(line_no, "invalid numeric value for '" + key + "'");
  }
  return out;
}

long long parse_int_or_fail(const std::string& value, int line_no,
                            const std::string& key) {
  long long out = 0;
  const char* begin = value.data();
  const char* end = begin + value.size();
  const auto [ptr, ec] = std::from_chars(begin, end, out);
  if (ec != std::errc{} || ptr != end) {
    fail_line(line_no, "invalid integer value for '" + key + "'");
  }
  return out;
}

std::uint64_t parse_u64_or_fail(const std::string& value, int line_no,
                                const std::string& key) {
  std::uint64_t out = 0;
  const char* begin = value.data();
  const char* end = begin + value.size();
  const auto [ptr, ec] = std::from_chars(begin, end, out);
  if (ec != std::errc{} || ptr != end) {
    fail_line(line_no, "invalid unsigned value for '" + key + "'");
  }
  return out;
}

bool parse_bool_or_fail(const std::string& value, int line_no, const std::string& key) {
  if (value == "true") {
    return true;
  }
  if (value == "false") {
    return false;
  }
  fail_line(line_no, "invalid boolean for '" + key + "' (use true/false)");
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> items;
  std::string current;
  std::istringstream stream(value);
  while (std::getline(stream, current, ',')) {
    const std::string item = trim(current);
    if (!item.empty()) {
      items.push_back(item);
    }
  }
  return items;
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace

RunConfig parse_run_config(std::string_view text) {
  RunConfig cfg;
  bool trials_pfa_given = false;

  enum class Section { None, Scenario, Mc, Output };
  Section section = Section::None;

  std::istringstream stream{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(stream, raw)) {
    ++line_no;
    const std::string line = trim(raw);
    if (line.empty() || line[0] == '#' || line[0] == ';') {
      continue;
    }
    if (line.front() == '[') {
      if (line.back() != ']') {
        fail_line(line_no, "unterminated section header");
      }
      const std::string name = trim(line.substr(1, line.size() - 2));
      if (name == "scenario") {
        section = Section::Scenario;
      } else if (name == "mc") {
        section = Section::Mc;
      } else if (name == "output") {
        section = Section::Output;
      } else {
        fail_line(line_no, "unknown section [" + name + "]");
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      fail_line(line_no, "expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      fail_line(line_no, "empty key");
    }
    if (value.empty()) {
      fail_line(line_no, "empty value for '" + key + "'");
    }

    switch (section) {
      case Section::None:
        fail_line(line_no, "key '" + key + "' outside any section");
      case Section::Scenario: {
        auto& s = cfg.scenario;
        if (key == "N") {
          s.N = static_cast<int>(parse_int_or_fail(value, line_no, key));
        } else if (key == "L") {
          s.L = static_cast<int>(parse_int_or_fail(value, line_no, key));
        } else if (key == "p") {
          s.p = static_cast<int>(parse_int_or_fail(value, line_no, key));
        } else if (key == "q") {
          s.q = static_cast<int>(parse_int_or_fail(value, line_no, key));
        } else if (key == "epsilon") {
          s.epsilon = parse_double_or_fail(value, line_no, key);
        } else if (key == "sigma2") {
          s.sigma2 = parse_double_or_fail(value, line_no, key);
        } else if (key == "environment") {
          if (value == "HE") {
            s.environment = Environment::HE;
          } else if (value == "PHE") {
            s.environment = Environment::PHE;
          } else {
            fail_line(line_no, "invalid environment '" + value + "' (use HE or PHE)");
          }
        } else if (key == "training_has_interference") {
          s.training_has_interference = parse_bool_or_fail(value, line_no, key);
        } else if (key == "training_inr_db") {
          s.training_inr_db = parse_double_or_fail(value, line_no, key);
        } else if (key == "subspace_seed") {
          s.subspace_seed = parse_u64_or_fail(value, line_no, key);
        } else if (key == "H_file") {
          s.H_file = value;
        } else if (key == "J_file") {
          s.J_file = value;
        } else if (key == "theta0_file") {
          s.theta0_file = value;
        } else if (key == "phi_file") {
          s.phi_file = value;
        } else {
          fail_line(line_no, "unknown key '" + key + "' in section [scenario]");
        }
        break;
      }
      case Section::Mc: {
        auto& m = cfg.mc;
        if (key == "master_seed") {
          m.master_seed = parse_u64_or_fail(value, line_no, key);
        } else if (key == "trials_pfa") {
          m.trials_pfa = static_cast<std::size_t>(parse_int_or_fail(value, line_no, key));
          trials_pfa_given = true;
        } else if (key == "trials_pd") {
          m.trials_pd = static_cast<std::size_t>(parse_int_or_fail(value, line_no, key));
        } else if (key == "pfa") {
          m.pfa = parse_double_or_fail(value, line_no, key);
        } else if (key == "esnr_grid_db") {
          m.esnr_grid_db.clear();
          for (const std::string& item : split_list(value)) {
            m.esnr_grid_db.push_back(parse_double_or_fail(item, line_no, key));
          }
        } else if (key == "detectors") {
          m.detectors.clear();
          for (const std::string& item : split_list(value)) {
            const auto kind = detector_from_string(item);
            if (!kind) {
              fail_line(line_no, "unknown detector '" + item + "'");
            }
            m.detectors.push_back(*kind);
          }
        } else {
          fail_line(line_no, "unknown key '" + key + "' in section [mc]");
        }
        break;
      }
      case Section::Output: {
        auto& o = cfg.output;
        if (key == "csv") {
          o.csv = value;
        } else if (key == "precision") {
          o.precision = static_cast<int>(parse_int_or_fail(value, line_no, key));
        } else {
          fail_line(line_no, "unknown key '" + key + "' in section [output]");
        }
        break;
      }
    }
  }

  // Cross-field validation, mirroring the scenario and engine invariants.
  const auto& s = cfg.scenario;
  if (s.N < 1 || s.L < 1 || s.p < 1 || s.q < 1) {
    throw ValidationError("config: scenario dimensions must be positive");
  }
  if (s.p + s.q > s.N) {
    throw ValidationError("config: p + q must not exceed N");
  }
  if (s.L < s.N - s.q) {
    throw ValidationError("config: L must satisfy L >= N - q");
  }
  if (!(s.epsilon > 0.0 && s.epsilon < 1.0)) {
    throw ValidationError("config: epsilon must lie in (0,1)");
  }
  if (!(s.sigma2 > 0.0)) {
    throw ValidationError("config: sigma2 must be positive");
  }
  if (s.environment == Environment::HE && s.sigma2 != 1.0) {
    throw ValidationError("config: HE requires sigma2 = 1");
  }
  if (!(cfg.mc.pfa > 0.0 && cfg.mc.pfa < 1.0)) {
    throw ValidationError("config: pfa must lie in (0,1)");
  }
  if (cfg.mc.trials_pd < 100) {
    throw ValidationError("config: trials_pd must be at least 100");
  }
  if (cfg.output.precision < 1 || cfg.output.precision > 17) {
    throw ValidationError("config: precision must lie in [1,17]");
  }
  if (!trials_pfa_given) {
    cfg.mc.trials_pfa =
        static_cast<std::size_t>(std::llround(100.0 / cfg.mc.pfa));
  }
  if (cfg.mc.trials_pfa < 1) {
    throw ValidationError("config: trials_pfa must be positive");
  }
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ValidationError("cannot open config file '" + path + "'");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_run_config(buffer.str());
}

std::string serialize_run_config(const RunConfig& cfg) {
  std::ostringstream out;
  const auto& s = cfg.scenario;
  out << "[scenario]\n";
  out << "N = " << s.N << "\n";
  out << "L = " << s.L << "\n";
  out << "p = " << s.p << "\n";
  out << "q = " << s.q << "\n";
  out << "epsilon = " << format_double(s.epsilon) << "\n";
  out << "sigma2 = " << format_double(s.sigma2) << "\n";
  out << "environment = " << (s.environment == Environment::HE ? "HE" : "PHE") << "\n";
  out << "training_has_interference = "
      << (s.training_has_interference ? "true" : "false") << "\n";
  out << "training_inr_db = " << format_double(s.training_inr_db) << "\n";
  out << "subspace_seed = " << s.subspace_seed << "\n";
  if (s.H_file) {
    out << "H_file = " << *s.H_file << "\n";
  }
  if (s.J_file) {
    out << "J_file = " << *s.J_file << "\n";
  }
  if (s.theta0_file) {
    out << "theta0_file = " << *s.theta0_file << "\n";
  }
  if (s.phi_file) {
    out << "phi_file = " << *s.phi_file << "\n";
  }

  const auto& m = cfg.mc;
  out << "\n[mc]\n";
  out << "master_seed = " << m.master_seed << "\n";
  out << "trials_pfa = " << m.trials_pfa << "\n";
  out << "trials_pd = " << m.trials_pd << "\n";
  out << "pfa = " << format_double(m.pfa) << "\n";
  out << "esnr_grid_db = ";
  for (std::size_t i = 0; i < m.esnr_grid_db.size(); ++i) {
    out << (i ? ", " : "") << format_double(m.esnr_grid_db[i]);
  }
  out << "\n";
  out << "detectors = ";
  for (std::size_t i = 0; i < m.detectors.size(); ++i) {
    out << (i ? ", " : "") << to_string(m.detectors[i]);
  }
  out << "\n";

  out << "\n[output]\n";
  out << "csv = " << cfg.output.csv << "\n";
  out << "precision = " << cfg.output.precision << "\n";
  return out.str();
}

Complex parse_complex(std::string_view cell) {
  std::string compact;
  compact.reserve(cell.size());
  for (char c : cell) {
    if (!std::isspace(static_cast<unsigned char>(c))) {
      compact.push_back(c);
    }
  }
  if (compact.empty()) {
    throw ValidationError("complex cell is empty");
  }

  const auto parse_part = [&](std::string_view part, bool unit_ok) -> double {
    if (unit_ok) {
      if (part.empty() || part == "+") {
        return 1.0;
      }
      if (part == "-") {
        return -1.0;
      }
    }
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), out);
    if (ec != std::errc{} || ptr != part.data() + part.size()) {
      throw ValidationError("invalid complex cell '" + std::string(cell) + "'");
    }
    return out;
  };

  const char tail = compact.back();
  if (tail != 'i' && tail != 'I') {
    return {parse_part(compact, false), 0.0};
  }

  const std::string_view body(compact.data(), compact.size() - 1);
  // Split at the sign that starts the imaginary part (not an exponent sign,
  // not the leading sign of the real part).
  for (std::size_t pos = body.size(); pos-- > 1;) {
    const char c = body[pos];
    if ((c == '+' || c == '-') && body[pos - 1] != 'e' && body[pos - 1] != 'E') {
      return {parse_part(body.substr(0, pos), false),
              parse_part(body.substr(pos), true)};
    }
  }
  return {0.0, parse_part(body, true)};
}

std::string format_complex(Complex z) {
  std::string out = format_double(z.real());
  const double im = z.imag();
  if (!std::signbit(im)) {
    out += '+';
  }
  out += format_double(im);
  out += 'i';
  return out;
}

ComplexMatrix read_complex_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ValidationError("cannot open matrix file '" + path + "'");
  }
  std::vector<std::vector<Complex>> rows;
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(raw);
    if (line.empty() || line[0] == '#') {
      continue;
    }
    std::vector<Complex> row;
    std::istringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) {
      try {
        row.push_back(parse_complex(cell));
      } catch (const ValidationError& e) {
        std::ostringstream msg;
        msg << path << " line " << line_no << ": " << e.what();
        throw ValidationError(msg.str());
      }
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      std::ostringstream msg;
      msg << path << " line " << line_no << ": ragged row (expected "
          << rows.front().size() << " cells, got " << row.size() << ")";
      throw ValidationError(msg.str());
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty() || rows.front().empty()) {
    throw ValidationError("matrix file '" + path + "' holds no data");
  }
  ComplexMatrix m(rows.size(), rows.front().size());
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
  }
  require_finite(m, path.c_str());
  return m;
}

ComplexVector read_complex_vector_csv(const std::string& path) {
  const ComplexMatrix m = read_complex_csv(path);
  if (m.cols() == 1) {
    return m.col(0);
  }
  if (m.rows() == 1) {
    return m.row(0).transpose();
  }
  throw ValidationError("vector file '" + path + "' must hold one row or one column");
}

void write_complex_csv(const std::string& path, const ComplexMatrix& m) {
  std::ofstream out(path);
  if (!out) {
    throw ValidationError("cannot write matrix file '" + path + "'");
  }
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) {
        out << ',';
      }
      out << format_complex(m(i, j));
    }
    out << '\n';
  }
}

Scenario make_scenario(const ScenarioConfig& cfg) {
  ScenarioParams prm;
  prm.N = cfg.N;
  prm.L = cfg.L;
  prm.p = cfg.p;
  prm.q = cfg.q;
  prm.R = build_covariance(cfg.N, cfg.epsilon);
  prm.sigma2 = cfg.sigma2;
  prm.environment = cfg.environment;
  prm.training_has_interference = cfg.training_has_interference;
  prm.training_inr_db = cfg.training_inr_db;

  const auto load_matrix = [&](const std::optional<std::string>& file,
                               std::string_view phase, int rows,
                               int cols) -> ComplexMatrix {
    if (!file) {
      return unit_cg_matrix(cfg.subspace_seed, phase, rows, cols);
    }
    ComplexMatrix m = read_complex_csv(*file);
    if (m.rows() != rows || m.cols() != cols) {
      std::ostringstream msg;
      msg << "matrix file '" << *file << "' must be " << rows << "x" << cols
          << ", got " << m.rows() << "x" << m.cols();
      throw ValidationError(msg.str());
    }
    return m;
  };
  const auto load_vector = [&](const std::optional<std::string>& file,
                               std::string_view phase, int n) -> ComplexVector {
    if (!file) {
      return unit_cg_vector(cfg.subspace_seed, phase, n);
    }
    ComplexVector v = read_complex_vector_csv(*file);
    if (v.size() != n) {
      std::ostringstream msg;
      msg << "vector file '" << *file << "' must have length " << n << ", got "
          << v.size();
      throw ValidationError(msg.str());
    }
    return v;
  };

  prm.H = load_matrix(cfg.H_file, "scenario/H", cfg.N, cfg.p);
  prm.J = load_matrix(cfg.J_file, "scenario/J", cfg.N, cfg.q);
  prm.theta0 = load_vector(cfg.theta0_file, "scenario/theta0", cfg.p);
  prm.phi = load_vector(cfg.phi_file, "scenario/phi", cfg.q);
  return Scenario::make(std::move(prm));
}

}  // namespace icbd

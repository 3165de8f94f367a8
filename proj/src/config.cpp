#include "tensorcit/config.hpp"

#include <fstream>
#include <sstream>

#include "tensorcit/optimizer.hpp"

namespace tct {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

struct KeyParser {
  std::string where;

  [[noreturn]] void fail(const std::string& msg) const { throw config_error(where + ": " + msg); }

  int to_int(const std::string& v) const {
    try {
      std::size_t pos = 0;
      const int out = std::stoi(v, &pos);
      if (pos != v.size()) fail("trailing characters in integer '" + v + "'");
      return out;
    } catch (const std::exception&) {
      fail("expected an integer, found '" + v + "'");
    }
  }
  double to_double(const std::string& v) const {
    try {
      std::size_t pos = 0;
      const double out = std::stod(v, &pos);
      if (pos != v.size()) fail("trailing characters in number '" + v + "'");
      return out;
    } catch (const std::exception&) {
      fail("expected a number, found '" + v + "'");
    }
  }
  std::uint64_t to_u64(const std::string& v) const {
    try {
      std::size_t pos = 0;
      const std::uint64_t out = std::stoull(v, &pos);
      if (pos != v.size()) fail("trailing characters in integer '" + v + "'");
      return out;
    } catch (const std::exception&) {
      fail("expected a nonnegative integer, found '" + v + "'");
    }
  }
  bool to_bool(const std::string& v) const {
    if (v == "true" || v == "1" || v == "on") return true;
    if (v == "false" || v == "0" || v == "off") return false;
    fail("expected a boolean (true/false), found '" + v + "'");
  }
};

}  // namespace

void RunConfig::validate() const {
  if (mesh_n < 1) throw config_error("config: mesh_n must be >= 1");
  if (degree != 1 && degree != 2) throw config_error("config: degree must be 1 or 2");
  bounds.validate();
  if (loads != 3 && loads != 5 && loads != 9)
    throw config_error("config: loads must be 3, 5 or 9");
  if (delta_rel < 0.0) throw config_error("config: delta_rel must be >= 0");
  if (!(gamma0 > 0.0)) throw config_error("config: gamma0 must be positive");
  if (!(rho > 0.0 && rho < 1.0)) throw config_error("config: rho must lie in (0,1)");
  if (!(tau > 0.0)) throw config_error("config: tau must be positive");
  if (max_inner < 1) throw config_error("config: max_inner must be >= 1");
  if (max_outer < 1) throw config_error("config: max_outer must be >= 1");
  if (!(stagnation_tol >= 0.0)) throw config_error("config: stagnation_tol must be >= 0");
  if (fine_factor < 2) throw config_error("config: fine_factor must be >= 2");
  if (threads < 1) throw config_error("config: threads must be >= 1");
}

RunConfig parse_config_text(const std::string& text, const std::string& source_name) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto comment = line.find('#');
    if (comment != std::string::npos) line = line.substr(0, comment);
    line = trim(line);
    if (line.empty()) continue;

    const KeyParser p{source_name + ":" + std::to_string(line_no)};
    const auto eq = line.find('=');
    if (eq == std::string::npos) p.fail("expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) p.fail("empty key");
    if (value.empty()) p.fail("empty value for key '" + key + "'");

    if (key == "mesh_n") cfg.mesh_n = p.to_int(value);
    else if (key == "degree") cfg.degree = p.to_int(value);
    else if (key == "tensor_layout") {
      if (value == "dg1") cfg.layout = TensorLayout::dg1;
      else if (value == "const") cfg.layout = TensorLayout::constant;
      else p.fail("tensor_layout must be 'dg1' or 'const'");
    }
    else if (key == "alpha") cfg.bounds.alpha = p.to_double(value);
    else if (key == "beta") cfg.bounds.beta = p.to_double(value);
    else if (key == "case") {
      try {
        cfg.test_case = parse_test_case(value);
      } catch (const Error& e) {
        p.fail(e.what());
      }
    }
    else if (key == "loads") cfg.loads = p.to_int(value);
    else if (key == "delta_rel") cfg.delta_rel = p.to_double(value);
    else if (key == "seed") cfg.seed = p.to_u64(value);
    else if (key == "gamma0") cfg.gamma0 = p.to_double(value);
    else if (key == "rho") cfg.rho = p.to_double(value);
    else if (key == "tau") cfg.tau = p.to_double(value);
    else if (key == "max_inner") cfg.max_inner = p.to_int(value);
    else if (key == "max_outer") cfg.max_outer = p.to_int(value);
    else if (key == "stagnation_tol") cfg.stagnation_tol = p.to_double(value);
    else if (key == "resolve_after_projection") cfg.resolve_after_projection = p.to_bool(value);
    else if (key == "fine_factor") cfg.fine_factor = p.to_int(value);
    else if (key == "noise_scalar_per_point") cfg.noise_scalar_per_point = p.to_bool(value);
    else if (key == "noise_shared_realization") cfg.noise_shared_realization = p.to_bool(value);
    else if (key == "initial_a11") cfg.initial_guess.a11 = p.to_double(value);
    else if (key == "initial_a12") cfg.initial_guess.a12 = p.to_double(value);
    else if (key == "initial_a22") cfg.initial_guess.a22 = p.to_double(value);
    else if (key == "solver") {
      if (value == "ldlt") cfg.solver = LinearSolver::ldlt;
      else if (value == "cg") cfg.solver = LinearSolver::cg;
      else p.fail("solver must be 'ldlt' or 'cg'");
    }
    else if (key == "output_dir") cfg.output_dir = value;
    else if (key == "threads") cfg.threads = p.to_int(value);
    else p.fail("unknown key '" + key + "'");
  }
  cfg.validate();
  return cfg;
}

RunConfig parse_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open config file '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path.filename().string());
}

}  // namespace tct

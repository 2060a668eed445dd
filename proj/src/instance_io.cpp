#include "gradcomp/instance_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "gradcomp/error.hpp"

namespace gradcomp {
namespace {

constexpr std::string_view kMagic = "gradcomp-instance";
constexpr std::string_view kVersion = "v1";

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_matrix(std::ostream& out, std::string_view name, const Matrix& m) {
  out << name << ' ' << m.rows() << ' ' << m.cols() << '\n';
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (j) out << ' ';
      out << format_number(m(i, j));
    }
    out << '\n';
  }
}

void write_scalar(std::ostream& out, std::string_view name, double v) { write_matrix(out, name, Matrix(1, 1, v)); }

Matrix rows_to_matrix(const std::vector<Vector>& rows, std::size_t cols) {
  Matrix m(rows.size(), cols);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = rows[i][j];
  }
  return m;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  std::size_t line_no() const { return line_no_; }

  bool next(std::vector<std::string_view>& tokens) {
    while (std::getline(in_, line_)) {
      ++line_no_;
      tokens = split(line_);
      if (!tokens.empty()) return true;
    }
    return false;
  }

  template <class T>
  T number(std::string_view tok) const {
    T value{};
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
    if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
      throw ParseError(line_no_, "bad number '" + std::string(tok) + "'");
    }
    return value;
  }

  Matrix matrix(std::string_view name) {
    std::vector<std::string_view> tok;
    if (!next(tok)) throw ParseError(line_no_ + 1, "missing matrix '" + std::string(name) + "'");
    if (tok.size() != 3 || tok[0] != name) {
      throw ParseError(line_no_, "expected header '" + std::string(name) + " <rows> <cols>'");
    }
    const auto rows = number<std::size_t>(tok[1]);
    const auto cols = number<std::size_t>(tok[2]);
    Matrix m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
      if (!next(tok)) {
        throw ParseError(line_no_ + 1, "matrix '" + std::string(name) + "' truncated after " + std::to_string(i) +
                                           " of " + std::to_string(rows) + " rows");
      }
      if (tok.size() != cols) {
        throw ParseError(line_no_, "matrix '" + std::string(name) + "' row has " + std::to_string(tok.size()) +
                                       " entries, expected " + std::to_string(cols));
      }
      for (std::size_t j = 0; j < cols; ++j) m(i, j) = number<double>(tok[j]);
    }
    return m;
  }

  double scalar(std::string_view name) {
    const Matrix m = matrix(name);
    if (m.rows() != 1 || m.cols() != 1) throw ParseError(line_no_, "'" + std::string(name) + "' must be 1 x 1");
    return m(0, 0);
  }

  /// Reads an optional trailing matrix; returns false at end of input.
  bool optional_matrix(std::string_view name, Matrix& out) {
    const auto pos = in_.tellg();
    const std::size_t saved_line = line_no_;
    std::vector<std::string_view> tok;
    if (!next(tok)) return false;
    const bool match = !tok.empty() && tok[0] == name;
    in_.clear();
    in_.seekg(pos);
    line_no_ = saved_line;
    if (!match) return false;
    out = matrix(name);
    return true;
  }

 private:
  std::istream& in_;
  std::string line_;
  std::size_t line_no_ = 0;
};

void write_quad(std::ostream& out, const QuadraticInstance& q) {
  write_scalar(out, "c1", q.c1);
  write_scalar(out, "c2", q.c2);
  write_matrix(out, "c3", Matrix::column(q.c3));
  write_matrix(out, "P", q.P);
  write_matrix(out, "Q", q.Q);
}

void write_lqr(std::ostream& out, const LqrInstance& l) {
  write_matrix(out, "A", l.A);
  write_matrix(out, "B", l.B);
  write_matrix(out, "Qc", l.Qc);
  write_matrix(out, "Rc", l.Rc);
  write_scalar(out, "ell", l.ell);
  write_scalar(out, "horizon", static_cast<double>(l.T));
  write_scalar(out, "sampling_radius", l.sampling_radius);
  write_matrix(out, "initial_states", rows_to_matrix(l.initial_states, l.n));
  write_matrix(out, "K_hat_star", l.K_hat_star);
  if (l.K_star_ref) write_matrix(out, "K_star_ref", *l.K_star_ref);
}

QuadraticInstance read_quad(Reader& r, std::uint64_t seed) {
  const double c1 = r.scalar("c1");
  const double c2 = r.scalar("c2");
  const Matrix c3 = r.matrix("c3");
  Matrix p = r.matrix("P");
  Matrix q = r.matrix("Q");
  if (c3.cols() != 1 || c3.rows() != p.rows()) throw ParseError(r.line_no(), "c3 must be an n x 1 column");
  try {
    return QuadraticInstance::from_matrices(std::move(p), std::move(q), c1, c2, c3.entries(), seed);
  } catch (const std::invalid_argument& e) {
    throw ParseError(r.line_no(), e.what());
  }
}

LqrInstance read_lqr(Reader& r, std::uint64_t seed) {
  LqrInstance l;
  l.seed = seed;
  l.A = r.matrix("A");
  l.B = r.matrix("B");
  l.Qc = r.matrix("Qc");
  l.Rc = r.matrix("Rc");
  l.ell = r.scalar("ell");
  const double horizon = r.scalar("horizon");
  l.sampling_radius = r.scalar("sampling_radius");
  const Matrix x0 = r.matrix("initial_states");
  l.K_hat_star = r.matrix("K_hat_star");
  Matrix kref;
  if (r.optional_matrix("K_star_ref", kref)) l.K_star_ref = std::move(kref);

  l.n = l.A.rows();
  l.p = l.B.cols();
  const bool shapes_ok = l.A.is_square() && l.B.rows() == l.n && l.Qc.rows() == l.n && l.Qc.is_square() &&
                         l.Rc.rows() == l.p && l.Rc.is_square() && x0.cols() == l.n && x0.rows() > 0 &&
                         l.K_hat_star.rows() == l.p && l.K_hat_star.cols() == l.n &&
                         (!l.K_star_ref || (l.K_star_ref->rows() == l.p && l.K_star_ref->cols() == l.n));
  if (!shapes_ok) throw ParseError(r.line_no(), "lqr matrices have inconsistent shapes");
  if (!(horizon >= 0.0) || horizon != std::floor(horizon)) throw ParseError(r.line_no(), "horizon must be a whole number");
  l.T = static_cast<std::size_t>(horizon);
  for (std::size_t i = 0; i < x0.rows(); ++i) {
    const auto row = x0.row(i);
    l.initial_states.emplace_back(row.begin(), row.end());
  }
  return l;
}

}  // namespace

void write_instance(std::ostream& out, const Instance& inst) {
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        constexpr bool quad = std::is_same_v<T, QuadraticInstance>;
        out << kMagic << ' ' << kVersion << ' ' << (quad ? "quad" : "lqr") << '\n';
        out << "seed " << v.seed << '\n';
        if constexpr (quad) {
          write_quad(out, v);
        } else {
          write_lqr(out, v);
        }
      },
      inst);
}

std::string instance_to_string(const Instance& inst) {
  std::ostringstream out;
  write_instance(out, inst);
  return out.str();
}

Instance read_instance(std::istream& in) {
  Reader r(in);
  std::vector<std::string_view> tok;
  if (!r.next(tok) || tok.size() != 3 || tok[0] != kMagic) {
    throw ParseError(r.line_no(), "expected header 'gradcomp-instance v1 <kind>'");
  }
  if (tok[1] != kVersion) throw ParseError(r.line_no(), "unsupported version '" + std::string(tok[1]) + "'");
  const std::string kind(tok[2]);
  if (kind != "quad" && kind != "lqr") throw ParseError(r.line_no(), "unknown instance kind '" + kind + "'");

  if (!r.next(tok) || tok.size() != 2 || tok[0] != "seed") throw ParseError(r.line_no(), "expected 'seed <N>'");
  const auto seed = r.number<std::uint64_t>(tok[1]);

  if (kind == "quad") return read_quad(r, seed);
  return read_lqr(r, seed);
}

void save_instance(const std::filesystem::path& path, const Instance& inst) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  write_instance(out, inst);
  if (!out) throw Error("failed writing " + path.string());
}

Instance load_instance(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return read_instance(in);
}

}  // namespace gradcomp

#include "permexp/permutation.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <ostream>
#include <sstream>

namespace permexp {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::dimension_mismatch: return "dimension_mismatch";
    case ErrorCode::invalid_permutation: return "invalid_permutation";
    case ErrorCode::degenerate: return "degenerate";
    case ErrorCode::no_bracket: return "no_bracket";
    case ErrorCode::singular_a_hat: return "singular_a_hat";
    case ErrorCode::singular_gamma: return "singular_gamma";
    case ErrorCode::boundary: return "boundary";
    case ErrorCode::max_iters_exceeded: return "max_iters_exceeded";
    case ErrorCode::not_centered: return "not_centered";
    case ErrorCode::too_many_failures: return "too_many_failures";
    case ErrorCode::io_error: return "io_error";
  }
  return "unknown";
}

Permutation::Permutation(std::vector<int> images0) : images_(std::move(images0)) {
  const int n = static_cast<int>(images_.size());
  if (n == 0) throw Error(ErrorCode::invalid_permutation, "empty permutation");
  std::vector<char> seen(n, 0);
  for (int v : images_) {
    if (v < 0 || v >= n || seen[v])
      throw Error(ErrorCode::invalid_permutation, "images are not a bijection of 1..n");
    seen[v] = 1;
  }
}

Permutation Permutation::identity(int n) {
  if (n < 1) throw Error(ErrorCode::invalid_permutation, "n must be >= 1");
  std::vector<int> img(n);
  std::iota(img.begin(), img.end(), 0);
  return Permutation(std::move(img));
}

Permutation Permutation::from_one_indexed(const std::vector<int>& images1) {
  std::vector<int> img(images1.size());
  std::transform(images1.begin(), images1.end(), img.begin(), [](int v) { return v - 1; });
  return Permutation(std::move(img));
}

std::vector<int> Permutation::one_indexed() const {
  std::vector<int> out(images_.size());
  std::transform(images_.begin(), images_.end(), out.begin(), [](int v) { return v + 1; });
  return out;
}

void write_permutation_line(std::ostream& out, const Permutation& pi) {
  for (int i = 0; i < pi.size(); ++i) {
    if (i > 0) out << ' ';
    out << pi.image(i) + 1;
  }
  out << '\n';
}

Permutation parse_permutation_line(const std::string& line) {
  std::istringstream ss(line);
  std::vector<int> images1;
  int v;
  while (ss >> v) images1.push_back(v);
  if (images1.empty())
    throw Error(ErrorCode::io_error, "empty permutation line");
  return Permutation::from_one_indexed(images1);
}

std::vector<Permutation> read_permutations(std::istream& in) {
  std::vector<Permutation> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    out.push_back(parse_permutation_line(line));
  }
  return out;
}

std::vector<Permutation> read_permutations_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io_error, "cannot open permutation file: " + path);
  return read_permutations(in);
}

void write_permutations_file(const std::string& path, const std::vector<Permutation>& pis) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::io_error, "cannot write permutation file: " + path);
  for (const auto& pi : pis) write_permutation_line(out, pi);
}

}  // namespace permexp

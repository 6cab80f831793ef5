#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "permexp/errors.hpp"

namespace permexp {

// A bijection of {1,...,n}. Images are stored 0-indexed; the text format and
// everything user-facing is 1-indexed.
class Permutation {
 public:
  Permutation() = default;

  // images0[i] = pi(i+1) - 1. Validates the bijection property.
  explicit Permutation(std::vector<int> images0);

  static Permutation identity(int n);
  // From 1-indexed images as they appear in files.
  static Permutation from_one_indexed(const std::vector<int>& images1);

  int size() const { return static_cast<int>(images_.size()); }
  int image(int i) const { return images_[i]; }          // 0-indexed
  int image1(int i1) const { return images_[i1 - 1] + 1; }  // 1-indexed

  const std::vector<int>& images() const { return images_; }
  std::vector<int> one_indexed() const;

  // Node coordinates i/n and pi(i)/n for 0-indexed position i.
  double x_node(int i) const { return static_cast<double>(i + 1) / size(); }
  double y_node(int i) const { return static_cast<double>(images_[i] + 1) / size(); }

  bool operator==(const Permutation& other) const { return images_ == other.images_; }

 private:
  std::vector<int> images_;
};

// Text format: one permutation per line, n space-separated 1-indexed
// integers, newline-terminated.
void write_permutation_line(std::ostream& out, const Permutation& pi);
Permutation parse_permutation_line(const std::string& line);
std::vector<Permutation> read_permutations(std::istream& in);
std::vector<Permutation> read_permutations_file(const std::string& path);
void write_permutations_file(const std::string& path, const std::vector<Permutation>& pis);

}  // namespace permexp

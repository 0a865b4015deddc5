#ifndef MCD_TOOLS_MANIFEST_H_
#define MCD_TOOLS_MANIFEST_H_

#include <string>
#include <utility>
#include <vector>

namespace mcd::cli {

// Hex SHA-256 of a file's bytes.
std::string file_digest(const std::string& path);

// Line-oriented key=value record written next to every output file.
class Manifest {
 public:
  Manifest(std::string command, const std::vector<std::string>& argv);

  void set(const std::string& key, const std::string& value);
  void set(const std::string& key, double value);
  void input(const std::string& role, const std::string& path);
  void output(const std::string& path) { outputs_.push_back(path); }

  // Writes `<output>.manifest` for every registered output.
  void write_all(double elapsed_seconds) const;

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
  std::vector<std::string> outputs_;
};

}  // namespace mcd::cli

#endif  // MCD_TOOLS_MANIFEST_H_

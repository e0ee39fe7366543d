#ifndef RI_IO_HPP
#define RI_IO_HPP

// Artifact emission: atomic file writes, 17-significant-digit float
// formatting for round-trip fidelity, and a minimal CSV builder.

#include <string>
#include <vector>

namespace ri {

// Writes via a temporary file in the same directory, then renames.
void atomic_write(const std::string& path, const std::string& content);

// Shortest representation with 17 significant digits.
std::string fmt17(double v);

class CsvBuilder {
  public:
    explicit CsvBuilder(std::vector<std::string> header);
    void add_row(const std::vector<std::string>& cells);
    std::string str() const { return out_; }

  private:
    std::size_t n_cols_;
    std::string out_;
};

}  // namespace ri

#endif  // RI_IO_HPP

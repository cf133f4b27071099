#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace fedsched {

/// Shortest round-trip decimal form of a double; deterministic and
/// locale-free. Rejects non-finite values.
std::string format_double(double value);

std::string format_int(long long value);

/// Write-temp-then-rename so readers never observe a partial file.
void atomic_write(const std::filesystem::path& path, std::string_view content);

/// Row-major CSV assembly with a fixed header; numeric cells go through
/// format_double and are therefore always finite.
class CsvBuilder {
  public:
    explicit CsvBuilder(std::vector<std::string> header);

    void begin_row();
    void add(double value);
    void add(long long value);
    void add(int value);
    void add(std::string_view text);

    const std::string& str();

  private:
    void end_row_if_open();

    std::size_t columns_ = 0;
    std::size_t cells_in_row_ = 0;
    bool row_open_ = false;
    std::string out_;
};

}  // namespace fedsched

#include "fedsched/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <system_error>

namespace fedsched {

std::string format_double(double value) {
    if (!std::isfinite(value)) {
        throw std::invalid_argument("refusing to format a non-finite number");
    }
    char buffer[64];
    const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
    if (ec != std::errc()) {
        throw std::runtime_error("number formatting failed");
    }
    return std::string(buffer, ptr);
}

std::string format_int(long long value) {
    char buffer[32];
    const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
    if (ec != std::errc()) {
        throw std::runtime_error("number formatting failed");
    }
    return std::string(buffer, ptr);
}

void atomic_write(const std::filesystem::path& path, std::string_view content) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    const std::filesystem::path temp = path.string() + ".tmp";
    {
        std::ofstream out(temp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw std::runtime_error("cannot open " + temp.string() + " for writing");
        }
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) {
            throw std::runtime_error("short write to " + temp.string());
        }
    }
    std::filesystem::rename(temp, path);
}

CsvBuilder::CsvBuilder(std::vector<std::string> header) : columns_(header.size()) {
    if (header.empty()) {
        throw std::invalid_argument("csv needs at least one column");
    }
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i > 0) {
            out_ += ',';
        }
        out_ += header[i];
    }
    out_ += '\n';
}

void CsvBuilder::begin_row() {
    end_row_if_open();
    row_open_ = true;
    cells_in_row_ = 0;
}

void CsvBuilder::end_row_if_open() {
    if (!row_open_) {
        return;
    }
    if (cells_in_row_ != columns_) {
        throw std::logic_error("csv row width differs from the header");
    }
    out_ += '\n';
    row_open_ = false;
}

void CsvBuilder::add(double value) { add(std::string_view(format_double(value))); }

void CsvBuilder::add(long long value) { add(std::string_view(format_int(value))); }

void CsvBuilder::add(int value) { add(static_cast<long long>(value)); }

void CsvBuilder::add(std::string_view text) {
    if (!row_open_) {
        throw std::logic_error("csv cell added outside a row");
    }
    if (cells_in_row_ > 0) {
        out_ += ',';
    }
    out_.append(text.data(), text.size());
    ++cells_in_row_;
}

const std::string& CsvBuilder::str() {
    end_row_if_open();
    return out_;
}

}  // namespace fedsched

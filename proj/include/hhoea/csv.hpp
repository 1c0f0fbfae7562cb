#pragma once

#include <filesystem>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <type_traits>
#include <vector>

namespace hhoea {

// Comma-separated rows with a header; floating-point values use 17 significant digits.
class CsvWriter {
public:
    CsvWriter(std::ostream& out, const std::vector<std::string>& header) : out_(out)
    {
        out_ << std::setprecision(17);
        for (size_t i = 0; i < header.size(); ++i)
            out_ << (i ? "," : "") << header[i];
        out_ << '\n';
    }

    template <class... Ts>
    void row(const Ts&... vals)
    {
        bool first = true;
        ((out_ << (first ? "" : ",") << format(vals), first = false), ...);
        out_ << '\n';
    }

    void row_values(const std::vector<double>& vals)
    {
        for (size_t i = 0; i < vals.size(); ++i)
            out_ << (i ? "," : "") << format(vals[i]);
        out_ << '\n';
    }

private:
    template <class T>
    static std::string format(const T& v)
    {
        std::ostringstream s;
        if constexpr (std::is_floating_point_v<T>)
            s << std::setprecision(17) << v;
        else
            s << v;
        return s.str();
    }

    std::ostream& out_;
};

// Writes `content` to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

} // namespace hhoea

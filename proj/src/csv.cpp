#include "hhoea/csv.hpp"

#include "hhoea/common.hpp"

#include <fstream>

namespace hhoea {

void write_file_atomic(const std::filesystem::path& path, const std::string& content)
{
    const auto tmp = path.string() + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f)
            throw std::runtime_error("cannot write " + tmp);
        f << content;
        if (!f.flush())
            throw std::runtime_error("write failed for " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

} // namespace hhoea

#include "support.hpp"

#include <filesystem>

#include "wsis/textio.hpp"

namespace fs = std::filesystem;

namespace wsis::acceptance {

fs::path fresh_dir(const std::string& tag) {
    const fs::path dir = fs::temp_directory_path() / "wsis-acceptance" / tag;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string fmt(double v) { return textio::format_double(v); }

} // namespace wsis::acceptance

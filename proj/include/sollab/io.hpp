#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>

namespace sollab::io {

inline constexpr int kSchemaVersion = 1;

std::string software_version();

// SHA-1 of the bytes, lowercase hex.
std::string sha1_hex(std::string_view data);
// Git object id of a blob with this content: sha1("blob <len>\0" + data).
std::string git_blob_hash(std::string_view data);

// Shortest round-trip decimal form.
std::string format_double(double x);

void write_file(const std::filesystem::path& path, std::string_view content);
std::string read_file(const std::filesystem::path& path);

// Runs task(i) for i in [0, n) on up to `workers` threads; workers <= 1 runs inline.
// The first exception thrown by a task is rethrown after all threads join.
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& task);

} // namespace sollab::io

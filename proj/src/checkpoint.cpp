#include "checkpoint.hpp"

#include <cstring>
#include <filesystem>
#include <fstream>

namespace chowrobbins {

namespace {

constexpr char snapshot_magic[8] = {'C', 'R', 'S', 'W', 'P', '0', '1', '\n'};
constexpr std::uint32_t snapshot_version = 1;
constexpr std::uint64_t max_entries = std::uint64_t(1) << 31;

std::uint64_t fnv1a(const unsigned char* data, std::size_t len,
                    std::uint64_t h = 14695981039346656037ull) {
    for (std::size_t i = 0; i < len; ++i) {
        h ^= data[i];
        h *= 1099511628211ull;
    }
    return h;
}

template <typename T>
void put(std::string& out, const T& v) {
    out.append(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
void get(const std::string& in, std::size_t& off, T& v) {
    if (off + sizeof v > in.size())
        throw format_error("row snapshot: truncated file");
    std::memcpy(&v, in.data() + off, sizeof v);
    off += sizeof v;
}

}

void write_row_snapshot(const std::string& path, const RowSnapshot& s) {
    if (s.lower.size() != s.upper.size())
        throw std::domain_error("row snapshot: lower/upper size mismatch");
    if (s.lower.size() >= max_entries)
        throw std::domain_error("row snapshot: row too large");

    std::string blob;
    blob.reserve(64 + 16 * s.lower.size());
    blob.append(snapshot_magic, sizeof snapshot_magic);
    put(blob, snapshot_version);
    put(blob, std::uint32_t{0});
    put(blob, s.horizon);
    put(blob, s.band);
    put(blob, s.row);
    put(blob, s.d_min);
    put(blob, std::uint64_t(s.lower.size()));
    blob.append(reinterpret_cast<const char*>(s.lower.data()),
                sizeof(double) * s.lower.size());
    blob.append(reinterpret_cast<const char*>(s.upper.data()),
                sizeof(double) * s.upper.size());
    std::uint64_t sum =
        fnv1a(reinterpret_cast<const unsigned char*>(blob.data()), blob.size());
    put(blob, sum);

    std::string tmp = path + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw io_error("row snapshot: cannot open " + tmp);
        f.write(blob.data(), std::streamsize(blob.size()));
        if (!f) throw io_error("row snapshot: short write to " + tmp);
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec)
        throw io_error("row snapshot: rename to " + path + " failed: " +
                       ec.message());
}

RowSnapshot read_row_snapshot(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw io_error("row snapshot: cannot open " + path);
    std::string blob((std::istreambuf_iterator<char>(f)),
                     std::istreambuf_iterator<char>());
    if (f.bad()) throw io_error("row snapshot: read error on " + path);

    if (blob.size() < sizeof snapshot_magic + 8 ||
        std::memcmp(blob.data(), snapshot_magic, sizeof snapshot_magic) != 0)
        throw format_error("row snapshot: bad magic in " + path);

    std::uint64_t stored;
    std::memcpy(&stored, blob.data() + blob.size() - 8, 8);
    std::uint64_t sum = fnv1a(
        reinterpret_cast<const unsigned char*>(blob.data()), blob.size() - 8);
    if (stored != sum)
        throw format_error("row snapshot: checksum mismatch in " + path);

    std::size_t off = sizeof snapshot_magic;
    std::uint32_t version = 0, reserved = 0;
    RowSnapshot s;
    std::uint64_t count = 0;
    get(blob, off, version);
    get(blob, off, reserved);
    if (version != snapshot_version)
        throw format_error("row snapshot: unsupported version in " + path);
    get(blob, off, s.horizon);
    get(blob, off, s.band);
    get(blob, off, s.row);
    get(blob, off, s.d_min);
    get(blob, off, count);
    if (count >= max_entries)
        throw format_error("row snapshot: entry count out of range in " + path);
    if (blob.size() != off + 16 * count + 8)
        throw format_error("row snapshot: size does not match entry count in " +
                           path);
    s.lower.resize(count);
    s.upper.resize(count);
    std::memcpy(s.lower.data(), blob.data() + off, 8 * count);
    std::memcpy(s.upper.data(), blob.data() + off + 8 * count, 8 * count);
    return s;
}

}

#include <algorithm>
#include <array>
#include <memory>

#include <json.hpp>
#include <openssl/evp.h>

#include "internal.hpp"

namespace h2atlas::pipeline {

std::string sha256_hex(std::string_view bytes)
{
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1
        || EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1
        || EVP_DigestFinal_ex(ctx.get(), md.data(), &len) != 1)
        throw Error("SHA-256 computation failed");
    static const char* digits = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += digits[md[i] >> 4];
        out += digits[md[i] & 15];
    }
    return out;
}

std::string sha256_file(const fs::path& path)
{
    return sha256_hex(read_text(path));
}

Manifest write_manifest(const RunConfig& c)
{
    Manifest m;
    m.config_sha256 = sha256_hex(c.canonical);
    nlohmann::ordered_json j;
    j["config_sha256"] = m.config_sha256;
    j["stages"] = nlohmann::ordered_json::object();
    for (Stage s : kStages) {
        const std::string name = stage_dir_name(s);
        const fs::path dir = c.out_dir / name;
        if (!fs::is_directory(dir))
            continue;
        std::vector<std::string> rel;
        for (const auto& e : fs::recursive_directory_iterator(dir))
            if (e.is_regular_file())
                rel.push_back(fs::relative(e.path(), c.out_dir).generic_string());
        std::sort(rel.begin(), rel.end());
        std::string listing;
        nlohmann::ordered_json files = nlohmann::ordered_json::object();
        for (const auto& r : rel) {
            const std::string h = sha256_file(c.out_dir / r);
            m.files.push_back({r, h});
            files[r] = h;
            listing += r + "  " + h + "\n";
        }
        const std::string stage_hash = sha256_hex(listing);
        m.stages.emplace_back(name, stage_hash);
        j["stages"][name] = {{"sha256", stage_hash}, {"files", files}};
    }
    write_text(c.out_dir / "manifest.json", j.dump(2) + "\n");
    return m;
}

} // namespace h2atlas::pipeline

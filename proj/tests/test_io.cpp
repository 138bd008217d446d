#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <string>

#include "frfid/io.hpp"

using namespace frfid;

namespace {
std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}
}  // namespace

TEST_CASE("ini parsing: sections, comments, typed getters") {
    const auto ini = io::IniFile::parse_string(
        "# comment\n"
        "[grid]\n"
        "fs_h = 120.0   ; trailing comment\n"
        "factor = 4\n"
        "\n"
        "[plant]\n"
        "num = 1.0, -0.5, 0.25\n"
        "preset = resonant\n"
        "flag = true\n");
    CHECK(ini.get_double("grid.fs_h") == 120.0);
    CHECK(ini.get_int("grid.factor") == 4);
    CHECK(ini.get("plant.preset") == "resonant");
    CHECK(ini.get_bool("plant.flag"));
    CHECK(ini.get_doubles("plant.num") == std::vector<double>{1.0, -0.5, 0.25});
    CHECK(ini.has("grid.fs_h"));
    CHECK_FALSE(ini.has("grid.missing"));
    CHECK(ini.get_or("grid.missing", "x") == "x");
    CHECK_THROWS(ini.get("grid.missing"));
}

TEST_CASE("ini serialize/parse round trip preserves values and order") {
    io::IniFile ini;
    ini.set("run.out_dir", "bundle");
    ini.set_double("grid.fs_h", 1.0 / 3.0);
    ini.set_int("grid.factor", 4);
    const std::string text = ini.serialize();
    const auto back = io::IniFile::parse_string(text);
    CHECK(back.get("run.out_dir") == "bundle");
    CHECK(back.get_double("grid.fs_h") == 1.0 / 3.0);  // %.17g exactness
    CHECK(back.get_int("grid.factor") == 4);
    CHECK(back.serialize() == text);
}

TEST_CASE("csv write/read round trip is exact") {
    const auto path = temp_path("frfid_test_io.csv");
    const std::vector<std::vector<double>> rows{{0.0, 0.1 + 0.2}, {1.0, -1e-17}};
    io::write_csv(path, {"bin", "value"}, rows);
    const auto table = io::read_csv(path);
    CHECK(table.header == std::vector<std::string>{"bin", "value"});
    CHECK(table.column("value") == 1);
    CHECK_THROWS(table.column("nope"));
    CHECK(table.rows == rows);
    std::remove(path.c_str());
}

TEST_CASE("fingerprint is stable and input-sensitive") {
    CHECK(io::fnv1a_hex("abc") == io::fnv1a_hex("abc"));
    CHECK(io::fnv1a_hex("abc") != io::fnv1a_hex("abd"));
    CHECK(io::fnv1a_hex("") != "");
}

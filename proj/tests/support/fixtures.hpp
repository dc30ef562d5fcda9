#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "bdg/model.hpp"
#include "bdg/parser.hpp"

namespace testkit {

inline std::string read_fixture(const std::string& name) {
    std::ifstream in(std::string(BDG_FIXTURE_DIR) + "/" + name, std::ios::binary);
    if (!in) throw std::runtime_error("missing fixture: " + name);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

inline bdg::Model load_model(const std::string& name) {
    return bdg::parse_model(read_fixture(name));
}

} // namespace testkit

#include "nipaths/io.hpp"

#include <fmt/format.h>
#include <fstream>
#include <iostream>
#include <sstream>

#include "nipaths/error.hpp"

namespace nipaths::io {

std::string fmt17(double v) { return fmt::format("{:.17g}", v); }

namespace {

template <class T>
std::vector<T> vec(const json& j, const char* key)
{
    if (!j.contains(key) || !j.at(key).is_array())
        throw Error(ErrorCode::InvalidParams, fmt::format("missing array \"{}\"", key));
    try {
        return j.at(key).get<std::vector<T>>();
    } catch (const json::exception& e) {
        throw Error(ErrorCode::InvalidParams, fmt::format("bad entries in \"{}\": {}", key, e.what()));
    }
}

}  // namespace

ModelParams model_from_json(const json& j)
{
    if (!j.is_object())
        throw Error(ErrorCode::InvalidParams, "model must be a JSON object");
    if (!j.contains("n") || !j.at("n").is_number_integer())
        throw Error(ErrorCode::InvalidParams, "missing integer \"n\"");
    ModelParams p;
    p.n = j.at("n").get<int>();
    p.k = vec<int>(j, "k");
    p.l = vec<int>(j, "l");
    p.alpha = vec<double>(j, "alpha");
    p.beta = vec<double>(j, "beta");
    return p;
}

json model_to_json(const ModelParams& p)
{
    return json{{"n", p.n}, {"k", p.k}, {"l", p.l}, {"alpha", p.alpha}, {"beta", p.beta}};
}

json config_to_json(const PathConfig& c) { return json{{"heights", c.heights}}; }

PathConfig config_from_json(const json& j)
{
    PathConfig c;
    try {
        c.heights = j.at("heights").get<std::vector<std::vector<long>>>();
    } catch (const json::exception& e) {
        throw Error(ErrorCode::InvalidConfig, std::string("bad \"heights\": ") + e.what());
    }
    return c;
}

json tiling_to_json(const Tiling& t)
{
    json loz = json::array();
    for (const auto& lz : t.lozenges)
        loz.push_back(json{{"type", std::string(1, lozenge_letter(lz.type))}, {"i", lz.i}, {"j", lz.j}});
    return json{{"n", t.n}, {"k", t.k}, {"height", t.height}, {"lozenges", loz}};
}

Tiling tiling_from_json(const json& j)
{
    Tiling t;
    try {
        t.n = j.at("n").get<int>();
        t.k = j.at("k").get<std::vector<int>>();
        long top = 0;
        for (const auto& e : j.at("lozenges")) {
            const auto type = e.at("type").get<std::string>();
            Lozenge lz;
            if (type == "a")
                lz.type = LozengeType::A;
            else if (type == "b")
                lz.type = LozengeType::B;
            else if (type == "c")
                lz.type = LozengeType::C;
            else
                throw Error(ErrorCode::InconsistentTiling, "unknown lozenge type " + type);
            lz.i = e.at("i").get<int>();
            lz.j = e.at("j").get<long>();
            top = std::max(top, lz.j);
            t.lozenges.push_back(lz);
        }
        t.height = j.contains("height") ? j.at("height").get<long>() : top;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::InconsistentTiling, std::string("malformed tiling JSON: ") + e.what());
    }
    return t;
}

std::string read_text_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorCode::InvalidParams, "cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json read_json_file(const std::string& path)
{
    const auto text = read_text_file(path);
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::InvalidParams, fmt::format("{} is not valid JSON: {}", path, e.what()));
    }
}

void write_text(const std::string& path, const std::string& text)
{
    if (path.empty() || path == "-") {
        std::cout << text;
        std::cout.flush();
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error(ErrorCode::InvalidParams, "cannot write " + path);
    out << text;
}

}  // namespace nipaths::io

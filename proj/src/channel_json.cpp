#include "marc/channel_json.hpp"

#include "marc/errors.hpp"

#include <fstream>
#include <sstream>

namespace marc {

namespace {

using nlohmann::json;

json
complex_to_json(const Complex& z)
{
    return json::array({z.real(), z.imag()});
}

json
vector_to_json(const ComplexVector& v)
{
    json out = json::array();
    for (const auto& z : v)
    {
        out.push_back(complex_to_json(z));
    }
    return out;
}

Complex
complex_from_json(const json& j, const char* field)
{
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    {
        throw ValidationError(std::string("field '") + field +
                              "': complex values must be [re, im] pairs");
    }
    return {j[0].get<double>(), j[1].get<double>()};
}

ComplexVector
vector_from_json(const json& j, const char* field)
{
    if (!j.is_array())
    {
        throw ValidationError(std::string("field '") + field + "' must be an array");
    }
    ComplexVector v(j.size());
    for (std::size_t i = 0; i < j.size(); ++i)
    {
        v[i] = complex_from_json(j[i], field);
    }
    return v;
}

const json&
require(const json& j, const char* field)
{
    auto it = j.find(field);
    if (it == j.end())
    {
        throw ValidationError(std::string("missing field '") + field + "'");
    }
    return *it;
}

double
number(const json& j, const char* field)
{
    if (!j.is_number())
    {
        throw ValidationError(std::string("field '") + field + "' must be a number");
    }
    return j.get<double>();
}

} // namespace

nlohmann::json
to_json(const ChannelRealization& c)
{
    json out;
    json hr = json::array();
    for (const auto& v : c.user_to_relay)
    {
        hr.push_back(vector_to_json(v));
    }
    json hd = json::array();
    for (const auto& z : c.direct)
    {
        hd.push_back(complex_to_json(z));
    }
    out["h_r"] = std::move(hr);
    out["h_d"] = std::move(hd);
    out["h"] = vector_to_json(c.relay_to_rx);
    out["P"] = c.power;
    out["P_r"] = c.relay_power;
    out["N0"] = c.noise;
    return out;
}

ChannelRealization
realization_from_json(const nlohmann::json& j)
{
    if (!j.is_object())
    {
        throw ValidationError("realization must be a JSON object");
    }
    ChannelRealization c;
    const json& hr = require(j, "h_r");
    if (!hr.is_array())
    {
        throw ValidationError("field 'h_r' must be an array of vectors");
    }
    for (const auto& v : hr)
    {
        c.user_to_relay.push_back(vector_from_json(v, "h_r"));
    }
    const json& hd = require(j, "h_d");
    if (!hd.is_array())
    {
        throw ValidationError("field 'h_d' must be an array");
    }
    for (const auto& z : hd)
    {
        c.direct.push_back(complex_from_json(z, "h_d"));
    }
    c.relay_to_rx = vector_from_json(require(j, "h"), "h");
    const json& p = require(j, "P");
    if (!p.is_array())
    {
        throw ValidationError("field 'P' must be an array");
    }
    for (const auto& x : p)
    {
        c.power.push_back(number(x, "P"));
    }
    c.relay_power = number(require(j, "P_r"), "P_r");
    c.noise = j.contains("N0") ? number(j["N0"], "N0") : 1.0;
    c.validate();
    return c;
}

std::string
dump_realization(const ChannelRealization& c, int indent)
{
    return to_json(c).dump(indent);
}

ChannelRealization
read_realization_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
    {
        throw IoError("cannot open '" + path + "' for reading");
    }
    json j;
    try
    {
        in >> j;
    }
    catch (const json::parse_error& e)
    {
        throw ValidationError("'" + path + "' is not valid JSON: " + e.what());
    }
    return realization_from_json(j);
}

void
write_realization_file(const ChannelRealization& c, const std::string& path)
{
    std::ofstream out(path);
    if (!out)
    {
        throw IoError("cannot open '" + path + "' for writing");
    }
    out << dump_realization(c) << '\n';
    if (!out)
    {
        throw IoError("failed writing '" + path + "'");
    }
}

} // namespace marc

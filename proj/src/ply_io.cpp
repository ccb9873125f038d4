// SPDX-License-Identifier: Apache-2.0
//
// dmimo-mpc — multipath classification and virtual-scatterer tracking for
// distributed massive MIMO channels
// Copyright (C) 2025-2026 the dmimo-mpc developers
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------
//
// Minimal ASCII PLY reader/writer.
//
//   ply
//   format ascii 1.0
//   element vertex N
//   property float x
//   property float y
//   property float z
//   property uchar region        (optional)
//   end_header
//
// `region` bytes follow the Region enum (0=unknown, 1=floor, 2=ceiling,
// 3..6=walls, 7=object). Unknown extra scalar properties are tolerated and
// skipped; extra elements are only accepted with a zero count.

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "dmimo/point_cloud.hpp"

namespace dmimo
{

namespace
{

struct HeaderInfo
{
    std::size_t vertex_count = 0;
    int col_x = -1, col_y = -1, col_z = -1, col_region = -1;
    int n_columns = 0;
};

std::vector<std::string> split_ws(const std::string &line)
{
    std::vector<std::string> tokens;
    std::istringstream iss(line);
    std::string tok;
    while (iss >> tok)
        tokens.push_back(tok);
    return tokens;
}

HeaderInfo parse_header(std::istream &in, const std::string &path, long &line_no)
{
    HeaderInfo info;
    std::string line;

    auto next_line = [&]() -> bool {
        if (!std::getline(in, line))
            return false;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        ++line_no;
        return true;
    };

    if (!next_line() || line != "ply")
        throw ParseError(path, line_no, "not a PLY file (missing 'ply' magic)");
    if (!next_line() || split_ws(line) != std::vector<std::string>{"format", "ascii", "1.0"})
        throw ParseError(path, line_no, "unsupported format (only 'format ascii 1.0')");

    bool in_vertex_element = false;
    bool seen_vertex_element = false;
    while (true)
    {
        if (!next_line())
            throw ParseError(path, line_no, "unexpected end of file inside header");
        if (line == "end_header")
            break;
        const auto tokens = split_ws(line);
        if (tokens.empty() || tokens[0] == "comment" || tokens[0] == "obj_info")
            continue;
        if (tokens[0] == "element")
        {
            if (tokens.size() != 3)
                throw ParseError(path, line_no, "malformed element declaration");
            if (tokens[1] == "vertex")
            {
                if (seen_vertex_element)
                    throw ParseError(path, line_no, "duplicate vertex element");
                seen_vertex_element = true;
                in_vertex_element = true;
                try
                {
                    info.vertex_count = std::stoull(tokens[2]);
                }
                catch (const std::exception &)
                {
                    throw ParseError(path, line_no, "invalid vertex count '" + tokens[2] + "'");
                }
            }
            else
            {
                if (tokens[2] != "0")
                    throw ParseError(path, line_no,
                                     "unsupported element '" + tokens[1] + "' with non-zero count");
                in_vertex_element = false;
            }
        }
        else if (tokens[0] == "property")
        {
            if (!in_vertex_element)
                continue;
            if (tokens.size() >= 2 && tokens[1] == "list")
                throw ParseError(path, line_no, "list properties are not supported");
            if (tokens.size() != 3)
                throw ParseError(path, line_no, "malformed property declaration");
            const std::string &type = tokens[1];
            const std::string &name = tokens[2];
            const int col = info.n_columns++;
            if (name == "x" || name == "y" || name == "z")
            {
                if (type != "float" && type != "double" && type != "float32" && type != "float64")
                    throw ParseError(path, line_no, "property '" + name + "' must be float");
                (name == "x" ? info.col_x : name == "y" ? info.col_y : info.col_z) = col;
            }
            else if (name == "region")
            {
                if (type != "uchar" && type != "uint8")
                    throw ParseError(path, line_no, "property 'region' must be uchar");
                info.col_region = col;
            }
            // other scalar properties are skipped per-row
        }
        else
            throw ParseError(path, line_no, "unrecognized header line '" + tokens[0] + "'");
    }

    if (!seen_vertex_element)
        throw ParseError(path, line_no, "missing 'element vertex' declaration");
    if (info.col_x < 0 || info.col_y < 0 || info.col_z < 0)
        throw ParseError(path, line_no, "vertex element must declare float x, y, z");
    return info;
}

} // namespace

PointCloud load_ply(const std::string &path)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open PLY file '" + path + "'");

    long line_no = 0;
    const HeaderInfo info = parse_header(in, path, line_no);

    PointCloud cloud;
    cloud.points.reserve(info.vertex_count);
    if (info.col_region >= 0)
        cloud.labels.reserve(info.vertex_count);

    std::string line;
    std::vector<double> values(static_cast<std::size_t>(info.n_columns));
    for (std::size_t i = 0; i < info.vertex_count; ++i)
    {
        if (!std::getline(in, line))
            throw ParseError(path, line_no + 1,
                             "vertex count mismatch: header declares " +
                                 std::to_string(info.vertex_count) + ", file ends after " +
                                 std::to_string(i));
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();

        const char *ptr = line.c_str();
        const char *end = ptr + line.size();
        for (int c = 0; c < info.n_columns; ++c)
        {
            while (ptr < end && (*ptr == ' ' || *ptr == '\t'))
                ++ptr;
            double v = 0.0;
            const auto res = std::from_chars(ptr, end, v);
            if (res.ec != std::errc())
                throw ParseError(path, line_no,
                                 "expected " + std::to_string(info.n_columns) +
                                     " numeric values, failed at column " + std::to_string(c + 1));
            values[static_cast<std::size_t>(c)] = v;
            ptr = res.ptr;
        }

        const Vec3 p{values[static_cast<std::size_t>(info.col_x)],
                     values[static_cast<std::size_t>(info.col_y)],
                     values[static_cast<std::size_t>(info.col_z)]};
        if (!p.finite())
            throw ParseError(path, line_no, "non-finite vertex coordinate");
        cloud.points.push_back(p);

        if (info.col_region >= 0)
        {
            const double r = values[static_cast<std::size_t>(info.col_region)];
            if (r < 0 || r > 7 || r != std::floor(r))
                throw ParseError(path, line_no, "region value out of range 0..7");
            cloud.labels.push_back(static_cast<Region>(static_cast<int>(r)));
        }
    }
    return cloud;
}

void save_ply(const PointCloud &cloud, const std::string &path)
{
    if (cloud.has_labels() && cloud.labels.size() != cloud.points.size())
        throw InvalidArgument("save_ply: label count does not match point count");

    std::ofstream out(path, std::ios::binary); // binary mode keeps LF endings
    if (!out)
        throw IoError("cannot open '" + path + "' for writing");

    out << "ply\nformat ascii 1.0\n";
    out << "element vertex " << cloud.points.size() << "\n";
    out << "property float x\nproperty float y\nproperty float z\n";
    if (cloud.has_labels())
        out << "property uchar region\n";
    out << "end_header\n";

    char buf[128];
    for (std::size_t i = 0; i < cloud.points.size(); ++i)
    {
        const Vec3 &p = cloud.points[i];
        int n = std::snprintf(buf, sizeof(buf), "%.17g %.17g %.17g", p.x, p.y, p.z);
        out.write(buf, n);
        if (cloud.has_labels())
        {
            n = std::snprintf(buf, sizeof(buf), " %d", static_cast<int>(cloud.labels[i]));
            out.write(buf, n);
        }
        out.put('\n');
    }
    if (!out)
        throw IoError("failed while writing '" + path + "'");
}

} // namespace dmimo

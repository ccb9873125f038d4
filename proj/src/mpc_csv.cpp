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

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "dmimo/io.hpp"

namespace dmimo
{

namespace
{

const std::vector<std::string> kRequiredColumns = {
    "panel_id", "snapshot_id", "path_id", "azimuth_rad", "zenith_rad", "delay_s"};

const std::vector<std::string> kOptionalColumns = {
    "doppler_hz", "gain_db", "pol_re11", "pol_im11", "pol_re12", "pol_im12",
    "pol_re21",   "pol_im21", "pol_re22", "pol_im22"};

std::vector<std::string> split_csv(const std::string &line)
{
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream iss(line);
    while (std::getline(iss, cell, ','))
        cells.push_back(cell);
    if (!line.empty() && line.back() == ',')
        cells.emplace_back();
    return cells;
}

double parse_double(const std::string &cell, const std::string &path, long row,
                    const std::string &column)
{
    double v = 0.0;
    const char *begin = cell.c_str();
    const char *end = begin + cell.size();
    while (begin < end && *begin == ' ')
        ++begin;
    const auto res = std::from_chars(begin, end, v);
    if (res.ec != std::errc() || res.ptr != end)
        throw ParseError(path, row, "column '" + column + "': invalid number '" + cell + "'");
    if (!std::isfinite(v))
        throw ParseError(path, row, "column '" + column + "': non-finite value");
    return v;
}

long parse_int(const std::string &cell, const std::string &path, long row,
               const std::string &column)
{
    const double v = parse_double(cell, path, row, column);
    if (v != std::floor(v))
        throw ParseError(path, row, "column '" + column + "': expected integer, got '" + cell + "'");
    return static_cast<long>(v);
}

} // namespace

std::vector<MpcRecord> ingest_mpc_csv(const std::string &path, AngleConvention convention)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open MPC CSV '" + path + "'");

    std::string line;
    long row = 0;

    if (!std::getline(in, line))
        throw ParseError(path, 1, "empty file, header row required");
    ++row;
    if (!line.empty() && line.back() == '\r')
        line.pop_back();

    const auto header = split_csv(line);
    if (header.size() < kRequiredColumns.size())
        throw ParseError(path, 1, "header must start with panel_id,snapshot_id,path_id,"
                                  "azimuth_rad,zenith_rad,delay_s");
    for (std::size_t i = 0; i < kRequiredColumns.size(); ++i)
        if (header[i] != kRequiredColumns[i])
            throw ParseError(path, 1, "missing or misplaced column '" + kRequiredColumns[i] +
                                          "' (found '" + header[i] + "')");
    // Optional columns must appear in schema order with no gaps.
    const std::size_t n_optional = header.size() - kRequiredColumns.size();
    if (n_optional > kOptionalColumns.size())
        throw ParseError(path, 1, "too many columns");
    for (std::size_t i = 0; i < n_optional; ++i)
        if (header[kRequiredColumns.size() + i] != kOptionalColumns[i])
            throw ParseError(path, 1, "unexpected column '" + header[kRequiredColumns.size() + i] +
                                          "', expected '" + kOptionalColumns[i] + "'");
    const bool has_doppler = n_optional >= 1;
    const bool has_gain = n_optional >= 2;
    const bool has_pol = n_optional >= 10;
    if (n_optional > 2 && !has_pol)
        throw ParseError(path, 1, "polarization requires all 8 pol_* columns");

    std::vector<MpcRecord> records;
    while (std::getline(in, line))
    {
        ++row;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;

        const auto cells = split_csv(line);
        if (cells.size() != header.size())
            throw ParseError(path, row, "expected " + std::to_string(header.size()) +
                                            " cells, found " + std::to_string(cells.size()));

        MpcRecord rec;
        rec.source_row = row;
        rec.key.panel_id = static_cast<int>(parse_int(cells[0], path, row, "panel_id"));
        rec.key.snapshot_id = static_cast<int>(parse_int(cells[1], path, row, "snapshot_id"));
        rec.key.path_id = static_cast<int>(parse_int(cells[2], path, row, "path_id"));
        rec.aoa.azimuth_rad = parse_double(cells[3], path, row, "azimuth_rad");
        rec.aoa.zenith_rad = parse_double(cells[4], path, row, "zenith_rad");
        rec.delay_s = parse_double(cells[5], path, row, "delay_s");

        if (convention == AngleConvention::elevation)
        {
            if (std::abs(rec.aoa.zenith_rad) > kPi / 2 + 1e-12)
                throw ParseError(path, row, "elevation out of range [-pi/2, pi/2]");
            rec.aoa.zenith_rad = kPi / 2 - rec.aoa.zenith_rad;
        }
        if (!aoa_valid(rec.aoa))
            throw ParseError(path, row, "AoA out of range: azimuth must lie in (-pi, pi], "
                                        "zenith in [0, pi]");
        // Canonicalize the tolerated boundary representation.
        if (rec.aoa.azimuth_rad <= -kPi)
            rec.aoa.azimuth_rad = kPi;
        if (rec.delay_s <= 0.0)
            throw ParseError(path, row, "delay_s must be positive");

        if (has_doppler && !cells[6].empty())
            rec.doppler_hz = parse_double(cells[6], path, row, "doppler_hz");
        if (has_gain && !cells[7].empty())
            rec.gain_db = parse_double(cells[7], path, row, "gain_db");
        if (has_pol)
        {
            bool any = false, all = true;
            for (int i = 0; i < 8; ++i)
            {
                if (cells[8 + i].empty())
                    all = false;
                else
                    any = true;
            }
            if (any && !all)
                throw ParseError(path, row, "polarization cells must be all present or all empty");
            if (all)
            {
                PolMatrix pol;
                for (int i = 0; i < 4; ++i)
                {
                    const double re = parse_double(cells[8 + 2 * i], path, row, "pol_re");
                    const double im = parse_double(cells[9 + 2 * i], path, row, "pol_im");
                    pol[static_cast<std::size_t>(i)] = {re, im};
                }
                rec.polarization = pol;
            }
        }
        records.push_back(std::move(rec));
    }
    return records;
}

void write_mpc_csv(const std::vector<MpcRecord> &records, const std::string &path)
{
    bool any_doppler = false, any_gain = false, any_pol = false;
    for (const MpcRecord &r : records)
    {
        any_doppler |= r.doppler_hz.has_value();
        any_gain |= r.gain_db.has_value();
        any_pol |= r.polarization.has_value();
    }
    // Column presence is all-or-nothing per file; widen as needed.
    const bool with_pol = any_pol;
    const bool with_gain = any_gain || with_pol;
    const bool with_doppler = any_doppler || with_gain;

    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot open '" + path + "' for writing");

    out << "panel_id,snapshot_id,path_id,azimuth_rad,zenith_rad,delay_s";
    if (with_doppler)
        out << ",doppler_hz";
    if (with_gain)
        out << ",gain_db";
    if (with_pol)
        out << ",pol_re11,pol_im11,pol_re12,pol_im12,pol_re21,pol_im21,pol_re22,pol_im22";
    out << "\n";

    char buf[64];
    auto put_num = [&](double v) {
        const int n = std::snprintf(buf, sizeof(buf), "%.17g", v);
        out.write(buf, n);
    };

    for (const MpcRecord &r : records)
    {
        out << r.key.panel_id << ',' << r.key.snapshot_id << ',' << r.key.path_id << ',';
        put_num(r.aoa.azimuth_rad);
        out.put(',');
        put_num(r.aoa.zenith_rad);
        out.put(',');
        put_num(r.delay_s);
        if (with_doppler)
        {
            out.put(',');
            if (r.doppler_hz)
                put_num(*r.doppler_hz);
        }
        if (with_gain)
        {
            out.put(',');
            if (r.gain_db)
                put_num(*r.gain_db);
        }
        if (with_pol)
        {
            for (int i = 0; i < 4; ++i)
            {
                out.put(',');
                if (r.polarization)
                    put_num((*r.polarization)[static_cast<std::size_t>(i)].real());
                out.put(',');
                if (r.polarization)
                    put_num((*r.polarization)[static_cast<std::size_t>(i)].imag());
            }
        }
        out.put('\n');
    }
    if (!out)
        throw IoError("failed while writing '" + path + "'");
}

} // namespace dmimo

// SPDX-License-Identifier: Apache-2.0
//
// riss: sensing-assisted reflective surface simulation
// Copyright (C) 2026 The riss authors
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
#include "riss/iq_io.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

namespace riss {

namespace {

void put_f32le(std::vector<char> &buf, float v)
{
    const auto u = std::bit_cast<std::uint32_t>(v);
    for (int b = 0; b < 4; ++b)
        buf.push_back(char((u >> (8 * b)) & 0xffu));
}

float get_f32le(const unsigned char *p)
{
    std::uint32_t u = 0;
    for (int b = 0; b < 4; ++b)
        u |= std::uint32_t(p[b]) << (8 * b);
    return std::bit_cast<float>(u);
}

} // namespace

std::filesystem::path iq_header_path(const std::filesystem::path &path)
{
    return std::filesystem::path(path.string() + ".hdr");
}

void write_iq(const std::filesystem::path &path, const IqBlock &block)
{
    const auto &x = block.samples;
    std::vector<char> buf;
    buf.reserve(std::size_t(x.size()) * 8);
    for (Eigen::Index n = 0; n < x.cols(); ++n)
        for (Eigen::Index a = 0; a < x.rows(); ++a)
        {
            put_f32le(buf, float(x(a, n).real()));
            put_f32le(buf, float(x(a, n).imag()));
        }

    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("write_iq: cannot open " + path.string());
    out.write(buf.data(), std::streamsize(buf.size()));

    std::ofstream hdr(iq_header_path(path));
    if (!hdr)
        throw std::runtime_error("write_iq: cannot open header for " + path.string());
    std::ostringstream fs;
    fs.precision(17);
    fs << block.sample_rate;
    hdr << "# riss iq v1\n"
        << "na " << x.rows() << "\n"
        << "n " << x.cols() << "\n"
        << "fs " << fs.str() << "\n"
        << "seed " << block.seed << "\n";
}

IqBlock read_iq(const std::filesystem::path &path)
{
    std::ifstream hdr(iq_header_path(path));
    if (!hdr)
        throw std::runtime_error("read_iq: missing header for " + path.string());
    long long na = -1, n = -1;
    IqBlock block;
    std::string key;
    std::string line;
    while (std::getline(hdr, line))
    {
        if (line.empty() || line[0] == '#')
            continue;
        std::istringstream ls(line);
        ls >> key;
        if (key == "na")
            ls >> na;
        else if (key == "n")
            ls >> n;
        else if (key == "fs")
            ls >> block.sample_rate;
        else if (key == "seed")
            ls >> block.seed;
    }
    if (na <= 0 || n < 0)
        throw std::runtime_error("read_iq: malformed header for " + path.string());

    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("read_iq: cannot open " + path.string());
    std::vector<unsigned char> raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (raw.size() != std::size_t(na * n * 8))
        throw std::runtime_error("read_iq: payload size does not match header");

    block.samples.resize(na, n);
    const unsigned char *p = raw.data();
    for (Eigen::Index s = 0; s < n; ++s)
        for (Eigen::Index a = 0; a < na; ++a, p += 8)
            block.samples(a, s) = cplx(get_f32le(p), get_f32le(p + 4));
    return block;
}

} // namespace riss

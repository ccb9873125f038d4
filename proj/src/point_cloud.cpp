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

#include "dmimo/point_cloud.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace dmimo
{

const char *region_name(Region r)
{
    switch (r)
    {
    case Region::unknown:    return "unknown";
    case Region::floor:      return "floor";
    case Region::ceiling:    return "ceiling";
    case Region::wall_west:  return "wall-west";
    case Region::wall_east:  return "wall-east";
    case Region::wall_south: return "wall-south";
    case Region::wall_north: return "wall-north";
    case Region::object:     return "object";
    }
    return "unknown";
}

std::optional<Region> region_from_name(const std::string &name)
{
    for (int i = 0; i <= 7; ++i)
    {
        const Region r = static_cast<Region>(i);
        if (name == region_name(r))
            return r;
    }
    return std::nullopt;
}

Aabb PointCloud::bounding_box() const
{
    if (points.empty())
        throw InvalidArgument("bounding_box: empty point cloud");
    Aabb box{points.front(), points.front()};
    for (const Vec3 &p : points)
    {
        box.min.x = std::min(box.min.x, p.x);
        box.min.y = std::min(box.min.y, p.y);
        box.min.z = std::min(box.min.z, p.z);
        box.max.x = std::max(box.max.x, p.x);
        box.max.y = std::max(box.max.y, p.y);
        box.max.z = std::max(box.max.z, p.z);
    }
    return box;
}

// ------------------------------------------------------------------------
// SpatialIndex
// ------------------------------------------------------------------------

std::uint64_t SpatialIndex::cell_key(std::int64_t ix, std::int64_t iy, std::int64_t iz)
{
    // 21 bits per axis, offset to keep negatives representable.
    const std::uint64_t bias = 1ull << 20;
    const std::uint64_t ux = static_cast<std::uint64_t>(ix + static_cast<std::int64_t>(bias)) & 0x1fffff;
    const std::uint64_t uy = static_cast<std::uint64_t>(iy + static_cast<std::int64_t>(bias)) & 0x1fffff;
    const std::uint64_t uz = static_cast<std::uint64_t>(iz + static_cast<std::int64_t>(bias)) & 0x1fffff;
    return (ux << 42) | (uy << 21) | uz;
}

SpatialIndex::SpatialIndex(const PointCloud &cloud, double voxel_size_m)
    : cloud_(&cloud), voxel_size_(voxel_size_m)
{
    if (cloud.points.empty())
        throw InvalidArgument("build_index: empty point cloud");
    if (!(voxel_size_m > 0.0) || !std::isfinite(voxel_size_m))
        throw InvalidArgument("build_index: voxel size must be positive");
    for (const Vec3 &p : cloud.points)
        if (!p.finite())
            throw InvalidArgument("build_index: non-finite point in cloud");

    cells_.reserve(cloud.points.size() / 4 + 16);
    for (std::uint32_t i = 0; i < cloud.points.size(); ++i)
    {
        const Vec3 &p = cloud.points[i];
        cells_[cell_key(cell_of(p.x), cell_of(p.y), cell_of(p.z))].push_back(i);
    }
}

template <typename Fn>
void SpatialIndex::for_candidates(const Vec3 &center, double radius_m, Fn &&fn) const
{
    const std::int64_t x0 = cell_of(center.x - radius_m), x1 = cell_of(center.x + radius_m);
    const std::int64_t y0 = cell_of(center.y - radius_m), y1 = cell_of(center.y + radius_m);
    const std::int64_t z0 = cell_of(center.z - radius_m), z1 = cell_of(center.z + radius_m);
    const double r2 = radius_m * radius_m;
    for (std::int64_t ix = x0; ix <= x1; ++ix)
        for (std::int64_t iy = y0; iy <= y1; ++iy)
            for (std::int64_t iz = z0; iz <= z1; ++iz)
            {
                const auto it = cells_.find(cell_key(ix, iy, iz));
                if (it == cells_.end())
                    continue;
                for (std::uint32_t idx : it->second)
                {
                    if ((cloud_->points[idx] - center).norm_sq() <= r2)
                        if (!fn(idx))
                            return;
                }
            }
}

std::vector<std::uint32_t> SpatialIndex::query_radius(const Vec3 &center, double radius_m) const
{
    std::vector<std::uint32_t> out;
    for_candidates(center, radius_m, [&](std::uint32_t idx) {
        out.push_back(idx);
        return true;
    });
    std::sort(out.begin(), out.end());
    return out;
}

bool SpatialIndex::contains_at_least(const Vec3 &center, double radius_m, int min_count) const
{
    int n = 0;
    for_candidates(center, radius_m, [&](std::uint32_t) { return ++n < min_count; });
    return n >= min_count;
}

SpatialIndex build_index(const PointCloud &cloud, double voxel_size_m)
{
    return SpatialIndex(cloud, voxel_size_m);
}

// ------------------------------------------------------------------------
// Ray march
// ------------------------------------------------------------------------

std::optional<Hit> first_intersection(const SpatialIndex &index, const Ray &ray,
                                      const MarchParams &params)
{
    if (!(ray.max_range_m > 0.0) || !std::isfinite(ray.max_range_m))
        throw InvalidArgument("first_intersection: max_range must be positive");
    if (std::abs(ray.direction.norm() - 1.0) > 1e-9)
        throw InvalidArgument("first_intersection: ray direction must be unit norm");
    if (!(params.step_m > 0.0) || !(params.capture_radius_m > 0.0) || params.min_support < 1)
        throw InvalidArgument("first_intersection: invalid march parameters");

    const PointCloud &cloud = index.cloud();
    const long n_steps = static_cast<long>(std::floor(ray.max_range_m / params.step_m + 1e-12));
    for (long k = 1; k <= n_steps; ++k)
    {
        const double d = static_cast<double>(k) * params.step_m;
        const Vec3 probe = ray.origin + d * ray.direction;
        if (!index.contains_at_least(probe, params.capture_radius_m, params.min_support))
            continue;

        const auto support = index.query_radius(probe, params.capture_radius_m);
        Vec3 centroid{0, 0, 0};
        std::array<int, 8> votes{};
        for (std::uint32_t idx : support)
        {
            centroid += cloud.points[idx];
            if (cloud.has_labels())
                ++votes[static_cast<int>(cloud.labels[idx])];
        }
        centroid = centroid / static_cast<double>(support.size());

        Hit hit;
        hit.point = centroid;
        hit.distance_m = d;
        hit.support_count = static_cast<int>(support.size());
        if (cloud.has_labels())
        {
            int best = 0;
            for (int i = 1; i < 8; ++i)
                if (votes[i] > votes[best])
                    best = i;
            hit.region = static_cast<Region>(best);
        }
        return hit;
    }
    return std::nullopt;
}

// ------------------------------------------------------------------------
// Bounding-box labeling
// ------------------------------------------------------------------------

PointCloud label_regions_by_bbox(const PointCloud &cloud, double wall_margin_m)
{
    if (cloud.points.empty())
        throw InvalidArgument("label_regions_by_bbox: empty point cloud");
    const Aabb box = cloud.bounding_box();

    PointCloud out;
    out.points = cloud.points;
    out.labels.resize(cloud.points.size(), Region::object);

    for (std::size_t i = 0; i < cloud.points.size(); ++i)
    {
        const Vec3 &p = cloud.points[i];
        // Face order fixes the tie-break: floor, ceiling, then walls.
        const std::array<std::pair<double, Region>, 6> faces = {{
            {p.z - box.min.z, Region::floor},
            {box.max.z - p.z, Region::ceiling},
            {p.x - box.min.x, Region::wall_west},
            {box.max.x - p.x, Region::wall_east},
            {p.y - box.min.y, Region::wall_south},
            {box.max.y - p.y, Region::wall_north},
        }};
        double best = wall_margin_m;
        Region label = Region::object;
        for (const auto &[dist, face] : faces)
            if (dist < best) // strict: first face wins ties
            {
                best = dist;
                label = face;
            }
        out.labels[i] = label;
    }
    return out;
}

} // namespace dmimo

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

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "dmimo/geometry.hpp"

namespace dmimo
{

// Per-point semantic label. Values double as the PLY `region` byte.
enum class Region : std::uint8_t
{
    unknown = 0,
    floor = 1,
    ceiling = 2,
    wall_west = 3,  // x = min face
    wall_east = 4,  // x = max face
    wall_south = 5, // y = min face
    wall_north = 6, // y = max face
    object = 7
};

const char *region_name(Region r);
std::optional<Region> region_from_name(const std::string &name);

struct Aabb
{
    Vec3 min;
    Vec3 max;
};

// Environment geometry as a bare point set, optionally labeled.
struct PointCloud
{
    std::vector<Vec3> points;
    std::vector<Region> labels; // empty, or one label per point

    std::size_t size() const { return points.size(); }
    bool has_labels() const { return !labels.empty(); }
    Aabb bounding_box() const; // throws InvalidArgument on empty cloud
};

struct Ray
{
    Vec3 origin;
    Vec3 direction;     // unit norm
    double max_range_m; // > 0; caps the search at the path length
};

// First populated neighborhood along a ray.
struct Hit
{
    Vec3 point;          // centroid of the supporting points
    double distance_m;   // march distance along the ray, in (0, max_range]
    int support_count;
    Region region = Region::unknown; // majority label of the support set
};

// Ray-march tuning. Defaults assume a ~2 cm sampling pitch.
struct MarchParams
{
    double step_m = 0.05;
    double capture_radius_m = 0.10;
    int min_support = 5;
};

// Uniform voxel grid over the cloud for radius queries. Immutable after
// construction; concurrent queries are safe.
class SpatialIndex
{
  public:
    SpatialIndex(const PointCloud &cloud, double voxel_size_m); // throws on empty cloud

    // Indices of all points with |p - center| <= radius, in cloud order.
    std::vector<std::uint32_t> query_radius(const Vec3 &center, double radius_m) const;

    // Fast existence probe used by the ray march: true once `min_count`
    // points fall inside the sphere.
    bool contains_at_least(const Vec3 &center, double radius_m, int min_count) const;

    const PointCloud &cloud() const { return *cloud_; }
    double voxel_size() const { return voxel_size_; }

  private:
    std::int64_t cell_of(double v) const
    {
        return static_cast<std::int64_t>(std::floor(v / voxel_size_));
    }
    static std::uint64_t cell_key(std::int64_t ix, std::int64_t iy, std::int64_t iz);

    template <typename Fn>
    void for_candidates(const Vec3 &center, double radius_m, Fn &&fn) const;

    const PointCloud *cloud_;
    double voxel_size_;
    std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> cells_;
};

SpatialIndex build_index(const PointCloud &cloud, double voxel_size_m = 0.10);

// Marches the ray in `step` increments and returns the first probe whose
// `capture_radius` neighborhood holds at least `min_support` points. The hit
// point is the centroid of that neighborhood. NoHit is a value: nullopt.
std::optional<Hit> first_intersection(const SpatialIndex &index, const Ray &ray,
                                      const MarchParams &params = {});

// Assigns floor/ceiling/wall labels to points within `wall_margin` of the
// bounding-box faces; everything else becomes `object`. Ties go to the
// nearest face.
PointCloud label_regions_by_bbox(const PointCloud &cloud, double wall_margin_m = 0.15);

// ASCII PLY with float x,y,z and optional uchar region.
PointCloud load_ply(const std::string &path);
void save_ply(const PointCloud &cloud, const std::string &path);

} // namespace dmimo

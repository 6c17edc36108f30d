// Microbenchmarks for the geometric primitives on the hot path of every
// metric: oriented-box overlap/distance and arc-length path queries.

#include <benchmark/benchmark.h>

#include <cmath>
#include <random>
#include <vector>

#include "driveaudit/geometry.hpp"

namespace {

using driveaudit::OrientedBox;
using driveaudit::PathParam;
using driveaudit::Vec2;

std::vector<std::pair<OrientedBox, OrientedBox>> box_pairs(double spread, std::size_t n) {
  std::mt19937 rng(1234u);
  std::uniform_real_distribution<double> pos(-spread, spread);
  std::uniform_real_distribution<double> ang(-3.14, 3.14);
  std::uniform_real_distribution<double> len(3.5, 5.5), wid(1.6, 2.2);
  std::vector<std::pair<OrientedBox, OrientedBox>> pairs;
  pairs.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    pairs.push_back({OrientedBox{{pos(rng), pos(rng)}, ang(rng), len(rng), wid(rng)},
                     OrientedBox{{pos(rng), pos(rng)}, ang(rng), len(rng), wid(rng)}});
  }
  return pairs;
}

// Mostly-overlapping pairs: centers within a car length of each other.
void BM_BoxesIntersectClose(benchmark::State& state) {
  const auto pairs = box_pairs(3.0, 512);
  std::size_t i = 0;
  for (auto _ : state) {
    const auto& [a, b] = pairs[i++ % pairs.size()];
    benchmark::DoNotOptimize(driveaudit::boxes_intersect(a, b));
  }
}
BENCHMARK(BM_BoxesIntersectClose);

// Mostly-separated pairs: the early-out axis test dominates.
void BM_BoxesIntersectFar(benchmark::State& state) {
  const auto pairs = box_pairs(40.0, 512);
  std::size_t i = 0;
  for (auto _ : state) {
    const auto& [a, b] = pairs[i++ % pairs.size()];
    benchmark::DoNotOptimize(driveaudit::boxes_intersect(a, b));
  }
}
BENCHMARK(BM_BoxesIntersectFar);

void BM_BoxDistance(benchmark::State& state) {
  const auto pairs = box_pairs(25.0, 512);
  std::size_t i = 0;
  for (auto _ : state) {
    const auto& [a, b] = pairs[i++ % pairs.size()];
    benchmark::DoNotOptimize(driveaudit::box_distance(a, b));
  }
}
BENCHMARK(BM_BoxDistance);

void BM_BoxDistanceWitness(benchmark::State& state) {
  const auto pairs = box_pairs(25.0, 512);
  std::size_t i = 0;
  for (auto _ : state) {
    const auto& [a, b] = pairs[i++ % pairs.size()];
    benchmark::DoNotOptimize(driveaudit::box_distance_witness(a, b));
  }
}
BENCHMARK(BM_BoxDistanceWitness);

PathParam winding_path(int segments) {
  std::vector<Vec2> pts;
  double x = 0.0, y = 0.0, h = 0.0;
  for (int i = 0; i <= segments; ++i) {
    pts.push_back({x, y});
    h += 0.15 * ((i % 2 == 0) ? 1.0 : -1.0);
    x += 2.0 * std::cos(h);
    y += 2.0 * std::sin(h);
  }
  return PathParam(pts);
}

// Closest-point projection onto a winding polyline, the inner loop of the
// free-gap corridor test. The argument is the vertex count.
void BM_PathProject(benchmark::State& state) {
  const PathParam path = winding_path(static_cast<int>(state.range(0)));
  std::mt19937 rng(99u);
  std::uniform_real_distribution<double> pos(-10.0, 10.0);
  std::vector<Vec2> queries(256);
  for (Vec2& q : queries) q = {pos(rng) + 20.0, pos(rng)};
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(path.project(queries[i++ % queries.size()]));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_PathProject)->Range(8, 512)->Complexity(benchmark::oN);

void BM_PathPointAtArclength(benchmark::State& state) {
  const PathParam path = winding_path(128);
  const double total = path.total_length();
  double s = 0.0;
  for (auto _ : state) {
    s += 1.7;
    if (s > total) s -= total;
    benchmark::DoNotOptimize(path.point_at_arclength(s));
  }
}
BENCHMARK(BM_PathPointAtArclength);

void BM_BoxPolygonOverlap(benchmark::State& state) {
  const std::vector<Vec2> ring = {{-2.0, -2.0}, {2.0, -2.0}, {2.0, 2.0}, {-2.0, 2.0}};
  const auto pairs = box_pairs(6.0, 512);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(driveaudit::box_intersects_polygon(pairs[i++ % pairs.size()].first, ring));
  }
}
BENCHMARK(BM_BoxPolygonOverlap);

}  // namespace

BENCHMARK_MAIN();

#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "gridseek/grid.hpp"
#include "gridseek/world.hpp"

namespace gridseek::mapping {

enum class CellState : uint8_t { kUnknown = 0, kFree = 1, kOccupied = 2 };

// Everything the agent knows about an instance it has seen.
struct KnownInstance {
    int id = -1;
    std::string category;
    world::ArtState state = world::ArtState::kNa;
    Cell position;
    std::set<Cell> cells;  // observed footprint cells (empty for items)
    bool is_door = false;
};

// Tri-state bird's-eye-view occupancy belief plus a semantic layer keyed by
// instance id. Latest observation wins per cell, which is what lets an
// opened door's cells flip from occupied to free.
class BevMap {
public:
    BevMap() = default;
    BevMap(int width, int height, double resolution);

    int width() const { return occupancy_.width(); }
    int height() const { return occupancy_.height(); }
    double resolution() const { return resolution_; }

    CellState at(Cell c) const { return occupancy_.at(c); }
    CellState at(int x, int y) const { return occupancy_.at(x, y); }
    bool in_bounds(Cell c) const { return occupancy_.in_bounds(c); }
    int cell_instance(Cell c) const { return semantic_.at(c); }

    const std::map<int, KnownInstance>& instances() const { return instances_; }
    const KnownInstance* instance(int id) const;

    int unknown_count() const { return unknown_count_; }

    void set_cell(Cell c, CellState s, int instance_id = -1);
    void note_instance(const world::InstanceObs& obs, bool is_door);

    const Grid<CellState>& occupancy() const { return occupancy_; }

private:
    Grid<CellState> occupancy_;
    Grid<int> semantic_;
    std::map<int, KnownInstance> instances_;
    double resolution_ = kDefaultResolution;
    int unknown_count_ = 0;
};

// Poses each instance was detected from; append-only within an episode.
class ViewpointIndex {
public:
    void record(int instance_id, const Pose& pose);
    const std::vector<Pose>& viewpoints(int instance_id) const;
    bool seen(int instance_id) const { return index_.count(instance_id) > 0; }
    bool seen_category(const BevMap& bev, const std::string& category) const;

private:
    std::map<int, std::vector<Pose>> index_;
};

// Folds one observation into the belief.
void integrate(BevMap& bev, ViewpointIndex& vpi, const world::Observation& obs,
               const std::set<int>& door_ids);

enum class FrontierKind { kInterior, kOutward };

struct Frontier {
    int id = -1;
    std::vector<Cell> cells;  // 8-connected free cells bordering unknown
    Cell centroid;
    FrontierKind kind = FrontierKind::kOutward;
    int room_id = -1;  // filled by scenegraph matching
};

struct FrontierConfig {
    int min_cluster_cells = 3;
};

// Free cells 4-adjacent to unknown, clustered by 8-connectivity. A frontier
// is interior when every unknown pocket it touches is sealed off from the
// grid border (the pocket would vanish under hole-filling of the known
// region); it is outward when any pocket reaches the border through unknown
// cells.
std::vector<Frontier> detect_frontiers(const BevMap& bev, const FrontierConfig& config = {});

}  // namespace gridseek::mapping

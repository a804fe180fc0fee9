#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "gridseek/grid.hpp"
#include "gridseek/rng.hpp"

namespace gridseek::world {

enum class ArtState { kNa, kOpen, kClosed };

std::string to_string(ArtState s);
ArtState art_state_from_string(const std::string& s);

enum class VolumeClass { kSmall, kLarge };

struct Door {
    int id = -1;
    Cell center;
    ArtState state = ArtState::kClosed;
    std::vector<Cell> blocked_cells;  // impassable while closed
};

enum class Relation { kNone, kOnTop, kInside };

struct ObjectSpec {
    int id = -1;
    std::string category;
    Cell position;
    std::vector<Cell> footprint;
    bool openable = false;
    ArtState state = ArtState::kNa;
    std::vector<int> contains;
    Relation parent_relation = Relation::kNone;
    int parent_id = -1;
    VolumeClass volume = VolumeClass::kLarge;
};

struct GtRoom {
    int id = -1;
    std::string label;
    std::vector<Cell> cells;
};

struct WorldSpec {
    int width = 0;
    int height = 0;
    double resolution = kDefaultResolution;
    std::set<Cell> walls;
    std::vector<Door> doors;
    std::vector<GtRoom> gt_rooms;
    std::vector<ObjectSpec> objects;
    Pose agent_start;

    const ObjectSpec* find_object(int id) const;
    const Door* find_door(int id) const;
    int gt_room_of(Cell c) const;  // -1 for walls / door cells
};

// Prior relation tables steering procedural object placement. room_object
// maps a room label to per-category placement weights for furniture;
// on_top/inside list admissible (supporter, supported) category pairs.
struct PriorTable {
    std::map<std::string, std::map<std::string, double>> room_object;
    std::set<std::pair<std::string, std::string>> on_top;
    std::set<std::pair<std::string, std::string>> inside;

    bool is_container(const std::string& category) const;
    VolumeClass volume_of(const std::string& category) const;
    void validate() const;  // throws on negative weights / size-order violations
};

PriorTable default_priors();

struct LayoutConfig {
    int width = 96;
    int height = 96;
    int min_rooms = 3;
    int max_rooms = 6;
    int min_room_side = 40;  // interior cells
    int door_width = 9;      // cells
    bool corridor = false;
    int max_attempts = 50;
    int min_furniture_per_room = 1;
    int max_furniture_per_room = 3;
    PriorTable priors = default_priors();
};

struct EnrichConfig {
    int max_items_per_furniture = 2;
    double item_probability = 0.7;
    int max_placement_attempts = 200;
};

struct Episode {
    WorldSpec world;
    std::string target_category;
    uint64_t seed = 0;
};

// Procedural rectilinear floor plan: BSP-split rooms, one door per pair of
// rooms sharing a wall run long enough to carve one, optional corridor
// strip. Furniture is placed per room from the prior table's room_object
// weights. Throws std::runtime_error (naming the seed) if no valid layout
// is found within config.max_attempts.
WorldSpec generate_layout(uint64_t seed, const LayoutConfig& config);

// Draws extra objects on top of / inside the layout furniture per the prior
// table, then draws a target category and a start pose such that a target
// instance is reachable (closed doors count as openable) and no instance is
// visible from the start. Throws std::runtime_error on exhaustion.
Episode enrich_episode(WorldSpec layout, const PriorTable& priors, uint64_t seed,
                       const EnrichConfig& config = {});

enum class ActionType { kForward, kTurnLeft, kTurnRight, kOpen, kClose, kDone };

struct LowLevelAction {
    ActionType type = ActionType::kForward;
    double angle = 0.0;  // radians, for turns
    int target_id = -1;  // for open/close
};

struct CellObs {
    Cell cell;
    bool occupied = false;
    int instance = -1;  // primary occupant (furniture/door), -1 for plain floor or wall
};

struct InstanceObs {
    int id = -1;
    std::string category;
    ArtState state = ArtState::kNa;
    Cell position;
    int visible_cells = 0;
};

struct Observation {
    Pose pose;
    std::vector<CellObs> cells;
    std::vector<InstanceObs> instances;
};

struct StepResult {
    int cost = 0;
    bool moved = false;        // forward only
    bool action_ok = true;     // false: blocked move or failed open/close
};

struct SenseConfig {
    double max_range_m = 5.0;
    double fov_rad = 120.0 * M_PI / 180.0;
    int min_cells_small = 1;
    int min_cells_large = 2;
};

// Mutable episode state. The object set is fixed at construction; only
// articulation states and the agent pose change.
class WorldState {
public:
    explicit WorldState(Episode episode);

    const Episode& episode() const { return episode_; }
    const WorldSpec& spec() const { return episode_.world; }
    const Pose& pose() const { return pose_; }
    bool done() const { return done_; }

    ArtState object_state(int id) const;
    bool is_open(int id) const { return object_state(id) == ArtState::kOpen; }

    // True if the cell blocks motion and sight: wall, closed-door cell, or
    // object footprint.
    bool occupied(Cell c) const;

    StepResult step(const LowLevelAction& action, double interaction_radius_m = 1.5);
    Observation sense(const SenseConfig& config = {}) const;

    // Observation as seen from an arbitrary pose; fov_rad >= 2*pi gives a
    // full panoramic sweep (used for start-visibility rejection).
    Observation sense_from(const Pose& pose, const SenseConfig& config) const;

private:
    Episode episode_;
    Pose pose_;
    bool done_ = false;
    std::map<int, ArtState> states_;        // doors and openable objects
    Grid<int> static_instance_;             // cell -> furniture/door id (-1 none)
    Grid<uint8_t> static_occupied_;         // walls + object footprints (doors excluded)

    bool door_cell_closed(Cell c) const;
};

// Free-space reachability with closed doors treated as openable; used by
// episode validation and tests.
Grid<uint8_t> reachable_mask(const WorldSpec& spec, Cell start);

}  // namespace gridseek::world
